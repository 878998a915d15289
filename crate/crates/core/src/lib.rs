//! Reversible-circuit thermodynamics toolkit.
//!
//! Three things live here and feed each other:
//!
//! * [`revcircuit`] — simulate, invert, and exhaustively verify reversible
//!   circuits built from NOT/CNOT/Toffoli/Fredkin gates, including
//!   conservativity (Hamming-weight preservation) checks.
//! * [`codec`] + [`thermo`] — injective lossless compression with side
//!   information, and the erasure/computation cost brackets it certifies:
//!   compressing first caps the erasure cost of a string at
//!   `len(code) · kT ln 2`.
//! * [`combin`] + [`mc`] — exact big-integer bounds on how much a
//!   conservative reversible map can concentrate Hamming weight (it can't,
//!   beyond counting ratios that decay like `2^(-Θ(n))`), and a seeded
//!   Monte-Carlo harness that tests those bounds on random Fredkin
//!   circuits.
//!
//! Everything is a pure function of its inputs: no global state, safe to
//! call concurrently, and every randomized result is reproducible from its
//! seed.

pub mod bitstring;
pub mod codec;
pub mod combin;
pub mod mc;
pub mod report;
pub mod revcircuit;
pub mod thermo;

pub use bitstring::BitString;
pub use codec::{CodeWord, CodecId, ComplexityEstimate};
pub use combin::{BigCount, ExactRational};
pub use revcircuit::{Circuit, Gate, WeightCouple};
pub use thermo::{CostBracket, PhysicalParams};
