//! From code lengths to energy statements.
//!
//! Erasing a string costs free energy; compressing first and erasing the
//! compression caps that cost at `len(code) · kT ln 2`. The honest
//! *computable* lower bound is 0 — the true one is the conditional
//! Kolmogorov complexity, which no program can certify — so brackets here
//! carry [`khat`] only as a labeled estimate, never as a certified bound.
//! Bit counts are the exact science; joules are presentation.

use thiserror::Error;

use crate::bitstring::BitString;
use crate::codec::bitio::uint_code_len;
use crate::codec::{self, CodecId, ComplexityEstimate};

/// CODATA 2018 Boltzmann constant, joules per kelvin.
pub const CODATA_BOLTZMANN: f64 = 1.380649e-23;

/// Default environmental temperature, kelvin.
pub const DEFAULT_TEMPERATURE: f64 = 300.0;

/// Default slack absorbing the additive machine constant in the
/// quasi-monotonicity diagnostic.
pub const DEFAULT_SLACK_BITS: u64 = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThermoError {
    #[error("temperature and Boltzmann constant must be positive and finite")]
    InvalidParams,
    #[error("trace is empty")]
    EmptyTrace,
    #[error("trace entries have different lengths ({0} vs {1})")]
    MixedLengths(usize, usize),
}

/// Environmental parameters for bit-to-joule conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Boltzmann constant in joules per kelvin.
    pub boltzmann: f64,
    /// Environmental temperature in kelvin.
    pub temperature: f64,
}

impl PhysicalParams {
    pub fn new(boltzmann: f64, temperature: f64) -> Result<Self, ThermoError> {
        if !(boltzmann.is_finite()
            && boltzmann > 0.0
            && temperature.is_finite()
            && temperature > 0.0)
        {
            return Err(ThermoError::InvalidParams);
        }
        Ok(Self {
            boltzmann,
            temperature,
        })
    }

    pub fn at_temperature(temperature: f64) -> Result<Self, ThermoError> {
        Self::new(CODATA_BOLTZMANN, temperature)
    }

    /// Energy per bit: `kT ln 2` in joules.
    pub fn joules_per_bit(&self) -> f64 {
        self.boltzmann * self.temperature * std::f64::consts::LN_2
    }

    /// `bits · kT ln 2`. Negative bit counts (work value) convert too.
    pub fn bits_to_joules(&self, bits: f64) -> f64 {
        bits * self.boltzmann * self.temperature * std::f64::consts::LN_2
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            boltzmann: CODATA_BOLTZMANN,
            temperature: DEFAULT_TEMPERATURE,
        }
    }
}

/// The baseline that charges every bit: `N · kT ln 2` joules.
pub fn landauer_naive(bits: u64, params: &PhysicalParams) -> f64 {
    params.bits_to_joules(bits as f64)
}

/// Bracket on the cost of erasing `S` given catalyst `X`.
///
/// `upper_bits` is certified by construction: compress with the chosen
/// codec, erase the code. `lower_bits` is 0 — the only *computable*
/// certified lower bound. `khat_estimate` travels along as the labeled
/// best-effort complexity estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBracket {
    pub s_len: usize,
    pub x_len: usize,
    pub codec: CodecId,
    pub lower_bits: u64,
    pub upper_bits: u64,
    pub lower_joules: f64,
    pub upper_joules: f64,
    pub khat_estimate: ComplexityEstimate,
    pub params: PhysicalParams,
}

/// Cost bracket for erasing `s` with catalyst `x` under the given codec.
pub fn erasure_cost(
    s: &BitString,
    x: &BitString,
    codec: CodecId,
    params: &PhysicalParams,
) -> CostBracket {
    let upper_bits = codec::code_length_bits(codec, s, x);
    CostBracket {
        s_len: s.len(),
        x_len: x.len(),
        codec,
        lower_bits: 0,
        upper_bits,
        lower_joules: params.bits_to_joules(0.0),
        upper_joules: params.bits_to_joules(upper_bits as f64),
        khat_estimate: codec::khat(s, x),
        params: *params,
    }
}

/// Estimated lower bound on the cost of computing `A -> B` given `X`.
///
/// The certified computable statement is only the clamp at zero; the
/// estimate uses `khat(A|X)`, which upper-estimates the true complexity, so
/// the reported positive number is an estimate, not a certificate. The raw
/// (unclamped) value is kept too: strongly negative raw values read as
/// potential extractable work — the all-zero string randomizing is worth
/// free energy, not costing it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputationCost {
    pub a_len: usize,
    pub b_len: usize,
    pub x_len: usize,
    pub codec: CodecId,
    pub khat_initial: ComplexityEstimate,
    pub final_code_bits: u64,
    pub raw_bits: i64,
    pub clamped_bits: u64,
    pub raw_joules: f64,
    pub clamped_joules: f64,
    pub params: PhysicalParams,
}

impl ComputationCost {
    /// What the positive number means; carried into reports.
    pub const SEMANTICS: &'static str = "estimate";
}

/// `max(0, khat(A|X) - len(C(B,X))) · kT ln 2`, with the raw difference
/// reported alongside.
pub fn computation_cost_lower(
    a: &BitString,
    b: &BitString,
    x: &BitString,
    codec: CodecId,
    params: &PhysicalParams,
) -> ComputationCost {
    let khat_initial = codec::khat(a, x);
    let final_code_bits = codec::code_length_bits(codec, b, x);
    let raw_bits = khat_initial.bits as i64 - final_code_bits as i64;
    let clamped_bits = raw_bits.max(0) as u64;
    ComputationCost {
        a_len: a.len(),
        b_len: b.len(),
        x_len: x.len(),
        codec,
        khat_initial,
        final_code_bits,
        raw_bits,
        clamped_bits,
        raw_joules: params.bits_to_joules(raw_bits as f64),
        clamped_joules: params.bits_to_joules(clamped_bits as f64),
        params: *params,
    }
}

/// One step of the quasi-monotonicity diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub khat_bits: u64,
    pub khat_codec: CodecId,
    /// Code length of this state under the requested codec (no catalyst).
    pub codec_bits: u64,
    /// `khat(state_0) - khat(state_t)`; positive means complexity dropped.
    pub drop_bits: i64,
    /// Allowed drop at step `t`: the code length of `t` plus the slack.
    pub allowance_bits: u64,
    pub flagged: bool,
}

/// Per-step complexity report over a circuit trace.
///
/// A reversible evolution can shrink the describable content of the state
/// at time `t` by at most (a description of) `t` itself plus a constant;
/// steps whose estimated drop exceeds that allowance get flagged. The whole
/// report is heuristic: compressor estimates do not inherit the
/// exact-complexity statement, and the flag text says so.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiMonotonicityReport {
    pub codec: CodecId,
    pub slack_bits: u64,
    pub steps: Vec<TraceStep>,
    pub flagged_steps: usize,
}

impl QuasiMonotonicityReport {
    pub const DISCLAIMER: &'static str =
        "heuristic diagnostic: compressor-based complexity estimates do not inherit \
         the exact-complexity drop bound";
}

/// Computes the per-step report for a trace of equal-length states.
pub fn quasi_monotonicity_report(
    trace: &[BitString],
    codec: CodecId,
    slack_bits: u64,
) -> Result<QuasiMonotonicityReport, ThermoError> {
    let first = trace.first().ok_or(ThermoError::EmptyTrace)?;
    if let Some(bad) = trace.iter().find(|s| s.len() != first.len()) {
        return Err(ThermoError::MixedLengths(first.len(), bad.len()));
    }

    let empty = BitString::new();
    let base = codec::khat(first, &empty).bits;
    let mut steps = Vec::with_capacity(trace.len());
    let mut flagged_steps = 0;
    for (t, state) in trace.iter().enumerate() {
        let estimate = codec::khat(state, &empty);
        let drop_bits = base as i64 - estimate.bits as i64;
        let allowance_bits = uint_code_len(t as u64) + slack_bits;
        let flagged = drop_bits > allowance_bits as i64;
        flagged_steps += flagged as usize;
        steps.push(TraceStep {
            step: t,
            khat_bits: estimate.bits,
            khat_codec: estimate.winning_codec,
            codec_bits: codec::code_length_bits(codec, state, &empty),
            drop_bits,
            allowance_bits,
            flagged,
        });
    }
    Ok(QuasiMonotonicityReport {
        codec,
        slack_bits,
        steps,
        flagged_steps,
    })
}
