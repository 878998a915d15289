//! Exact-arithmetic invariants: the Pascal-triangle oracle for binomials,
//! Vandermonde normalization of point ratios, the exponential-decay window,
//! and the injectivity bound against brute-force transition tables.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use revlaw_core::combin::{
    binom, clausius_point_ratio, couples_with_weight, decay_rate, exhaustive_transition_table,
    kelvin_ratio, ExactRational,
};
use revlaw_core::mc::{sample_fredkin_circuit, SplitMix64};
use revlaw_core::revcircuit::WeightCouple;

/// Independent oracle: Pascal's triangle built with additions only.
fn pascal_triangle(max_n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
    for n in 1..=max_n {
        let prev = &rows[n - 1];
        let mut row = vec![BigUint::one()];
        for k in 1..n {
            row.push(&prev[k - 1] + &prev[k]);
        }
        row.push(BigUint::one());
        rows.push(row);
    }
    rows
}

fn couple(n: usize, left: usize, right: usize) -> WeightCouple {
    WeightCouple::new(n, left, right).unwrap()
}

#[test]
#[allow(clippy::needless_range_loop)] // (n, k) indexing mirrors the identity
fn binom_matches_pascal_oracle_up_to_64() {
    let triangle = pascal_triangle(64);
    for n in 0..=64usize {
        for k in 0..=n {
            assert_eq!(binom(n as u64, k as u64), triangle[n][k], "binom({n},{k})");
        }
    }
    // Pascal's rule restated directly on the implementation.
    for n in 1..=64u64 {
        for k in 1..n {
            assert_eq!(binom(n, k), binom(n - 1, k - 1) + binom(n - 1, k));
        }
    }
}

/// Sum of point ratios over all equal-weight targets equals
/// `binom(2n, W) / (binom(n,s1)·binom(n,s2))` — Vandermonde.
#[test]
fn vandermonde_normalization_all_even_n_to_32() {
    for n in (2..=32usize).step_by(2) {
        for s1 in 0..=n {
            for s2 in 0..=n {
                let source = couple(n, s1, s2);
                let total = s1 + s2;
                let mut sum = ExactRational::zero();
                for target in couples_with_weight(n, total) {
                    sum += clausius_point_ratio(&source, &target).unwrap();
                }
                let expected = ExactRational::new(
                    binom(2 * n as u64, total as u64),
                    binom(n as u64, s1 as u64) * binom(n as u64, s2 as u64),
                );
                assert_eq!(sum, expected, "n={n} source=({s1},{s2})");
            }
        }
    }
}

/// The polarization ratio decays exponentially: rate bounded below and the
/// exact ratio strictly decreasing over the whole even range.
#[test]
fn polarization_ratio_decays_monotonically() {
    let mut previous: Option<ExactRational> = None;
    for n in (8..=64usize).step_by(2) {
        let source = couple(n, n / 2, n / 2);
        let target = couple(n, n, 0);
        let ratio = clausius_point_ratio(&source, &target).unwrap();
        let rate = decay_rate(&ratio, n as u64).unwrap();
        assert!(rate > 0.1, "n={n}: rate {rate}");
        if let Some(prev) = &previous {
            assert!(&ratio < prev, "n={n}: ratio not strictly decreasing");
        }
        previous = Some(ratio);
    }
}

#[test]
fn kelvin_identity_exact() {
    for total in [6u64, 16, 31] {
        for prefix in 0..=total {
            for weight in 0..=total {
                let r = kelvin_ratio(total, prefix, weight).unwrap();
                let expected = if weight < prefix {
                    BigUint::zero()
                } else {
                    binom(total - prefix, weight - prefix)
                };
                // kelvin_ratio(N,n,w) · binom(N,w) == binom(N-n, w-n)
                assert_eq!(
                    r.numer() * binom(total, weight),
                    expected * r.denom(),
                    "N={total} n={prefix} w={weight}"
                );
            }
        }
    }
}

/// Injectivity bound: no conservative circuit pushes any transition
/// frequency above the exact class-size ratio — zero tolerance, checked on
/// random Fredkin circuits up to width 16 over every source couple.
#[test]
fn exhaustive_tables_never_exceed_point_ratios() {
    let mut rng = SplitMix64::new(0xB0B);
    for width in [8usize, 12, 16] {
        let n = width / 2;
        let circuit = sample_fredkin_circuit(width, 10 * width, &mut rng).unwrap();
        for s1 in 0..=n {
            for s2 in 0..=n {
                let source = couple(n, s1, s2);
                let table = exhaustive_transition_table(&circuit, &source).unwrap();
                let total: BigUint = table.values().sum();
                assert_eq!(
                    total,
                    binom(n as u64, s1 as u64) * binom(n as u64, s2 as u64),
                    "class size mismatch"
                );
                for (target, count) in &table {
                    let bound = clausius_point_ratio(&source, target).unwrap();
                    // count/total <= num/den  <=>  count·den <= num·total
                    assert!(
                        count * bound.denom() <= bound.numer() * &total,
                        "width {width}, {source} -> {target}: {count}/{total} > {bound}"
                    );
                }
            }
        }
    }
}

/// Tail ratios dominate the summed point ratios they cover and never
/// exceed 1.
#[test]
fn tail_ratio_is_a_capped_tail_sum() {
    use revlaw_core::combin::clausius_tail_ratio;
    for n in [4usize, 7, 12] {
        for s1 in 0..=n {
            for s2 in 0..=n {
                let source = couple(n, s1, s2);
                for delta in 0..=n {
                    let tail = clausius_tail_ratio(&source, delta).unwrap();
                    assert!(tail <= ExactRational::one());
                    if delta > 0 {
                        let wider = clausius_tail_ratio(&source, delta - 1).unwrap();
                        assert!(tail <= wider, "tails must shrink as delta grows");
                    }
                }
            }
        }
    }
}
