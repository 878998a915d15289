//! Exact combinatorics for weight-couple transition bounds.
//!
//! Injectivity is the whole argument: a conservative reversible map sends
//! the `binom(n,s1)·binom(n,s2)` strings of a source couple into target
//! couples without collisions, so the fraction landing on any target couple
//! can never exceed the size ratio of the two classes. Everything here is
//! computed in exact big-integer rationals; floating point appears only at
//! the decay-rate boundary.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::revcircuit::{
    check_conservative, Circuit, ConservativeMode, ConservativeVerdict, WeightCouple,
};

/// Arbitrary-precision nonnegative count.
pub type BigCount = BigUint;

/// Exact reduced rational; all probability-role values lie in [0, 1].
pub type ExactRational = Ratio<BigUint>;

/// Widths up to this bound may be enumerated by [`exhaustive_transition_table`].
pub const MAX_TABLE_WIDTH: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CombinError {
    #[error("weight couples have different half-lengths ({0} vs {1})")]
    HalfLenMismatch(usize, usize),
    #[error(
        "transition does not conserve weight: source {source_couple} has total {source_weight}, \
         target {target_couple} has total {target_weight}"
    )]
    WeightSumMismatch {
        source_couple: WeightCouple,
        target_couple: WeightCouple,
        source_weight: usize,
        target_weight: usize,
    },
    #[error("parameters out of range: {0}")]
    ParameterRange(String),
    #[error("probability is zero: the decay rate is infinite")]
    ZeroProbability,
    #[error("decay rate needs a probability in (0, 1], got {0}")]
    NotAProbability(String),
    #[error("circuit width {width} does not match couple half-length {half_len}")]
    WidthCoupleMismatch { width: usize, half_len: usize },
    #[error("width {width} exceeds the exhaustive table bound {bound}")]
    WidthExceedsBound { width: usize, bound: usize },
    #[error("circuit is not conservative: {input} -> {output} changes the weight")]
    NotConservative { input: String, output: String },
}

/// Exact binomial coefficient; 0 when `k > n`.
pub fn binom(n: u64, k: u64) -> BigCount {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut result = BigUint::one();
    for i in 0..k {
        // Exact at every step: the running product of i+1 consecutive
        // integers is divisible by (i+1)!.
        result = result * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    result
}

fn class_size(couple: &WeightCouple) -> BigCount {
    let n = couple.half_len as u64;
    binom(n, couple.left as u64) * binom(n, couple.right as u64)
}

/// Exact ratio `|target class| / |source class|` for two couples of the
/// same half-length and total weight.
///
/// For *any* injective conservative map this upper-bounds the fraction of
/// source-couple strings sent to the target couple.
pub fn clausius_point_ratio(
    source: &WeightCouple,
    target: &WeightCouple,
) -> Result<ExactRational, CombinError> {
    if source.half_len != target.half_len {
        return Err(CombinError::HalfLenMismatch(
            source.half_len,
            target.half_len,
        ));
    }
    if source.total_weight() != target.total_weight() {
        return Err(CombinError::WeightSumMismatch {
            source_couple: *source,
            target_couple: *target,
            source_weight: source.total_weight(),
            target_weight: target.total_weight(),
        });
    }
    Ok(Ratio::new(class_size(target), class_size(source)))
}

/// All couples of the given half-length and total weight, by left weight.
pub fn couples_with_weight(half_len: usize, total: usize) -> impl Iterator<Item = WeightCouple> {
    let lo = total.saturating_sub(half_len);
    let hi = half_len.min(total);
    (lo..=hi).map(move |left| WeightCouple {
        half_len,
        left,
        right: total - left,
    })
}

/// Sum of point ratios over every couple at least as imbalanced as the
/// source plus `delta_n` moved bits, loading the already-heavier half
/// (ties load the left half). Capped at 1.
pub fn clausius_tail_ratio(
    source: &WeightCouple,
    delta_n: usize,
) -> Result<ExactRational, CombinError> {
    let threshold = source.imbalance().unsigned_abs() as isize + 2 * delta_n as isize;
    let load_left = source.left >= source.right;
    tail_sum(source, |target| {
        let directed = if load_left {
            target.imbalance()
        } else {
            -target.imbalance()
        };
        directed >= threshold
    })
}

/// Symmetric variant: imbalance at least `|source imbalance| + 2·delta_n`
/// in either direction. Capped at 1.
pub fn clausius_tail_ratio_symmetric(
    source: &WeightCouple,
    delta_n: usize,
) -> Result<ExactRational, CombinError> {
    let threshold = source.imbalance().unsigned_abs() as isize + 2 * delta_n as isize;
    tail_sum(source, |target| target.imbalance().abs() >= threshold)
}

fn tail_sum(
    source: &WeightCouple,
    mut include: impl FnMut(&WeightCouple) -> bool,
) -> Result<ExactRational, CombinError> {
    let mut sum = ExactRational::zero();
    for target in couples_with_weight(source.half_len, source.total_weight()) {
        if include(&target) {
            sum += clausius_point_ratio(source, &target)?;
        }
    }
    Ok(if sum > ExactRational::one() {
        ExactRational::one()
    } else {
        sum
    })
}

/// Exact probability bound for concentrating weight on a chosen prefix:
/// `binom(N-n, w-n) / binom(N, w)`, and 0 when `w < n`.
pub fn kelvin_ratio(
    total_len: u64,
    prefix_len: u64,
    weight: u64,
) -> Result<ExactRational, CombinError> {
    if prefix_len > total_len {
        return Err(CombinError::ParameterRange(format!(
            "prefix length {prefix_len} exceeds string length {total_len}"
        )));
    }
    if weight > total_len {
        return Err(CombinError::ParameterRange(format!(
            "weight {weight} exceeds string length {total_len}"
        )));
    }
    if weight < prefix_len {
        return Ok(ExactRational::zero());
    }
    Ok(Ratio::new(
        binom(total_len - prefix_len, weight - prefix_len),
        binom(total_len, weight),
    ))
}

/// `-log2(p) / n` from the exact rational, accurate to at least 12
/// significant digits. `p == 0` is reported as [`CombinError::ZeroProbability`].
pub fn decay_rate(p: &ExactRational, n: u64) -> Result<f64, CombinError> {
    if n == 0 {
        return Err(CombinError::ParameterRange(
            "decay rate needs n >= 1".into(),
        ));
    }
    if p.numer().is_zero() {
        return Err(CombinError::ZeroProbability);
    }
    if p > &ExactRational::one() {
        return Err(CombinError::NotAProbability(p.to_string()));
    }
    Ok(-log2_rational(p) / n as f64)
}

/// `log2` of a positive rational, with the near-1 cancellation handled via
/// `ln_1p` so the relative error stays near machine precision everywhere.
pub fn log2_rational(r: &ExactRational) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    assert!(!num.is_zero(), "log2 of zero");
    if num == den {
        return 0.0;
    }
    if num < den {
        log2_ratio_below_one(num, den)
    } else {
        -log2_ratio_below_one(den, num)
    }
}

fn log2_ratio_below_one(num: &BigUint, den: &BigUint) -> f64 {
    debug_assert!(num < den && !num.is_zero());
    // p >= 1/2: log2(p) = ln(1 - (den-num)/den) / ln 2 without cancellation.
    if &(num << 1u8) >= den {
        let delta = den - num;
        let t = big_ratio_f64(&delta, den);
        return (-t).ln_1p() / std::f64::consts::LN_2;
    }
    // p < 1/2: |log2 p| >= 1, so a straight fixed-point quotient is accurate.
    let shift = den.bits() + 64;
    let q = (num << shift) / den;
    log2_biguint(&q) - shift as f64
}

/// `a / b` as `f64` for `a <= b`, accurate to ~2^-60 relative error.
fn big_ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let shift = (b.bits() - a.bits()) + 64;
    let q = (a << shift) / b;
    let q = q.to_u128().expect("quotient fits 2^66") as f64;
    q * (-(shift as f64)).exp2()
}

fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 63 {
        return (x.to_u64().expect("fits u64") as f64).log2();
    }
    let shift = bits - 63;
    let top = (x >> shift).to_u64().expect("top 63 bits fit");
    (top as f64).log2() + shift as f64
}

/// A positive rational as `f64` (0.0 on underflow, `inf` on overflow).
pub fn rational_to_f64(r: &ExactRational) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    if num.is_zero() {
        return 0.0;
    }
    let num_bits = num.bits() as i64;
    let den_bits = den.bits() as i64;
    let shift = den_bits - num_bits + 64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q = q.to_u128().expect("quotient fits 2^66") as f64;
    q * (-(shift as f64)).exp2()
}

/// Brute-force transition tally: runs the circuit on *every* string of the
/// source couple and counts the output couples. The circuit must be
/// conservative (verified exhaustively here) and no wider than
/// [`MAX_TABLE_WIDTH`].
///
/// Total count equals `binom(n,s1)·binom(n,s2)`; dividing each tally by it
/// gives exact transition frequencies to compare against
/// [`clausius_point_ratio`].
pub fn exhaustive_transition_table(
    circuit: &Circuit,
    source: &WeightCouple,
) -> Result<BTreeMap<WeightCouple, BigCount>, CombinError> {
    let n = source.half_len;
    if circuit.width() != 2 * n {
        return Err(CombinError::WidthCoupleMismatch {
            width: circuit.width(),
            half_len: n,
        });
    }
    if circuit.width() > MAX_TABLE_WIDTH {
        return Err(CombinError::WidthExceedsBound {
            width: circuit.width(),
            bound: MAX_TABLE_WIDTH,
        });
    }
    match check_conservative(circuit, ConservativeMode::Exhaustive, MAX_TABLE_WIDTH)
        .expect("width checked above")
    {
        ConservativeVerdict::Pass => {}
        ConservativeVerdict::Fail { input, output } => {
            return Err(CombinError::NotConservative {
                input: input.to_string(),
                output: output.to_string(),
            })
        }
    }

    let half_mask: u64 = (1 << n) - 1;
    let mut tally: BTreeMap<WeightCouple, u64> = BTreeMap::new();
    for left in weight_masks(n, source.left) {
        for right in weight_masks(n, source.right) {
            let state = left | (right << n);
            let out = circuit.run_u64(state);
            let couple = WeightCouple {
                half_len: n,
                left: (out & half_mask).count_ones() as usize,
                right: (out >> n).count_ones() as usize,
            };
            *tally.entry(couple).or_insert(0) += 1;
        }
    }
    Ok(tally
        .into_iter()
        .map(|(couple, count)| (couple, BigUint::from(count)))
        .collect())
}

/// All `n`-bit masks of weight `k`, ascending (Gosper's hack).
pub fn weight_masks(n: usize, k: usize) -> impl Iterator<Item = u64> {
    assert!(n <= 63 && k <= n);
    let limit: u64 = 1 << n;
    let mut next: Option<u64> = Some(if k == 0 { 0 } else { (1 << k) - 1 });
    std::iter::from_fn(move || {
        let current = next.take().filter(|&m| m < limit)?;
        if current != 0 {
            let carry = current & current.wrapping_neg();
            let ripple = current + carry;
            next = Some((((ripple ^ current) >> 2) / carry) | ripple);
        }
        Some(current)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revcircuit::Gate;

    fn couple(n: usize, left: usize, right: usize) -> WeightCouple {
        WeightCouple::new(n, left, right).unwrap()
    }

    fn ratio(num: u64, den: u64) -> ExactRational {
        Ratio::new(BigUint::from(num), BigUint::from(den))
    }

    #[test]
    fn binom_small_values() {
        assert_eq!(binom(4, 2), BigUint::from(6u32));
        assert_eq!(binom(4, 5), BigUint::zero());
        assert_eq!(binom(0, 0), BigUint::one());
        assert_eq!(
            binom(64, 32),
            "1832624140942590534".parse::<BigUint>().unwrap()
        );
    }

    #[test]
    fn point_ratio_matches_hand_computation() {
        let r = clausius_point_ratio(&couple(4, 2, 2), &couple(4, 3, 1)).unwrap();
        assert_eq!(r, ratio(4, 9));

        let r = clausius_point_ratio(&couple(4, 2, 2), &couple(4, 2, 2)).unwrap();
        assert_eq!(r, ExactRational::one());

        let r = clausius_point_ratio(&couple(4, 2, 2), &couple(4, 4, 0)).unwrap();
        assert_eq!(r, ratio(1, 36));
    }

    #[test]
    fn point_ratio_validates_inputs() {
        assert_eq!(
            clausius_point_ratio(&couple(4, 2, 2), &couple(5, 2, 2)).unwrap_err(),
            CombinError::HalfLenMismatch(4, 5)
        );
        assert!(matches!(
            clausius_point_ratio(&couple(4, 2, 2), &couple(4, 3, 2)).unwrap_err(),
            CombinError::WeightSumMismatch { .. }
        ));
    }

    #[test]
    fn tail_ratio_examples() {
        let src = couple(4, 2, 2);
        assert_eq!(clausius_tail_ratio(&src, 0).unwrap(), ExactRational::one());
        assert_eq!(clausius_tail_ratio(&src, 1).unwrap(), ratio(17, 36));
        assert_eq!(clausius_tail_ratio(&src, 2).unwrap(), ratio(1, 36));
        // Beyond full polarization nothing is left.
        assert_eq!(clausius_tail_ratio(&src, 3).unwrap(), ExactRational::zero());
    }

    #[test]
    fn tail_loads_the_heavier_half() {
        // Source (1,3): the right half is heavier, so delta moves right.
        let src = couple(4, 1, 3);
        let expected = clausius_point_ratio(&src, &couple(4, 0, 4)).unwrap();
        assert_eq!(clausius_tail_ratio(&src, 1).unwrap(), expected);
    }

    #[test]
    fn symmetric_tail_counts_both_directions() {
        let src = couple(4, 2, 2);
        // |imbalance| >= 2: (3,1), (4,0), (1,3), (0,4).
        let expected = ratio(17 * 2, 36);
        assert_eq!(clausius_tail_ratio_symmetric(&src, 1).unwrap(), expected);
    }

    #[test]
    fn kelvin_ratio_examples() {
        assert_eq!(kelvin_ratio(4, 2, 3).unwrap(), ratio(1, 2));
        assert_eq!(kelvin_ratio(4, 0, 3).unwrap(), ExactRational::one());
        assert_eq!(kelvin_ratio(4, 3, 2).unwrap(), ExactRational::zero());
        assert!(matches!(
            kelvin_ratio(4, 5, 2).unwrap_err(),
            CombinError::ParameterRange(_)
        ));
    }

    #[test]
    fn kelvin_identity_holds_exactly() {
        for total in [4u64, 9, 16, 33] {
            for prefix in 0..=total {
                for weight in 0..=total {
                    let r = kelvin_ratio(total, prefix, weight).unwrap();
                    let lhs = r.numer() * binom(total, weight);
                    let expected = if weight < prefix {
                        BigUint::zero()
                    } else {
                        binom(total - prefix, weight - prefix)
                    };
                    assert_eq!(lhs, expected * r.denom());
                }
            }
        }
    }

    #[test]
    fn decay_rate_examples() {
        assert_eq!(decay_rate(&ExactRational::one(), 4).unwrap(), 0.0);

        let r = decay_rate(&ratio(4, 9), 4).unwrap();
        assert!((r - 0.292_481_250_360_578).abs() < 1e-12, "{r}");

        let r = decay_rate(&ratio(1, 36), 4).unwrap();
        assert!((r - 1.292_481_250_360_578).abs() < 1e-12, "{r}");

        assert_eq!(
            decay_rate(&ExactRational::zero(), 4).unwrap_err(),
            CombinError::ZeroProbability
        );
    }

    #[test]
    fn log2_is_accurate_near_one() {
        // p = (2^200 - 1) / 2^200: log2(p) = ln(1 - 2^-200)/ln 2 ≈ -2^-200/ln 2.
        let den = BigUint::one() << 200u16;
        let num = &den - BigUint::one();
        let p = Ratio::new(num, den);
        let expected = -(2f64.powi(-200)) / std::f64::consts::LN_2;
        let got = log2_rational(&p);
        assert!(
            (got - expected).abs() <= expected.abs() * 1e-12,
            "{got} vs {expected}"
        );
    }

    #[test]
    fn rational_to_f64_spans_magnitudes() {
        assert_eq!(rational_to_f64(&ratio(1, 2)), 0.5);
        assert_eq!(rational_to_f64(&ratio(7, 1)), 7.0);
        assert_eq!(rational_to_f64(&ExactRational::zero()), 0.0);
        let tiny = Ratio::new(BigUint::one(), BigUint::one() << 100u16);
        assert!((rational_to_f64(&tiny) - 2f64.powi(-100)).abs() < 1e-45);
    }

    #[test]
    fn weight_masks_enumerate_combinations() {
        let all: Vec<u64> = weight_masks(4, 2).collect();
        assert_eq!(all, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(weight_masks(4, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(weight_masks(4, 4).collect::<Vec<_>>(), vec![0b1111]);
    }

    #[test]
    fn table_identity_circuit() {
        let table = exhaustive_transition_table(&Circuit::identity(8), &couple(4, 2, 2)).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table[&couple(4, 2, 2)], BigUint::from(36u32));
    }

    #[test]
    fn table_wire_reversal_swaps_halves() {
        // Full wire reversal out of 3-CNOT swaps: conservative by
        // enumeration even though no gate is a Fredkin.
        let mut gates = Vec::new();
        for i in 0..4 {
            let (a, b) = (i, 7 - i);
            gates.push(Gate::Cnot {
                control: a,
                target: b,
            });
            gates.push(Gate::Cnot {
                control: b,
                target: a,
            });
            gates.push(Gate::Cnot {
                control: a,
                target: b,
            });
        }
        let reversal = Circuit::new(8, gates).unwrap();
        let table = exhaustive_transition_table(&reversal, &couple(4, 3, 1)).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table[&couple(4, 1, 3)], BigUint::from(16u32));
    }

    #[test]
    fn table_rejects_non_conservative_circuits() {
        let not = Circuit::new(4, vec![Gate::Not { target: 0 }]).unwrap();
        assert!(matches!(
            exhaustive_transition_table(&not, &couple(2, 1, 1)).unwrap_err(),
            CombinError::NotConservative { .. }
        ));
    }

    #[test]
    fn table_rejects_mismatched_width() {
        assert!(matches!(
            exhaustive_transition_table(&Circuit::identity(6), &couple(4, 2, 2)).unwrap_err(),
            CombinError::WidthCoupleMismatch { .. }
        ));
    }
}
