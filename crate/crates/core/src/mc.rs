//! Seeded Monte-Carlo experiments over conservative reversible circuits.
//!
//! Every trial derives its own generator from `seed ^ trial_index`, so
//! tallies are independent of execution order and any two runs with the
//! same config are bit-identical. One consequence of the xor derivation:
//! seeds differing only in bits below the trial count permute the same set
//! of trial streams, so their *aggregates* coincide — pick well-separated
//! seeds for independent experiments.
//!
//! Random conservative evolutions are realized as random Fredkin circuits;
//! the exact bounds being tested hold for *any* injective conservative map,
//! so they are valid regardless of how circuits are sampled.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bitstring::BitString;
use crate::combin::{
    clausius_point_ratio, clausius_tail_ratio, kelvin_ratio, rational_to_f64, CombinError,
    ExactRational,
};
use crate::revcircuit::{weight_couple, Circuit, CircuitError, Gate, WeightCouple};

/// Margin on stochastic comparisons: ≈6e-5 false-failure rate per check.
pub const SIGMA_MARGIN: f64 = 4.0;

/// SplitMix64: a counter-based generator (Steele, Lea, Flood 2014). The
/// state advances by a fixed odd constant and every output is a finalizer
/// of the state alone, which makes seeding from `seed ^ index` cheap and
/// collision-free within a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`, unbiased by rejection.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = (u64::MAX / bound) * bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum McError {
    #[error("random Fredkin circuits need at least 3 wires, got {0}")]
    WidthTooSmall(usize),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("fixed circuit has width {actual} but the experiment needs width {expected}")]
    CircuitWidthMismatch { expected: usize, actual: usize },
    #[error("conservation violated at trial {trial}: {input} -> {output}")]
    ConservationViolated {
        trial: u64,
        input: String,
        output: String,
    },
    #[error("parameters out of range: {0}")]
    ParameterRange(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Combin(#[from] CombinError),
}

/// Uniformly random string whose halves carry exactly the given weights.
pub fn sample_couple_string(couple: &WeightCouple, rng: &mut SplitMix64) -> BitString {
    let mut bits = sample_weight_bits(couple.half_len, couple.left, rng);
    bits.extend(sample_weight_bits(couple.half_len, couple.right, rng));
    BitString::from_bits(bits)
}

/// Uniformly random length-`n` bit vector of weight `k` (partial
/// Fisher-Yates over the positions).
fn sample_weight_bits(n: usize, k: usize, rng: &mut SplitMix64) -> Vec<bool> {
    debug_assert!(k <= n);
    let mut positions: Vec<usize> = (0..n).collect();
    let mut bits = vec![false; n];
    for i in 0..k {
        let j = i + rng.next_below((n - i) as u64) as usize;
        positions.swap(i, j);
        bits[positions[i]] = true;
    }
    bits
}

/// Uniformly random string of the given length and total weight.
pub fn sample_weight_string(len: usize, weight: usize, rng: &mut SplitMix64) -> BitString {
    BitString::from_bits(sample_weight_bits(len, weight, rng))
}

fn sample_distinct_wires<const N: usize>(width: usize, rng: &mut SplitMix64) -> [usize; N] {
    debug_assert!(N <= width);
    let mut wires = [0usize; N];
    for i in 0..N {
        let mut w = rng.next_below((width - i) as u64) as usize;
        // Map the draw past the already-taken wires, smallest first.
        let mut taken: Vec<usize> = wires[..i].to_vec();
        taken.sort_unstable();
        for t in taken {
            if w >= t {
                w += 1;
            }
        }
        wires[i] = w;
    }
    wires
}

/// `gate_count` Fredkin gates on uniformly random distinct wire triples.
/// Conservative by construction.
pub fn sample_fredkin_circuit(
    width: usize,
    gate_count: usize,
    rng: &mut SplitMix64,
) -> Result<Circuit, McError> {
    if width < 3 {
        return Err(McError::WidthTooSmall(width));
    }
    let gates = (0..gate_count)
        .map(|_| {
            let [control, a, b] = sample_distinct_wires::<3>(width, rng);
            Gate::Fredkin {
                control,
                swaps: [a, b],
            }
        })
        .collect();
    Ok(Circuit::new(width, gates).expect("sampled wires are in range and distinct"))
}

/// Random circuit over the full gate set (used by the reversibility
/// verification suites; not conservative in general).
pub fn sample_mixed_circuit(width: usize, gate_count: usize, rng: &mut SplitMix64) -> Circuit {
    assert!(width >= 1);
    let kinds = match width {
        1 => 1,
        2 => 2,
        _ => 4,
    };
    let gates = (0..gate_count)
        .map(|_| match rng.next_below(kinds) {
            0 => {
                let [target] = sample_distinct_wires::<1>(width, rng);
                Gate::Not { target }
            }
            1 => {
                let [control, target] = sample_distinct_wires::<2>(width, rng);
                Gate::Cnot { control, target }
            }
            2 => {
                let [c1, c2, target] = sample_distinct_wires::<3>(width, rng);
                Gate::Toffoli {
                    controls: [c1, c2],
                    target,
                }
            }
            _ => {
                let [control, a, b] = sample_distinct_wires::<3>(width, rng);
                Gate::Fredkin {
                    control,
                    swaps: [a, b],
                }
            }
        })
        .collect();
    Circuit::new(width, gates).expect("sampled wires are in range and distinct")
}

/// Which circuit each trial runs.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitSpec {
    /// A fresh random all-Fredkin circuit per trial.
    RandomFredkin { gate_count: usize },
    /// The same explicit circuit for every trial.
    Fixed(Circuit),
}

impl CircuitSpec {
    pub fn describe(&self) -> String {
        match self {
            CircuitSpec::RandomFredkin { gate_count } => {
                format!("random-fredkin({gate_count} gates)")
            }
            CircuitSpec::Fixed(c) => format!("fixed({} gates)", c.gate_count()),
        }
    }
}

/// One couple-transition experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub source: WeightCouple,
    pub circuit: CircuitSpec,
    pub trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    fn validate(&self) -> Result<(), McError> {
        if self.trials == 0 {
            return Err(McError::NoTrials);
        }
        let width = 2 * self.source.half_len;
        match &self.circuit {
            CircuitSpec::RandomFredkin { .. } if width < 3 => Err(McError::WidthTooSmall(width)),
            CircuitSpec::Fixed(c) if c.width() != width => Err(McError::CircuitWidthMismatch {
                expected: width,
                actual: c.width(),
            }),
            _ => Ok(()),
        }
    }
}

/// Tally for one observed target couple, with the exact bounds attached.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupleStat {
    pub count: u64,
    pub frequency: f64,
    /// `sqrt(f(1-f)/trials)`.
    pub std_error: f64,
    /// Exact class-size ratio: hard bound on the expected frequency.
    pub point_bound: ExactRational,
    /// Exact bound on reaching at least this imbalance in the source's
    /// loaded direction.
    pub tail_bound: ExactRational,
    /// `frequency <= point_bound + SIGMA_MARGIN · std_error`.
    pub within_bound: bool,
}

/// Result of [`estimate_transition`]: per-couple tallies in couple order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionStats {
    pub config: TrialConfig,
    pub per_couple: BTreeMap<WeightCouple, CoupleStat>,
}

impl TransitionStats {
    pub fn all_within_bound(&self) -> bool {
        self.per_couple.values().all(|s| s.within_bound)
    }
}

/// Runs the experiment: fresh input (and fresh circuit, when random) per
/// trial, output couples tallied against the exact transition bounds.
/// Fully reproducible from the seed.
pub fn estimate_transition(config: &TrialConfig) -> Result<TransitionStats, McError> {
    config.validate()?;
    let source = config.source;
    let mut tally: BTreeMap<WeightCouple, u64> = BTreeMap::new();

    for trial in 0..config.trials {
        let mut rng = SplitMix64::new(config.seed ^ trial);
        let sampled;
        let circuit = match &config.circuit {
            CircuitSpec::RandomFredkin { gate_count } => {
                sampled = sample_fredkin_circuit(2 * source.half_len, *gate_count, &mut rng)?;
                &sampled
            }
            CircuitSpec::Fixed(c) => c,
        };
        let input = sample_couple_string(&source, &mut rng);
        let output = circuit.run(&input)?;
        if output.weight() != input.weight() {
            return Err(McError::ConservationViolated {
                trial,
                input: input.to_string(),
                output: output.to_string(),
            });
        }
        let couple = weight_couple(&output).expect("outputs have even length");
        *tally.entry(couple).or_insert(0) += 1;
    }

    let trials = config.trials;
    let mut per_couple = BTreeMap::new();
    for (couple, count) in tally {
        let frequency = count as f64 / trials as f64;
        let std_error = (frequency * (1.0 - frequency) / trials as f64).sqrt();
        let point_bound = clausius_point_ratio(&source, &couple)?;
        let tail_bound = clausius_tail_ratio(&source, directed_delta(&source, &couple))?;
        let within_bound = frequency <= rational_to_f64(&point_bound) + SIGMA_MARGIN * std_error;
        per_couple.insert(
            couple,
            CoupleStat {
                count,
                frequency,
                std_error,
                point_bound,
                tail_bound,
                within_bound,
            },
        );
    }
    Ok(TransitionStats {
        config: config.clone(),
        per_couple,
    })
}

/// How many bits the target moves beyond the source imbalance, measured in
/// the source's loaded direction; 0 for milder or opposite-side targets.
fn directed_delta(source: &WeightCouple, target: &WeightCouple) -> usize {
    let load_left = source.left >= source.right;
    let directed = if load_left {
        target.imbalance() - source.imbalance().abs()
    } else {
        -target.imbalance() - source.imbalance().abs()
    };
    (directed.max(0) as usize) / 2
}

/// One prefix-concentration experiment: how often outputs carry an all-ones
/// prefix of the chosen length.
#[derive(Debug, Clone, PartialEq)]
pub struct KelvinConfig {
    pub total_len: usize,
    pub prefix_len: usize,
    pub weight: usize,
    pub circuit: CircuitSpec,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KelvinStats {
    pub config: KelvinConfig,
    pub hits: u64,
    pub frequency: f64,
    pub std_error: f64,
    /// Exact bound `binom(N-n, w-n) / binom(N, w)`.
    pub bound: ExactRational,
    pub within_bound: bool,
}

/// Estimates the frequency of outputs whose first `prefix_len` positions
/// are all 1 (and whose remaining weight is `weight - prefix_len`), against
/// the exact concentration bound.
pub fn estimate_kelvin(config: &KelvinConfig) -> Result<KelvinStats, McError> {
    if config.trials == 0 {
        return Err(McError::NoTrials);
    }
    if config.prefix_len > config.total_len || config.weight > config.total_len {
        return Err(McError::ParameterRange(format!(
            "need prefix {} <= N {} and weight {} <= N",
            config.prefix_len, config.total_len, config.weight
        )));
    }
    match &config.circuit {
        CircuitSpec::RandomFredkin { .. } if config.total_len < 3 => {
            return Err(McError::WidthTooSmall(config.total_len))
        }
        CircuitSpec::Fixed(c) if c.width() != config.total_len => {
            return Err(McError::CircuitWidthMismatch {
                expected: config.total_len,
                actual: c.width(),
            })
        }
        _ => {}
    }

    let bound = kelvin_ratio(
        config.total_len as u64,
        config.prefix_len as u64,
        config.weight as u64,
    )?;

    let mut hits = 0u64;
    for trial in 0..config.trials {
        let mut rng = SplitMix64::new(config.seed ^ trial);
        let sampled;
        let circuit = match &config.circuit {
            CircuitSpec::RandomFredkin { gate_count } => {
                sampled = sample_fredkin_circuit(config.total_len, *gate_count, &mut rng)?;
                &sampled
            }
            CircuitSpec::Fixed(c) => c,
        };
        let input = sample_weight_string(config.total_len, config.weight, &mut rng);
        let output = circuit.run(&input)?;
        if output.weight() != input.weight() {
            return Err(McError::ConservationViolated {
                trial,
                input: input.to_string(),
                output: output.to_string(),
            });
        }
        let prefix_ones = output.as_slice()[..config.prefix_len].iter().all(|&b| b);
        let rest_weight = output.as_slice()[config.prefix_len..]
            .iter()
            .filter(|&&b| b)
            .count();
        if prefix_ones
            && config.weight >= config.prefix_len
            && rest_weight == config.weight - config.prefix_len
        {
            hits += 1;
        }
    }

    let frequency = hits as f64 / config.trials as f64;
    let std_error = (frequency * (1.0 - frequency) / config.trials as f64).sqrt();
    let within_bound = frequency <= rational_to_f64(&bound) + SIGMA_MARGIN * std_error;
    Ok(KelvinStats {
        config: config.clone(),
        hits,
        frequency,
        std_error,
        bound,
        within_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn couple(n: usize, left: usize, right: usize) -> WeightCouple {
        WeightCouple::new(n, left, right).unwrap()
    }

    #[test]
    fn splitmix_is_deterministic_and_seed_sensitive() {
        let a: Vec<u64> = {
            let mut rng = SplitMix64::new(42);
            (0..8).map(|_| rng.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut rng = SplitMix64::new(42);
            (0..8).map(|_| rng.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut rng = SplitMix64::new(43);
            (0..8).map(|_| rng.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn singleton_couple_has_one_string() {
        let mut rng = SplitMix64::new(1);
        let s = sample_couple_string(&couple(4, 4, 0), &mut rng);
        assert_eq!(s.to_string(), "11110000");
        let s = sample_couple_string(&couple(3, 0, 0), &mut rng);
        assert_eq!(s.to_string(), "000000");
    }

    #[test]
    fn sampled_strings_have_the_requested_couple() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..200 {
            let c = couple(5, 2, 4);
            let s = sample_couple_string(&c, &mut rng);
            assert_eq!(weight_couple(&s).unwrap(), c);
        }
    }

    #[test]
    fn fredkin_sampler_is_structural_conservative() {
        use crate::revcircuit::{check_conservative, ConservativeMode};
        let mut rng = SplitMix64::new(3);
        let c = sample_fredkin_circuit(8, 50, &mut rng).unwrap();
        assert_eq!(c.gate_count(), 50);
        assert!(check_conservative(&c, ConservativeMode::Structural, 20)
            .unwrap()
            .is_pass());

        let id = sample_fredkin_circuit(5, 0, &mut rng).unwrap();
        assert_eq!(id.gate_count(), 0);

        assert_eq!(
            sample_fredkin_circuit(2, 4, &mut rng).unwrap_err(),
            McError::WidthTooSmall(2)
        );
    }

    #[test]
    fn same_seed_same_circuit() {
        let a = sample_fredkin_circuit(8, 30, &mut SplitMix64::new(5)).unwrap();
        let b = sample_fredkin_circuit(8, 30, &mut SplitMix64::new(5)).unwrap();
        let c = sample_fredkin_circuit(8, 30, &mut SplitMix64::new(6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn identity_circuit_keeps_all_mass_on_the_source() {
        let config = TrialConfig {
            source: couple(3, 2, 1),
            circuit: CircuitSpec::Fixed(Circuit::identity(6)),
            trials: 500,
            seed: 0,
        };
        let stats = estimate_transition(&config).unwrap();
        assert_eq!(stats.per_couple.len(), 1);
        let stat = &stats.per_couple[&couple(3, 2, 1)];
        assert_eq!(stat.count, 500);
        assert_eq!(stat.frequency, 1.0);
        assert!(stat.within_bound);
        assert!(stats.all_within_bound());
    }

    #[test]
    fn estimate_transition_is_reproducible() {
        let config = TrialConfig {
            source: couple(4, 2, 2),
            circuit: CircuitSpec::RandomFredkin { gate_count: 24 },
            trials: 2000,
            seed: 77,
        };
        let a = estimate_transition(&config).unwrap();
        let b = estimate_transition(&config).unwrap();
        assert_eq!(a, b);

        // Seeds differing only below the trial count permute the same trial
        // set; a well-separated seed gives genuinely different trials.
        let different = TrialConfig {
            seed: 0x5EED_5EED_0000_0000,
            ..config
        };
        let c = estimate_transition(&different).unwrap();
        assert_ne!(a.per_couple, c.per_couple);
    }

    #[test]
    fn counts_sum_to_trials_and_frequencies_to_one() {
        let config = TrialConfig {
            source: couple(4, 3, 1),
            circuit: CircuitSpec::RandomFredkin { gate_count: 40 },
            trials: 5000,
            seed: 12,
        };
        let stats = estimate_transition(&config).unwrap();
        let total: u64 = stats.per_couple.values().map(|s| s.count).sum();
        assert_eq!(total, 5000);
        let freq_sum: f64 = stats.per_couple.values().map(|s| s.frequency).sum();
        assert!((freq_sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_conservative_fixed_circuit_aborts() {
        let not_gate = Circuit::new(4, vec![Gate::Not { target: 0 }]).unwrap();
        let config = TrialConfig {
            source: couple(2, 1, 1),
            circuit: CircuitSpec::Fixed(not_gate),
            trials: 10,
            seed: 0,
        };
        assert!(matches!(
            estimate_transition(&config).unwrap_err(),
            McError::ConservationViolated { .. }
        ));
    }

    #[test]
    fn kelvin_trivial_cases() {
        // n = 0: the empty prefix constraint always holds.
        let stats = estimate_kelvin(&KelvinConfig {
            total_len: 8,
            prefix_len: 0,
            weight: 3,
            circuit: CircuitSpec::RandomFredkin { gate_count: 20 },
            trials: 200,
            seed: 4,
        })
        .unwrap();
        assert_eq!(stats.frequency, 1.0);
        assert!(stats.within_bound);

        // w < n: conservativity makes the prefix impossible.
        let stats = estimate_kelvin(&KelvinConfig {
            total_len: 8,
            prefix_len: 4,
            weight: 2,
            circuit: CircuitSpec::RandomFredkin { gate_count: 20 },
            trials: 200,
            seed: 4,
        })
        .unwrap();
        assert_eq!(stats.hits, 0);
        assert_eq!(stats.bound, ExactRational::zero());
        assert!(stats.within_bound);
    }

    #[test]
    fn directed_delta_measures_loaded_direction() {
        let src = couple(4, 3, 1);
        assert_eq!(directed_delta(&src, &couple(4, 4, 0)), 1);
        assert_eq!(directed_delta(&src, &couple(4, 3, 1)), 0);
        assert_eq!(directed_delta(&src, &couple(4, 1, 3)), 0);

        let balanced = couple(4, 2, 2);
        assert_eq!(directed_delta(&balanced, &couple(4, 4, 0)), 2);
        assert_eq!(directed_delta(&balanced, &couple(4, 0, 4)), 0);
    }
}
