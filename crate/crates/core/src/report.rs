//! Machine-readable records for CLI and demo output.
//!
//! Field order is fixed by the struct definitions and every map is a
//! `BTreeMap`, so serializing the same data twice yields identical bytes.

use num_traits::Zero;
use serde::Serialize;

use crate::codec::ComplexityEstimate;
use crate::combin::{log2_rational, rational_to_f64, ExactRational};
use crate::mc::{KelvinStats, TransitionStats};
use crate::revcircuit::WeightCouple;
use crate::thermo::{landauer_naive, ComputationCost, CostBracket, PhysicalParams};

/// Erasure-cost bracket record.
#[derive(Debug, Clone, Serialize)]
pub struct EraseRecord {
    pub s_len: usize,
    pub x_len: usize,
    pub codec: String,
    pub upper_bits: u64,
    pub lower_bits: u64,
    pub khat_bits: u64,
    pub khat_codec: String,
    pub khat_semantics: &'static str,
    pub temperature: f64,
    pub upper_joules: f64,
    pub lower_joules: f64,
    /// The every-bit-costs baseline for comparison: `len(S)` bits.
    pub naive_bits: u64,
    pub naive_joules: f64,
}

impl EraseRecord {
    pub fn from_bracket(bracket: &CostBracket) -> Self {
        EraseRecord {
            s_len: bracket.s_len,
            x_len: bracket.x_len,
            codec: bracket.codec.to_string(),
            upper_bits: bracket.upper_bits,
            lower_bits: bracket.lower_bits,
            khat_bits: bracket.khat_estimate.bits,
            khat_codec: bracket.khat_estimate.winning_codec.to_string(),
            khat_semantics: ComplexityEstimate::SEMANTICS,
            temperature: bracket.params.temperature,
            upper_joules: bracket.upper_joules,
            lower_joules: bracket.lower_joules,
            naive_bits: bracket.s_len as u64,
            naive_joules: landauer_naive(bracket.s_len as u64, &bracket.params),
        }
    }
}

/// Generalized computation-cost record.
#[derive(Debug, Clone, Serialize)]
pub struct CostRecord {
    pub a_len: usize,
    pub b_len: usize,
    pub x_len: usize,
    pub codec: String,
    pub khat_a_bits: u64,
    pub khat_a_codec: String,
    pub code_b_bits: u64,
    pub raw_bits: i64,
    pub clamped_bits: u64,
    pub raw_joules: f64,
    pub clamped_joules: f64,
    pub temperature: f64,
    pub semantics: &'static str,
}

impl CostRecord {
    pub fn from_cost(cost: &ComputationCost) -> Self {
        CostRecord {
            a_len: cost.a_len,
            b_len: cost.b_len,
            x_len: cost.x_len,
            codec: cost.codec.to_string(),
            khat_a_bits: cost.khat_initial.bits,
            khat_a_codec: cost.khat_initial.winning_codec.to_string(),
            code_b_bits: cost.final_code_bits,
            raw_bits: cost.raw_bits,
            clamped_bits: cost.clamped_bits,
            raw_joules: cost.raw_joules,
            clamped_joules: cost.clamped_joules,
            temperature: cost.params.temperature,
            semantics: ComputationCost::SEMANTICS,
        }
    }
}

/// One row of a bounds table (clausius or kelvin).
#[derive(Debug, Clone, Serialize)]
pub struct BoundsRow {
    pub n: u64,
    pub s1: u64,
    pub s2: u64,
    pub t1: u64,
    pub t2: u64,
    pub ratio_num: String,
    pub ratio_den: String,
    pub ratio_float: f64,
    /// `-log2(ratio)/n`; negative when the ratio exceeds 1, `None` when the
    /// ratio is 0 (infinite rate) or `n` is 0.
    pub rate: Option<f64>,
}

/// `-log2(ratio)/n`, the decay exponent per unit of `n`.
fn rate_per_n(ratio: &ExactRational, n: u64) -> Option<f64> {
    if ratio.is_zero() || n == 0 {
        return None;
    }
    Some(-log2_rational(ratio) / n as f64)
}

fn rate_csv(rate: Option<f64>) -> String {
    rate.map_or_else(|| "inf".to_string(), |r| r.to_string())
}

impl BoundsRow {
    pub fn new(n: u64, s: (u64, u64), t: (u64, u64), ratio: &ExactRational) -> Self {
        BoundsRow {
            n,
            s1: s.0,
            s2: s.1,
            t1: t.0,
            t2: t.1,
            ratio_num: ratio.numer().to_string(),
            ratio_den: ratio.denom().to_string(),
            ratio_float: rational_to_f64(ratio),
            rate: rate_per_n(ratio, n),
        }
    }

    pub const CSV_HEADER: &'static str = "n,s1,s2,t1,t2,ratio_num,ratio_den,ratio_float,rate";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.s1,
            self.s2,
            self.t1,
            self.t2,
            self.ratio_num,
            self.ratio_den,
            self.ratio_float,
            rate_csv(self.rate),
        )
    }
}

/// One row of a prefix-concentration table.
#[derive(Debug, Clone, Serialize)]
pub struct KelvinRow {
    pub total_len: u64,
    pub prefix_len: u64,
    pub weight: u64,
    pub ratio_num: String,
    pub ratio_den: String,
    pub ratio_float: f64,
    /// `-log2(ratio)/prefix_len`; 0 for the empty prefix (ratio is 1 there).
    pub rate: Option<f64>,
}

impl KelvinRow {
    pub fn new(total_len: u64, prefix_len: u64, weight: u64, ratio: &ExactRational) -> Self {
        let rate = if prefix_len == 0 {
            Some(0.0)
        } else {
            rate_per_n(ratio, prefix_len)
        };
        KelvinRow {
            total_len,
            prefix_len,
            weight,
            ratio_num: ratio.numer().to_string(),
            ratio_den: ratio.denom().to_string(),
            ratio_float: rational_to_f64(ratio),
            rate,
        }
    }

    pub const CSV_HEADER: &'static str = "N,n,w,ratio_num,ratio_den,ratio_float,rate";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.total_len,
            self.prefix_len,
            self.weight,
            self.ratio_num,
            self.ratio_den,
            self.ratio_float,
            rate_csv(self.rate),
        )
    }
}

fn couple_pair(c: &WeightCouple) -> [usize; 2] {
    [c.left, c.right]
}

/// Per-couple entry of a transition record.
#[derive(Debug, Clone, Serialize)]
pub struct CoupleRecord {
    pub couple: [usize; 2],
    pub count: u64,
    pub freq: f64,
    pub stderr: f64,
    pub bound_num: String,
    pub bound_den: String,
    pub bound_float: f64,
    pub tail_num: String,
    pub tail_den: String,
    pub within_bound: bool,
}

/// Monte-Carlo transition record.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionRecord {
    pub half_len: usize,
    pub source: [usize; 2],
    pub circuit: String,
    pub trials: u64,
    pub seed: u64,
    pub couples: Vec<CoupleRecord>,
    pub all_within_bound: bool,
}

impl TransitionRecord {
    pub fn from_stats(stats: &TransitionStats) -> Self {
        let couples = stats
            .per_couple
            .iter()
            .map(|(couple, stat)| CoupleRecord {
                couple: couple_pair(couple),
                count: stat.count,
                freq: stat.frequency,
                stderr: stat.std_error,
                bound_num: stat.point_bound.numer().to_string(),
                bound_den: stat.point_bound.denom().to_string(),
                bound_float: rational_to_f64(&stat.point_bound),
                tail_num: stat.tail_bound.numer().to_string(),
                tail_den: stat.tail_bound.denom().to_string(),
                within_bound: stat.within_bound,
            })
            .collect();
        TransitionRecord {
            half_len: stats.config.source.half_len,
            source: couple_pair(&stats.config.source),
            circuit: stats.config.circuit.describe(),
            trials: stats.config.trials,
            seed: stats.config.seed,
            couples,
            all_within_bound: stats.all_within_bound(),
        }
    }
}

/// Monte-Carlo prefix-concentration record.
#[derive(Debug, Clone, Serialize)]
pub struct KelvinRecord {
    pub total_len: usize,
    pub prefix_len: usize,
    pub weight: usize,
    pub circuit: String,
    pub trials: u64,
    pub seed: u64,
    pub hits: u64,
    pub freq: f64,
    pub stderr: f64,
    pub bound_num: String,
    pub bound_den: String,
    pub bound_float: f64,
    pub within_bound: bool,
}

impl KelvinRecord {
    pub fn from_stats(stats: &KelvinStats) -> Self {
        KelvinRecord {
            total_len: stats.config.total_len,
            prefix_len: stats.config.prefix_len,
            weight: stats.config.weight,
            circuit: stats.config.circuit.describe(),
            trials: stats.config.trials,
            seed: stats.config.seed,
            hits: stats.hits,
            freq: stats.frequency,
            stderr: stats.std_error,
            bound_num: stats.bound.numer().to_string(),
            bound_den: stats.bound.denom().to_string(),
            bound_float: rational_to_f64(&stats.bound),
            within_bound: stats.within_bound,
        }
    }
}

/// Per-step entry of a quasi-monotonicity report.
#[derive(Debug, Clone, Serialize)]
pub struct TraceStepRecord {
    pub step: usize,
    pub khat_bits: u64,
    pub khat_codec: String,
    pub codec_bits: u64,
    pub drop_bits: i64,
    pub allowance_bits: u64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub codec: String,
    pub slack_bits: u64,
    pub steps: Vec<TraceStepRecord>,
    pub flagged_steps: usize,
    pub disclaimer: &'static str,
}

impl TraceReport {
    pub fn from_report(report: &crate::thermo::QuasiMonotonicityReport) -> Self {
        TraceReport {
            codec: report.codec.to_string(),
            slack_bits: report.slack_bits,
            steps: report
                .steps
                .iter()
                .map(|s| TraceStepRecord {
                    step: s.step,
                    khat_bits: s.khat_bits,
                    khat_codec: s.khat_codec.to_string(),
                    codec_bits: s.codec_bits,
                    drop_bits: s.drop_bits,
                    allowance_bits: s.allowance_bits,
                    flagged: s.flagged,
                })
                .collect(),
            flagged_steps: report.flagged_steps,
            disclaimer: crate::thermo::QuasiMonotonicityReport::DISCLAIMER,
        }
    }
}

/// What the defaults resolve to; embedded in every CLI output.
#[derive(Debug, Clone, Serialize)]
pub struct ParamsEcho {
    pub temperature: f64,
    pub boltzmann: f64,
}

impl From<&PhysicalParams> for ParamsEcho {
    fn from(p: &PhysicalParams) -> Self {
        ParamsEcho {
            temperature: p.temperature,
            boltzmann: p.boltzmann,
        }
    }
}
