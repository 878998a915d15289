//! Browser bindings: three interactive views onto the core library.
//!
//! Every export takes plain numbers/strings and returns a JSON string
//! (`{"error": ...}` on bad input), so the page needs no glue beyond
//! `JSON.parse`. Build with `wasm-pack build --target web` and open
//! `www/index.html`; see the README for the full recipe.

use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use revlaw_core::codec::{code_length_bits, khat, CodecId};
use revlaw_core::combin::{clausius_point_ratio, clausius_tail_ratio, rational_to_f64};
use revlaw_core::mc::{estimate_transition, CircuitSpec, TrialConfig};
use revlaw_core::report::{BoundsRow, TransitionRecord};
use revlaw_core::revcircuit::WeightCouple;
use revlaw_core::thermo::{landauer_naive, PhysicalParams};
use revlaw_core::BitString;

fn error_json(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

const MAX_TABLE_N: u32 = 64;
const MAX_MC_HALF_LEN: u32 = 12;
const MAX_MC_TRIALS: u32 = 200_000;
const MAX_MC_GATES: u32 = 5_000;
const MAX_ERASE_BITS: usize = 16_384;

/// Exact transition bounds from a source couple to every target of equal
/// total weight: `{rows: [{n, s1, s2, t1, t2, ratio_num, ratio_den,
/// ratio_float, rate}], tails: [...]}`.
#[wasm_bindgen]
pub fn transition_bounds(n: u32, s1: u32, s2: u32) -> String {
    if n == 0 || n > MAX_TABLE_N {
        return error_json(format!("n must be in 1..={MAX_TABLE_N}"));
    }
    let Some(source) = WeightCouple::new(n as usize, s1 as usize, s2 as usize) else {
        return error_json(format!("source ({s1},{s2}) out of range for n={n}"));
    };
    let mut rows = Vec::new();
    let mut tails = Vec::new();
    for target in revlaw_core::combin::couples_with_weight(source.half_len, source.total_weight()) {
        let ratio = match clausius_point_ratio(&source, &target) {
            Ok(r) => r,
            Err(e) => return error_json(e),
        };
        rows.push(BoundsRow::new(
            n as u64,
            (s1 as u64, s2 as u64),
            (target.left as u64, target.right as u64),
            &ratio,
        ));
    }
    for delta in 0..=source.half_len {
        match clausius_tail_ratio(&source, delta) {
            Ok(tail) => tails.push(json!({
                "delta": delta,
                "tail_num": tail.numer().to_string(),
                "tail_den": tail.denom().to_string(),
                "tail_float": rational_to_f64(&tail),
            })),
            Err(e) => return error_json(e),
        }
    }
    json!({ "rows": rows, "tails": tails }).to_string()
}

/// Per-codec erasure-cost table for a typed bit string and optional
/// catalyst: `{s_len, x_len, naive_bits, naive_joules, khat_bits,
/// khat_codec, codecs: [{codec, bits, joules}]}`.
#[wasm_bindgen]
pub fn erasure_costs(s_text: &str, x_text: &str, temperature: f64) -> String {
    let s = match BitString::from_text(s_text) {
        Ok(s) => s,
        Err(e) => return error_json(format!("string S: {e}")),
    };
    let x = match BitString::from_text(x_text) {
        Ok(x) => x,
        Err(e) => return error_json(format!("catalyst X: {e}")),
    };
    if s.len() > MAX_ERASE_BITS || x.len() > MAX_ERASE_BITS {
        return error_json(format!("inputs capped at {MAX_ERASE_BITS} bits each"));
    }
    let params = match PhysicalParams::at_temperature(temperature) {
        Ok(p) => p,
        Err(e) => return error_json(e),
    };

    let codecs: Vec<_> = [
        CodecId::Raw,
        CodecId::Rle,
        CodecId::Lz78,
        CodecId::CopyRef,
        CodecId::Best,
    ]
    .into_iter()
    .map(|codec| {
        let bits = code_length_bits(codec, &s, &x);
        json!({
            "codec": codec.to_string(),
            "bits": bits,
            "joules": params.bits_to_joules(bits as f64),
        })
    })
    .collect();
    let estimate = khat(&s, &x);
    json!({
        "s_len": s.len(),
        "x_len": x.len(),
        "temperature": temperature,
        "naive_bits": s.len(),
        "naive_joules": landauer_naive(s.len() as u64, &params),
        "khat_bits": estimate.bits,
        "khat_codec": estimate.winning_codec.to_string(),
        "codecs": codecs,
    })
    .to_string()
}

/// Seeded Monte-Carlo transition experiment on fresh random Fredkin
/// circuits, with the exact bounds attached per observed couple.
#[wasm_bindgen]
pub fn mc_transition(n: u32, s1: u32, s2: u32, gates: u32, trials: u32, seed: u32) -> String {
    if !(2..=MAX_MC_HALF_LEN).contains(&n) {
        return error_json(format!("n must be in 2..={MAX_MC_HALF_LEN}"));
    }
    if trials == 0 || trials > MAX_MC_TRIALS {
        return error_json(format!("trials must be in 1..={MAX_MC_TRIALS}"));
    }
    if gates > MAX_MC_GATES {
        return error_json(format!("gates capped at {MAX_MC_GATES}"));
    }
    let Some(source) = WeightCouple::new(n as usize, s1 as usize, s2 as usize) else {
        return error_json(format!("source ({s1},{s2}) out of range for n={n}"));
    };
    let config = TrialConfig {
        source,
        circuit: CircuitSpec::RandomFredkin {
            gate_count: gates as usize,
        },
        trials: trials as u64,
        seed: seed as u64,
    };
    match estimate_transition(&config) {
        Ok(stats) => {
            serde_json::to_string(&TransitionRecord::from_stats(&stats)).unwrap_or_else(error_json)
        }
        Err(e) => error_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_bounds_reports_the_known_ratios() {
        let doc: serde_json::Value = serde_json::from_str(&transition_bounds(4, 2, 2)).unwrap();
        let rows = doc["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 5);
        let polarized = rows.iter().find(|r| r["t1"] == 4 && r["t2"] == 0).unwrap();
        assert_eq!(polarized["ratio_num"], "1");
        assert_eq!(polarized["ratio_den"], "36");
        let tails = doc["tails"].as_array().unwrap();
        assert_eq!(tails[1]["tail_num"], "17");
        assert_eq!(tails[1]["tail_den"], "36");
    }

    #[test]
    fn transition_bounds_rejects_bad_couples() {
        let doc: serde_json::Value = serde_json::from_str(&transition_bounds(4, 9, 0)).unwrap();
        assert!(doc["error"].as_str().unwrap().contains("out of range"));
    }

    #[test]
    fn erasure_costs_reports_every_codec() {
        let doc: serde_json::Value =
            serde_json::from_str(&erasure_costs(&"0".repeat(1024), "", 300.0)).unwrap();
        assert_eq!(doc["naive_bits"], 1024);
        assert_eq!(doc["khat_codec"], "RLE");
        assert_eq!(doc["khat_bits"], 43);
        assert_eq!(doc["codecs"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn erasure_costs_rejects_garbage() {
        let doc: serde_json::Value =
            serde_json::from_str(&erasure_costs("01x", "", 300.0)).unwrap();
        assert!(doc["error"].as_str().is_some());
    }

    #[test]
    fn mc_transition_is_reproducible_and_bounded() {
        let a = mc_transition(4, 2, 2, 40, 2000, 11);
        let b = mc_transition(4, 2, 2, 40, 2000, 11);
        assert_eq!(a, b);
        let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(doc["all_within_bound"], true);
        assert_eq!(doc["trials"], 2000);
    }
}
