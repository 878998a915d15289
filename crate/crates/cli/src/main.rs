//! `revlaw` — run and verify reversible circuits, bracket erasure costs by
//! compression, tabulate exact weight-transition bounds, and check them by
//! seeded Monte-Carlo.
//!
//! Exit status: 0 on success (all requested checks/bounds pass), 1 when a
//! check or bound fails, 2 on usage or input errors. JSON goes to stdout as
//! a single document embedding the resolved configuration; diagnostics go
//! to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use revlaw_core::codec::CodecId;
use revlaw_core::combin::{
    clausius_point_ratio, clausius_tail_ratio, clausius_tail_ratio_symmetric, kelvin_ratio,
};
use revlaw_core::mc::{
    estimate_kelvin, estimate_transition, CircuitSpec, KelvinConfig, TrialConfig,
};
use revlaw_core::report::{
    BoundsRow, CostRecord, EraseRecord, KelvinRecord, KelvinRow, TraceReport, TransitionRecord,
};
use revlaw_core::revcircuit::{
    check_bijective, check_conservative, parse_circuit, BijectiveVerdict, Circuit,
    ConservativeMode, ConservativeVerdict, WeightCouple, DEFAULT_MAX_EXHAUSTIVE_WIDTH,
};
use revlaw_core::thermo::{
    computation_cost_lower, erasure_cost, quasi_monotonicity_report, PhysicalParams,
    CODATA_BOLTZMANN, DEFAULT_SLACK_BITS, DEFAULT_TEMPERATURE,
};
use revlaw_core::BitString;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "revlaw",
    version,
    about = "Reversible circuits, erasure-cost brackets, and exact second-law-style bounds"
)]
struct Cli {
    /// Output format. Tables (bounds, mc) also support csv.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for randomized subcommands; echoed in every output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Environmental temperature in kelvin.
    #[arg(long, global = true, default_value_t = DEFAULT_TEMPERATURE)]
    temp: f64,

    /// Boltzmann constant override, joules per kelvin.
    #[arg(long, global = true, default_value_t = CODATA_BOLTZMANN)]
    boltzmann: f64,

    /// Codec: raw, rle, lz78, copyref, or best.
    #[arg(long, global = true, default_value = "best", value_parser = parse_codec)]
    codec: CodecId,

    /// Width cap for exhaustive enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_EXHAUSTIVE_WIDTH)]
    max_width: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run a circuit file on an input bit string.
    Run {
        circuit: PathBuf,
        input: String,
        /// Also emit every intermediate state.
        #[arg(long)]
        trace: bool,
    },
    /// Verify bijectivity and/or conservativity of a circuit file.
    Check {
        circuit: PathBuf,
        /// Check that the circuit permutes all inputs (exhaustive).
        #[arg(long)]
        bijective: bool,
        /// Check Hamming-weight preservation (structural, then exhaustive).
        #[arg(long)]
        conservative: bool,
    },
    /// Erasure-cost bracket for a bit-string file, optionally with a catalyst.
    Erase {
        s_file: PathBuf,
        /// Side-information file, preserved by the erasure.
        #[arg(long)]
        catalyst: Option<PathBuf>,
        /// Read input files as raw bytes, most significant bit first.
        #[arg(long)]
        binary: bool,
    },
    /// Estimated lower bound on the cost of computing A -> B given X.
    Cost {
        #[arg(short = 'A', value_name = "FILE")]
        initial: PathBuf,
        #[arg(short = 'B', value_name = "FILE")]
        final_state: PathBuf,
        #[arg(long)]
        catalyst: Option<PathBuf>,
        #[arg(long)]
        binary: bool,
    },
    /// Exact transition-bound tables.
    Bounds {
        #[command(subcommand)]
        table: BoundsCommand,
    },
    /// Seeded Monte-Carlo experiments against the exact bounds.
    Mc {
        #[command(subcommand)]
        experiment: McCommand,
    },
    /// Per-step complexity report along a circuit run.
    Trace {
        circuit: PathBuf,
        input: String,
        /// Allowed complexity drop on top of the step-index code length.
        #[arg(long, default_value_t = DEFAULT_SLACK_BITS)]
        slack: u64,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Weight-couple transition ratios for conservative circuits.
    Clausius {
        /// Half-length of the 2n-bit string.
        #[arg(short)]
        n: usize,
        /// Source couple, e.g. 2,2.
        #[arg(long, value_parser = parse_pair)]
        source: (usize, usize),
        /// Target couple for a point ratio.
        #[arg(long, value_parser = parse_pair)]
        target: Option<(usize, usize)>,
        /// Imbalance growth (bits moved) for a tail ratio.
        #[arg(long)]
        delta: Option<usize>,
        /// Sum the tail instead of a single point.
        #[arg(long)]
        tail: bool,
        /// Count extreme targets in both directions, not just the heavier half.
        #[arg(long)]
        symmetric: bool,
        /// Sweep n over lo:hi:step, scaling couples; each n must be a
        /// multiple of the base -n.
        #[arg(long, value_parser = parse_sweep)]
        sweep: Option<(usize, usize, usize)>,
    },
    /// Prefix-concentration ratios.
    Kelvin {
        /// String length N.
        #[arg(short = 'N')]
        total: u64,
        /// Prefix length n that must become all ones.
        #[arg(short = 'n')]
        prefix: u64,
        /// Hamming weight w of the string.
        #[arg(short = 'w')]
        weight: u64,
        /// Sweep N over lo:hi:step, scaling n and w; each N must be a
        /// multiple of the base -N.
        #[arg(long, value_parser = parse_sweep)]
        sweep: Option<(usize, usize, usize)>,
    },
}

#[derive(Subcommand)]
enum McCommand {
    /// Sample couple transitions and compare with the exact ratios.
    Clausius {
        /// Half-length n (the circuit acts on 2n wires).
        #[arg(short)]
        n: usize,
        #[arg(long, value_parser = parse_pair)]
        source: (usize, usize),
        /// Fresh random all-Fredkin circuit of this many gates per trial.
        #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
        gates: Option<usize>,
        /// Fixed circuit file used for every trial.
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Sample all-ones-prefix concentration and compare with the exact ratio.
    Kelvin {
        #[arg(short = 'N')]
        total: usize,
        #[arg(short = 'n')]
        prefix: usize,
        #[arg(short = 'w')]
        weight: usize,
        #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
        gates: Option<usize>,
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}

fn parse_codec(s: &str) -> Result<CodecId, String> {
    s.parse()
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated integers, got {s:?}"))?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_sweep(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:step, got {s:?}"));
    }
    let lo = parts[0].parse().map_err(|e| format!("{e}"))?;
    let hi = parts[1].parse().map_err(|e| format!("{e}"))?;
    let step = parts[2].parse().map_err(|e| format!("{e}"))?;
    if step == 0 || lo > hi {
        return Err("sweep needs lo <= hi and step >= 1".into());
    }
    Ok((lo, hi, step))
}

/// Anything that should stop the run as a usage/input problem (exit 2).
struct InputError(String);

impl<T: std::fmt::Display> From<T> for InputError {
    fn from(e: T) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// Output plumbing: JSON embeds the envelope, text echoes the config on
/// stderr, csv prefixes it as a comment line.
struct Emitter {
    format: Format,
    seed: u64,
    config: Value,
}

impl Emitter {
    fn emit(
        &self,
        key: &str,
        payload: Value,
        text_lines: Vec<String>,
        csv: Option<(&str, Vec<String>)>,
    ) -> Result<(), InputError> {
        match self.format {
            Format::Json => {
                let doc = json!({
                    "seed": self.seed,
                    "version": VERSION,
                    "config": self.config,
                    key: payload,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("serializable")
                );
            }
            Format::Text => {
                eprintln!("# config: {}", self.config);
                for line in text_lines {
                    println!("{line}");
                }
            }
            Format::Csv => {
                let (header, rows) = csv.ok_or_else(|| {
                    InputError("csv output is only available for bounds and mc tables".into())
                })?;
                println!("# config: {}", self.config);
                println!("{header}");
                for row in rows {
                    println!("{row}");
                }
            }
        }
        Ok(())
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, InputError> {
    let params = PhysicalParams::new(cli.boltzmann, cli.temp)?;
    match &cli.command {
        Command::Run {
            circuit,
            input,
            trace,
        } => cmd_run(cli, circuit, input, *trace),
        Command::Check {
            circuit,
            bijective,
            conservative,
        } => cmd_check(cli, circuit, *bijective, *conservative),
        Command::Erase {
            s_file,
            catalyst,
            binary,
        } => cmd_erase(cli, &params, s_file, catalyst.as_deref(), *binary),
        Command::Cost {
            initial,
            final_state,
            catalyst,
            binary,
        } => cmd_cost(
            cli,
            &params,
            initial,
            final_state,
            catalyst.as_deref(),
            *binary,
        ),
        Command::Bounds { table } => cmd_bounds(cli, table),
        Command::Mc { experiment } => cmd_mc(cli, experiment),
        Command::Trace {
            circuit,
            input,
            slack,
        } => cmd_trace(cli, circuit, input, *slack),
    }
}

fn read_circuit(path: &Path) -> Result<Circuit, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_circuit(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_bits(path: &Path, binary: bool) -> Result<BitString, InputError> {
    let raw = std::fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    if binary {
        return Ok(BitString::from_bytes_msb(&raw));
    }
    let text = String::from_utf8(raw).map_err(|_| {
        InputError(format!(
            "{}: not valid UTF-8 (use --binary?)",
            path.display()
        ))
    })?;
    BitString::from_text(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn cmd_run(
    cli: &Cli,
    circuit_path: &Path,
    input: &str,
    with_trace: bool,
) -> Result<ExitCode, InputError> {
    let circuit = read_circuit(circuit_path)?;
    let input = BitString::from_text(input)?;
    let trace = circuit.run_trace(&input)?;
    let output = trace.last().expect("trace is never empty").clone();

    let emitter = Emitter {
        format: cli.format,
        seed: cli.seed,
        config: json!({
            "command": "run",
            "circuit": circuit_path.display().to_string(),
            "input": input.to_string(),
            "trace": with_trace,
        }),
    };
    let mut payload = json!({
        "input": input.to_string(),
        "output": output.to_string(),
    });
    let mut text_lines = Vec::new();
    if with_trace {
        let states: Vec<String> = trace.iter().map(|s| s.to_string()).collect();
        text_lines.extend(states.iter().cloned());
        payload["trace"] = json!(states);
    } else {
        text_lines.push(output.to_string());
    }
    emitter.emit("run", payload, text_lines, None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(
    cli: &Cli,
    circuit_path: &Path,
    bijective: bool,
    conservative: bool,
) -> Result<ExitCode, InputError> {
    let circuit = read_circuit(circuit_path)?;
    // With no explicit selection, run both checks.
    let (do_bijective, do_conservative) = if bijective || conservative {
        (bijective, conservative)
    } else {
        (true, true)
    };

    let mut payload = serde_json::Map::new();
    let mut text_lines = Vec::new();
    let mut all_pass = true;

    if do_bijective {
        let verdict = check_bijective(&circuit, cli.max_width)?;
        let (value, line) = match &verdict {
            BijectiveVerdict::Pass { fixed_points } => (
                json!({"pass": true, "fixed_points": fixed_points}),
                format!("bijective: pass ({fixed_points} fixed points)"),
            ),
            BijectiveVerdict::Fail {
                first,
                second,
                image,
            } => (
                json!({
                    "pass": false,
                    "counterexample": {
                        "first": first.to_string(),
                        "second": second.to_string(),
                        "image": image.to_string(),
                    }
                }),
                format!("bijective: FAIL ({first} and {second} both map to {image})"),
            ),
        };
        all_pass &= verdict.is_pass();
        payload.insert("bijective".into(), value);
        text_lines.push(line);
    }

    if do_conservative {
        let structural =
            check_conservative(&circuit, ConservativeMode::Structural, cli.max_width)?.is_pass();
        let (pass, mode, counterexample) = if structural {
            (true, "structural", None)
        } else {
            match check_conservative(&circuit, ConservativeMode::Exhaustive, cli.max_width)? {
                ConservativeVerdict::Pass => (true, "exhaustive", None),
                ConservativeVerdict::Fail { input, output } => {
                    (false, "exhaustive", Some((input, output)))
                }
            }
        };
        let value = json!({
            "pass": pass,
            "structural_pass": structural,
            "mode": mode,
            "counterexample": counterexample.as_ref().map(|(i, o)| json!({
                "input": i.to_string(),
                "output": o.to_string(),
            })),
        });
        text_lines.push(match &counterexample {
            None => format!("conservative: pass ({mode})"),
            Some((i, o)) => format!("conservative: FAIL ({i} -> {o} changes the weight)"),
        });
        all_pass &= pass;
        payload.insert("conservative".into(), value);
    }

    let emitter = Emitter {
        format: cli.format,
        seed: cli.seed,
        config: json!({
            "command": "check",
            "circuit": circuit_path.display().to_string(),
            "bijective": do_bijective,
            "conservative": do_conservative,
            "max_width": cli.max_width,
        }),
    };
    emitter.emit("check", Value::Object(payload), text_lines, None)?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_erase(
    cli: &Cli,
    params: &PhysicalParams,
    s_file: &Path,
    catalyst: Option<&Path>,
    binary: bool,
) -> Result<ExitCode, InputError> {
    let s = read_bits(s_file, binary)?;
    let x = catalyst
        .map(|p| read_bits(p, binary))
        .transpose()?
        .unwrap_or_default();
    let bracket = erasure_cost(&s, &x, cli.codec, params);
    let record = EraseRecord::from_bracket(&bracket);

    let text_lines = vec![
        format!(
            "erasure cost of {} bits with {}-bit catalyst, codec {}:",
            record.s_len, record.x_len, record.codec
        ),
        format!(
            "  upper: {} bits = {:e} J",
            record.upper_bits, record.upper_joules
        ),
        format!("  lower (certified): {} bits", record.lower_bits),
        format!(
            "  khat estimate: {} bits via {} ({})",
            record.khat_bits, record.khat_codec, record.khat_semantics
        ),
        format!(
            "  naive per-bit baseline: {} bits = {:e} J",
            record.naive_bits, record.naive_joules
        ),
    ];
    let emitter = Emitter {
        format: cli.format,
        seed: cli.seed,
        config: json!({
            "command": "erase",
            "s_file": s_file.display().to_string(),
            "catalyst": catalyst.map(|p| p.display().to_string()),
            "binary": binary,
            "codec": cli.codec.to_string(),
            "temperature": cli.temp,
            "boltzmann": cli.boltzmann,
        }),
    };
    emitter.emit(
        "erase",
        serde_json::to_value(&record).expect("serializable"),
        text_lines,
        None,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_cost(
    cli: &Cli,
    params: &PhysicalParams,
    initial: &Path,
    final_state: &Path,
    catalyst: Option<&Path>,
    binary: bool,
) -> Result<ExitCode, InputError> {
    let a = read_bits(initial, binary)?;
    let b = read_bits(final_state, binary)?;
    let x = catalyst
        .map(|p| read_bits(p, binary))
        .transpose()?
        .unwrap_or_default();
    let cost = computation_cost_lower(&a, &b, &x, cli.codec, params);
    let record = CostRecord::from_cost(&cost);

    let text_lines = vec![
        format!(
            "cost of computing A ({} bits) -> B ({} bits) given X ({} bits), codec {}:",
            record.a_len, record.b_len, record.x_len, record.codec
        ),
        format!(
            "  khat(A|X): {} bits via {}",
            record.khat_a_bits, record.khat_a_codec
        ),
        format!("  len(C(B,X)): {} bits", record.code_b_bits),
        format!(
            "  raw difference: {} bits = {:e} J",
            record.raw_bits, record.raw_joules
        ),
        format!(
            "  clamped lower {}: {} bits = {:e} J",
            record.semantics, record.clamped_bits, record.clamped_joules
        ),
    ];
    let emitter = Emitter {
        format: cli.format,
        seed: cli.seed,
        config: json!({
            "command": "cost",
            "initial": initial.display().to_string(),
            "final": final_state.display().to_string(),
            "catalyst": catalyst.map(|p| p.display().to_string()),
            "binary": binary,
            "codec": cli.codec.to_string(),
            "temperature": cli.temp,
            "boltzmann": cli.boltzmann,
        }),
    };
    emitter.emit(
        "cost",
        serde_json::to_value(&record).expect("serializable"),
        text_lines,
        None,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn scaled_couple(
    base: (usize, usize),
    factor: usize,
    n: usize,
) -> Result<WeightCouple, InputError> {
    WeightCouple::new(n, base.0 * factor, base.1 * factor).ok_or_else(|| {
        InputError(format!(
            "couple {},{} out of range for n={n}",
            base.0 * factor,
            base.1 * factor
        ))
    })
}

fn cmd_bounds(cli: &Cli, table: &BoundsCommand) -> Result<ExitCode, InputError> {
    match table {
        BoundsCommand::Clausius {
            n,
            source,
            target,
            delta,
            tail,
            symmetric,
            sweep,
        } => {
            if *tail && delta.is_none() {
                return Err(InputError("--tail needs --delta".into()));
            }
            if !*tail && target.is_none() {
                return Err(InputError(
                    "need --target for a point ratio or --tail --delta for a tail".into(),
                ));
            }
            let sweep_points: Vec<usize> = match sweep {
                None => vec![*n],
                Some((lo, hi, step)) => (*lo..=*hi).step_by(*step).collect(),
            };
            let mut rows = Vec::new();
            for &swept in &sweep_points {
                if swept == 0 || swept % n != 0 {
                    return Err(InputError(format!(
                        "swept n={swept} must be a positive multiple of the base n={n}"
                    )));
                }
                let factor = swept / n;
                let src = scaled_couple(*source, factor, swept)?;
                let (ratio, t_cols) = if *tail {
                    let d = delta.unwrap() * factor;
                    let ratio = if *symmetric {
                        clausius_tail_ratio_symmetric(&src, d)?
                    } else {
                        clausius_tail_ratio(&src, d)?
                    };
                    // Threshold couple: the least extreme target the tail covers.
                    let (t1, t2) = if src.left >= src.right {
                        (src.left as i64 + d as i64, src.right as i64 - d as i64)
                    } else {
                        (src.left as i64 - d as i64, src.right as i64 + d as i64)
                    };
                    (ratio, (t1.max(0) as u64, t2.max(0) as u64))
                } else {
                    let tgt = scaled_couple(target.unwrap(), factor, swept)?;
                    (
                        clausius_point_ratio(&src, &tgt)?,
                        (tgt.left as u64, tgt.right as u64),
                    )
                };
                rows.push(BoundsRow::new(
                    swept as u64,
                    (src.left as u64, src.right as u64),
                    t_cols,
                    &ratio,
                ));
            }

            let emitter = Emitter {
                format: cli.format,
                seed: cli.seed,
                config: json!({
                    "command": "bounds clausius",
                    "n": n,
                    "source": [source.0, source.1],
                    "target": target.map(|t| vec![t.0, t.1]),
                    "delta": delta,
                    "tail": tail,
                    "symmetric": symmetric,
                    "sweep": sweep.map(|(lo, hi, st)| format!("{lo}:{hi}:{st}")),
                }),
            };
            let text_lines: Vec<String> = std::iter::once(BoundsRow::CSV_HEADER.to_string())
                .chain(rows.iter().map(|r| r.to_csv()))
                .collect();
            let csv_rows: Vec<String> = rows.iter().map(|r| r.to_csv()).collect();
            emitter.emit(
                "rows",
                serde_json::to_value(&rows).expect("serializable"),
                text_lines,
                Some((BoundsRow::CSV_HEADER, csv_rows)),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        BoundsCommand::Kelvin {
            total,
            prefix,
            weight,
            sweep,
        } => {
            let sweep_points: Vec<u64> = match sweep {
                None => vec![*total],
                Some((lo, hi, step)) => (*lo..=*hi).step_by(*step).map(|v| v as u64).collect(),
            };
            let mut rows = Vec::new();
            for &swept in &sweep_points {
                if swept == 0 || swept % total != 0 {
                    return Err(InputError(format!(
                        "swept N={swept} must be a positive multiple of the base N={total}"
                    )));
                }
                let factor = swept / total;
                let (n_s, w_s) = (prefix * factor, weight * factor);
                let ratio = kelvin_ratio(swept, n_s, w_s)?;
                rows.push(KelvinRow::new(swept, n_s, w_s, &ratio));
            }
            let emitter = Emitter {
                format: cli.format,
                seed: cli.seed,
                config: json!({
                    "command": "bounds kelvin",
                    "N": total,
                    "n": prefix,
                    "w": weight,
                    "sweep": sweep.map(|(lo, hi, st)| format!("{lo}:{hi}:{st}")),
                }),
            };
            let text_lines: Vec<String> = std::iter::once(KelvinRow::CSV_HEADER.to_string())
                .chain(rows.iter().map(|r| r.to_csv()))
                .collect();
            let csv_rows: Vec<String> = rows.iter().map(|r| r.to_csv()).collect();
            emitter.emit(
                "rows",
                serde_json::to_value(&rows).expect("serializable"),
                text_lines,
                Some((KelvinRow::CSV_HEADER, csv_rows)),
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn circuit_spec(gates: Option<usize>, circuit: Option<&Path>) -> Result<CircuitSpec, InputError> {
    match (gates, circuit) {
        (Some(g), None) => Ok(CircuitSpec::RandomFredkin { gate_count: g }),
        (None, Some(path)) => Ok(CircuitSpec::Fixed(read_circuit(path)?)),
        _ => Err(InputError(
            "give exactly one of --gates or --circuit".into(),
        )),
    }
}

fn cmd_mc(cli: &Cli, experiment: &McCommand) -> Result<ExitCode, InputError> {
    match experiment {
        McCommand::Clausius {
            n,
            source,
            gates,
            circuit,
            trials,
        } => {
            let src = WeightCouple::new(*n, source.0, source.1).ok_or_else(|| {
                InputError(format!(
                    "couple {},{} out of range for n={n}",
                    source.0, source.1
                ))
            })?;
            let config = TrialConfig {
                source: src,
                circuit: circuit_spec(*gates, circuit.as_deref())?,
                trials: *trials,
                seed: cli.seed,
            };
            let stats = estimate_transition(&config)?;
            let record = TransitionRecord::from_stats(&stats);

            let emitter = Emitter {
                format: cli.format,
                seed: cli.seed,
                config: json!({
                    "command": "mc clausius",
                    "n": n,
                    "source": [source.0, source.1],
                    "circuit": record.circuit,
                    "trials": trials,
                }),
            };
            let header = "t1,t2,count,freq,stderr,bound_num,bound_den,within_bound";
            let csv_rows: Vec<String> = record
                .couples
                .iter()
                .map(|c| {
                    format!(
                        "{},{},{},{},{},{},{},{}",
                        c.couple[0],
                        c.couple[1],
                        c.count,
                        c.freq,
                        c.stderr,
                        c.bound_num,
                        c.bound_den,
                        c.within_bound
                    )
                })
                .collect();
            let mut text_lines: Vec<String> = vec![header.to_string()];
            text_lines.extend(csv_rows.iter().cloned());
            text_lines.push(format!("all_within_bound: {}", record.all_within_bound));
            let all_ok = record.all_within_bound;
            emitter.emit(
                "mc",
                serde_json::to_value(&record).expect("serializable"),
                text_lines,
                Some((header, csv_rows)),
            )?;
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        McCommand::Kelvin {
            total,
            prefix,
            weight,
            gates,
            circuit,
            trials,
        } => {
            let config = KelvinConfig {
                total_len: *total,
                prefix_len: *prefix,
                weight: *weight,
                circuit: circuit_spec(*gates, circuit.as_deref())?,
                trials: *trials,
                seed: cli.seed,
            };
            let stats = estimate_kelvin(&config)?;
            let record = KelvinRecord::from_stats(&stats);

            let emitter = Emitter {
                format: cli.format,
                seed: cli.seed,
                config: json!({
                    "command": "mc kelvin",
                    "N": total,
                    "n": prefix,
                    "w": weight,
                    "circuit": record.circuit,
                    "trials": trials,
                }),
            };
            let header = "hits,freq,stderr,bound_num,bound_den,within_bound";
            let csv_rows = vec![format!(
                "{},{},{},{},{},{}",
                record.hits,
                record.freq,
                record.stderr,
                record.bound_num,
                record.bound_den,
                record.within_bound
            )];
            let text_lines = vec![
                format!(
                    "hits: {} / {} (freq {})",
                    record.hits, record.trials, record.freq
                ),
                format!(
                    "bound: {}/{} ≈ {}",
                    record.bound_num, record.bound_den, record.bound_float
                ),
                format!("within_bound: {}", record.within_bound),
            ];
            let ok = record.within_bound;
            emitter.emit(
                "mc",
                serde_json::to_value(&record).expect("serializable"),
                text_lines,
                Some((header, csv_rows)),
            )?;
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn cmd_trace(
    cli: &Cli,
    circuit_path: &Path,
    input: &str,
    slack: u64,
) -> Result<ExitCode, InputError> {
    let circuit = read_circuit(circuit_path)?;
    let input = BitString::from_text(input)?;
    let trace = circuit.run_trace(&input)?;
    let report = quasi_monotonicity_report(&trace, cli.codec, slack)?;
    let record = TraceReport::from_report(&report);

    let mut text_lines =
        vec!["step,khat_bits,khat_codec,codec_bits,drop,allowance,flagged".to_string()];
    for s in &record.steps {
        text_lines.push(format!(
            "{},{},{},{},{},{},{}",
            s.step,
            s.khat_bits,
            s.khat_codec,
            s.codec_bits,
            s.drop_bits,
            s.allowance_bits,
            s.flagged
        ));
    }
    text_lines.push(format!(
        "flagged steps: {} ({})",
        record.flagged_steps, record.disclaimer
    ));

    let emitter = Emitter {
        format: cli.format,
        seed: cli.seed,
        config: json!({
            "command": "trace",
            "circuit": circuit_path.display().to_string(),
            "input": input.to_string(),
            "codec": cli.codec.to_string(),
            "slack": slack,
        }),
    };
    emitter.emit(
        "trace",
        serde_json::to_value(&record).expect("serializable"),
        text_lines,
        None,
    )?;
    Ok(ExitCode::SUCCESS)
}
