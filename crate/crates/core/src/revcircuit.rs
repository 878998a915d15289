//! Reversible circuits over the gate set {NOT, CNOT, TOFFOLI, FREDKIN}.
//!
//! Every gate is self-inverse, so every circuit induces a permutation of
//! `{0,1}^width` and the inverse circuit is simply the reversed gate list.
//! The module also provides the two exhaustive verifiers used throughout:
//! bijectivity (the permutation property, checked by brute enumeration) and
//! conservativity (Hamming-weight preservation).
//!
//! Circuit file format (UTF-8 text): the first non-comment line is
//! `bits <n>`, then one gate per line — `NOT <t>`, `CNOT <c> <t>`,
//! `TOF <c1> <c2> <t>`, `FRED <c> <a> <b>`. `#` starts a comment to end of
//! line and blank lines are ignored. Wire indices are 0-based.

use std::fmt;

use thiserror::Error;

use crate::bitstring::BitString;

/// Widths up to this bound may be verified by full enumeration of `2^width`
/// inputs. Overridable per call; 2^20 evaluations stay well under a second.
pub const DEFAULT_MAX_EXHAUSTIVE_WIDTH: usize = 20;

/// A reversible gate. Wire order is controls first, then targets; the
/// Fredkin gate carries its control and the two wires it conditionally swaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Not { target: usize },
    Cnot { control: usize, target: usize },
    Toffoli { controls: [usize; 2], target: usize },
    Fredkin { control: usize, swaps: [usize; 2] },
}

impl Gate {
    /// The wires the gate touches, in declaration order.
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::Not { target } => vec![target],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Toffoli { controls, target } => vec![controls[0], controls[1], target],
            Gate::Fredkin { control, swaps } => vec![control, swaps[0], swaps[1]],
        }
    }

    fn max_wire(&self) -> usize {
        self.wires().into_iter().max().expect("gates touch wires")
    }

    fn has_distinct_wires(&self) -> bool {
        let w = self.wires();
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] == w[j] {
                    return false;
                }
            }
        }
        true
    }

    /// Applies the gate to a state packed in a `u64` (wire `i` at bit `i`).
    #[inline]
    pub fn apply_u64(&self, state: u64) -> u64 {
        match *self {
            Gate::Not { target } => state ^ (1 << target),
            Gate::Cnot { control, target } => state ^ (((state >> control) & 1) << target),
            Gate::Toffoli { controls, target } => {
                let fire = (state >> controls[0]) & (state >> controls[1]) & 1;
                state ^ (fire << target)
            }
            Gate::Fredkin { control, swaps } => {
                let diff = ((state >> swaps[0]) ^ (state >> swaps[1])) & (state >> control) & 1;
                state ^ (diff << swaps[0]) ^ (diff << swaps[1])
            }
        }
    }

    fn apply_in_place(&self, state: &mut [bool]) {
        match *self {
            Gate::Not { target } => state[target] = !state[target],
            Gate::Cnot { control, target } => {
                if state[control] {
                    state[target] = !state[target];
                }
            }
            Gate::Toffoli { controls, target } => {
                if state[controls[0]] && state[controls[1]] {
                    state[target] = !state[target];
                }
            }
            Gate::Fredkin { control, swaps } => {
                if state[control] {
                    state.swap(swaps[0], swaps[1]);
                }
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Not { target } => write!(f, "NOT {target}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Toffoli { controls, target } => {
                write!(f, "TOF {} {} {target}", controls[0], controls[1])
            }
            Gate::Fredkin { control, swaps } => {
                write!(f, "FRED {control} {} {}", swaps[0], swaps[1])
            }
        }
    }
}

/// Applies one gate to a state, returning the new state.
///
/// The state must be at least as wide as the gate's highest wire; circuits
/// built through [`Circuit::new`] guarantee this.
pub fn apply_gate(state: &BitString, gate: &Gate) -> BitString {
    let mut bits: Vec<bool> = state.as_slice().to_vec();
    gate.apply_in_place(&mut bits);
    BitString::from_bits(bits)
}

/// An ordered list of reversible gates over `width` wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate {gate} uses wire {wire}, but the circuit has {width} wires")]
    WireOutOfRange {
        gate: String,
        wire: usize,
        width: usize,
    },
    #[error("gate {gate} uses the same wire twice")]
    DuplicateWire { gate: String },
    #[error("input has {actual} bits but the circuit has {expected} wires")]
    WidthMismatch { expected: usize, actual: usize },
    #[error("width {width} exceeds the exhaustive enumeration bound {bound}")]
    WidthExceedsBound { width: usize, bound: usize },
    #[error("bit string has odd length {len}; weight couples need two equal halves")]
    OddLength { len: usize },
}

impl Circuit {
    /// Builds a circuit, validating that every gate touches distinct wires
    /// that exist.
    pub fn new(width: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        for gate in &gates {
            if !gate.has_distinct_wires() {
                return Err(CircuitError::DuplicateWire {
                    gate: gate.to_string(),
                });
            }
            if gate.max_wire() >= width {
                return Err(CircuitError::WireOutOfRange {
                    gate: gate.to_string(),
                    wire: gate.max_wire(),
                    width,
                });
            }
        }
        Ok(Self { width, gates })
    }

    pub fn identity(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// True iff every gate is a Fredkin gate (the structural sufficient
    /// condition for conservativity).
    pub fn is_all_fredkin(&self) -> bool {
        self.gates.iter().all(|g| matches!(g, Gate::Fredkin { .. }))
    }

    /// Runs the circuit on an input of matching width.
    pub fn run(&self, input: &BitString) -> Result<BitString, CircuitError> {
        if input.len() != self.width {
            return Err(CircuitError::WidthMismatch {
                expected: self.width,
                actual: input.len(),
            });
        }
        if self.width <= 64 {
            return Ok(BitString::from_u64(
                self.run_u64(input.to_u64()),
                self.width,
            ));
        }
        let mut state: Vec<bool> = input.as_slice().to_vec();
        for gate in &self.gates {
            gate.apply_in_place(&mut state);
        }
        Ok(BitString::from_bits(state))
    }

    /// Fast path for widths ≤ 64: wire `i` lives at bit `i`.
    #[inline]
    pub fn run_u64(&self, input: u64) -> u64 {
        debug_assert!(self.width <= 64);
        self.gates.iter().fold(input, |s, g| g.apply_u64(s))
    }

    /// Every intermediate state, starting with the input: `gate_count + 1`
    /// entries, the last of which equals `run(input)`.
    pub fn run_trace(&self, input: &BitString) -> Result<Vec<BitString>, CircuitError> {
        if input.len() != self.width {
            return Err(CircuitError::WidthMismatch {
                expected: self.width,
                actual: input.len(),
            });
        }
        let mut trace = Vec::with_capacity(self.gates.len() + 1);
        let mut state: Vec<bool> = input.as_slice().to_vec();
        trace.push(input.clone());
        for gate in &self.gates {
            gate.apply_in_place(&mut state);
            trace.push(BitString::from_bits(state.clone()));
        }
        Ok(trace)
    }

    /// The inverse circuit: gates in reverse order (each gate is its own
    /// inverse), so `invert().run(run(x)) == x` for every `x`.
    pub fn invert(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().copied().collect(),
        }
    }
}

/// Parses the circuit file format described in the module docs.
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitParseError> {
    let mut width: Option<usize> = None;
    let mut gates = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }

        let Some(w) = width else {
            if tokens[0] != "bits" || tokens.len() != 2 {
                return Err(CircuitParseError::new(
                    line_no,
                    "expected header `bits <n>`".into(),
                ));
            }
            let n: usize = tokens[1].parse().map_err(|_| {
                CircuitParseError::new(line_no, format!("invalid width {:?}", tokens[1]))
            })?;
            width = Some(n);
            continue;
        };

        let parse_wire = |token: &str| -> Result<usize, CircuitParseError> {
            token.parse().map_err(|_| {
                CircuitParseError::new(line_no, format!("invalid wire index {token:?}"))
            })
        };
        let arity_error = |mnemonic: &str, expected: usize| {
            CircuitParseError::new(
                line_no,
                format!(
                    "{mnemonic} takes {expected} wire(s), got {}",
                    tokens.len() - 1
                ),
            )
        };

        let gate = match tokens[0] {
            "NOT" => {
                if tokens.len() != 2 {
                    return Err(arity_error("NOT", 1));
                }
                Gate::Not {
                    target: parse_wire(tokens[1])?,
                }
            }
            "CNOT" => {
                if tokens.len() != 3 {
                    return Err(arity_error("CNOT", 2));
                }
                Gate::Cnot {
                    control: parse_wire(tokens[1])?,
                    target: parse_wire(tokens[2])?,
                }
            }
            "TOF" => {
                if tokens.len() != 4 {
                    return Err(arity_error("TOF", 3));
                }
                Gate::Toffoli {
                    controls: [parse_wire(tokens[1])?, parse_wire(tokens[2])?],
                    target: parse_wire(tokens[3])?,
                }
            }
            "FRED" => {
                if tokens.len() != 4 {
                    return Err(arity_error("FRED", 3));
                }
                Gate::Fredkin {
                    control: parse_wire(tokens[1])?,
                    swaps: [parse_wire(tokens[2])?, parse_wire(tokens[3])?],
                }
            }
            other => {
                return Err(CircuitParseError::new(
                    line_no,
                    format!("unknown gate {other:?} (expected NOT, CNOT, TOF, or FRED)"),
                ))
            }
        };

        if !gate.has_distinct_wires() {
            return Err(CircuitParseError::new(
                line_no,
                format!("gate {gate} uses the same wire twice"),
            ));
        }
        if gate.max_wire() >= w {
            return Err(CircuitParseError::new(
                line_no,
                format!(
                    "wire {} out of range (circuit has {w} wires)",
                    gate.max_wire()
                ),
            ));
        }
        gates.push(gate);
    }

    let Some(width) = width else {
        return Err(CircuitParseError::new(
            0,
            "missing `bits <n>` header".into(),
        ));
    };
    Ok(Circuit { width, gates })
}

/// A circuit-file syntax or validation error, with its 1-based line number
/// (line 0 means the file ended before the header).
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct CircuitParseError {
    pub line: usize,
    pub message: String,
}

impl CircuitParseError {
    fn new(line: usize, message: String) -> Self {
        Self { line, message }
    }
}

/// Result of an exhaustive bijectivity check.
///
/// Circuits built from self-inverse gates are permutations by construction;
/// the check re-derives that from scratch, so it would also catch a defect
/// in gate application itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BijectiveVerdict {
    Pass {
        fixed_points: u64,
    },
    Fail {
        first: BitString,
        second: BitString,
        image: BitString,
    },
}

impl BijectiveVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, BijectiveVerdict::Pass { .. })
    }
}

/// Enumerates all `2^width` inputs and verifies that the induced map is a
/// permutation, counting fixed points along the way.
pub fn check_bijective(c: &Circuit, max_width: usize) -> Result<BijectiveVerdict, CircuitError> {
    if c.width() > max_width || c.width() > 63 {
        return Err(CircuitError::WidthExceedsBound {
            width: c.width(),
            bound: max_width.min(63),
        });
    }
    let size: u64 = 1 << c.width();
    let mut preimage = vec![u64::MAX; size as usize];
    let mut fixed_points = 0u64;
    for x in 0..size {
        let y = c.run_u64(x);
        debug_assert!(y < size);
        if y == x {
            fixed_points += 1;
        }
        let slot = &mut preimage[y as usize];
        if *slot != u64::MAX {
            return Ok(BijectiveVerdict::Fail {
                first: BitString::from_u64(*slot, c.width()),
                second: BitString::from_u64(x, c.width()),
                image: BitString::from_u64(y, c.width()),
            });
        }
        *slot = x;
    }
    Ok(BijectiveVerdict::Pass { fixed_points })
}

/// How to decide conservativity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConservativeMode {
    /// Passes iff every gate is a Fredkin gate. Sufficient only: circuits
    /// made of other gates can still preserve weight (e.g. a wire swap from
    /// three CNOTs).
    Structural,
    /// Enumerates every input and compares Hamming weights. Authoritative.
    Exhaustive,
}

/// Result of a conservativity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConservativeVerdict {
    Pass,
    Fail { input: BitString, output: BitString },
}

impl ConservativeVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, ConservativeVerdict::Pass)
    }
}

/// Checks whether the circuit preserves total Hamming weight.
///
/// Structural mode never reports a counterexample; exhaustive mode reports
/// the first weight-changing input it finds.
pub fn check_conservative(
    c: &Circuit,
    mode: ConservativeMode,
    max_width: usize,
) -> Result<ConservativeVerdict, CircuitError> {
    match mode {
        ConservativeMode::Structural => {
            if c.is_all_fredkin() {
                Ok(ConservativeVerdict::Pass)
            } else {
                // No counterexample: the structural test is only a
                // sufficient condition.
                Ok(ConservativeVerdict::Fail {
                    input: BitString::new(),
                    output: BitString::new(),
                })
            }
        }
        ConservativeMode::Exhaustive => {
            if c.width() > max_width || c.width() > 63 {
                return Err(CircuitError::WidthExceedsBound {
                    width: c.width(),
                    bound: max_width.min(63),
                });
            }
            let size: u64 = 1 << c.width();
            for x in 0..size {
                let y = c.run_u64(x);
                if y.count_ones() != x.count_ones() {
                    return Ok(ConservativeVerdict::Fail {
                        input: BitString::from_u64(x, c.width()),
                        output: BitString::from_u64(y, c.width()),
                    });
                }
            }
            Ok(ConservativeVerdict::Pass)
        }
    }
}

/// Hamming weights of the two halves of an even-length string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightCouple {
    pub half_len: usize,
    pub left: usize,
    pub right: usize,
}

impl WeightCouple {
    pub fn new(half_len: usize, left: usize, right: usize) -> Option<Self> {
        (left <= half_len && right <= half_len).then_some(Self {
            half_len,
            left,
            right,
        })
    }

    pub fn total_weight(&self) -> usize {
        self.left + self.right
    }

    /// Signed weight difference left − right.
    pub fn imbalance(&self) -> isize {
        self.left as isize - self.right as isize
    }
}

impl fmt::Display for WeightCouple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left, self.right)
    }
}

/// Splits an even-length string into halves and reports their weights.
pub fn weight_couple(s: &BitString) -> Result<WeightCouple, CircuitError> {
    if !s.len().is_multiple_of(2) {
        return Err(CircuitError::OddLength { len: s.len() });
    }
    let half = s.len() / 2;
    let left = s.as_slice()[..half].iter().filter(|&&b| b).count();
    let right = s.as_slice()[half..].iter().filter(|&&b| b).count();
    Ok(WeightCouple {
        half_len: half,
        left,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(text: &str) -> BitString {
        BitString::from_text(text).unwrap()
    }

    #[test]
    fn toffoli_truth_table() {
        let g = Gate::Toffoli {
            controls: [0, 1],
            target: 2,
        };
        assert_eq!(apply_gate(&bits("110"), &g), bits("111"));
        assert_eq!(apply_gate(&bits("010"), &g), bits("010"));
        assert_eq!(apply_gate(&bits("111"), &g), bits("110"));
    }

    #[test]
    fn fredkin_controlled_swap() {
        let g = Gate::Fredkin {
            control: 0,
            swaps: [1, 2],
        };
        assert_eq!(apply_gate(&bits("101"), &g), bits("110"));
        assert_eq!(apply_gate(&bits("001"), &g), bits("001"));
    }

    #[test]
    fn every_gate_is_self_inverse() {
        let gates = [
            Gate::Not { target: 1 },
            Gate::Cnot {
                control: 0,
                target: 2,
            },
            Gate::Toffoli {
                controls: [0, 2],
                target: 1,
            },
            Gate::Fredkin {
                control: 2,
                swaps: [0, 1],
            },
        ];
        for g in gates {
            for value in 0u64..8 {
                let s = BitString::from_u64(value, 3);
                assert_eq!(apply_gate(&apply_gate(&s, &g), &g), s, "{g}");
            }
        }
    }

    #[test]
    fn run_empty_circuit_is_identity() {
        let c = Circuit::identity(4);
        assert_eq!(c.run(&bits("0101")).unwrap(), bits("0101"));
    }

    #[test]
    fn run_two_gates_in_order() {
        let c = Circuit::new(
            2,
            vec![
                Gate::Not { target: 0 },
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
            ],
        )
        .unwrap();
        assert_eq!(c.run(&bits("00")).unwrap(), bits("11"));
    }

    #[test]
    fn run_rejects_width_mismatch() {
        let c = Circuit::identity(3);
        assert_eq!(
            c.run(&bits("11")).unwrap_err(),
            CircuitError::WidthMismatch {
                expected: 3,
                actual: 2
            }
        );
    }

    #[test]
    fn trace_has_one_entry_per_gate_plus_input() {
        let c = Circuit::identity(2);
        assert_eq!(c.run_trace(&bits("01")).unwrap(), vec![bits("01")]);

        let c = Circuit::new(1, vec![Gate::Not { target: 0 }]).unwrap();
        assert_eq!(c.run_trace(&bits("0")).unwrap(), vec![bits("0"), bits("1")]);

        let c = Circuit::new(1, vec![Gate::Not { target: 0 }, Gate::Not { target: 0 }]).unwrap();
        assert_eq!(
            c.run_trace(&bits("0")).unwrap(),
            vec![bits("0"), bits("1"), bits("0")]
        );
    }

    #[test]
    fn invert_reverses_gate_order() {
        let g1 = Gate::Not { target: 0 };
        let g2 = Gate::Cnot {
            control: 0,
            target: 1,
        };
        let g3 = Gate::Toffoli {
            controls: [0, 1],
            target: 2,
        };
        let c = Circuit::new(3, vec![g1, g2, g3]).unwrap();
        assert_eq!(c.invert().gates(), &[g3, g2, g1]);
        assert_eq!(Circuit::identity(5).invert(), Circuit::identity(5));
    }

    #[test]
    fn parse_basic_file() {
        let c = parse_circuit("bits 3\nTOF 0 1 2").unwrap();
        assert_eq!(c.width(), 3);
        assert_eq!(
            c.gates(),
            &[Gate::Toffoli {
                controls: [0, 1],
                target: 2
            }]
        );
    }

    #[test]
    fn parse_comments_and_blanks() {
        let text = "# swap wires via CNOTs\nbits 2\n\nCNOT 0 1 # forward\nCNOT 1 0\nCNOT 0 1\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.gate_count(), 3);
    }

    #[test]
    fn parse_empty_circuit() {
        let c = parse_circuit("bits 1\n").unwrap();
        assert_eq!(c.width(), 1);
        assert!(c.gates().is_empty());
    }

    #[test]
    fn parse_wire_out_of_range() {
        let err = parse_circuit("bits 2\nTOF 0 1 2").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("out of range"), "{err}");
    }

    #[test]
    fn parse_duplicate_wire() {
        let err = parse_circuit("bits 3\nFRED 0 1 1").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("same wire"), "{err}");
    }

    #[test]
    fn parse_syntax_errors_carry_line_numbers() {
        assert_eq!(parse_circuit("bits 3\nNAND 0 1").unwrap_err().line, 2);
        assert_eq!(parse_circuit("wires 3").unwrap_err().line, 1);
        assert_eq!(parse_circuit("bits 3\nCNOT 0").unwrap_err().line, 2);
    }

    #[test]
    fn bijective_empty_circuit_all_fixed() {
        let verdict = check_bijective(&Circuit::identity(4), 20).unwrap();
        assert_eq!(verdict, BijectiveVerdict::Pass { fixed_points: 16 });
    }

    #[test]
    fn bijective_respects_width_bound() {
        let c = Circuit::identity(24);
        assert_eq!(
            check_bijective(&c, 20).unwrap_err(),
            CircuitError::WidthExceedsBound {
                width: 24,
                bound: 20
            }
        );
    }

    #[test]
    fn conservative_structural_vs_exhaustive() {
        // All-Fredkin passes structurally.
        let fred = Circuit::new(
            3,
            vec![Gate::Fredkin {
                control: 0,
                swaps: [1, 2],
            }],
        )
        .unwrap();
        assert!(check_conservative(&fred, ConservativeMode::Structural, 20)
            .unwrap()
            .is_pass());

        // NOT flips weight: exhaustive fail with counterexample 0 -> 1.
        let not = Circuit::new(1, vec![Gate::Not { target: 0 }]).unwrap();
        match check_conservative(&not, ConservativeMode::Exhaustive, 20).unwrap() {
            ConservativeVerdict::Fail { input, output } => {
                assert_eq!(input, bits("0"));
                assert_eq!(output, bits("1"));
            }
            v => panic!("expected fail, got {v:?}"),
        }

        // Wire swap from three CNOTs: structural fail, exhaustive pass.
        let swap = Circuit::new(
            2,
            vec![
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
                Gate::Cnot {
                    control: 1,
                    target: 0,
                },
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
            ],
        )
        .unwrap();
        assert!(!check_conservative(&swap, ConservativeMode::Structural, 20)
            .unwrap()
            .is_pass());
        assert!(check_conservative(&swap, ConservativeMode::Exhaustive, 20)
            .unwrap()
            .is_pass());
        // And the three CNOTs really do swap the wires.
        assert_eq!(swap.run(&bits("10")).unwrap(), bits("01"));
        assert_eq!(swap.run(&bits("01")).unwrap(), bits("10"));
    }

    #[test]
    fn weight_couple_splits_halves() {
        assert_eq!(
            weight_couple(&bits("1100")).unwrap(),
            WeightCouple {
                half_len: 2,
                left: 2,
                right: 0
            }
        );
        assert_eq!(
            weight_couple(&bits("0000")).unwrap(),
            WeightCouple {
                half_len: 2,
                left: 0,
                right: 0
            }
        );
        assert_eq!(
            weight_couple(&bits("101101")).unwrap(),
            WeightCouple {
                half_len: 3,
                left: 2,
                right: 2
            }
        );
        assert_eq!(
            weight_couple(&bits("101")).unwrap_err(),
            CircuitError::OddLength { len: 3 }
        );
    }
}
