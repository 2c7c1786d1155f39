//! Classical simulation and verification of reversible circuits.
//!
//! Circuits act on basis states only, so a circuit over `w` lines denotes a
//! function on `w`-bit words and reversibility means that function is a
//! permutation. Checks run in one of two modes, chosen automatically: full
//! enumeration when the free input space is at most [`EXHAUSTIVE_LINE_BUDGET`]
//! lines, otherwise at least [`SAMPLE_TARGET`] distinct pseudo-random inputs
//! drawn from a caller-supplied seed, so every verdict is reproducible.

use crate::gates::{apply_gate_in_place, BitState, Polarity};
use crate::netlist::{Circuit, CircuitError};
use std::collections::{HashMap, HashSet};
use std::fmt;

/// Widest free input space that is enumerated exhaustively.
pub const EXHAUSTIVE_LINE_BUDGET: usize = 22;

/// Minimum number of distinct inputs a sampled check draws.
pub const SAMPLE_TARGET: u64 = 100_000;

/// Errors from permutation extraction and table validation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("{line_count} lines exceed the exhaustive enumeration budget of {budget} lines")]
    BudgetExceeded { line_count: usize, budget: usize },
    #[error("permutation table has {len} entries but width {width} requires {expected}")]
    BadTableLength { len: usize, width: usize, expected: u64 },
}

/// Runs a circuit on a basis state, returning the output state.
pub fn run(circuit: &Circuit, input: &BitState) -> Result<BitState, CircuitError> {
    if input.width() != circuit.line_count() {
        return Err(CircuitError::WidthMismatch {
            state: input.width(),
            circuit: circuit.line_count(),
        });
    }
    let mut state = input.clone();
    for gate in circuit.gates() {
        apply_gate_in_place(gate, &mut state);
    }
    Ok(state)
}

/// A gate lowered to word operations, valid for circuits of at most 64
/// lines: fires on `x` iff `x & ctrl_mask == ctrl_val`.
#[derive(Debug, Clone, Copy)]
struct CompiledGate {
    ctrl_mask: u64,
    ctrl_val: u64,
    target: u64,
}

fn compile(circuit: &Circuit) -> Vec<CompiledGate> {
    debug_assert!(circuit.line_count() <= 64);
    circuit
        .gates()
        .iter()
        .map(|g| {
            let mut ctrl_mask = 0u64;
            let mut ctrl_val = 0u64;
            for c in g.controls() {
                let bit = 1u64 << c.line.index();
                ctrl_mask |= bit;
                if c.polarity == Polarity::Positive {
                    ctrl_val |= bit;
                }
            }
            CompiledGate { ctrl_mask, ctrl_val, target: 1u64 << g.target().index() }
        })
        .collect()
}

#[inline]
fn run_compiled(gates: &[CompiledGate], mut x: u64) -> u64 {
    for g in gates {
        if x & g.ctrl_mask == g.ctrl_val {
            x ^= g.target;
        }
    }
    x
}

/// Gates are self-inverse, so the inverse circuit is the reversed list.
#[inline]
fn run_compiled_rev(gates: &[CompiledGate], mut x: u64) -> u64 {
    for g in gates.iter().rev() {
        if x & g.ctrl_mask == g.ctrl_val {
            x ^= g.target;
        }
    }
    x
}

/// SplitMix64 generator; the single RNG used for sampled checks, so seeded
/// verdicts do not depend on platform or crate versions.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// How a check covered the input space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMethod {
    Exhaustive { states: u64 },
    Sampled { samples: u64, seed: u64 },
}

impl fmt::Display for CheckMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckMethod::Exhaustive { states } => write!(f, "exhaustive over {states} states"),
            CheckMethod::Sampled { samples, seed } => {
                write!(f, "{samples} distinct samples, seed {seed}")
            }
        }
    }
}

/// Outcome of a check: pass/fail, the coverage method, and on failure a
/// human-readable description including a concrete counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub pass: bool,
    pub method: CheckMethod,
    pub failure: Option<String>,
}

impl Verdict {
    fn passed(method: CheckMethod) -> Verdict {
        Verdict { pass: true, method, failure: None }
    }

    fn failed(method: CheckMethod, message: String) -> Verdict {
        Verdict { pass: false, method, failure: Some(message) }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "pass ({})", self.method),
            Some(msg) => write!(f, "FAIL ({}): {}", self.method, msg),
        }
    }
}

/// The function a small circuit computes, as an explicit table:
/// `table[x]` is the output state for input `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    width: usize,
    table: Vec<u64>,
}

impl Permutation {
    /// Wraps a raw table. The table length must be exactly `2^width`; the
    /// entries are not otherwise validated, so this can represent a claimed
    /// permutation that [`Permutation::verify_bijective`] then rejects.
    pub fn from_raw(width: usize, table: Vec<u64>) -> Result<Permutation, SimError> {
        if width > EXHAUSTIVE_LINE_BUDGET {
            return Err(SimError::BudgetExceeded {
                line_count: width,
                budget: EXHAUSTIVE_LINE_BUDGET,
            });
        }
        let expected = 1u64 << width;
        if table.len() as u64 != expected {
            return Err(SimError::BadTableLength { len: table.len(), width, expected });
        }
        Ok(Permutation { width, table })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    /// Checks that every output is in range and hit exactly once.
    pub fn verify_bijective(&self) -> Verdict {
        let method = CheckMethod::Exhaustive { states: self.table.len() as u64 };
        // seen[y] stores x + 1 for the first input x that produced y.
        let mut seen = vec![0u64; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            if y as usize >= self.table.len() {
                return Verdict::failed(
                    method,
                    format!("input {x} maps to {y}, outside the {}-line state space", self.width),
                );
            }
            if seen[y as usize] != 0 {
                let prev = seen[y as usize] - 1;
                return Verdict::failed(
                    method,
                    format!("inputs {prev} and {x} both map to {y}, so the map is not injective"),
                );
            }
            seen[y as usize] = x as u64 + 1;
        }
        Verdict::passed(method)
    }

    /// The inverse table, if this table is a bijection.
    pub fn inverse(&self) -> Option<Permutation> {
        if !self.verify_bijective().pass {
            return None;
        }
        let mut table = vec![0u64; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y as usize] = x as u64;
        }
        Some(Permutation { width: self.width, table })
    }
}

/// Enumerates the full truth table of a circuit. Refused for circuits wider
/// than [`EXHAUSTIVE_LINE_BUDGET`] lines; use the sampled checks there.
pub fn extract_permutation(circuit: &Circuit) -> Result<Permutation, SimError> {
    let width = circuit.line_count();
    if width > EXHAUSTIVE_LINE_BUDGET {
        return Err(SimError::BudgetExceeded {
            line_count: width,
            budget: EXHAUSTIVE_LINE_BUDGET,
        });
    }
    let gates = compile(circuit);
    let table = (0..1u64 << width).map(|x| run_compiled(&gates, x)).collect();
    Ok(Permutation { width, table })
}

/// Lines pinned to a constant, as (line, value) pairs.
type Pins = [(usize, bool)];

/// Ancilla constants a circuit's register map declares.
pub fn declared_pins(circuit: &Circuit) -> Vec<(usize, bool)> {
    circuit.registers().ancilla_pins()
}

fn pin_word(pins: &Pins) -> (u64, u64) {
    let mut mask = 0u64;
    let mut value = 0u64;
    for &(line, bit) in pins {
        mask |= 1u64 << line;
        if bit {
            value |= 1u64 << line;
        }
    }
    (mask, value)
}

fn free_lines(width: usize, pins: &Pins) -> Vec<usize> {
    (0..width).filter(|line| pins.iter().all(|&(pinned, _)| pinned != *line)).collect()
}

#[inline]
fn scatter(pattern: u64, free: &[usize]) -> u64 {
    let mut x = 0u64;
    for (i, &line) in free.iter().enumerate() {
        if pattern >> i & 1 == 1 {
            x |= 1u64 << line;
        }
    }
    x
}

/// Drives a predicate over the input space of a circuit of at most 64
/// lines, holding `pins` constant. Exhaustive when the free lines fit the
/// budget, otherwise distinct seeded samples.
fn sweep64(
    width: usize,
    pins: &Pins,
    seed: u64,
    mut check: impl FnMut(u64) -> Option<String>,
) -> Verdict {
    let free = free_lines(width, pins);
    let (_, pin_value) = pin_word(pins);
    if free.len() <= EXHAUSTIVE_LINE_BUDGET {
        let states = 1u64 << free.len();
        let method = CheckMethod::Exhaustive { states };
        for pattern in 0..states {
            if let Some(msg) = check(scatter(pattern, &free) | pin_value) {
                return Verdict::failed(method, msg);
            }
        }
        Verdict::passed(method)
    } else {
        let method = CheckMethod::Sampled { samples: SAMPLE_TARGET, seed };
        let mut rng = SplitMix64::new(seed);
        let pattern_mask = if free.len() >= 64 { u64::MAX } else { (1u64 << free.len()) - 1 };
        let mut seen = HashSet::with_capacity(SAMPLE_TARGET as usize);
        while (seen.len() as u64) < SAMPLE_TARGET {
            let pattern = rng.next_u64() & pattern_mask;
            if !seen.insert(pattern) {
                continue;
            }
            if let Some(msg) = check(scatter(pattern, &free) | pin_value) {
                return Verdict::failed(method, msg);
            }
        }
        Verdict::passed(method)
    }
}

/// Sampled sweep for circuits wider than 64 lines.
fn sweep_wide(
    width: usize,
    pins: &Pins,
    seed: u64,
    mut check: impl FnMut(&BitState) -> Option<String>,
) -> Verdict {
    let method = CheckMethod::Sampled { samples: SAMPLE_TARGET, seed };
    let mut rng = SplitMix64::new(seed);
    let mut seen = HashSet::with_capacity(SAMPLE_TARGET as usize);
    while (seen.len() as u64) < SAMPLE_TARGET {
        let mut state = BitState::zeros(width);
        let words = width.div_ceil(64);
        let mut drawn = Vec::with_capacity(words);
        for _ in 0..words {
            drawn.push(rng.next_u64());
        }
        for line in 0..width {
            state.set(line, drawn[line / 64] >> (line % 64) & 1 == 1);
        }
        for &(line, bit) in pins {
            state.set(line, bit);
        }
        if !seen.insert(state.clone()) {
            continue;
        }
        if let Some(msg) = check(&state) {
            return Verdict::failed(method, msg);
        }
    }
    Verdict::passed(method)
}

/// Checks that a circuit computes a bijection. Circuits built from gates
/// are bijective by construction; this verifies it from the outside, either
/// by full table extraction or by sampling with an inverse round-trip.
pub fn check_bijective(circuit: &Circuit, seed: u64) -> Verdict {
    let width = circuit.line_count();
    if width <= 64 {
        let gates = compile(circuit);
        let mut seen: HashMap<u64, u64> = HashMap::new();
        sweep64(width, &[], seed, |x| {
            let y = run_compiled(&gates, x);
            if let Some(&prev) = seen.get(&y) {
                return Some(format!(
                    "inputs {prev} and {x} both map to {y}, so the map is not injective"
                ));
            }
            seen.insert(y, x);
            let back = run_compiled_rev(&gates, y);
            if back != x {
                return Some(format!(
                    "inverse maps output {y} back to {back}, expected {x}"
                ));
            }
            None
        })
    } else {
        let inverse = circuit.inverse();
        let mut seen: HashMap<BitState, BitState> = HashMap::new();
        sweep_wide(width, &[], seed, |input| {
            let output = run(circuit, input).expect("widths match");
            if let Some(prev) = seen.get(&output) {
                return Some(format!(
                    "inputs {} and {} both map to {}",
                    prev.bits_lsb_first(),
                    input.bits_lsb_first(),
                    output.bits_lsb_first()
                ));
            }
            let back = run(&inverse, &output).expect("widths match");
            seen.insert(output, input.clone());
            if &back != input {
                return Some(format!(
                    "inverse maps an output back to {}, expected {}",
                    back.bits_lsb_first(),
                    input.bits_lsb_first()
                ));
            }
            None
        })
    }
}

/// Checks that every line pinned to a constant (the circuit's declared
/// ancillas plus `extra_pins`) leaves the circuit with that same constant
/// for every assignment of the remaining lines.
pub fn check_ancilla_clean(circuit: &Circuit, extra_pins: &Pins, seed: u64) -> Verdict {
    let mut pins = declared_pins(circuit);
    pins.extend_from_slice(extra_pins);
    let width = circuit.line_count();
    if width <= 64 {
        let gates = compile(circuit);
        sweep64(width, &pins, seed, |x| {
            let y = run_compiled(&gates, x);
            for &(line, bit) in &pins {
                if y >> line & 1 == u64::from(bit) {
                    continue;
                }
                return Some(format!(
                    "line {line} pinned to {} exits as {} on input {x:#b}",
                    u8::from(bit),
                    y >> line & 1,
                ));
            }
            None
        })
    } else {
        sweep_wide(width, &pins, seed, |input| {
            let output = run(circuit, input).expect("widths match");
            for &(line, bit) in &pins {
                if output.get(line) == bit {
                    continue;
                }
                return Some(format!(
                    "line {line} pinned to {} exits as {} on input {}",
                    u8::from(bit),
                    u8::from(output.get(line)),
                    input.bits_lsb_first(),
                ));
            }
            None
        })
    }
}

/// Checks that two circuits over the same lines compute the same function.
pub fn check_equivalent(a: &Circuit, b: &Circuit, seed: u64) -> Result<Verdict, CircuitError> {
    check_equivalent_pinned(a, b, &[], seed)
}

/// Equivalence restricted to inputs where `pins` hold: useful for showing a
/// controlled circuit reduces to a simpler one when its control is fixed.
pub fn check_equivalent_pinned(
    a: &Circuit,
    b: &Circuit,
    pins: &Pins,
    seed: u64,
) -> Result<Verdict, CircuitError> {
    if a.line_count() != b.line_count() {
        return Err(CircuitError::RegisterMismatch);
    }
    let width = a.line_count();
    if width <= 64 {
        let ga = compile(a);
        let gb = compile(b);
        Ok(sweep64(width, pins, seed, |x| {
            let ya = run_compiled(&ga, x);
            let yb = run_compiled(&gb, x);
            if ya != yb {
                return Some(format!("input {x:#b}: outputs differ ({ya:#b} vs {yb:#b})"));
            }
            None
        }))
    } else {
        Ok(sweep_wide(width, pins, seed, |input| {
            let ya = run(a, input).expect("widths match");
            let yb = run(b, input).expect("widths match");
            if ya != yb {
                return Some(format!(
                    "input {}: outputs differ ({} vs {})",
                    input.bits_lsb_first(),
                    ya.bits_lsb_first(),
                    yb.bits_lsb_first()
                ));
            }
            None
        }))
    }
}
