//! Five-control-line ALU: builder, normative semantics, decode table, and
//! brute-force discovery of what every control vector actually computes.
//!
//! The unit is one circuit whose behavior is selected by five control
//! lines, serialized in decode-table column order:
//!
//! * `k1` (C_carryxor) enables the carry chain and its feedback into sums,
//! * `k2` (C_snot) complements every sum bit,
//! * `k3` (C_aANDb) with `k4 = k5 = 0` suppresses the a·b carry term,
//! * `k4` (C_bnot) complements the B operand on the way in,
//! * `k5` (C_SUB) complements the A operand on the way in.
//!
//! Writing `x_i = a_i XOR k5`, `y_i = b_i XOR k4` and
//! `g = NOT(k3 AND NOT k4 AND NOT k5)`, the unit computes
//!
//! ```text
//! c_0 = 0
//! c_i = g (x_i y_i)  XOR  k1 (x_i XOR y_i) c_(i-1)
//! s_i = x_i XOR y_i XOR k1 c_(i-1) XOR k2
//! ```
//!
//! leaving X on the A register, S on the B register and the chain on the
//! carry register. [`semantics`] evaluates these recurrences directly;
//! [`build_alu`] realizes them as gates; [`check_model_agreement`] ties the
//! two together; [`discover_map`] classifies all 32 control vectors; and
//! [`conformance_report`] grades the nine published decode rows against
//! the observed behavior.

use crate::arith::{oracle_add, oracle_sub, validate_operand, validate_width, ArithError};
use crate::gates::{BitState, Control, Gate};
use crate::netlist::{Circuit, CtrlName, Role};
use crate::simulator::{
    run, CheckMethod, SplitMix64, Verdict, EXHAUSTIVE_LINE_BUDGET, SAMPLE_TARGET,
};
use std::collections::HashSet;
use std::fmt;

/// The five selector bits, in decode-table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ControlVector {
    pub k1: bool,
    pub k2: bool,
    pub k3: bool,
    pub k4: bool,
    pub k5: bool,
}

impl ControlVector {
    pub const COUNT: usize = 32;

    pub fn new(k1: bool, k2: bool, k3: bool, k4: bool, k5: bool) -> ControlVector {
        ControlVector { k1, k2, k3, k4, k5 }
    }

    /// Vector for an index in `0..32`, reading k1 as the high bit so the
    /// index order matches the serialized bit-string order.
    pub fn from_index(i: usize) -> ControlVector {
        assert!(i < Self::COUNT, "control vector index {i} out of range");
        ControlVector {
            k1: i >> 4 & 1 == 1,
            k2: i >> 3 & 1 == 1,
            k3: i >> 2 & 1 == 1,
            k4: i >> 1 & 1 == 1,
            k5: i & 1 == 1,
        }
    }

    pub fn index(self) -> usize {
        usize::from(self.k1) << 4
            | usize::from(self.k2) << 3
            | usize::from(self.k3) << 2
            | usize::from(self.k4) << 1
            | usize::from(self.k5)
    }

    /// All 32 vectors in ascending bit-string order.
    pub fn all() -> impl Iterator<Item = ControlVector> {
        (0..Self::COUNT).map(ControlVector::from_index)
    }

    /// Parses a five-character bit string like `"10100"`, k1 first.
    pub fn parse(s: &str) -> Option<ControlVector> {
        let bytes = s.as_bytes();
        if bytes.len() != 5 || bytes.iter().any(|b| *b != b'0' && *b != b'1') {
            return None;
        }
        let mut i = 0usize;
        for b in bytes {
            i = i << 1 | usize::from(*b == b'1');
        }
        Some(ControlVector::from_index(i))
    }

    pub fn bits(self) -> [bool; 5] {
        [self.k1, self.k2, self.k3, self.k4, self.k5]
    }
}

impl fmt::Display for ControlVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.bits() {
            write!(f, "{}", u8::from(bit))?;
        }
        Ok(())
    }
}

/// The intended operation repertoire of the unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AluOp {
    Add,
    Sub,
    /// B - A, subtraction with the operands reversed.
    Rsub,
    Xor,
    Xnor,
    /// Complement of A on the sum register. Only correct when B = 0: on
    /// the full domain the same vector computes XNOR.
    NotA,
    /// Bitwise AND, read from carry lines 1..n instead of the sum.
    AndCarry,
    /// Complement of bitwise OR on the carry lines (the chain holds
    /// NOT(a) AND NOT(b), which De Morgan turns into NOT(a OR b)).
    NorCarry,
    /// No operation. Has no control vector; realized as the empty circuit.
    Nop,
}

impl AluOp {
    pub const ALL: [AluOp; 9] = [
        AluOp::Add,
        AluOp::Sub,
        AluOp::Rsub,
        AluOp::Xor,
        AluOp::Xnor,
        AluOp::NotA,
        AluOp::AndCarry,
        AluOp::NorCarry,
        AluOp::Nop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AluOp::Add => "ADD",
            AluOp::Sub => "SUB",
            AluOp::Rsub => "RSUB",
            AluOp::Xor => "XOR",
            AluOp::Xnor => "XNOR",
            AluOp::NotA => "NOT_A",
            AluOp::AndCarry => "AND_CARRY",
            AluOp::NorCarry => "NOR_CARRY",
            AluOp::Nop => "NOP",
        }
    }

    pub fn parse(s: &str) -> Option<AluOp> {
        AluOp::ALL.into_iter().find(|op| op.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for AluOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Canonical control vector for an operation, or `None` for NOP, which has
/// no decodable vector and is realized as the empty circuit.
pub fn encode_op(op: AluOp) -> Option<ControlVector> {
    let bits = match op {
        AluOp::Add => "10000",
        AluOp::Sub => "11101",
        AluOp::Rsub => "11110",
        AluOp::Xor => "00000",
        AluOp::Xnor => "01000",
        AluOp::NotA => "00001",
        AluOp::AndCarry => "00000",
        AluOp::NorCarry => "00011",
        AluOp::Nop => return None,
    };
    Some(ControlVector::parse(bits).expect("table entries are valid"))
}

/// Outputs of one evaluation: the (possibly complemented) A register, the
/// sum register, and the full carry register with c_0 at bit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AluEval {
    pub a_out: u64,
    pub sum: u64,
    pub carries: u64,
}

fn mask(n: usize) -> u64 {
    (1u64 << n) - 1
}

/// Direct evaluation of the unit's recurrences as integer bit operations,
/// independent of any circuit.
pub fn semantics(k: ControlVector, n: usize, a: u64, b: u64) -> Result<AluEval, ArithError> {
    validate_width(n)?;
    validate_operand(n, a)?;
    validate_operand(n, b)?;
    let g = !(k.k3 && !k.k4 && !k.k5);
    let x = if k.k5 { a ^ mask(n) } else { a };
    let y = if k.k4 { b ^ mask(n) } else { b };
    let mut carry = false;
    let mut sum = 0u64;
    let mut carries = 0u64;
    for i in 0..n {
        let xi = x >> i & 1 == 1;
        let yi = y >> i & 1 == 1;
        sum |= u64::from(xi ^ yi ^ (k.k1 && carry) ^ k.k2) << i;
        carry = (g && xi && yi) ^ (k.k1 && (xi ^ yi) && carry);
        carries |= u64::from(carry) << (i + 1);
    }
    Ok(AluEval { a_out: x, sum, carries })
}

/// Register geometry shared by [`build_alu`] and [`nop_circuit`]: the five
/// control lines, A, B, the carry chain, and the g scratch line.
fn alu_geometry(n: usize) -> Circuit {
    let mut c = Circuit::new(3 * n + 7).expect("nonzero lines");
    for (i, name) in CtrlName::ALL.iter().enumerate() {
        c.add_register(Role::Ctrl(*name), i, i).expect("geometry");
        c.set_label(i, &format!("k{}", i + 1)).expect("in range");
    }
    c.add_register(Role::A, 5, 4 + n).expect("geometry");
    c.add_register(Role::B, 5 + n, 4 + 2 * n).expect("geometry");
    c.add_register(Role::Carry, 5 + 2 * n, 5 + 3 * n).expect("geometry");
    c.add_register(Role::Anc(false), 3 * n + 6, 3 * n + 6).expect("geometry");
    for i in 1..=n {
        c.set_label(4 + i, &format!("a{i}")).expect("in range");
        c.set_label(4 + n + i, &format!("b{i}")).expect("in range");
    }
    for i in 0..=n {
        c.set_label(5 + 2 * n + i, &format!("c{i}")).expect("in range");
    }
    c.set_label(3 * n + 6, "g").expect("in range");
    c
}

/// Builds the n-bit unit over 3n + 7 lines. On inputs with a zeroed carry
/// register and g = 0, the registers exit exactly as [`semantics`]
/// prescribes, and g returns to 0.
pub fn build_alu(n: usize) -> Result<Circuit, ArithError> {
    validate_width(n)?;
    let mut c = alu_geometry(n);
    let (k1, k2, k3, k4, k5) = (0usize, 1usize, 2usize, 3usize, 4usize);
    let a = |i: usize| 5 + i;
    let b = |i: usize| 5 + n + i;
    let chain = |j: usize| 5 + 2 * n + j;
    let g = 3 * n + 6;

    for i in 0..n {
        c.push(Gate::cnot(k5, a(i))).expect("in range");
    }
    for i in 0..n {
        c.push(Gate::cnot(k4, b(i))).expect("in range");
    }
    // g starts at 0; these two gates set it to NOT(k3 AND NOT k4 AND NOT k5).
    c.push(Gate::not(g)).expect("in range");
    let g_term = || {
        Gate::mcx(vec![Control::pos(k3), Control::neg(k4), Control::neg(k5)], g)
            .expect("distinct lines")
    };
    c.push(g_term()).expect("in range");
    for i in 0..n {
        c.push(
            Gate::mcx(vec![Control::pos(g), Control::pos(a(i)), Control::pos(b(i))], chain(i + 1))
                .expect("distinct lines"),
        )
        .expect("in range");
        c.push(Gate::cnot(a(i), b(i))).expect("in range");
        c.push(
            Gate::mcx(
                vec![Control::pos(k1), Control::pos(b(i)), Control::pos(chain(i))],
                chain(i + 1),
            )
            .expect("distinct lines"),
        )
        .expect("in range");
        c.push(Gate::toffoli(k1, chain(i), b(i))).expect("in range");
        c.push(Gate::cnot(k2, b(i))).expect("in range");
    }
    // Uncompute g so the scratch line exits as the 0 it came in with.
    c.push(g_term()).expect("in range");
    c.push(Gate::not(g)).expect("in range");
    Ok(c)
}

/// The NOP configuration: the unit's geometry with no gates at all.
pub fn nop_circuit(n: usize) -> Result<Circuit, ArithError> {
    validate_width(n)?;
    Ok(alu_geometry(n))
}

/// Prepares the input state for one evaluation and runs the circuit.
fn run_alu_state(circuit: &Circuit, k: ControlVector, a: u64, b: u64) -> BitState {
    let regs = circuit.registers();
    let mut input = BitState::zeros(circuit.line_count());
    for (name, bit) in CtrlName::ALL.iter().zip(k.bits()) {
        regs.write(Role::Ctrl(*name), &mut input, u64::from(bit));
    }
    regs.write(Role::A, &mut input, a);
    regs.write(Role::B, &mut input, b);
    run(circuit, &input).expect("widths match")
}

fn read_eval(circuit: &Circuit, output: &BitState) -> AluEval {
    let regs = circuit.registers();
    AluEval {
        a_out: regs.read(Role::A, output).expect("A declared"),
        sum: regs.read(Role::B, output).expect("B declared"),
        carries: regs.read(Role::Carry, output).expect("carry declared"),
    }
}

/// Circuit outputs for every operand pair under one vector, indexed by
/// `(a << n) | b`.
fn sweep_vector(circuit: &Circuit, n: usize, k: ControlVector) -> Vec<AluEval> {
    let mut evals = Vec::with_capacity(1 << (2 * n));
    for a in 0..1u64 << n {
        for b in 0..1u64 << n {
            let output = run_alu_state(circuit, k, a, b);
            evals.push(read_eval(circuit, &output));
        }
    }
    evals
}

fn eval_at(evals: &[AluEval], n: usize, a: u64, b: u64) -> &AluEval {
    &evals[((a << n) | b) as usize]
}

/// What a vector computes on the sum (B) register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumBehavior {
    Add,
    Sub,
    Rsub,
    Xor,
    Xnor,
    Identity,
    /// Complement of A, but only on the B = 0 operand slice.
    NotASlice,
    /// None of the oracle family; the payload is the width-1 truth table,
    /// bit (a << 1) | b, input order (0,0),(0,1),(1,0),(1,1).
    Other(u8),
}

/// What a vector computes on the carry register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarryBehavior {
    Zero,
    /// Bitwise a AND b on chain lines 1..n.
    And,
    /// Bitwise NOT(a) AND NOT(b) = NOT(a OR b) on chain lines 1..n.
    Nor,
    /// The addition carry chain of A + B.
    Carries,
    /// The subtraction borrow chain of A - B.
    Borrows,
    /// None of the above; width-1 truth table of the single chain bit.
    Other(u8),
}

impl CarryBehavior {
    /// De Morgan reading of the complemented chain lines, for the bitwise
    /// classifications.
    pub fn complement_reading(self) -> Option<&'static str> {
        match self {
            CarryBehavior::And => Some("NAND"),
            CarryBehavior::Nor => Some("OR"),
            CarryBehavior::Zero => Some("ONES"),
            _ => None,
        }
    }
}

fn tt_string(tt: u8) -> String {
    (0..4).map(|i| if tt >> i & 1 == 1 { '1' } else { '0' }).collect()
}

impl fmt::Display for SumBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumBehavior::Add => f.write_str("ADD"),
            SumBehavior::Sub => f.write_str("SUB"),
            SumBehavior::Rsub => f.write_str("RSUB"),
            SumBehavior::Xor => f.write_str("XOR"),
            SumBehavior::Xnor => f.write_str("XNOR"),
            SumBehavior::Identity => f.write_str("IDENTITY"),
            SumBehavior::NotASlice => f.write_str("NOT_A_SLICE"),
            SumBehavior::Other(tt) => write!(f, "OTHER tt {}", tt_string(*tt)),
        }
    }
}

impl fmt::Display for CarryBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarryBehavior::Zero => f.write_str("ZERO"),
            CarryBehavior::And => f.write_str("AND"),
            CarryBehavior::Nor => f.write_str("NOR"),
            CarryBehavior::Carries => f.write_str("CARRIES"),
            CarryBehavior::Borrows => f.write_str("BORROWS"),
            CarryBehavior::Other(tt) => write!(f, "OTHER tt {}", tt_string(*tt)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SumLabel {
    Add,
    Sub,
    Rsub,
    Xor,
    Xnor,
    Identity,
}

const SUM_PRIORITY: [SumLabel; 6] = [
    SumLabel::Add,
    SumLabel::Sub,
    SumLabel::Rsub,
    SumLabel::Xor,
    SumLabel::Xnor,
    SumLabel::Identity,
];

fn sum_expected(label: SumLabel, n: usize, a: u64, b: u64) -> u64 {
    match label {
        SumLabel::Add => (a + b) & mask(n),
        SumLabel::Sub => a.wrapping_sub(b) & mask(n),
        SumLabel::Rsub => b.wrapping_sub(a) & mask(n),
        SumLabel::Xor => a ^ b,
        SumLabel::Xnor => (a ^ b) ^ mask(n),
        SumLabel::Identity => b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CarryLabel {
    Zero,
    And,
    Nor,
    Carries,
    Borrows,
}

const CARRY_PRIORITY: [CarryLabel; 5] = [
    CarryLabel::Zero,
    CarryLabel::And,
    CarryLabel::Nor,
    CarryLabel::Carries,
    CarryLabel::Borrows,
];

fn carry_expected(label: CarryLabel, n: usize, a: u64, b: u64) -> u64 {
    match label {
        CarryLabel::Zero => 0,
        CarryLabel::And => (a & b) << 1,
        CarryLabel::Nor => ((a ^ mask(n)) & (b ^ mask(n))) << 1,
        CarryLabel::Carries => oracle_add(n, a, b, false).expect("in range").carries,
        CarryLabel::Borrows => oracle_sub(n, a, b).expect("in range").borrows,
    }
}

fn holds_everywhere(n: usize, evals: &[AluEval], expected: impl Fn(u64, u64) -> u64) -> bool {
    for a in 0..1u64 << n {
        for b in 0..1u64 << n {
            if eval_at(evals, n, a, b).sum != expected(a, b) {
                return false;
            }
        }
    }
    true
}

fn carry_holds_everywhere(
    n: usize,
    evals: &[AluEval],
    expected: impl Fn(u64, u64) -> u64,
) -> bool {
    for a in 0..1u64 << n {
        for b in 0..1u64 << n {
            if eval_at(evals, n, a, b).carries != expected(a, b) {
                return false;
            }
        }
    }
    true
}

/// Behavior labels for one vector, with the width-1 evaluations on hand
/// for truth-table fallbacks. `confirm` carries width-2 evaluations when
/// the primary width is 1, because width-1 arithmetic is carry-free and
/// cannot distinguish, say, ADD from XOR.
struct VectorEvidence<'a> {
    n: usize,
    evals: &'a [AluEval],
    confirm: Option<&'a [AluEval]>,
    tiny: &'a [AluEval],
}

impl VectorEvidence<'_> {
    fn classify_sum(&self) -> SumBehavior {
        let label_holds = |label: SumLabel| {
            holds_everywhere(self.n, self.evals, |a, b| sum_expected(label, self.n, a, b))
                && self.confirm.is_none_or(|evals| {
                    holds_everywhere(2, evals, |a, b| sum_expected(label, 2, a, b))
                })
        };
        for label in SUM_PRIORITY {
            if label_holds(label) {
                return match label {
                    SumLabel::Add => SumBehavior::Add,
                    SumLabel::Sub => SumBehavior::Sub,
                    SumLabel::Rsub => SumBehavior::Rsub,
                    SumLabel::Xor => SumBehavior::Xor,
                    SumLabel::Xnor => SumBehavior::Xnor,
                    SumLabel::Identity => SumBehavior::Identity,
                };
            }
        }
        let slice_holds = |n: usize, evals: &[AluEval]| {
            (0..1u64 << n).all(|a| eval_at(evals, n, a, 0).sum == a ^ mask(n))
        };
        if slice_holds(self.n, self.evals)
            && self.confirm.is_none_or(|evals| slice_holds(2, evals))
        {
            return SumBehavior::NotASlice;
        }
        SumBehavior::Other(self.tiny_tt(|eval| eval.sum))
    }

    fn classify_carry(&self) -> CarryBehavior {
        let label_holds = |label: CarryLabel| {
            carry_holds_everywhere(self.n, self.evals, |a, b| {
                carry_expected(label, self.n, a, b)
            }) && self.confirm.is_none_or(|evals| {
                carry_holds_everywhere(2, evals, |a, b| carry_expected(label, 2, a, b))
            })
        };
        for label in CARRY_PRIORITY {
            if label_holds(label) {
                return match label {
                    CarryLabel::Zero => CarryBehavior::Zero,
                    CarryLabel::And => CarryBehavior::And,
                    CarryLabel::Nor => CarryBehavior::Nor,
                    CarryLabel::Carries => CarryBehavior::Carries,
                    CarryLabel::Borrows => CarryBehavior::Borrows,
                };
            }
        }
        CarryBehavior::Other(self.tiny_tt(|eval| eval.carries >> 1))
    }

    /// Width-1 truth table of a selected output bit, bit (a << 1) | b.
    fn tiny_tt(&self, pick: impl Fn(&AluEval) -> u64) -> u8 {
        let mut tt = 0u8;
        for a in 0..2u64 {
            for b in 0..2u64 {
                if pick(eval_at(self.tiny, 1, a, b)) & 1 == 1 {
                    tt |= 1 << (a << 1 | b);
                }
            }
        }
        tt
    }
}

/// One row of the discovered map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapEntry {
    pub vector: ControlVector,
    pub sum: SumBehavior,
    pub carry: CarryBehavior,
}

/// Observed behavior of all 32 control vectors at a given width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationMap {
    pub n: usize,
    pub entries: Vec<MapEntry>,
}

impl OperationMap {
    pub fn entry(&self, vector: ControlVector) -> &MapEntry {
        &self.entries[vector.index()]
    }

    fn write_text(&self, out: &mut String) {
        use std::fmt::Write;
        writeln!(out, "map n {}", self.n).expect("string write");
        for e in &self.entries {
            let complement = e.carry.complement_reading().unwrap_or("-");
            writeln!(
                out,
                "vec {} sum {} carry {} complement {}",
                e.vector, e.sum, e.carry, complement
            )
            .expect("string write");
        }
    }
}

/// Simulates every (A, B) pair under every control vector and classifies
/// the sum register against {A+B, A-B, B-A, XOR, XNOR, NOT-A-on-slice,
/// identity} and the carry register against {zero, AND, NOR, carries,
/// borrows}, independently. Unmatched behavior is recorded as a width-1
/// truth table. Exhaustive, so the width is capped at 4.
pub fn discover_map(n: usize) -> Result<OperationMap, ArithError> {
    validate_width(n)?;
    if n > 4 {
        return Err(ArithError::ClassifyWidth(n));
    }
    let circuit = build_alu(n)?;
    let tiny_circuit = build_alu(1)?;
    let confirm_circuit = if n == 1 { Some(build_alu(2)?) } else { None };
    let mut entries = Vec::with_capacity(ControlVector::COUNT);
    for vector in ControlVector::all() {
        let evals = sweep_vector(&circuit, n, vector);
        let tiny = sweep_vector(&tiny_circuit, 1, vector);
        let confirm = confirm_circuit.as_ref().map(|c| sweep_vector(c, 2, vector));
        let evidence =
            VectorEvidence { n, evals: &evals, confirm: confirm.as_deref(), tiny: &tiny };
        entries.push(MapEntry {
            vector,
            sum: evidence.classify_sum(),
            carry: evidence.classify_carry(),
        });
    }
    Ok(OperationMap { n, entries })
}

/// Verdict for one published decode row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowVerdict {
    /// The claim holds on the full operand domain.
    Pass,
    /// The claim holds only on the B = 0 operand slice.
    Partial,
    /// The claim fails outright.
    Mismatch,
    /// The row has no decodable vector, so nothing can be checked.
    Undetermined,
}

impl fmt::Display for RowVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowVerdict::Pass => "PASS",
            RowVerdict::Partial => "PARTIAL",
            RowVerdict::Mismatch => "MISMATCH",
            RowVerdict::Undetermined => "UNDETERMINED",
        })
    }
}

/// What a decode row claims about the sum register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SumClaim {
    Xor,
    Xnor,
    NotA,
    Sub,
    Rsub,
}

impl SumClaim {
    fn expected(self, n: usize, a: u64, b: u64) -> u64 {
        match self {
            SumClaim::Xor => a ^ b,
            SumClaim::Xnor => (a ^ b) ^ mask(n),
            SumClaim::NotA => a ^ mask(n),
            SumClaim::Sub => a.wrapping_sub(b) & mask(n),
            SumClaim::Rsub => b.wrapping_sub(a) & mask(n),
        }
    }

    fn text(self) -> &'static str {
        match self {
            SumClaim::Xor => "A XOR B",
            SumClaim::Xnor => "NOT(A XOR B)",
            SumClaim::NotA => "NOT A",
            SumClaim::Sub => "A - B",
            SumClaim::Rsub => "B - A",
        }
    }
}

/// What a decode row claims about the carry register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CarryClaim {
    And,
    Nand,
}

impl CarryClaim {
    fn expected(self, n: usize, a: u64, b: u64) -> u64 {
        match self {
            CarryClaim::And => (a & b) << 1,
            CarryClaim::Nand => ((a & b) ^ mask(n)) << 1,
        }
    }

    fn text(self) -> &'static str {
        match self {
            CarryClaim::And => "A AND B",
            CarryClaim::Nand => "NOT(A AND B)",
        }
    }
}

struct RowClaim {
    id: u8,
    vector: Option<&'static str>,
    claimed: &'static str,
    sum: Option<SumClaim>,
    carry: Option<CarryClaim>,
}

/// The nine published decode rows: vector bits in k1..k5 order, the row's
/// operation text, and the checkable content of that text.
const ROW_CLAIMS: [RowClaim; 9] = [
    RowClaim {
        id: 1,
        vector: Some("10100"),
        claimed: "A XOR B",
        sum: Some(SumClaim::Xor),
        carry: None,
    },
    RowClaim {
        id: 2,
        vector: Some("11100"),
        claimed: "NOT(A XOR B)",
        sum: Some(SumClaim::Xnor),
        carry: None,
    },
    RowClaim {
        id: 3,
        vector: Some("00000"),
        claimed: "A XOR B and A AND B",
        sum: Some(SumClaim::Xor),
        carry: Some(CarryClaim::And),
    },
    RowClaim {
        id: 4,
        vector: Some("01000"),
        claimed: "NOT(A XOR B)",
        sum: Some(SumClaim::Xnor),
        carry: None,
    },
    RowClaim {
        id: 5,
        vector: Some("00001"),
        claimed: "NOT A",
        sum: Some(SumClaim::NotA),
        carry: None,
    },
    RowClaim {
        id: 6,
        vector: Some("11101"),
        claimed: "A - B (A + NOT B + 1)",
        sum: Some(SumClaim::Sub),
        carry: None,
    },
    RowClaim {
        id: 7,
        vector: Some("11110"),
        claimed: "B - A (NOT B + A)",
        sum: Some(SumClaim::Rsub),
        carry: None,
    },
    RowClaim { id: 8, vector: None, claimed: "NOP", sum: None, carry: None },
    RowClaim {
        id: 9,
        vector: Some("01011"),
        claimed: "NOT(A AND B) (NOT(A+B))",
        sum: None,
        carry: Some(CarryClaim::Nand),
    },
];

/// One graded decode row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReport {
    pub id: u8,
    pub vector: Option<ControlVector>,
    pub claimed: String,
    pub observed: String,
    pub verdict: RowVerdict,
    pub note: Option<String>,
}

/// The graded decode table plus the full discovered map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformanceReport {
    pub n: usize,
    pub rows: Vec<RowReport>,
    pub map: OperationMap,
}

impl ConformanceReport {
    /// The verdicts the canonical model produces, in row order. Rows 1-4,
    /// 6 and 7 hold outright; row 5's NOT A holds only on the B = 0
    /// slice; row 8 has nothing to check; row 9's claimed NAND readout is
    /// actually NOR.
    pub fn expected_verdicts() -> [RowVerdict; 9] {
        [
            RowVerdict::Pass,
            RowVerdict::Pass,
            RowVerdict::Pass,
            RowVerdict::Pass,
            RowVerdict::Partial,
            RowVerdict::Pass,
            RowVerdict::Pass,
            RowVerdict::Undetermined,
            RowVerdict::Mismatch,
        ]
    }

    pub fn verdicts(&self) -> Vec<RowVerdict> {
        self.rows.iter().map(|r| r.verdict).collect()
    }

    pub fn matches_expected(&self) -> bool {
        self.verdicts() == Self::expected_verdicts()
    }

    /// Line-oriented serialization: one `row` line per decode row (each
    /// followed by a `note` line when there is something to explain), then
    /// the full map, then `end`.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "conformance n {}", self.n).expect("string write");
        for row in &self.rows {
            let vec_text =
                row.vector.map_or_else(|| "XXXXX".to_string(), |v| v.to_string());
            writeln!(
                out,
                "row {} vec {} claimed \"{}\" observed \"{}\" verdict {}",
                row.id, vec_text, row.claimed, row.observed, row.verdict
            )
            .expect("string write");
            if let Some(note) = &row.note {
                writeln!(out, "note {} {}", row.id, note).expect("string write");
            }
        }
        self.map.write_text(&mut out);
        out.push_str("end\n");
        out
    }
}

/// Grades the nine published decode rows against the built circuit at
/// width n: PASS when the row's claim holds on the whole operand domain,
/// PARTIAL when it holds only with B = 0, MISMATCH when it fails, and
/// UNDETERMINED for the vectorless NOP row. Includes the full 32-vector
/// map for context.
pub fn conformance_report(n: usize) -> Result<ConformanceReport, ArithError> {
    let map = discover_map(n)?;
    let circuit = build_alu(n)?;
    let tiny_circuit = build_alu(1)?;
    let mut rows = Vec::with_capacity(ROW_CLAIMS.len());
    for claim in &ROW_CLAIMS {
        rows.push(grade_row(claim, n, &circuit, &tiny_circuit, &map));
    }
    Ok(ConformanceReport { n, rows, map })
}

fn claim_holds(
    claim: &RowClaim,
    n: usize,
    evals: &[AluEval],
    domain: impl Iterator<Item = (u64, u64)>,
) -> bool {
    for (a, b) in domain {
        let eval = eval_at(evals, n, a, b);
        if let Some(sum) = claim.sum {
            if eval.sum != sum.expected(n, a, b) {
                return false;
            }
        }
        if let Some(carry) = claim.carry {
            if eval.carries != carry.expected(n, a, b) {
                return false;
            }
        }
    }
    true
}

fn grade_row(
    claim: &RowClaim,
    n: usize,
    circuit: &Circuit,
    tiny_circuit: &Circuit,
    map: &OperationMap,
) -> RowReport {
    let Some(vector) = claim.vector.map(|bits| {
        ControlVector::parse(bits).expect("row table vectors are valid")
    }) else {
        return RowReport {
            id: claim.id,
            vector: None,
            claimed: claim.claimed.to_string(),
            observed: "none".to_string(),
            verdict: RowVerdict::Undetermined,
            note: Some(
                "all five columns are dont-care; NOP is realized as the empty circuit"
                    .to_string(),
            ),
        };
    };

    let entry = map.entry(vector);
    let observed = format!("S={} carry={}", entry.sum, entry.carry);
    let evals = sweep_vector(circuit, n, vector);

    let full = (0..1u64 << n).flat_map(|a| (0..1u64 << n).map(move |b| (a, b)));
    let slice = (0..1u64 << n).map(|a| (a, 0));
    let (verdict, note) = if claim_holds(claim, n, &evals, full) {
        (RowVerdict::Pass, None)
    } else if claim_holds(claim, n, &evals, slice) {
        let note = format!(
            "full-domain S is {}; the claim holds only on the B=0 slice",
            entry.sum
        );
        (RowVerdict::Partial, Some(note))
    } else {
        (RowVerdict::Mismatch, Some(mismatch_note(claim, tiny_circuit, vector)))
    };

    RowReport {
        id: claim.id,
        vector: Some(vector),
        claimed: claim.claimed.to_string(),
        observed,
        verdict,
        note,
    }
}

/// Builds a width-1 counterexample for a failed claim, naming the first
/// (A, B) in scan order where a claimed register disagrees.
fn mismatch_note(claim: &RowClaim, tiny_circuit: &Circuit, vector: ControlVector) -> String {
    let evals = sweep_vector(tiny_circuit, 1, vector);
    for a in 0..2u64 {
        for b in 0..2u64 {
            let eval = eval_at(&evals, 1, a, b);
            if let Some(sum) = claim.sum {
                let want = sum.expected(1, a, b);
                if eval.sum != want {
                    return format!(
                        "counterexample at n=1 A={a} B={b}: S reads {} but the claimed {} \
                         gives {want}",
                        eval.sum,
                        sum.text()
                    );
                }
            }
            if let Some(carry) = claim.carry {
                let want = carry.expected(1, a, b) >> 1;
                let got = eval.carries >> 1;
                if got != want {
                    return format!(
                        "counterexample at n=1 A={a} B={b}: carry bit reads {got} but the \
                         claimed {} gives {want}",
                        carry.text()
                    );
                }
            }
        }
    }
    "claim fails at the report width but not at n=1".to_string()
}

/// Differential check of the circuit against [`semantics`]: for every
/// control vector and operand pair (exhaustively when 5 + 2n input lines
/// fit the budget, sampled otherwise), the A, B and carry registers must
/// match the recurrences, the control lines must pass through unchanged,
/// and the g scratch line must exit 0.
pub fn check_model_agreement(n: usize, seed: u64) -> Result<Verdict, ArithError> {
    validate_width(n)?;
    let circuit = build_alu(n)?;
    let case = |k: ControlVector, a: u64, b: u64| -> Option<String> {
        let output = run_alu_state(&circuit, k, a, b);
        let got = read_eval(&circuit, &output);
        let want = semantics(k, n, a, b).expect("validated inputs");
        let regs = circuit.registers();
        for (i, (name, bit)) in CtrlName::ALL.iter().zip(k.bits()).enumerate() {
            if regs.read(Role::Ctrl(*name), &output) != Some(u64::from(bit)) {
                return Some(format!("k={k} A={a} B={b}: control line k{} changed", i + 1));
            }
        }
        if regs.read(Role::Anc(false), &output) != Some(0) {
            return Some(format!("k={k} A={a} B={b}: scratch line g exits dirty"));
        }
        if got.a_out != want.a_out {
            Some(format!(
                "k={k} A={a} B={b}: A register holds {}, model says {}",
                got.a_out, want.a_out
            ))
        } else if got.sum != want.sum {
            Some(format!(
                "k={k} A={a} B={b}: sum register holds {}, model says {}",
                got.sum, want.sum
            ))
        } else if got.carries != want.carries {
            Some(format!(
                "k={k} A={a} B={b}: carry register holds {:#b}, model says {:#b}",
                got.carries, want.carries
            ))
        } else {
            None
        }
    };

    let input_lines = 5 + 2 * n;
    if input_lines <= EXHAUSTIVE_LINE_BUDGET {
        let method = CheckMethod::Exhaustive { states: 1 << input_lines };
        for k in ControlVector::all() {
            for a in 0..1u64 << n {
                for b in 0..1u64 << n {
                    if let Some(msg) = case(k, a, b) {
                        return Ok(Verdict { pass: false, method, failure: Some(msg) });
                    }
                }
            }
        }
        Ok(Verdict { pass: true, method, failure: None })
    } else {
        let method = CheckMethod::Sampled { samples: SAMPLE_TARGET, seed };
        let mut rng = SplitMix64::new(seed);
        let mut seen: HashSet<(usize, u64, u64)> = HashSet::new();
        while (seen.len() as u64) < SAMPLE_TARGET {
            let k_index = (rng.next_u64() & 31) as usize;
            let a = rng.next_u64() & mask(n);
            let b = rng.next_u64() & mask(n);
            if !seen.insert((k_index, a, b)) {
                continue;
            }
            if let Some(msg) = case(ControlVector::from_index(k_index), a, b) {
                return Ok(Verdict { pass: false, method, failure: Some(msg) });
            }
        }
        Ok(Verdict { pass: true, method, failure: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_vectors_round_trip() {
        let v = ControlVector::parse("10100").unwrap();
        assert_eq!(v, ControlVector::new(true, false, true, false, false));
        assert_eq!(v.to_string(), "10100");
        assert_eq!(v.index(), 0b10100);
        assert_eq!(ControlVector::all().count(), 32);
        for (i, k) in ControlVector::all().enumerate() {
            assert_eq!(k.index(), i);
            assert_eq!(ControlVector::parse(&k.to_string()), Some(k));
        }
        assert_eq!(ControlVector::parse("1010"), None);
        assert_eq!(ControlVector::parse("1010X"), None);
    }

    #[test]
    fn encode_table_is_frozen() {
        let expect = [
            (AluOp::Add, Some("10000")),
            (AluOp::Sub, Some("11101")),
            (AluOp::Rsub, Some("11110")),
            (AluOp::Xor, Some("00000")),
            (AluOp::Xnor, Some("01000")),
            (AluOp::NotA, Some("00001")),
            (AluOp::AndCarry, Some("00000")),
            (AluOp::NorCarry, Some("00011")),
            (AluOp::Nop, None),
        ];
        for (op, bits) in expect {
            assert_eq!(encode_op(op).map(|v| v.to_string()), bits.map(String::from), "{op}");
        }
        assert_eq!(AluOp::parse("nor_carry"), Some(AluOp::NorCarry));
        assert_eq!(AluOp::parse("bogus"), None);
    }

    #[test]
    fn geometry_and_cost_closed_forms() {
        for n in 1..=5 {
            let c = build_alu(n).unwrap();
            assert_eq!(c.line_count(), 3 * n + 7);
            assert!(c.registers().covers_all(c.line_count()));
            let cost = c.cost_report();
            assert_eq!(cost.gate_count, 7 * n + 4);
            assert_eq!(cost.quantum_cost, 35 * n as u64 + 28);

            let nop = nop_circuit(n).unwrap();
            assert_eq!(nop.gates().len(), 0);
            assert_eq!(nop.registers(), c.registers());
        }
    }

    #[test]
    fn addition_vector_adds() {
        let c = build_alu(3).unwrap();
        let k = ControlVector::parse("10000").unwrap();
        let out = run_alu_state(&c, k, 3, 5);
        let eval = read_eval(&c, &out);
        assert_eq!(eval.a_out, 3);
        assert_eq!(eval.sum, 0, "3 + 5 = 8 truncates to 0 in 3 bits");
        assert_eq!(eval.carries, 0b1110, "carry out of every position");
    }

    #[test]
    fn subtraction_vector_subtracts() {
        let c = build_alu(3).unwrap();
        let k = ControlVector::parse("11101").unwrap();
        let eval = read_eval(&c, &run_alu_state(&c, k, 5, 3));
        assert_eq!(eval.sum, 2, "5 - 3");
        assert_eq!(eval.a_out, 2, "A exits complemented");
    }

    #[test]
    fn xor_vector_also_computes_and_on_carries() {
        let c = build_alu(3).unwrap();
        let k = ControlVector::parse("00000").unwrap();
        let eval = read_eval(&c, &run_alu_state(&c, k, 6, 3));
        assert_eq!(eval.sum, 5, "6 XOR 3");
        assert_eq!(eval.carries >> 1, 2, "6 AND 3 on chain lines");
    }

    #[test]
    fn semantics_frozen_cases() {
        // B - A with complemented-B addition: 7 - 2 = 5.
        let k = ControlVector::parse("11110").unwrap();
        assert_eq!(semantics(k, 3, 2, 7).unwrap().sum, 5);

        // XNOR of equal operands is all ones.
        let k = ControlVector::parse("01000").unwrap();
        assert_eq!(semantics(k, 3, 5, 5).unwrap().sum, 7);

        // NOR readout: NOT(1) AND NOT(2) over 2 bits = 2 AND 1 = 0.
        let k = ControlVector::parse("00011").unwrap();
        assert_eq!(semantics(k, 2, 1, 2).unwrap().carries, 0);

        // The same vector on operands with a common zero bit.
        assert_eq!(semantics(k, 2, 1, 1).unwrap().carries, 0b100, "NOR sets bit 2");
    }

    #[test]
    fn semantics_embeds_the_arithmetic_oracles() {
        let add = ControlVector::parse("10000").unwrap();
        let sub = ControlVector::parse("11101").unwrap();
        let n = 4;
        for a in 0..16u64 {
            for b in 0..16u64 {
                let eval = semantics(add, n, a, b).unwrap();
                let want = oracle_add(n, a, b, false).unwrap();
                assert_eq!(eval.sum, want.sum);
                assert_eq!(eval.carries, want.carries);

                let eval = semantics(sub, n, a, b).unwrap();
                let want = oracle_sub(n, a, b).unwrap();
                assert_eq!(eval.sum, want.difference);
                assert_eq!(eval.carries, want.borrows);
            }
        }
    }

    #[test]
    fn circuit_matches_model_at_small_widths() {
        for n in 1..=2 {
            let verdict = check_model_agreement(n, 5).unwrap();
            assert!(verdict.pass, "width {n}: {verdict}");
        }
    }

    #[test]
    fn discovery_finds_the_expected_labels() {
        let map = discover_map(3).unwrap();
        let at = |bits: &str| map.entry(ControlVector::parse(bits).unwrap());
        assert_eq!(at("10000").sum, SumBehavior::Add);
        assert_eq!(at("10000").carry, CarryBehavior::Carries);
        assert_eq!(at("00000").sum, SumBehavior::Xor);
        assert_eq!(at("00000").carry, CarryBehavior::And);
        assert_eq!(at("10100").sum, SumBehavior::Xor);
        assert_eq!(at("10100").carry, CarryBehavior::Zero);
        assert_eq!(at("11101").sum, SumBehavior::Sub);
        assert_eq!(at("11101").carry, CarryBehavior::Borrows);
        assert_eq!(at("11110").sum, SumBehavior::Rsub);
        assert_eq!(at("01011").carry, CarryBehavior::Nor);
        assert_eq!(at("00011").carry, CarryBehavior::Nor);
        assert_eq!(at("01000").sum, SumBehavior::Xnor);
        assert_eq!(at("00001").sum, SumBehavior::Xnor, "NOT A only holds on the B=0 slice");
        assert_eq!(at("10001").sum, SumBehavior::NotASlice);

        let adds = map.entries.iter().filter(|e| e.sum == SumBehavior::Add).count();
        assert_eq!(adds, 1, "exactly one vector computes A+B");
    }

    #[test]
    fn discovery_at_width_one_confirms_at_width_two() {
        let map = discover_map(1).unwrap();
        let at = |bits: &str| map.entry(ControlVector::parse(bits).unwrap());
        // At width 1 addition and XOR coincide; the width-2 confirmation
        // must still separate them.
        assert_eq!(at("10000").sum, SumBehavior::Add);
        assert_eq!(at("00000").sum, SumBehavior::Xor);
        assert_eq!(at("10000").carry, CarryBehavior::Carries);
        assert_eq!(at("00000").carry, CarryBehavior::And);
        // A + NOT B matches XNOR at width 1 but neither XNOR nor the
        // NOT-A slice survives the width-2 confirmation.
        assert_eq!(at("10010").sum, SumBehavior::Other(0b1001));
        // NOT(A+B) restricted to B = 0 is NOT A at every width.
        assert_eq!(at("11000").sum, SumBehavior::NotASlice);
    }

    #[test]
    fn conformance_produces_the_expected_verdicts() {
        let report = conformance_report(3).unwrap();
        assert!(report.matches_expected(), "verdicts: {:?}", report.verdicts());
        assert_eq!(report.rows.len(), 9);
        assert_eq!(report.rows[7].observed, "none");
        assert!(report.rows[4].note.as_deref().unwrap().contains("B=0 slice"));
        let note9 = report.rows[8].note.as_deref().unwrap();
        assert!(note9.contains("A=0 B=1"), "{note9}");
    }

    #[test]
    fn report_text_has_the_documented_shape() {
        let report = conformance_report(2).unwrap();
        let text = report.to_text();
        assert!(text.starts_with("conformance n 2\n"));
        assert!(text.contains("\nrow 6 vec 11101 claimed \"A - B (A + NOT B + 1)\""));
        assert!(text.contains("verdict MISMATCH"));
        assert!(text.contains("\nmap n 2\n"));
        assert!(text.contains("\nvec 00000 sum XOR carry AND complement NAND\n"));
        assert!(text.ends_with("end\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("vec ")).count(), 32);
    }

    #[test]
    fn nop_circuit_is_inert() {
        let nop = nop_circuit(2).unwrap();
        let k = ControlVector::parse("00000").unwrap();
        let out = run_alu_state(&nop, k, 2, 3);
        let eval = read_eval(&nop, &out);
        assert_eq!((eval.a_out, eval.sum, eval.carries), (2, 3, 0));
    }

    #[test]
    fn width_bounds_are_enforced() {
        assert_eq!(build_alu(0).unwrap_err(), ArithError::ZeroWidth);
        assert_eq!(discover_map(5).unwrap_err(), ArithError::ClassifyWidth(5));
        assert_eq!(conformance_report(0).unwrap_err(), ArithError::ZeroWidth);
        assert_eq!(
            semantics(ControlVector::from_index(0), 2, 4, 0).unwrap_err(),
            ArithError::OperandOutOfRange { value: 4, width: 2 }
        );
    }
}
