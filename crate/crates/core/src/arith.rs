//! Ripple-carry adder and controlled subtractor builders, with independent
//! arithmetic oracles to check them against.
//!
//! The adder slice for bit position i uses two Toffoli and two CNOT gates
//! and writes the carry into a dedicated chain line:
//!
//! ```text
//! a_i     ─────●────●──────────────────        a_i
//! b_i     ─────●────⊕────●────⊕────────        s_i = a_i + b_i + c_(i-1)
//! c_(i-1) ──────────────●────●─────────        c_(i-1)
//! c_i     ─────⊕─────────⊕─────────────        carry out of position i
//! ```
//!
//! After the first two gates the b line holds `a_i XOR b_i` and the carry
//! line holds `a_i AND b_i`; the second pair folds the incoming carry in,
//! leaving the sum on b and `a_i b_i XOR (a_i XOR b_i) c_(i-1)` on the
//! carry line. Chaining n slices adds n-bit operands with carry-in c_0.
//!
//! The subtractor wraps the same chain between two CNOT fans from a C_SUB
//! control line: complement A going in, complement the sum coming out.
//! With C_SUB = 1 the B register ends as `NOT(NOT(A) + B) = A - B` and the
//! chain lines carry the borrows of that subtraction; with C_SUB = 0 both
//! fans are inert and the circuit is the plain adder.

use crate::gates::{BitState, Gate};
use crate::netlist::{Circuit, CtrlName, Role};
use crate::simulator::{run, SplitMix64, CheckMethod, Verdict, EXHAUSTIVE_LINE_BUDGET, SAMPLE_TARGET};
use std::collections::HashSet;

/// Widest supported operand. Keeps register values in a single word.
pub const MAX_WIDTH: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("width must be at least 1")]
    ZeroWidth,
    #[error("width {0} exceeds the supported maximum of {MAX_WIDTH} bits")]
    WidthTooLarge(usize),
    #[error("operand {value} does not fit in {width} bits")]
    OperandOutOfRange { value: u64, width: usize },
    #[error("exhaustive behavior classification supports widths 1 through 4, got {0}")]
    ClassifyWidth(usize),
}

pub(crate) fn validate_width(n: usize) -> Result<(), ArithError> {
    match n {
        0 => Err(ArithError::ZeroWidth),
        n if n > MAX_WIDTH => Err(ArithError::WidthTooLarge(n)),
        _ => Ok(()),
    }
}

pub(crate) fn validate_operand(n: usize, value: u64) -> Result<(), ArithError> {
    if value >> n != 0 {
        return Err(ArithError::OperandOutOfRange { value, width: n });
    }
    Ok(())
}

/// Result of the addition oracle: the n-bit sum and the carry chain with
/// c_0 at bit 0 and the carry out of position i at bit i.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddOutput {
    pub sum: u64,
    pub carries: u64,
}

/// Result of the subtraction oracle: the n-bit difference and the borrow
/// chain with the borrow out of position i at bit i (bit 0 is always 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubOutput {
    pub difference: u64,
    pub borrows: u64,
}

/// Bit-serial addition: s_i = a_i XOR b_i XOR c_(i-1) with carry
/// c_i = a_i b_i XOR (a_i XOR b_i) c_(i-1). Independent of the builders.
pub fn oracle_add(n: usize, a: u64, b: u64, carry_in: bool) -> Result<AddOutput, ArithError> {
    validate_width(n)?;
    validate_operand(n, a)?;
    validate_operand(n, b)?;
    let mut carry = carry_in;
    let mut sum = 0u64;
    let mut carries = u64::from(carry_in);
    for i in 0..n {
        let ai = a >> i & 1 == 1;
        let bi = b >> i & 1 == 1;
        sum |= u64::from(ai ^ bi ^ carry) << i;
        carry = (ai && bi) ^ ((ai ^ bi) && carry);
        carries |= u64::from(carry) << (i + 1);
    }
    Ok(AddOutput { sum, carries })
}

/// Bit-serial subtraction a - b: d_i = a_i XOR b_i XOR B_(i-1) with borrow
/// B_i = b_i B_(i-1) XOR (NOT a_i)(b_i XOR B_(i-1)). Independent of both
/// the builders and the addition oracle.
pub fn oracle_sub(n: usize, a: u64, b: u64) -> Result<SubOutput, ArithError> {
    validate_width(n)?;
    validate_operand(n, a)?;
    validate_operand(n, b)?;
    let mut borrow = false;
    let mut difference = 0u64;
    let mut borrows = 0u64;
    for i in 0..n {
        let ai = a >> i & 1 == 1;
        let bi = b >> i & 1 == 1;
        difference |= u64::from(ai ^ bi ^ borrow) << i;
        borrow = (bi && borrow) ^ (!ai && (bi ^ borrow));
        borrows |= u64::from(borrow) << (i + 1);
    }
    Ok(SubOutput { difference, borrows })
}

/// Appends the 4n-gate ripple chain, with registers already at the given
/// base lines. Shared by the adder and subtractor builders.
fn push_ripple_chain(c: &mut Circuit, n: usize, a0: usize, b0: usize, carry0: usize) {
    for j in 0..n {
        let a = a0 + j;
        let b = b0 + j;
        let c_prev = carry0 + j;
        let c_out = carry0 + j + 1;
        c.push(Gate::toffoli(a, b, c_out)).expect("in range");
        c.push(Gate::cnot(a, b)).expect("in range");
        c.push(Gate::toffoli(b, c_prev, c_out)).expect("in range");
        c.push(Gate::cnot(c_prev, b)).expect("in range");
    }
}

/// Builds the n-bit ripple-carry adder over 3n + 1 lines:
/// A at 0..n, B at n..2n (rewritten with the sum), and the carry chain
/// c_0..c_n on the remaining lines. All chain lines above c_0 must be 0 on
/// input for the carries to be meaningful.
pub fn build_adder(n: usize) -> Result<Circuit, ArithError> {
    validate_width(n)?;
    let mut c = Circuit::new(3 * n + 1).expect("nonzero lines");
    c.add_register(Role::A, 0, n - 1).expect("geometry");
    c.add_register(Role::B, n, 2 * n - 1).expect("geometry");
    c.add_register(Role::Carry, 2 * n, 3 * n).expect("geometry");
    for i in 1..=n {
        c.set_label(i - 1, &format!("a{i}")).expect("in range");
        c.set_label(n + i - 1, &format!("b{i}")).expect("in range");
    }
    for i in 0..=n {
        c.set_label(2 * n + i, &format!("c{i}")).expect("in range");
    }
    push_ripple_chain(&mut c, n, 0, n, 2 * n);
    Ok(c)
}

/// Builds the controlled subtractor over 3n + 2 lines: the C_SUB selector
/// on line 0, then the adder layout shifted up by one. With C_SUB = 0 it
/// adds; with C_SUB = 1 the B register ends as A - B (mod 2^n), the chain
/// lines carry the borrows, and the A register exits complemented.
pub fn build_subtractor(n: usize) -> Result<Circuit, ArithError> {
    validate_width(n)?;
    let mut c = Circuit::new(3 * n + 2).expect("nonzero lines");
    c.add_register(Role::Ctrl(CtrlName::Sub), 0, 0).expect("geometry");
    c.add_register(Role::A, 1, n).expect("geometry");
    c.add_register(Role::B, n + 1, 2 * n).expect("geometry");
    c.add_register(Role::Carry, 2 * n + 1, 3 * n + 1).expect("geometry");
    c.set_label(0, "sub").expect("in range");
    for i in 1..=n {
        c.set_label(i, &format!("a{i}")).expect("in range");
        c.set_label(n + i, &format!("b{i}")).expect("in range");
    }
    for i in 0..=n {
        c.set_label(2 * n + 1 + i, &format!("c{i}")).expect("in range");
    }
    for j in 0..n {
        c.push(Gate::cnot(0, 1 + j)).expect("in range");
    }
    push_ripple_chain(&mut c, n, 1, n + 1, 2 * n + 1);
    for j in 0..n {
        c.push(Gate::cnot(0, 1 + n + j)).expect("in range");
    }
    Ok(c)
}

struct OperandSampler {
    rng: SplitMix64,
    seen: HashSet<(u64, u64, bool)>,
}

impl OperandSampler {
    fn new(seed: u64) -> OperandSampler {
        OperandSampler { rng: SplitMix64::new(seed), seen: HashSet::new() }
    }

    fn next(&mut self, n: usize, with_carry: bool) -> (u64, u64, bool) {
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        loop {
            let a = self.rng.next_u64() & mask;
            let b = self.rng.next_u64() & mask;
            let c0 = with_carry && self.rng.next_u64() & 1 == 1;
            if self.seen.insert((a, b, c0)) {
                return (a, b, c0);
            }
        }
    }
}

/// Differential check of the adder circuit against [`oracle_add`]: the sum
/// register, the full carry chain, and the untouched A register must all
/// match, for every (a, b, c_0) when 2n + 1 lines fit the exhaustive
/// budget and for seeded distinct samples otherwise.
pub fn check_adder_oracle(n: usize, seed: u64) -> Result<Verdict, ArithError> {
    let circuit = build_adder(n)?;
    let case = |a: u64, b: u64, c0: bool| -> Option<String> {
        let regs = circuit.registers();
        let mut input = BitState::zeros(circuit.line_count());
        regs.write(Role::A, &mut input, a);
        regs.write(Role::B, &mut input, b);
        regs.write(Role::Carry, &mut input, u64::from(c0));
        let output = run(&circuit, &input).expect("widths match");
        let want = oracle_add(n, a, b, c0).expect("validated inputs");
        let got_a = regs.read(Role::A, &output).unwrap();
        let got_sum = regs.read(Role::B, &output).unwrap();
        let got_carries = regs.read(Role::Carry, &output).unwrap();
        if got_a != a {
            Some(format!("a={a} b={b} c0={}: A register exits as {got_a}", u8::from(c0)))
        } else if got_sum != want.sum {
            Some(format!(
                "a={a} b={b} c0={}: sum register holds {got_sum}, oracle says {}",
                u8::from(c0),
                want.sum
            ))
        } else if got_carries != want.carries {
            Some(format!(
                "a={a} b={b} c0={}: carry chain holds {got_carries:#b}, oracle says {:#b}",
                u8::from(c0),
                want.carries
            ))
        } else {
            None
        }
    };
    Ok(sweep_operands(n, true, seed, case))
}

/// Differential check of the subtractor circuit with C_SUB = 1 against
/// [`oracle_sub`]: the B register must hold a - b, the chain must hold the
/// borrows, and the A register must exit complemented.
pub fn check_subtractor_oracle(n: usize, seed: u64) -> Result<Verdict, ArithError> {
    let circuit = build_subtractor(n)?;
    let mask = (1u64 << n) - 1;
    let case = |a: u64, b: u64, _c0: bool| -> Option<String> {
        let regs = circuit.registers();
        let mut input = BitState::zeros(circuit.line_count());
        regs.write(Role::Ctrl(CtrlName::Sub), &mut input, 1);
        regs.write(Role::A, &mut input, a);
        regs.write(Role::B, &mut input, b);
        let output = run(&circuit, &input).expect("widths match");
        let want = oracle_sub(n, a, b).expect("validated inputs");
        let got_a = regs.read(Role::A, &output).unwrap();
        let got_diff = regs.read(Role::B, &output).unwrap();
        let got_borrows = regs.read(Role::Carry, &output).unwrap();
        if got_a != a ^ mask {
            Some(format!("a={a} b={b}: A register exits as {got_a}, expected NOT a"))
        } else if got_diff != want.difference {
            Some(format!(
                "a={a} b={b}: difference register holds {got_diff}, oracle says {}",
                want.difference
            ))
        } else if got_borrows != want.borrows {
            Some(format!(
                "a={a} b={b}: borrow chain holds {got_borrows:#b}, oracle says {:#b}",
                want.borrows
            ))
        } else {
            None
        }
    };
    Ok(sweep_operands(n, false, seed, case))
}

/// Covers the operand space (a, b, and optionally c_0): exhaustively when
/// that space fits the line budget, otherwise by distinct seeded samples.
fn sweep_operands(
    n: usize,
    with_carry: bool,
    seed: u64,
    mut case: impl FnMut(u64, u64, bool) -> Option<String>,
) -> Verdict {
    let input_lines = 2 * n + usize::from(with_carry);
    if input_lines <= EXHAUSTIVE_LINE_BUDGET {
        let states = 1u64 << input_lines;
        let method = CheckMethod::Exhaustive { states };
        for a in 0..1u64 << n {
            for b in 0..1u64 << n {
                for c0 in [false, true] {
                    if c0 && !with_carry {
                        continue;
                    }
                    if let Some(msg) = case(a, b, c0) {
                        return Verdict { pass: false, method, failure: Some(msg) };
                    }
                }
            }
        }
        Verdict { pass: true, method, failure: None }
    } else {
        let method = CheckMethod::Sampled { samples: SAMPLE_TARGET, seed };
        let mut sampler = OperandSampler::new(seed);
        for _ in 0..SAMPLE_TARGET {
            let (a, b, c0) = sampler.next(n, with_carry);
            if let Some(msg) = case(a, b, c0) {
                return Verdict { pass: false, method, failure: Some(msg) };
            }
        }
        Verdict { pass: true, method, failure: None }
    }
}
