//! Reversible gate primitives and their action on classical bit states.
//!
//! Every gate in this crate is a member of the controlled-NOT family: a
//! single bit-flip target guarded by zero or more control lines. Zero
//! controls is a NOT, one is a CNOT (Feynman gate), two is a Toffoli, three
//! or more is a multi-controlled NOT. Controls carry a polarity: a positive
//! control is satisfied when its line reads 1, a negative control when it
//! reads 0. Each such gate is its own inverse.

use std::fmt;

/// Index of a wire within a circuit. Line 0 is the least-significant bit of
/// the whole-state integer encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineId(pub usize);

impl LineId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for LineId {
    fn from(index: usize) -> Self {
        LineId(index)
    }
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Activation polarity of a control line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Satisfied when the line carries 1.
    Positive,
    /// Satisfied when the line carries 0.
    Negative,
}

/// A control attached to a gate: the gate fires only if every control is
/// satisfied by the current state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub line: LineId,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(line: impl Into<LineId>) -> Self {
        Control { line: line.into(), polarity: Polarity::Positive }
    }

    pub fn neg(line: impl Into<LineId>) -> Self {
        Control { line: line.into(), polarity: Polarity::Negative }
    }

    /// Whether a line value satisfies this control.
    pub fn satisfied_by(&self, bit: bool) -> bool {
        match self.polarity {
            Polarity::Positive => bit,
            Polarity::Negative => !bit,
        }
    }
}

/// Errors from gate construction or application.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GateError {
    #[error("target line {0} also appears in the control list")]
    TargetInControls(usize),
    #[error("control line {0} appears more than once")]
    DuplicateControl(usize),
    #[error("gate references line {index} but the state has only {width} lines")]
    LineOutOfRange { index: usize, width: usize },
}

/// One reversible primitive: flip `target` iff all `controls` are satisfied.
///
/// The control list is kept in construction order so serialization is
/// deterministic, but its meaning is a set: no line may appear twice, and
/// the target may not be a control.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    target: LineId,
    controls: Vec<Control>,
}

impl Gate {
    /// Builds a gate, rejecting duplicate controls and target-in-controls.
    pub fn new(target: impl Into<LineId>, controls: Vec<Control>) -> Result<Gate, GateError> {
        let target = target.into();
        for (i, c) in controls.iter().enumerate() {
            if c.line == target {
                return Err(GateError::TargetInControls(target.index()));
            }
            if controls[..i].iter().any(|prev| prev.line == c.line) {
                return Err(GateError::DuplicateControl(c.line.index()));
            }
        }
        Ok(Gate { target, controls })
    }

    /// NOT gate: unconditional bit flip.
    pub fn not(target: impl Into<LineId>) -> Gate {
        Gate { target: target.into(), controls: Vec::new() }
    }

    /// CNOT (Feynman) gate with a positive control.
    pub fn cnot(control: impl Into<LineId>, target: impl Into<LineId>) -> Gate {
        Gate::new(target, vec![Control::pos(control)]).expect("distinct lines")
    }

    /// Toffoli gate with two positive controls.
    pub fn toffoli(
        c1: impl Into<LineId>,
        c2: impl Into<LineId>,
        target: impl Into<LineId>,
    ) -> Gate {
        Gate::new(target, vec![Control::pos(c1), Control::pos(c2)]).expect("distinct lines")
    }

    /// Multi-controlled NOT over an arbitrary mixed-polarity control list.
    pub fn mcx(controls: Vec<Control>, target: impl Into<LineId>) -> Result<Gate, GateError> {
        Gate::new(target, controls)
    }

    pub fn target(&self) -> LineId {
        self.target
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    /// Number of controls. 0 = NOT, 1 = CNOT, 2 = Toffoli, >= 3 = MCX.
    pub fn arity(&self) -> usize {
        self.controls.len()
    }

    /// Highest line index the gate references.
    pub fn max_line(&self) -> usize {
        self.controls
            .iter()
            .map(|c| c.line.index())
            .chain(std::iter::once(self.target.index()))
            .max()
            .expect("at least the target")
    }

    /// The inverse gate. Controlled-NOT family gates are self-inverse, so
    /// this is the gate itself.
    pub fn inverse(&self) -> Gate {
        self.clone()
    }

    /// Whether the gate flips its target in the given state.
    pub fn fires(&self, state: &BitState) -> bool {
        self.controls.iter().all(|c| c.satisfied_by(state.get(c.line)))
    }
}

/// Assignment of one classical bit per line; the simulation substrate.
///
/// States convert to and from unsigned integers with line 0 as bit 0, so a
/// whole state of width `w` is exactly a `w`-bit word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitState {
    width: usize,
    words: Vec<u64>,
}

impl BitState {
    /// All-zero state of the given width.
    pub fn zeros(width: usize) -> BitState {
        BitState { width, words: vec![0; width.div_ceil(64).max(1)] }
    }

    /// State of width `width` whose integer encoding is `value`.
    /// Bits of `value` at or above `width` must be zero.
    pub fn from_u64(width: usize, value: u64) -> BitState {
        if width < 64 {
            assert!(
                value < (1u64 << width),
                "value {value} does not fit in {width} lines"
            );
        }
        let mut s = BitState::zeros(width);
        s.words[0] = value;
        s
    }

    /// Integer encoding of the state, when it fits a single word.
    pub fn to_u64(&self) -> Option<u64> {
        if self.width <= 64 {
            Some(self.words[0])
        } else {
            None
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, line: impl Into<LineId>) -> bool {
        let i = line.into().index();
        assert!(i < self.width, "line {i} out of range for width {}", self.width);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, line: impl Into<LineId>, value: bool) {
        let i = line.into().index();
        assert!(i < self.width, "line {i} out of range for width {}", self.width);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, line: impl Into<LineId>) {
        let i = line.into().index();
        assert!(i < self.width, "line {i} out of range for width {}", self.width);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    /// Bits as a string, line 0 first.
    pub fn bits_lsb_first(&self) -> String {
        (0..self.width).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

/// Applies one gate to a state: the target bit is complemented iff every
/// control is satisfied; all other bits are unchanged.
pub fn apply_gate(gate: &Gate, state: &BitState) -> Result<BitState, GateError> {
    if gate.max_line() >= state.width() {
        return Err(GateError::LineOutOfRange { index: gate.max_line(), width: state.width() });
    }
    let mut out = state.clone();
    apply_gate_in_place(gate, &mut out);
    Ok(out)
}

/// In-place variant used by the simulator's inner loops. The caller must
/// have validated line ranges.
pub(crate) fn apply_gate_in_place(gate: &Gate, state: &mut BitState) {
    if gate.fires(state) {
        state.flip(gate.target());
    }
}

/// Self-inverse witness for the whole family, exposed as a free function to
/// mirror [`Gate::inverse`].
pub fn gate_inverse(gate: &Gate) -> Gate {
    gate.inverse()
}
