//! Circuit container and the RNL text format.
//!
//! A [`Circuit`] is an ordered gate list over `line_count` labeled lines,
//! plus a [`RegisterMap`] assigning roles (operand registers, carry chain,
//! control selectors, ancilla constants) to contiguous line ranges.
//! Circuits compose, invert, and serialize to a line-oriented ASCII format:
//!
//! ```text
//! rnl 1                  # version header, required first statement
//! lines <count>          # required second statement
//! label <index> <name>   # optional line names
//! reg <role> <lo> <hi>   # role: A | B | CARRY | CTRL:<name> | ANC0 | ANC1
//! x <t>                  # NOT
//! cx <c> <t>             # CNOT; a `!` prefix marks a negative control
//! ccx <c1> <c2> <t>      # Toffoli
//! mcx <c1> ... <ck> <t>  # multi-controlled NOT
//! ```
//!
//! `#` starts a comment, blank lines are ignored. Emission is canonical:
//! header, lines, labels ascending, registers in declaration order, gates in
//! order, single spaces, no trailing whitespace. Parsing a canonical emission
//! reproduces the circuit field-for-field.

use crate::gates::{BitState, Control, Gate, GateError, LineId, Polarity};
use std::collections::BTreeMap;
use std::fmt;

/// Names of the recognized control lines, in decode-table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CtrlName {
    CarryXor,
    SNot,
    AAndB,
    BNot,
    Sub,
}

impl CtrlName {
    pub const ALL: [CtrlName; 5] =
        [CtrlName::CarryXor, CtrlName::SNot, CtrlName::AAndB, CtrlName::BNot, CtrlName::Sub];

    pub fn as_str(self) -> &'static str {
        match self {
            CtrlName::CarryXor => "C_carryxor",
            CtrlName::SNot => "C_snot",
            CtrlName::AAndB => "C_aANDb",
            CtrlName::BNot => "C_bnot",
            CtrlName::Sub => "C_SUB",
        }
    }

    pub fn parse(s: &str) -> Option<CtrlName> {
        CtrlName::ALL.into_iter().find(|n| n.as_str() == s)
    }
}

impl fmt::Display for CtrlName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Role of a register within a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// First operand, width n. Bit 1 is the least significant bit and maps
    /// to the low line of the range.
    A,
    /// Second operand, width n; rewritten in place with the result.
    B,
    /// Carry chain, width n + 1: carry-in at the low line, then one carry
    /// per bit position.
    Carry,
    /// A single selector line. Control lines are never gate targets.
    Ctrl(CtrlName),
    /// Scratch line expected to enter (and exit) with the given constant.
    Anc(bool),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::A => f.write_str("A"),
            Role::B => f.write_str("B"),
            Role::Carry => f.write_str("CARRY"),
            Role::Ctrl(name) => write!(f, "CTRL:{name}"),
            Role::Anc(false) => f.write_str("ANC0"),
            Role::Anc(true) => f.write_str("ANC1"),
        }
    }
}

/// One register: a role over an inclusive, contiguous line range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterEntry {
    pub role: Role,
    pub lo: usize,
    pub hi: usize,
}

impl RegisterEntry {
    pub fn width(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, line: usize) -> bool {
        self.lo <= line && line <= self.hi
    }
}

/// Register declarations in order. Ranges never overlap; the builders in
/// this crate declare ranges covering every line.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegisterMap {
    entries: Vec<RegisterEntry>,
}

impl RegisterMap {
    pub fn entries(&self) -> &[RegisterEntry] {
        &self.entries
    }

    pub fn find(&self, role: Role) -> Option<&RegisterEntry> {
        self.entries.iter().find(|e| e.role == role)
    }

    /// Width of the named register, if declared.
    pub fn width(&self, role: Role) -> Option<usize> {
        self.find(role).map(|e| e.width())
    }

    /// Line holding the register's bit at `offset` from the low end. For A
    /// and B, operand bit i (1-based, LSB first) sits at offset i - 1; for
    /// CARRY, chain position j sits at offset j.
    pub fn line(&self, role: Role, offset: usize) -> Option<LineId> {
        self.find(role).and_then(|e| {
            if offset < e.width() {
                Some(LineId(e.lo + offset))
            } else {
                None
            }
        })
    }

    pub fn role_of(&self, line: usize) -> Option<Role> {
        self.entries.iter().find(|e| e.contains(line)).map(|e| e.role)
    }

    pub fn is_control_line(&self, line: usize) -> bool {
        matches!(self.role_of(line), Some(Role::Ctrl(_)))
    }

    /// Whether the declared ranges cover every line of a `line_count`-line
    /// circuit. Ranges are disjoint by construction, so covering all lines
    /// means they partition them.
    pub fn covers_all(&self, line_count: usize) -> bool {
        self.entries.iter().map(|e| e.width()).sum::<usize>() == line_count
    }

    /// Integer value of a register in `state`, low line = bit 0.
    pub fn read(&self, role: Role, state: &BitState) -> Option<u64> {
        let e = self.find(role)?;
        let mut v = 0u64;
        for off in 0..e.width() {
            if state.get(e.lo + off) {
                v |= 1 << off;
            }
        }
        Some(v)
    }

    /// Writes an integer into a register, low line = bit 0. Panics if the
    /// value does not fit the register width.
    pub fn write(&self, role: Role, state: &mut BitState, value: u64) {
        let e = self.find(role).unwrap_or_else(|| panic!("register {role} not declared"));
        if e.width() < 64 {
            assert!(value < (1u64 << e.width()), "value {value} does not fit register {role}");
        }
        for off in 0..e.width() {
            state.set(e.lo + off, value >> off & 1 == 1);
        }
    }

    /// Declared ancilla lines with their expected constants.
    pub fn ancilla_pins(&self) -> Vec<(usize, bool)> {
        let mut pins = Vec::new();
        for e in &self.entries {
            if let Role::Anc(constant) = e.role {
                pins.extend((e.lo..=e.hi).map(|line| (line, constant)));
            }
        }
        pins
    }
}

/// Errors from circuit construction and composition.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("a circuit must have at least one line")]
    ZeroLines,
    #[error("width must be at least 1")]
    ZeroWidth,
    #[error("line index {index} out of range for {line_count} lines")]
    LineOutOfRange { index: usize, line_count: usize },
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("gate targets line {index}, which has a control role")]
    TargetOnControlLine { index: usize },
    #[error("register {role} range {lo}..{hi} is invalid for {line_count} lines")]
    InvalidRange { role: String, lo: usize, hi: usize, line_count: usize },
    #[error("register {role} overlaps a previously declared register")]
    RegisterOverlap { role: String },
    #[error("register role {role} declared twice")]
    DuplicateRole { role: String },
    #[error("bad register geometry: {0}")]
    BadGeometry(String),
    #[error("circuits have different line counts or register maps")]
    RegisterMismatch,
    #[error("state has {state} lines but the circuit has {circuit}")]
    WidthMismatch { state: usize, circuit: usize },
}

/// Ordered gate list over labeled lines with a register map.
///
/// Circuits are value types: build one with [`Circuit::new`] plus the
/// `add_register` / `set_label` / `push` methods, then treat it as
/// immutable. Every operation below is pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    line_count: usize,
    labels: Vec<Option<String>>,
    registers: RegisterMap,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(line_count: usize) -> Result<Circuit, CircuitError> {
        if line_count == 0 {
            return Err(CircuitError::ZeroLines);
        }
        Ok(Circuit {
            line_count,
            labels: vec![None; line_count],
            registers: RegisterMap::default(),
            gates: Vec::new(),
        })
    }

    pub fn line_count(&self) -> usize {
        self.line_count
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn registers(&self) -> &RegisterMap {
        &self.registers
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn set_label(&mut self, line: usize, name: &str) -> Result<(), CircuitError> {
        if line >= self.line_count {
            return Err(CircuitError::LineOutOfRange { index: line, line_count: self.line_count });
        }
        self.labels[line] = Some(name.to_string());
        Ok(())
    }

    /// Declares a register. Ranges must stay in bounds and disjoint; A, B,
    /// CARRY and each control name may appear once; control registers are
    /// single lines; when both operands are present their widths must agree
    /// and a carry register must be one line wider.
    pub fn add_register(&mut self, role: Role, lo: usize, hi: usize) -> Result<(), CircuitError> {
        if lo > hi || hi >= self.line_count {
            return Err(CircuitError::InvalidRange {
                role: role.to_string(),
                lo,
                hi,
                line_count: self.line_count,
            });
        }
        let dup = match role {
            Role::Anc(_) => false,
            r => self.registers.entries.iter().any(|e| e.role == r),
        };
        if dup {
            return Err(CircuitError::DuplicateRole { role: role.to_string() });
        }
        if self
            .registers
            .entries
            .iter()
            .any(|e| lo <= e.hi && e.lo <= hi)
        {
            return Err(CircuitError::RegisterOverlap { role: role.to_string() });
        }
        if matches!(role, Role::Ctrl(_)) && lo != hi {
            return Err(CircuitError::BadGeometry(format!(
                "control register {role} must be a single line"
            )));
        }
        let entry = RegisterEntry { role, lo, hi };
        let width_of = |r: Role| -> Option<usize> {
            if role == r {
                Some(entry.width())
            } else {
                self.registers.width(r)
            }
        };
        if let (Some(wa), Some(wb)) = (width_of(Role::A), width_of(Role::B)) {
            if wa != wb {
                return Err(CircuitError::BadGeometry(format!(
                    "operand registers must have equal widths (A is {wa}, B is {wb})"
                )));
            }
        }
        if let Some(wc) = width_of(Role::Carry) {
            let operand = width_of(Role::A).or(width_of(Role::B));
            if let Some(w) = operand {
                if wc != w + 1 {
                    return Err(CircuitError::BadGeometry(format!(
                        "carry register must be one line wider than the operands \
                         (operands are {w}, carry is {wc})"
                    )));
                }
            }
        }
        if matches!(role, Role::Ctrl(_)) {
            if let Some(g) = self.gates.iter().find(|g| g.target().index() == lo) {
                return Err(CircuitError::TargetOnControlLine { index: g.target().index() });
            }
        }
        self.registers.entries.push(entry);
        Ok(())
    }

    /// Appends a gate. The gate must reference only existing lines and must
    /// not target a control line.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if gate.max_line() >= self.line_count {
            return Err(CircuitError::LineOutOfRange {
                index: gate.max_line(),
                line_count: self.line_count,
            });
        }
        if self.registers.is_control_line(gate.target().index()) {
            return Err(CircuitError::TargetOnControlLine { index: gate.target().index() });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Same lines, labels and registers, but no gates.
    pub fn without_gates(&self) -> Circuit {
        Circuit { gates: Vec::new(), ..self.clone() }
    }

    /// Concatenation: `second` applied after `self`. Both circuits must
    /// have identical line counts and register maps.
    pub fn compose(&self, second: &Circuit) -> Result<Circuit, CircuitError> {
        if self.line_count != second.line_count || self.registers != second.registers {
            return Err(CircuitError::RegisterMismatch);
        }
        let mut out = self.clone();
        out.gates.extend(second.gates.iter().cloned());
        Ok(out)
    }

    /// The inverse circuit: gates in reverse order, each replaced by its
    /// (identical) inverse. Composing a circuit with its inverse acts as
    /// the identity on every state.
    pub fn inverse(&self) -> Circuit {
        let mut out = self.clone();
        out.gates = self.gates.iter().rev().map(Gate::inverse).collect();
        out
    }

    pub fn cost_report(&self) -> CostReport {
        let mut counts_by_arity = BTreeMap::new();
        let mut quantum_cost = 0u64;
        for g in &self.gates {
            *counts_by_arity.entry(g.arity()).or_insert(0usize) += 1;
            quantum_cost += gate_cost(g.arity());
        }
        CostReport { gate_count: self.gates.len(), counts_by_arity, quantum_cost }
    }

    /// Canonical text serialization; see the module docs for the grammar.
    pub fn emit_text(&self) -> String {
        let mut out = String::new();
        out.push_str("rnl 1\n");
        out.push_str(&format!("lines {}\n", self.line_count));
        for (i, label) in self.labels.iter().enumerate() {
            if let Some(name) = label {
                out.push_str(&format!("label {i} {name}\n"));
            }
        }
        for e in self.registers.entries() {
            out.push_str(&format!("reg {} {} {}\n", e.role, e.lo, e.hi));
        }
        for g in &self.gates {
            let mnemonic = match g.arity() {
                0 => "x",
                1 => "cx",
                2 => "ccx",
                _ => "mcx",
            };
            out.push_str(mnemonic);
            for c in g.controls() {
                match c.polarity {
                    Polarity::Positive => out.push_str(&format!(" {}", c.line)),
                    Polarity::Negative => out.push_str(&format!(" !{}", c.line)),
                }
            }
            out.push_str(&format!(" {}\n", g.target()));
        }
        out
    }

    /// Parses the text format. Errors carry the 1-based input line number.
    pub fn parse_text(text: &str) -> Result<Circuit, ParseError> {
        parse_rnl(text)
    }
}

/// Conventional per-gate cost: NOT and CNOT count 1, a gate with k >= 2
/// controls counts 2^(k+1) - 3 (Toffoli 5, three controls 13, and so on).
/// Control polarity does not change the cost.
pub fn gate_cost(arity: usize) -> u64 {
    match arity {
        0 | 1 => 1,
        k => 1u64.checked_shl(k as u32 + 1).map(|v| v - 3).unwrap_or(u64::MAX),
    }
}

/// Gate totals, per-arity counts, and the summed quantum cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub gate_count: usize,
    pub counts_by_arity: BTreeMap<usize, usize>,
    pub quantum_cost: u64,
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gates {}", self.gate_count)?;
        for (arity, count) in &self.counts_by_arity {
            writeln!(f, "arity {arity} {count}")?;
        }
        write!(f, "quantum_cost {}", self.quantum_cost)
    }
}

/// A parse failure, located at a 1-based line of the input text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected `rnl 1` as the first statement")]
    MissingHeader,
    #[error("unsupported format version `{0}`")]
    BadVersion(String),
    #[error("expected `lines <count>` as the second statement")]
    MissingLineCount,
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("malformed statement: {0}")]
    Malformed(String),
    #[error("bad integer `{0}`")]
    BadInt(String),
    #[error("label `{0}` is not a valid identifier")]
    BadLabel(String),
    #[error("line {0} already has a label")]
    DuplicateLabel(usize),
    #[error("unknown register role `{0}`")]
    BadRole(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_rnl(text: &str) -> Result<Circuit, ParseError> {
    let fail = |line: usize, kind: ParseErrorKind| ParseError { line, kind };
    let parse_usize = |line: usize, tok: &str| -> Result<usize, ParseError> {
        tok.parse::<usize>().map_err(|_| fail(line, ParseErrorKind::BadInt(tok.to_string())))
    };

    let mut statements = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let stripped = raw.split('#').next().unwrap_or("");
            (i + 1, stripped.split_whitespace().collect::<Vec<_>>())
        })
        .filter(|(_, toks)| !toks.is_empty());

    // Header: `rnl 1`.
    let (line, toks) = statements
        .next()
        .ok_or_else(|| fail(1, ParseErrorKind::MissingHeader))?;
    if toks[0] != "rnl" {
        return Err(fail(line, ParseErrorKind::MissingHeader));
    }
    if toks.len() != 2 || toks[1] != "1" {
        return Err(fail(line, ParseErrorKind::BadVersion(toks.get(1).unwrap_or(&"").to_string())));
    }

    // Line count: `lines <count>`.
    let (line, toks) = statements
        .next()
        .ok_or_else(|| fail(line, ParseErrorKind::MissingLineCount))?;
    if toks[0] != "lines" || toks.len() != 2 {
        return Err(fail(line, ParseErrorKind::MissingLineCount));
    }
    let count = parse_usize(line, toks[1])?;
    let mut circuit =
        Circuit::new(count).map_err(|e| fail(line, ParseErrorKind::Circuit(e)))?;

    for (line, toks) in statements {
        let circuit_err = |e: CircuitError| fail(line, ParseErrorKind::Circuit(e));
        match toks[0] {
            "label" => {
                if toks.len() != 3 {
                    return Err(fail(
                        line,
                        ParseErrorKind::Malformed("label takes an index and a name".into()),
                    ));
                }
                let index = parse_usize(line, toks[1])?;
                if !is_identifier(toks[2]) {
                    return Err(fail(line, ParseErrorKind::BadLabel(toks[2].to_string())));
                }
                if index < circuit.line_count() && circuit.labels()[index].is_some() {
                    return Err(fail(line, ParseErrorKind::DuplicateLabel(index)));
                }
                circuit.set_label(index, toks[2]).map_err(circuit_err)?;
            }
            "reg" => {
                if toks.len() != 4 {
                    return Err(fail(
                        line,
                        ParseErrorKind::Malformed("reg takes a role and an inclusive range".into()),
                    ));
                }
                let role = match toks[1] {
                    "A" => Role::A,
                    "B" => Role::B,
                    "CARRY" => Role::Carry,
                    "ANC0" => Role::Anc(false),
                    "ANC1" => Role::Anc(true),
                    other => match other.strip_prefix("CTRL:").and_then(CtrlName::parse) {
                        Some(name) => Role::Ctrl(name),
                        None => return Err(fail(line, ParseErrorKind::BadRole(other.to_string()))),
                    },
                };
                let lo = parse_usize(line, toks[2])?;
                let hi = parse_usize(line, toks[3])?;
                circuit.add_register(role, lo, hi).map_err(circuit_err)?;
            }
            "x" | "cx" | "ccx" | "mcx" => {
                let want = match toks[0] {
                    "x" => Some(0),
                    "cx" => Some(1),
                    "ccx" => Some(2),
                    _ => None,
                };
                if toks.len() < 2 || want.is_some_and(|w| toks.len() != w + 2) {
                    return Err(fail(
                        line,
                        ParseErrorKind::Malformed(format!("wrong operand count for `{}`", toks[0])),
                    ));
                }
                let mut controls = Vec::new();
                for tok in &toks[1..toks.len() - 1] {
                    let (polarity, digits) = match tok.strip_prefix('!') {
                        Some(rest) => (Polarity::Negative, rest),
                        None => (Polarity::Positive, *tok),
                    };
                    let index = parse_usize(line, digits)?;
                    controls.push(Control { line: LineId(index), polarity });
                }
                let target = parse_usize(line, toks[toks.len() - 1])?;
                let gate = Gate::new(target, controls)
                    .map_err(|e| fail(line, ParseErrorKind::Circuit(e.into())))?;
                circuit.push(gate).map_err(circuit_err)?;
            }
            other => {
                return Err(fail(line, ParseErrorKind::UnknownDirective(other.to_string())))
            }
        }
    }
    Ok(circuit)
}
