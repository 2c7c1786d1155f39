//! Reversible arithmetic circuits built from the controlled-NOT gate
//! family: a ripple-carry adder, a controlled subtractor, and a
//! five-control-line ALU, each constructed as an explicit gate netlist,
//! simulated on classical basis states, and checked against independent
//! arithmetic oracles.
//!
//! * [`gates`]: mixed-polarity controlled-NOT gates and basis states.
//! * [`netlist`]: circuits with named registers, quantum-cost accounting,
//!   and the RNL text format.
//! * [`simulator`]: basis-state execution, permutation extraction, and
//!   the exhaustive/sampled verification harness.
//! * [`arith`]: adder and subtractor builders plus the integer oracles
//!   they are checked against.
//! * [`alu`]: the five-control-line unit, its normative semantics, decode
//!   table conformance grading, and behavior discovery.
//! * [`cli`]: the `revalu` command-line front end.

pub mod alu;
pub mod arith;
pub mod cli;
pub mod gates;
pub mod netlist;
pub mod simulator;

pub use alu::{
    build_alu, check_model_agreement, conformance_report, discover_map, encode_op, nop_circuit,
    semantics, AluEval, AluOp, CarryBehavior, ConformanceReport, ControlVector, MapEntry,
    OperationMap, RowReport, RowVerdict, SumBehavior,
};
pub use arith::{
    build_adder, build_subtractor, check_adder_oracle, check_subtractor_oracle, oracle_add,
    oracle_sub, AddOutput, ArithError, SubOutput, MAX_WIDTH,
};
pub use gates::{BitState, Control, Gate, GateError, LineId, Polarity};
pub use netlist::{
    gate_cost, Circuit, CircuitError, CostReport, CtrlName, ParseError, ParseErrorKind,
    RegisterEntry, RegisterMap, Role,
};
pub use simulator::{
    check_ancilla_clean, check_bijective, check_equivalent, check_equivalent_pinned,
    extract_permutation, run, CheckMethod, Permutation, SimError, SplitMix64, Verdict,
    EXHAUSTIVE_LINE_BUDGET, SAMPLE_TARGET,
};
