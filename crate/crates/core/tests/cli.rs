//! End-to-end tests of the `revalu` binary: argument handling, output
//! formats, and exit codes (0 success, 1 failed check, 2 usage error).

use revalu::arith::build_adder;
use revalu::netlist::Circuit;
use std::path::PathBuf;
use std::process::{Command, Output};

fn revalu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revalu"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("not killed by a signal")
}

/// Path of a scratch file unique to this test, cleaned up by the caller.
fn scratch(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("revalu-cli-{}-{name}", std::process::id()));
    path
}

#[test]
fn build_emits_parseable_rnl() {
    let output = revalu(&["build", "adder", "-n", "2"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.starts_with("rnl 1\nlines 7\n"), "{text}");
    assert_eq!(Circuit::parse_text(&text).unwrap(), build_adder(2).unwrap());
}

#[test]
fn sim_prints_registers_with_values() {
    let output =
        revalu(&["sim", "alu", "-n", "3", "--controls", "10000", "--set", "A=3", "--set", "B=5"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.contains("A 011 3\n"), "{text}");
    assert!(text.contains("B 000 0\n"), "3 + 5 truncates to 0: {text}");
    assert!(text.contains("CARRY 1110 14\n"), "{text}");
    assert!(text.contains("ANC0 0 0\n"), "{text}");
}

#[test]
fn sim_accepts_carry_in_and_hex_values() {
    let output = revalu(&["sim", "adder", "-n", "4", "--set", "A=0x9", "--set", "B=5", "--set",
        "c0=1"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.contains("B 1111 15\n"), "9 + 5 + 1: {text}");
}

#[test]
fn verify_oracle_passes_for_builders() {
    for kind in ["adder", "subtractor", "alu"] {
        let output = revalu(&["verify", kind, "-n", "2", "--mode", "oracle"]);
        assert_eq!(exit_code(&output), 0, "{kind}: {}", stderr_of(&output));
        assert!(stdout_of(&output).starts_with("pass (exhaustive"), "{kind}");
    }
}

#[test]
fn verify_oracle_rejects_file_targets() {
    let path = scratch("oracle-file.rnl");
    std::fs::write(&path, "rnl 1\nlines 1\n").unwrap();
    let output = revalu(&["verify", path.to_str().unwrap(), "--mode", "oracle"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&output), 2);
    assert!(stderr_of(&output).contains("circuit kind"), "{}", stderr_of(&output));
}

#[test]
fn verify_bijective_accepts_a_netlist_file() {
    let path = scratch("bijective.rnl");
    std::fs::write(&path, build_adder(3).unwrap().emit_text()).unwrap();
    let output = revalu(&["verify", path.to_str().unwrap(), "--mode", "bijective"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&output), 0);
    assert!(stdout_of(&output).starts_with("pass (exhaustive over 1024 states)"));
}

#[test]
fn verify_ancilla_fails_with_exit_code_one() {
    let path = scratch("dirty.rnl");
    std::fs::write(&path, "rnl 1\nlines 2\nreg ANC0 0 0\nreg A 1 1\nx 0\n").unwrap();
    let output = revalu(&["verify", path.to_str().unwrap(), "--mode", "ancilla"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&output), 1);
    assert!(stdout_of(&output).starts_with("FAIL"), "{}", stdout_of(&output));
}

#[test]
fn parse_errors_carry_line_numbers_and_exit_code_two() {
    let path = scratch("broken.rnl");
    std::fs::write(&path, "rnl 1\nlines 2\nx 9\n").unwrap();
    let output = revalu(&["sim", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&output), 2);
    let err = stderr_of(&output);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn report_includes_rows_and_map() {
    let output = revalu(&["report"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.starts_with("conformance n 3\n"));
    assert!(text.contains("row 9 vec 01011"));
    assert!(text.contains("verdict MISMATCH"));
    assert!(text.contains("vec 10000 sum ADD carry CARRIES"));
    assert!(text.ends_with("end\n"));
}

#[test]
fn report_rejects_oversized_widths() {
    let output = revalu(&["report", "-n", "5"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr_of(&output).contains("widths 1 through 4"));
}

#[test]
fn stats_prints_the_cost_table() {
    let output = revalu(&["stats", "adder", "-n", "4"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.starts_with("lines 13\n"), "{text}");
    assert!(text.contains("gates 16\n"), "{text}");
    assert!(text.contains("quantum_cost 48"), "{text}");
}

#[test]
fn invert_emits_the_inverse_netlist() {
    let output = revalu(&["invert", "adder", "-n", "2"]);
    assert_eq!(exit_code(&output), 0);
    let parsed = Circuit::parse_text(&stdout_of(&output)).unwrap();
    assert_eq!(parsed, build_adder(2).unwrap().inverse());
}

#[test]
fn inverting_twice_reproduces_the_file() {
    let original = scratch("invert-src.rnl");
    let once = scratch("invert-once.rnl");
    std::fs::write(&original, build_adder(2).unwrap().emit_text()).unwrap();
    let output =
        revalu(&["invert", original.to_str().unwrap(), "-o", once.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    let output = revalu(&["invert", once.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    let round_trip = stdout_of(&output);
    let source = std::fs::read_to_string(&original).unwrap();
    std::fs::remove_file(&original).ok();
    std::fs::remove_file(&once).ok();
    assert_eq!(round_trip, source);
}

#[test]
fn kind_targets_require_a_width() {
    let output = revalu(&["build", "alu"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr_of(&output).contains("needs --width"));
}

#[test]
fn unknown_set_names_are_rejected() {
    let output = revalu(&["sim", "adder", "-n", "2", "--set", "Q=1"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr_of(&output).contains("unknown register"));
}

#[test]
fn output_flag_writes_the_file() {
    let path = scratch("out.rnl");
    let output = revalu(&["build", "subtractor", "-n", "1", "-o", path.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("rnl 1\nlines 5\n"));
}
