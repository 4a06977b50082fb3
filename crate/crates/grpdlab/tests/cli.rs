//! End-to-end checks of the binary: exit codes, byte-level determinism,
//! and the documented outputs on small fixtures.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use grpdlab::groupoid::FiniteGroupoid;
use grpdlab::sft::Word;
use grpdlab::thompson::{prefix_transposition, Table};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grpdlab"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_pretty<T: serde::Serialize>(path: &Path, value: &T) {
    let mut s = serde_json::to_string_pretty(value).unwrap();
    s.push('\n');
    fs::write(path, s).unwrap();
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn usage_problems_exit_1_and_help_exits_0() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(1), "no arguments is a usage error");

    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // parameters outside the documented ranges are usage errors too
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["check", "core", "--n", "2", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(1), "p < 1 must be rejected");
    let out = run_in(dir.path(), &["check", "core", "--n", "2", "--p", "3", "--samples", "2000000"]);
    assert_eq!(out.status.code(), Some(1), "samples above 10^6 must be rejected");
}

#[test]
fn broken_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();

    let out = run_in(dir.path(), &["groupoid", "validate", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));

    // a table whose domain words overlap is structurally invalid
    fs::write(
        dir.path().join("bad_table.json"),
        r#"{"alphabets":[2],"columns":[{"v":["0"],"u":["1"]},{"v":["01"],"u":["0"]}]}"#,
    )
    .unwrap();
    let out = run_in(dir.path(), &["table", "validate", "bad_table.json"]);
    assert_eq!(out.status.code(), Some(2));

    // a composition table that breaks associativity is caught on load
    fs::write(
        dir.path().join("bad_groupoid.json"),
        r#"{"arrows":["e","g"],"units":["e"],"src":{"e":"e","g":"e"},"tgt":{"e":"e","g":"e"},"compose":[["e","e","e"],["e","g","g"],["g","e","g"],["g","g","e"],["g","g","g"]],"inv":{"e":"e","g":"g"}}"#,
    )
    .unwrap();
    let out = run_in(dir.path(), &["groupoid", "validate", "bad_groupoid.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compose_of_identity_and_swap_is_bit_identical_to_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let swap = prefix_transposition(
        &[2],
        0,
        &Word::parse("00", 2).unwrap(),
        &Word::parse("01", 2).unwrap(),
    )
    .unwrap();
    let id = Table::identity(vec![2]).unwrap();
    write_pretty(&dir.path().join("swap.json"), &swap.to_json());
    write_pretty(&dir.path().join("id.json"), &id.to_json());
    let reference = fs::read(dir.path().join("swap.json")).unwrap();

    for (outer, inner) in [("id.json", "swap.json"), ("swap.json", "id.json")] {
        let out = run_in(dir.path(), &["table", "compose", outer, inner]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(
            out.stdout, reference,
            "compose({outer}, {inner}) is not byte-identical to the swap table"
        );
    }
}

#[test]
fn algebra_norm_reports_the_rank_one_value() {
    let dir = tempfile::tempdir().unwrap();
    write_pretty(
        &dir.path().join("full2.json"),
        &FiniteGroupoid::full_equivalence(2).to_json(),
    );
    fs::write(
        dir.path().join("ones2.json"),
        r#"{"groupoid":"full2.json","coeffs":{"(1,1)":[1.0,0.0],"(1,2)":[1.0,0.0]}}"#,
    )
    .unwrap();

    let out = run_in(dir.path(), &["algebra", "norm", "--p", "3", "ones2.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let value = v["value"].as_f64().unwrap();
    assert!((value - 2f64.powf(2.0 / 3.0)).abs() < 1e-6);
    assert_eq!(v["fiber_dim"].as_u64(), Some(2));

    // byte-identical on a re-run
    let again = run_in(dir.path(), &["algebra", "norm", "--p", "3", "ones2.json"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn witness_moves_a_word_and_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["check", "witness", "--alphabets", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_ne!(v["moved_word"], v["image"]);
    assert_eq!(v["moved_word"][0].as_str(), Some("000"));
    assert_eq!(v["image"][0].as_str(), Some("100"));

    let out = run_in(dir.path(), &["check", "witness", "--alphabets", "1"]);
    assert_eq!(out.status.code(), Some(2), "a one-letter alphabet has no transpositions");
}

#[test]
fn sampling_reports_are_deterministic_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["check", "core", "--n", "2", "--p", "3", "--samples", "400", "--seed", "5"];
    let first = run_in(dir.path(), &args);
    assert_eq!(first.status.code(), Some(0));
    let second = run_in(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout, "same seed, same bytes");

    let pinned = bin()
        .current_dir(dir.path())
        .env("GRPDLAB_THREADS", "1")
        .args(args)
        .output()
        .unwrap();
    assert_eq!(
        first.stdout, pinned.stdout,
        "thread count must not affect sampled reports"
    );

    let verdict = stdout_json(&first);
    assert_eq!(verdict["verdict"].as_str(), Some("confirmed"));
}

#[test]
fn emitted_objects_reload() {
    let dir = tempfile::tempdir().unwrap();
    // germ groupoid of the Z_2 swap action, written to a file, validates
    fs::write(
        dir.path().join("action.json"),
        r#"{"x":["x0","x1"],"elements":[{"label":"e","map":{"x0":"x0","x1":"x1"}},{"label":"s","map":{"x0":"x1","x1":"x0"}}]}"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["groupoid", "germ", "action.json", "--out", "germ.json"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run_in(dir.path(), &["groupoid", "validate", "germ.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["violations"].as_array().unwrap().is_empty());

    let out = run_in(dir.path(), &["groupoid", "decompose", "germ.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["elementary"]["blocks"][0]["N"].as_u64(), Some(2));
}
