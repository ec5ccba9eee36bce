use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_autgrp"));
    c.env_remove("AUTGRP_NODE_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Builds an automaton file for `matrices` in base `n` and returns its path.
fn built(dir: &TempDir, matrices: &str, n: u32) -> String {
    let m = write(dir.path(), "m.json", matrices);
    let a = dir.path().join(format!("a{n}.json"));
    let o = run(&[
        "build",
        "--matrices",
        m.to_str().unwrap(),
        "--n",
        &n.to_string(),
        "-o",
        a.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    a.to_str().unwrap().to_string()
}

#[test]
fn build_reports_state_count_and_bound() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", "[[[2]]]");
    let a = dir.path().join("a.json");
    let o = run(&[
        "build",
        "--matrices",
        m.to_str().unwrap(),
        "--n",
        "3",
        "-o",
        a.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "states=4 bound=4");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(json["n"], 3);
    assert_eq!(json["states"].as_array().unwrap().len(), 4);

    let o = run(&[
        "--json",
        "build",
        "--matrices",
        m.to_str().unwrap(),
        "--n",
        "3",
        "-o",
        a.to_str().unwrap(),
    ]);
    let line: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(line["states"], 4);

    let o = run(&[
        "build",
        "--matrices",
        m.to_str().unwrap(),
        "--n",
        "3",
        "--format",
        "dot",
    ]);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn act_examples() {
    let dir = TempDir::new().unwrap();
    let a = built(&dir, "[[[2]]]", 3);
    let o = run(&["act", "--automaton", &a, "--word", "m[0]:(0)", "--input", "2 1"]);
    assert_eq!(stdout(&o).trim(), "1 0");

    let a = built(&dir, "[[[1,1],[0,1]]]", 3);
    let o = run(&["act", "--automaton", &a, "--word", "t[1]", "--input", "0,0 0,0"]);
    assert_eq!(stdout(&o).trim(), "1,0 0,0");
}

#[test]
fn word_problem_verdicts_and_budget() {
    let dir = TempDir::new().unwrap();
    let a = built(&dir, "[[[1,1],[0,1]]]", 2);
    let o = run(&["wp", "--automaton", &a, "--word", "t[1] t[2] t[1]^-1 t[2]^-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("IDENTITY"));

    let o = run(&["wp", "--automaton", &a, "--word", "t[1]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("NONTRIVIAL"));
    assert!(stdout(&o).contains("moved prefix:"));

    let b = built(&dir, "[[[2]]]", 3);
    let o = bin()
        .args(["wp", "--automaton", &b, "--word", "m[0]:(0) t[1] m[0]:(0)^-1 t[1]^-2"])
        .env("AUTGRP_NODE_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).starts_with("BUDGET-EXCEEDED"));
}

#[test]
fn relations_and_presentation() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", "[[[2]]]");
    let o = run(&["relations", "--matrices", m.to_str().unwrap(), "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = run(&["presentation", "--matrices", m.to_str().unwrap(), "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("< a, t | t a t^-1 a^-2 >"), "{text}");
    assert!(text.contains("# form: ascending-hnn"));

    let s = write(dir.path(), "s.json", "[[[1,2],[0,1]],[[1,0],[2,1]]]");
    let o = run(&["relations", "--matrices", s.to_str().unwrap(), "--n", "3", "--inverse"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", "[[[2]]]");
    let o = run(&["build", "--matrices", m.to_str().unwrap(), "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gcd"));

    let bad = write(dir.path(), "bad.json", "[[[1,2]]]");
    assert_eq!(
        run(&["build", "--matrices", bad.to_str().unwrap(), "--n", "3"])
            .status
            .code(),
        Some(2)
    );
    let sing = write(dir.path(), "sing.json", "[[[1,1],[1,1]]]");
    assert_eq!(
        run(&["build", "--matrices", sing.to_str().unwrap(), "--n", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["build", "--matrices", m.to_str().unwrap(), "--n", "1"])
            .status
            .code(),
        Some(2)
    );

    let a = built(&dir, "[[[2]]]", 3);
    assert_eq!(run(&["wp", "--automaton", &a, "--word", "t[9]"]).status.code(), Some(2));
    assert_eq!(
        run(&["act", "--automaton", &a, "--word", "t[1]", "--input", "7"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn caps_exit_3() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", "[[[1,0],[0,1]]]");
    let o = run(&[
        "build",
        "--matrices",
        m.to_str().unwrap(),
        "--n",
        "101",
        "--alphabet-cap",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&[
        "build",
        "--matrices",
        m.to_str().unwrap(),
        "--n",
        "3",
        "--state-cap",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_is_reproducible_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let a = built(&dir, "[[[2,1],[1,1]]]", 3);
    let args = [
        "verify",
        "--automaton",
        &a,
        "--depth",
        "6",
        "--samples",
        "200",
        "--seed",
        "42",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.starts_with("seed=42"));
    assert!(text.contains("mismatches=0"));
}

#[test]
fn corrupted_automaton_fails_verification() {
    let dir = TempDir::new().unwrap();
    let a = built(&dir, "[[[2]]]", 3);
    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let out = json["states"][0]["out"].as_array_mut().unwrap();
    out.swap(0, 1);
    let bad = write(dir.path(), "bad_aut.json", &json.to_string());
    let o = run(&[
        "verify",
        "--automaton",
        bad.to_str().unwrap(),
        "--depth",
        "4",
        "--samples",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(5), "{}", stdout(&o));
}

#[test]
fn conjugacy_search_finds_short_conjugators() {
    let dir = TempDir::new().unwrap();
    let a = built(&dir, "[[[2]]]", 3);
    let o = run(&[
        "conj",
        "--automaton",
        &a,
        "--from",
        "t[1]",
        "--to",
        "t[1]^2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("FOUND conjugator=t1 "), "{}", stdout(&o));
}
