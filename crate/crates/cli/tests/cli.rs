use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use bmgame_core::{parse_instance, parse_payoff, Game};
use tempfile::TempDir;

const STAR_A: &str = r#"{
  "u_side": ["u"],
  "v_side": ["v1", "v2"],
  "capacities": {"u": 2, "v1": 1, "v2": 2},
  "edges": [{"u": "u", "v": "v1", "w": 3}, {"u": "u", "v": "v2", "w": 2}]
}"#;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn bmgame(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_bmgame"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn star_a(payoff: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    put(&dir, "g.json", STAR_A);
    put(&dir, "p.json", payoff);
    dir
}

fn knapsack(goal: u64) -> TempDir {
    let dir = TempDir::new().unwrap();
    put(
        &dir,
        "k.json",
        &format!(r#"{{"items": [{{"c": 2, "a": 3}}, {{"c": 1, "a": 4}}], "C": 2, "A": {goal}}}"#),
    );
    let r = bmgame(
        dir.path(),
        &[
            "reduce",
            "knapsack-to-star",
            "--knapsack",
            "k.json",
            "--out",
            "star",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    dir
}

const PAIR: [&str; 4] = ["--instance", "g.json", "--payoff", "p.json"];

fn with<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(tail).copied().collect()
}

#[test]
fn check_core_in_core_all_methods() {
    let dir = star_a(r#"{"u": 3, "v1": 1, "v2": 1}"#);
    for method in ["auto", "brute", "star"] {
        let r = bmgame(
            dir.path(),
            &with(&["check-core", "--method", method], &PAIR),
        );
        assert_eq!(r.code, 0, "{method}: {}", r.stderr);
        assert_eq!(r.stdout, "IN CORE\n");
    }
}

#[test]
fn check_core_overpaid_leaf() {
    let dir = star_a(r#"{"u": 1, "v1": 1, "v2": 3}"#);
    for method in ["brute", "star"] {
        let r = bmgame(
            dir.path(),
            &with(&["check-core", "--method", method], &PAIR),
        );
        assert_eq!(r.code, 1, "{method}");
        assert!(r.stdout.starts_with("NOT IN CORE\n"), "{}", r.stdout);
        assert!(r.stdout.contains("deficit: 1\n"), "{}", r.stdout);
    }
}

#[test]
fn profit_share_needs_flag() {
    let dir = star_a(r#"{"u": 1, "v1": 0, "v2": 0}"#);
    let r = bmgame(
        dir.path(),
        &with(&["check-core", "--method", "brute"], &PAIR),
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("error"), "{}", r.stderr);
    let r = bmgame(dir.path(), &with(&["check-core", "--profit-share"], &PAIR));
    assert_eq!(r.code, 1);
    assert!(
        r.stdout.contains("coalition: {u,v1,v2}\ndeficit: 4\n"),
        "{}",
        r.stdout
    );
}

#[test]
fn golden_pipeline() {
    let dir = knapsack(3);
    let args = [
        "find-unstable",
        "--instance",
        "star/instance.json",
        "--payoff",
        "star/payoff.json",
    ];
    for method in ["brute", "star-dp"] {
        let r = bmgame(dir.path(), &with(&args, &["--method", method]));
        assert_eq!(r.code, 1, "{method}");
        assert_eq!(r.stdout, "UNSTABLE\ncoalition: {u,v2}\ndeficit: 1\n");
    }
    let dir = knapsack(5);
    for method in ["brute", "star-dp"] {
        let r = bmgame(dir.path(), &with(&args, &["--method", method]));
        assert_eq!(r.code, 0, "{method}");
        assert_eq!(r.stdout, "NO UNSTABLE COALITION\nmax deficit: 0\n");
    }
}

#[test]
fn knapsack_answer() {
    let dir = knapsack(3);
    let r = bmgame(dir.path(), &["knapsack", "--knapsack", "k.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "best value: 4\ngoal: 3\nanswer: YES\nitems: 2\n");
}

#[test]
fn solve_without_edges() {
    let dir = TempDir::new().unwrap();
    put(
        &dir,
        "g.json",
        r#"{"u_side": ["a"], "v_side": ["b"], "capacities": {"a": 1, "b": 1}, "edges": []}"#,
    );
    let r = bmgame(dir.path(), &["solve", "--instance", "g.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "value: 0\nmultiplicities:\n");
}

#[test]
fn solve_and_worth() {
    let dir = star_a("{}");
    let r = bmgame(dir.path(), &["solve", "--instance", "g.json"]);
    assert_eq!(r.stdout, "value: 5\nmultiplicities:\n  u v1 1\n  u v2 1\n");
    let brute = bmgame(dir.path(), &["solve", "--brute", "--instance", "g.json"]);
    assert_eq!(brute.stdout, r.stdout);
    put(&dir, "s.json", r#"["v2", "u"]"#);
    let r = bmgame(
        dir.path(),
        &["worth", "--instance", "g.json", "--coalition", "s.json"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "coalition: {u,v2}\nworth: 4\n");
}

#[test]
fn marginals_and_diminishing() {
    let dir = star_a("{}");
    let r = bmgame(
        dir.path(),
        &["marginals", "--instance", "g.json", "--diminishing"],
    );
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("u: 5\nv1: 1\nv2: 2\n"), "{}", r.stdout);
    assert!(
        r.stdout.contains("diminishing marginals: HOLD (exhaustive"),
        "{}",
        r.stdout
    );
}

#[test]
fn reduce_outputs_round_trip_and_verify() {
    let dir = knapsack(3);
    let star = [
        "--instance",
        "star/instance.json",
        "--payoff",
        "star/payoff.json",
    ];
    let r = bmgame(dir.path(), &with(&["verify"], &star));
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(
        r.stdout.ends_with("VERIFIED: 9 checks, 0 failed\n"),
        "{}",
        r.stdout
    );

    let r = bmgame(
        dir.path(),
        &with(&["reduce", "star-to-bipartite", "--out", "gadget"], &star),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = bmgame(
        dir.path(),
        &[
            "verify",
            "--json",
            "--instance",
            "gadget/instance.json",
            "--payoff",
            "gadget/payoff.json",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("\"pass\": true"));

    for sub in ["star", "gadget"] {
        let text = fs::read_to_string(dir.path().join(sub).join("instance.json")).unwrap();
        let g: Game = parse_instance(&text).unwrap();
        assert_eq!(bmgame_core::serialize_instance(&g), text);
        let p = fs::read_to_string(dir.path().join(sub).join("payoff.json")).unwrap();
        parse_payoff(&g, &p).unwrap();
    }
}

#[test]
fn partner_levels() {
    let dir = star_a(r#"{"u": 3, "v1": 1, "v2": 1}"#);
    let r = bmgame(
        dir.path(),
        &with(&["reduce", "partner", "--out", "dup"], &PAIR),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let dup = [
        "verify",
        "--instance",
        "dup/instance.json",
        "--payoff",
        "dup/payoff.json",
    ];
    let r = bmgame(dir.path(), &dup);
    assert_eq!(r.code, 1);
    assert!(
        r.stdout
            .contains("[FAIL] p' in core of G' iff p in core of G"),
        "{}",
        r.stdout
    );

    let r = bmgame(
        dir.path(),
        &with(&["reduce", "partner", "--strong", "--out", "dup"], &PAIR),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = bmgame(dir.path(), &dup);
    assert_eq!(r.code, 0, "{}", r.stdout);
}

#[test]
fn input_errors_exit_2() {
    let dir = star_a("{\"u\": 3,");
    let r = bmgame(dir.path(), &with(&["check-core"], &PAIR));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("p.json"), "{}", r.stderr);
    assert_eq!(bmgame(dir.path(), &["check-core"]).code, 2);
    assert_eq!(bmgame(dir.path(), &["frobnicate"]).code, 2);
    assert_eq!(
        bmgame(dir.path(), &["solve", "--instance", "missing.json"]).code,
        2
    );
    let r = bmgame(
        dir.path(),
        &["verify", "--instance", "g.json", "--payoff", "g.json"],
    );
    assert_eq!(r.code, 2);
    assert_eq!(bmgame(dir.path(), &["--help"]).code, 0);
}

#[test]
fn validate_reports_shape() {
    let dir = star_a(r#"{"u": 3, "v1": 1, "v2": 1}"#);
    put(&dir, "s.json", r#"["u"]"#);
    let r = bmgame(
        dir.path(),
        &with(&["validate", "--coalition", "s.json"], &PAIR),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        "valid instance: 3 agents (1 + 2), 2 edges\nstar: center u, 2 leaves\n\
         valid payoff: imputation, total 5, grand worth 5\nvalid coalition: {u}\n"
    );
}
