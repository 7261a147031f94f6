use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn vassep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vassep")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Runs `sep`, writes the certificate, and checks it with `verify`.
fn sep_and_verify(mode: &str, a: &Path, b: &Path) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let o = vassep(&["sep", "--mode", mode, p(a), p(b), "--json", "--cert-out", p(&cert)]);
    let c = code(&o);
    if c <= 1 {
        let v = vassep(&["verify", p(a), p(b), p(&cert)]);
        assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stdout));
    }
    (c, json(&o))
}

#[test]
fn help_documents_every_flag() {
    let o = vassep(&["sep", "--help"]);
    assert_eq!(code(&o), 0);
    let help = String::from_utf8_lossy(&o.stdout);
    for flag in ["--budget-states", "--max-run-len", "--max-n", "--max-witness-pairs", "--workers", "--seed", "--json"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
    let (e, o) = (fixture("evens.json"), fixture("odds.json"));
    let all = [
        "sep",
        p(&e),
        p(&o),
        "--budget-states",
        "5000",
        "--max-run-len",
        "8",
        "--max-n",
        "4",
        "--max-witness-pairs",
        "100",
        "--workers",
        "1",
        "--seed",
        "3",
        "--json",
    ];
    assert_eq!(code(&vassep(&all)), 0);
}

#[test]
fn unknown_flags_fail_fast() {
    let o = vassep(&["sep", "--frobnicate", p(&fixture("evens.json")), p(&fixture("odds.json"))]);
    assert!(code(&o) >= 3);
    assert!(code(&vassep(&["no-such-command"])) >= 3);
}

#[test]
fn evens_and_odds() {
    let (c, v) = sep_and_verify("modular", &fixture("evens.json"), &fixture("odds.json"));
    assert_eq!(c, 0);
    assert_eq!(v["verdict"], "separable");
    assert_eq!(v["n"], 2);
    assert_eq!(v["separator"]["residues"], serde_json::json!([[0]]));
}

#[test]
fn self_versus_self() {
    for mode in ["modular", "unary"] {
        let (c, v) = sep_and_verify(mode, &fixture("triangle.json"), &fixture("triangle.json"));
        assert_eq!(c, 1, "{v}");
        assert_eq!(v["verdict"], "not_separable");
    }
}

#[test]
fn zero_versus_positive() {
    let (c, v) = sep_and_verify("unary", &fixture("zero.json"), &fixture("positive.json"));
    assert_eq!(c, 0);
    assert_eq!(v["separator"]["classes"], serde_json::json!([[{ "small": 0 }]]));
    let (c, _) = sep_and_verify("modular", &fixture("zero.json"), &fixture("positive.json"));
    assert_eq!(c, 1);
}

#[test]
fn tiny_budget_is_unknown() {
    let o = vassep(&[
        "sep",
        p(&fixture("doubling.json")),
        p(&fixture("origin3.json")),
        "--budget-states",
        "10",
        "--max-run-len",
        "1",
        "--max-n",
        "1",
        "--json",
    ]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["verdict"], "unknown");
    assert_eq!(v["report"]["max_n_tried"], 1);
}

#[test]
fn tampered_certificates_fail() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let (a, b) = (fixture("evens.json"), fixture("odds.json"));
    assert_eq!(code(&vassep(&["sep", p(&a), p(&b), "--cert-out", p(&cert)])), 0);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    v["separator"]["residues"] = serde_json::json!([[1]]);
    std::fs::write(&cert, v.to_string()).unwrap();
    assert_eq!(code(&vassep(&["verify", p(&a), p(&b), p(&cert)])), 1);
    // the same certificate against swapped sides
    assert_eq!(code(&vassep(&["verify", p(&b), p(&a), p(&cert)])), 1);
}

#[test]
fn reach_triangle() {
    let o = vassep(&["reach", p(&fixture("triangle.json")), "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["answer"], "found");
    assert_eq!(v["run"], serde_json::json!([0, 1]));
    let o = vassep(&["reach", p(&fixture("triangle.json")), "--target", "0,0,0", "--json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["answer"], "proved_empty");
}

#[test]
fn brute_members_triangle_section() {
    let o = vassep(&["brute", "members", p(&fixture("triangle_section.json")), "--bound", "12", "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o), serde_json::json!([[0, 8], [3, 5], [6, 2]]));
}

#[test]
fn brute_pairs_and_nonneg() {
    let (e, o) = (fixture("evens.json"), fixture("odds.json"));
    assert_eq!(code(&vassep(&["brute", "pairs", p(&e), p(&o), "--n", "2"])), 1);
    assert_eq!(code(&vassep(&["brute", "pairs", p(&e), p(&o), "--n", "3"])), 0);
    let out = vassep(&["brute", "nonneg", "--vector", "3,5", "--period", "1,1", "--period", "0,2", "--json"]);
    assert_eq!(json(&out)["coefficients"], serde_json::json!([3, 1]));
}

#[test]
fn hardness_toys() {
    for (toy, expect) in [("toy_q_unreachable.json", 0), ("toy_q_reachable.json", 1)] {
        let dir = tempfile::tempdir().unwrap();
        let o = vassep(&["gen-hardness", p(&fixture(toy)), "--out-dir", p(dir.path())]);
        assert_eq!(code(&o), 0);
        let (u, v) = (dir.path().join("u.json"), dir.path().join("v.json"));
        for mode in ["modular", "unary"] {
            let (c, cert) = sep_and_verify(mode, &u, &v);
            assert_eq!(c, expect, "{toy} {mode}: {cert}");
        }
    }
}

#[test]
fn commutative_separation() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let (a, b) = (fixture("odd_a.json"), fixture("even_a.json"));
    let o = vassep(&["comsep", p(&a), p(&b), "--json", "--cert-out", p(&cert)]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["n"], 2);
    assert_eq!(v["reduction"], "commutative_regular");
    assert!(v["language_separator"]["description"].as_str().unwrap().contains("#a"));
    assert_eq!(code(&vassep(&["verify", p(&a), p(&b), p(&cert)])), 0);

    let o = vassep(&["comsep", "--closures", p(&fixture("empty_word.json")), p(&fixture("a_plus.json")), "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["reduction"], "commutative_closure");
    assert_eq!(v["separator"]["classes"], serde_json::json!([[{ "small": 0 }]]));
    assert_eq!(code(&vassep(&["comsep", p(&a), p(&a)])), 1);
}

#[test]
fn schema_errors_have_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"version\": 1,\n  \"vas\": {\"dim\": 1, \"source\": [0]},\n  \"colour\": 3\n}\n").unwrap();
    let o = vassep(&["sep", p(&bad), p(&bad)]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("colour"), "{err}");
}

#[test]
fn deterministic_under_seed() {
    let f = fixture("triangle.json");
    let args = ["sep", "--mode", "unary", p(&f), p(&f), "--seed", "9", "--json"];
    let (a, b) = (vassep(&args), vassep(&args));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn parallel_workers_agree() {
    let (e, o) = (fixture("evens.json"), fixture("odds.json"));
    let args = ["sep", p(&e), p(&o), "--workers", "2", "--json"];
    let o = vassep(&args);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["n"], 2);
}
