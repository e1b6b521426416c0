use std::io::Write;
use std::process::{Command, Stdio};

use polydl::corpus::ConceptGen;
use polydl::semantics::{domain_bound, filtration_bound, oracle_sat, OracleConfig};
use polydl::syntax::Signature;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn polydl(args: &[&str], stdin: &str) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_polydl"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

const TERNARY: &str = r#"{
  "domain": ["a", "b", "c"],
  "concepts": {"A": ["b"], "B": ["c"]},
  "roles": {"R": {"arity": 3, "tuples": [["a", "b", "c"], ["b", "c", "c"]]}}
}"#;

const CYCLE: &str = r#"{
  "domain": ["x", "y"],
  "concepts": {"A": ["x"]},
  "roles": {"R": {"arity": 2, "tuples": [["x", "y"], ["y", "x"]]}}
}"#;

fn write_model(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_prints_the_extension() {
    let r = polydl(&["check", "-", ">=1 R.(A, B)"], TERNARY);
    assert_eq!((r.code, r.stdout.as_str()), (0, "{a}\n"));
    let r = polydl(&["check", "-", ">=1 R^s.(B, A)"], TERNARY);
    assert_eq!(r.stdout, "{a}\n");
    let r = polydl(&["--json", "check", "-", "not A"], TERNARY);
    assert_eq!(r.stdout, "[\"a\",\"c\"]\n");
}

#[test]
fn eval_gra_prints_relations() {
    let r = polydl(&["eval-gra", "-", "p(R)"], TERNARY);
    assert_eq!(r.stdout, "arity 3 {(c, a, b), (c, b, c)}\n");
    let r = polydl(&["--json", "eval-gra", "-", "ex(R)"], TERNARY);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["arity"], 2);
}

#[test]
fn file_arguments_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(&dir, "m.json", TERNARY);
    let c = dir.path().join("c.txt");
    std::fs::write(&c, "not (not A and not B)\n").unwrap();
    let r = polydl(&["check", &m, c.to_str().unwrap()], "");
    assert_eq!(r.stdout, "{b, c}\n");
}

#[test]
fn reify_then_sat_matches_the_oracle() {
    let sig = Signature::new()
        .with_concept("A")
        .with_concept("B")
        .with_role("R", 3)
        .with_role("S", 2);
    let gen = ConceptGen::new(&sig, 2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..25 {
        let c = gen.sample(&mut rng);
        let reified = polydl(&["reify", "--with-dom", &c.to_string()], "");
        assert_eq!(reified.code, 0, "{}", reified.stderr);
        let piped = polydl(&["sat", "-"], &reified.stdout);
        let n = domain_bound(&c).max(filtration_bound(&c));
        let oracle = oracle_sat(&c, n, OracleConfig::default()).unwrap();
        let expected = if oracle.is_sat() { 0 } else { 1 };
        assert_eq!(piped.code, expected, "{c}: {}", piped.stdout);
    }
}

#[test]
fn sat_writes_a_checkable_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let concept = ">=2 R.(A, not A) and not >=3 R.(top, top)";
    let r = polydl(&["sat", concept, "--witness", w.to_str().unwrap()], "");
    assert_eq!(r.stdout, "sat\n");
    let json = polydl(&["--json", "sat", concept], "");
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    let root = v["root"].as_str().unwrap();
    let checked = polydl(&["check", w.to_str().unwrap(), concept], "");
    assert!(checked.stdout.contains(root), "{} lacks {root}", checked.stdout);
}

#[test]
fn oracle_reports_its_bound() {
    let r = polydl(&["--json", "oracle-sat", "A and not A", "--bound", "2"], "");
    assert_eq!(r.code, 1);
    assert_eq!(r.stdout, "{\"bound\":2,\"verdict\":\"unsat\"}\n");
}

#[test]
fn unravel_emits_a_tree() {
    let r = polydl(&["--json", "unravel", "-", "--root", "x", "--depth", "3"], CYCLE);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert!(v.is_object());
    let bad = polydl(&["unravel", "-", "--root", "nobody", "--depth", "1"], CYCLE);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("nobody"));
}

#[test]
fn bridge_round_trip() {
    let t = polydl(&["bridge", "--to-gra", "not (A and E R.(B))"], "");
    assert_eq!(t.code, 0);
    let back = polydl(&["bridge", "--to-alc", t.stdout.trim(), "--binary", "R"], "");
    assert_eq!(back.code, 0, "{}", back.stderr);
    let r = polydl(&["bridge", "--to-alc", "p(R)", "--binary", "R"], "");
    assert_eq!(r.code, 2);
}

#[test]
fn game_on_a_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(&dir, "cycle.json", CYCLE);
    let r = polydl(&["game", &m, "x", &m, "y", "--rounds", "0", "--grading", "1"], "");
    assert_eq!(r.stdout, "spoiler\n");
    let r = polydl(&["game", &m, "x", &m, "x", "--rounds", "3", "--grading", "2"], "");
    assert_eq!(r.stdout, "duplicator\n");
    let r = polydl(&["game", &m, "x", &m, "y", "--rounds", "1", "--grading", "0"], "");
    assert_eq!(r.code, 2);
}

#[test]
fn malformed_input_exits_two() {
    let r = polydl(&["check", "-", "A and"], TERNARY);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error:"));
    let r = polydl(&["check", "-", "A"], "{\"domain\": [\"a\", \"a\"]}");
    assert_eq!(r.code, 2);
}
