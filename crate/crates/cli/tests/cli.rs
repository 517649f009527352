use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_collapse-iso"));
    cmd.env_remove("COLLAPSE_ISO_BUDGET");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const C6: &str = "0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n";
const TWO_K3: &str = "0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n";
const C6_SHUFFLED: &str = "# n=6\n3 0\n0 5\n5 2\n2 4\n4 1\n1 3\n";

#[test]
fn iso_exit_codes_follow_the_verdict() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.edges", C6);
    let b = write(&dir, "b.edges", C6_SHUFFLED);
    let c = write(&dir, "c.edges", TWO_K3);

    let yes = run(&["iso", s(&a), s(&b), "--emit-mapping"]);
    assert_eq!(code(&yes), 0);
    let v = json(&yes);
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["mapping"].as_array().unwrap().len(), 6);

    let no = run(&["iso", s(&a), s(&c)]);
    assert_eq!(code(&no), 1);
    let v = json(&no);
    assert_eq!(v["verdict"], "no");
    assert!(v["mapping"].is_null());
    assert!(!v["witness"].is_null());
}

#[test]
fn iso_in_conjecture_mode_agrees() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.edges", C6);
    let b = write(&dir, "b.edges", C6_SHUFFLED);
    let out = run(&["iso", s(&a), s(&b), "--mode", "conjecture", "--trace"]);
    assert!(matches!(code(&out), 0 | 4));
    let v = json(&out);
    assert!(v["verdict"] == "yes" || v["verdict"] == "conjecture_disagreement");
}

#[test]
fn bad_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.edges", C6);
    let junk = write(&dir, "junk.edges", "0 x\n");
    assert_eq!(code(&run(&["iso", s(&a), s(&junk)])), 2);
    assert_eq!(code(&run(&["iso", s(&a), "/nonexistent/file.edges"])), 2);
    let unknown = write(&dir, "graph.dat", C6);
    assert_eq!(code(&run(&["iso", s(&a), s(&unknown)])), 2);
    assert_eq!(code(&run(&["iso", s(&a), s(&unknown), "--format", "edges"])), 0);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn graph6_inputs_are_sniffed() {
    let dir = TempDir::new().unwrap();
    // P3 drawn two ways.
    let a = write(&dir, "a.g6", "Bg\n");
    let b = write(&dir, "b.g6", "BW\n");
    let out = run(&["iso", s(&a), s(&b)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn budget_exhaustion_exits_three() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "petersen.edges", "0 1\n1 2\n2 3\n3 4\n4 0\n0 5\n1 6\n2 7\n3 8\n4 9\n5 7\n7 9\n9 6\n6 8\n8 5\n");
    let out = run(&["classify", s(&p), "--exact-budget", "0"]);
    assert_eq!(code(&out), 3);
    let out = bin().args(["classify", s(&p)]).env("COLLAPSE_ISO_BUDGET", "0").output().unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn classify_reports_symmetry() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "c6.edges", C6);
    let out = run(&["classify", s(&p)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["n"], 6);
    assert_eq!(v["vertex_regular"], true);
    assert_eq!(v["vertex_symmetric"]["holds"], true);
    assert_eq!(v["arc_symmetric"]["holds"], true);

    let p3 = write(&dir, "p3.edges", "0 1\n1 2\n");
    let v = json(&run(&["classify", s(&p3)]));
    assert_eq!(v["vertex_symmetric"]["holds"], false);
    assert_eq!(v["edge_symmetric"]["holds"], true);
}

#[test]
fn tomo_and_pattern() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "c6.edges", C6);

    let all = json(&run(&["tomo", s(&p)]));
    let keys: Vec<&Value> = all.as_array().unwrap().iter().map(|t| &t["key"]).collect();
    assert_eq!(keys.len(), 6);
    assert!(keys.windows(2).all(|w| w[0] == w[1]));

    let one = json(&run(&["tomo", s(&p), "--nail", "2"]));
    assert_eq!(one.as_array().unwrap().len(), 1);
    assert_eq!(one[0]["key"], *keys[0]);
    assert_eq!(code(&run(&["tomo", s(&p), "--nail", "6"])), 2);
    assert_eq!(code(&run(&["tomo", s(&p), "--edge", "0,1"])), 2);

    let a = json(&run(&["pattern", s(&p), "--arc", "0,1"]));
    let b = json(&run(&["pattern", s(&p), "--arc", "3,2"]));
    assert_eq!(a["key"], b["key"]);
    assert_eq!(code(&run(&["pattern", s(&p), "--arc", "0,2"])), 2);
    assert_eq!(code(&run(&["pattern", s(&p), "--edge", "0,3"])), 2);
    for extra in [&[][..], &["--varied"], &["--nail", "1"], &["--nail", "1", "--varied"], &["--edge", "1,2"]] {
        let mut args = vec!["pattern", s(&p)];
        args.extend_from_slice(extra);
        let out = run(&args);
        assert_eq!(code(&out), 0, "{args:?}");
        assert_eq!(json(&out)["key"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn gen_counts_and_empty_order() {
    let out = run(&["gen", "--n", "5", "--dedup"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 34);

    let out = run(&["gen", "--n", "3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 8);

    let out = run(&["gen", "--n", "0", "--dedup"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());

    let out = run(&["--json", "gen", "--n", "4", "--dedup"]);
    assert_eq!(json(&out).as_array().unwrap().len(), 11);
}

#[test]
fn conjecture_sweep_is_clean_and_reproducible() {
    let args = ["--json", "conjecture", "--n-max", "4", "--no-timing", "--jobs", "2"];
    let a = run(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let reports = json(&a);
    assert_eq!(reports.as_array().unwrap().len(), 5);
    for r in reports.as_array().unwrap() {
        assert!(r["counterexamples"].as_array().unwrap().is_empty());
    }
}

#[test]
fn conjecture_on_external_corpus_and_spot_check() {
    let dir = TempDir::new().unwrap();
    let corpus = write(&dir, "corpus.g6", "Bg\nBW\nBw\nB?\n");
    let out = run(&["conjecture", "--corpus", s(&corpus), "--ids", "1,3", "--no-timing"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["corpus"]["count"], 4);
    // Summaries go to stderr so stdout stays parseable.
    assert!(String::from_utf8_lossy(&out.stderr).contains("counterexamples"));

    let out = run(&["conjecture", "--spot-check", "20", "--spot-n", "9", "--ids", "1,2", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    assert_eq!(code(&run(&["conjecture", "--ids", "9", "--n-max", "3"])), 2);
}

#[test]
fn bench_table_and_json() {
    let out = run(&["bench", "--sizes", "16,24", "--trials", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("median_ms"));

    let out = run(&["--json", "bench", "--family", "cycle", "--sizes", "10", "--trials", "2"]);
    let v = json(&out);
    assert_eq!(v["rows"][0]["n"], 10);
    assert_eq!(v["rows"][0]["trials"], 2);

    assert_eq!(code(&run(&["bench", "--sizes", "7", "--trials", "1"])), 2);
}
