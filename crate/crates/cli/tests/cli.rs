use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::OnceLock;

use serde_json::Value;
use tempfile::TempDir;

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.json")).display().to_string()
}

fn schema() -> &'static jsonschema::Validator {
    static S: OnceLock<jsonschema::Validator> = OnceLock::new();
    S.get_or_init(|| {
        let text = include_str!("../schema/report.schema.json");
        jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
    })
}

struct Run {
    code: i32,
    report: Value,
    stdout: Vec<u8>,
}

/// Runs the binary and checks that stdout is exactly one schema-valid report.
fn sofic(args: &[&str], stdin: Option<&str>) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sofic"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let input = stdin.unwrap_or_default().to_string();
    let mut pipe = child.stdin.take().unwrap();
    std::thread::spawn(move || pipe.write_all(input.as_bytes()));
    let out = child.wait_with_output().unwrap();
    let report: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: stdout is not one JSON document ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    let errors: Vec<String> = schema().iter_errors(&report).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{args:?}: report violates the schema: {errors:?}\n{report:#}");
    Run { code: out.status.code().unwrap(), report, stdout: out.stdout }
}

fn failed(r: &Value) -> Vec<&str> {
    r["verdicts"].as_array().unwrap().iter().filter(|v| v["pass"] == false).map(|v| v["name"].as_str().unwrap()).collect()
}

/// A golden-mean to full 2-shift code, built once through the CLI.
fn golden_code() -> &'static (TempDir, PathBuf) {
    static C: OnceLock<(TempDir, PathBuf)> = OnceLock::new();
    C.get_or_init(|| {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("code.json");
        let r = sofic(&["build-embed", "--x", &corpus("golden"), "--y", &corpus("full2"), "--out", path.to_str().unwrap()], None);
        assert_eq!(r.code, 0, "{:#}", r.report);
        (dir, path)
    })
}

fn code_path() -> &'static str {
    golden_code().1.to_str().unwrap()
}

/// Admissible golden-mean word (no two adjacent 1s) from a fixed xorshift.
fn golden_word(n: usize, mut seed: u64) -> Vec<&'static str> {
    let mut w = Vec::with_capacity(n);
    while w.len() < n {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        w.push(if seed & 1 == 1 && w.last() != Some(&"1") { "1" } else { "0" });
    }
    w
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn invariants_of_the_golden_mean() {
    let r = sofic(&["invariants", "--in", &corpus("golden"), "--max-n", "4"], None);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["result"]["points"], serde_json::json!(["1", "3", "4", "7"]));
    let h = r.report["result"]["entropy"]["value"].as_f64().unwrap();
    assert!((h - 0.481212).abs() < 1e-6, "{h}");
    assert!((h - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-9);
}

#[test]
fn check_embed_verdicts() {
    let r = sofic(&["check-embed", "--x", &corpus("golden"), "--y", &corpus("full2"), "--max-n", "6"], None);
    assert_eq!(r.code, 0, "{:#}", r.report);
    assert_eq!(r.report["pass"], true);
    let r = sofic(&["check-embed", "--x", &corpus("full2"), "--y", &corpus("golden")], None);
    assert_eq!(r.code, 1);
    assert_eq!(failed(&r.report), ["entropy", "periodic_points", "orbit_counts", "almost_markov"]);
}

#[test]
fn cover_of_graph1() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cover.json");
    let r = sofic(&["cover", "--in", &corpus("graph1"), "--out", out.to_str().unwrap()], None);
    assert_eq!(r.code, 0, "{:#}", r.report);
    let cover = &r.report["result"]["cover"];
    assert!(cover["back_map"].is_object());
    let info = r.report["informational"].as_array().unwrap();
    let left = info.iter().find(|v| v["name"] == "left_resolving").unwrap();
    assert_eq!(left["pass"], false);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(&written, cover);
    sofic::fischer::FischerCover::from_value(&written).unwrap();
}

#[test]
fn encode_then_decode_recovers_the_middle() {
    let dir = TempDir::new().unwrap();
    let x = golden_word(900, 7);
    let xfile = write(dir.path(), "x.txt", &x.join(" "));
    let yfile = dir.path().join("y.txt");
    let r = sofic(&["encode", "--code", code_path(), "--word", &xfile, "--out", yfile.to_str().unwrap()], None);
    assert_eq!(r.code, 0, "{:#}", r.report);
    let (from, to) = (r.report["result"]["from"].as_i64().unwrap(), r.report["result"]["to"].as_i64().unwrap());
    let y = std::fs::read_to_string(&yfile).unwrap();
    assert_eq!(y.split_whitespace().count() as i64, to - from + 1);
    // decode from stdin; coordinates restart at 1
    let r = sofic(&["decode", "--code", code_path(), "--word", "-"], Some(&y));
    assert_eq!(r.code, 0, "{:#}", r.report);
    let (s, t) = (r.report["result"]["from"].as_i64().unwrap(), r.report["result"]["to"].as_i64().unwrap());
    let back: Vec<&str> = r.report["result"]["word"].as_str().unwrap().split(' ').collect();
    let lo = (from + s - 2) as usize;
    assert_eq!(back, x[lo..lo + (t - s + 1) as usize]);
}

#[test]
fn failed_checks_exit_one() {
    let dir = TempDir::new().unwrap();
    let cases: Vec<(Vec<String>, Option<String>, &str)> = vec![
        (vec!["encode".into(), "--word".into(), write(dir.path(), "bad.txt", "0 1 1 0")], None, "inadmissible"),
        (vec!["encode".into(), "--word".into(), write(dir.path(), "short.txt", "0 1 0")], None, "window_too_short"),
        (vec!["decode".into(), "--word".into(), "-".into()], Some(golden_word(400, 3).join(" ")), "not_in_image"),
    ];
    for (mut args, stdin, kind) in cases {
        args.extend(["--code".to_string(), code_path().to_string()]);
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = sofic(&argv, stdin.as_deref());
        assert_eq!(r.code, 1, "{argv:?}: {:#}", r.report);
        assert_eq!(r.report["error"]["kind"], kind, "{argv:?}");
    }
    let r = sofic(&["build-embed", "--x", &corpus("full2"), "--y", &corpus("golden")], None);
    assert_eq!(r.code, 1);
    assert_eq!(r.report["error"]["kind"], "precondition");
    assert!(failed(&r.report).contains(&"entropy"));
}

#[test]
fn verify_passes_and_catches_a_corrupted_matching() {
    let r = sofic(&["verify", "--code", code_path(), "--samples", "100", "--periods", "6"], None);
    assert_eq!(r.code, 0, "{:#}", r.report);
    // send the orbit of 00101 to the image of 00001
    let mut code: Value = serde_json::from_str(&std::fs::read_to_string(code_path()).unwrap()).unwrap();
    let pairs = code["orbit_match"].as_array_mut().unwrap();
    let find = |pairs: &[Value], w: &str| pairs.iter().position(|p| p["from"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect::<String>() == w).unwrap();
    let (a, b) = (find(pairs, "00001"), find(pairs, "00101"));
    let donor = pairs[a].clone();
    pairs[b]["to"] = donor["to"].clone();
    pairs[b]["phase"] = donor["phase"].clone();
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", &code.to_string());
    let r = sofic(&["verify", "--code", &bad, "--samples", "20", "--periods", "5"], None);
    assert_eq!(r.code, 1);
    assert!(failed(&r.report).contains(&"injectivity"), "{:#}", r.report);
}

#[test]
fn usage_and_io_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let junk = write(dir.path(), "junk.json", "{ not json");
    let word = write(dir.path(), "w.txt", "0 1 0 2");
    let golden = corpus("golden");
    let cases: Vec<Vec<&str>> = vec![
        vec![],
        vec!["frobnicate"],
        vec!["cover", "--in", &golden, "--bogus"],
        vec!["invariants", "--in", &golden, "--seed", "1"],
        vec!["check-embed", "--x", &golden, "--y", &golden, "--samples", "3"],
        vec!["build-embed", "--x", &golden],
        vec!["encode", "--code", code_path(), "--word", &word, "--periods", "2"],
        vec!["decode", "--code", code_path()],
        vec!["verify", "--code", code_path(), "--tol", "0.1"],
        vec!["invariants", "--in", &golden, "--max-n", "zero"],
        vec!["invariants", "--in", &golden, "--max-n", "0"],
        vec!["cover", "--in", "/nonexistent/golden.json"],
        vec!["cover", "--in", &junk],
        vec!["verify", "--code", &junk],
        vec!["encode", "--code", code_path(), "--word", &word],
    ];
    for args in cases {
        let r = sofic(&args, None);
        assert_eq!(r.code, 2, "{args:?}: {:#}", r.report);
        assert_eq!(r.report["pass"], false);
        assert!(r.report["error"]["kind"].as_str().is_some_and(|k| !k.is_empty()), "{args:?}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let xfile = write(dir.path(), "x.txt", &golden_word(700, 11).join("\n"));
    let (g, twin, full2) = (corpus("golden"), corpus("twin"), corpus("full2"));
    let runs: Vec<Vec<&str>> = vec![
        vec!["cover", "--in", &g],
        vec!["invariants", "--in", &g, "--max-n", "10"],
        vec!["check-embed", "--x", &g, "--y", &twin],
        vec!["build-embed", "--x", &g, "--y", &full2, "--seed", "5"],
        vec!["encode", "--code", code_path(), "--word", &xfile],
        vec!["verify", "--code", code_path(), "--samples", "60", "--seed", "9"],
    ];
    for args in runs {
        let a = sofic(&args, None);
        let b = sofic(&args, None);
        assert_eq!(a.code, b.code, "{args:?}");
        assert!(a.stdout == b.stdout, "{args:?}: reports differ");
    }
}

#[test]
fn seed_changes_sampling_only() {
    let run = |seed: &str| sofic(&["verify", "--code", code_path(), "--samples", "40", "--periods", "4", "--seed", seed], None);
    let (a, b) = (run("1"), run("2"));
    assert_eq!((a.code, b.code), (0, 0));
    assert_eq!(a.report["verdicts"][1], b.report["verdicts"][1], "periodic checks do not depend on the seed");
}

#[test]
fn schema_rejects_malformed_reports() {
    let bad = [
        serde_json::json!({ "report": "cover", "pass": true }),
        serde_json::json!({ "report": "cover", "pass": true, "verdicts": [], "error": { "kind": "io", "message": "x" } }),
        serde_json::json!({ "report": "invariants", "pass": true, "verdicts": [], "result": { "max_n": 2, "points": [1, 3], "orbits": ["1", "1"], "words": ["2", "3"], "entropy": null } }),
        serde_json::json!({ "report": "nonsense", "pass": false, "verdicts": [] }),
    ];
    for r in bad {
        assert!(!schema().is_valid(&r), "{r}");
    }
}
