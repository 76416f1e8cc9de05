use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stringgraph"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn gen_then_build_graph() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["gen", "--kind", "grid_paths", "--count", "9", "-o", "f.json", "--report", "r.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["verification"]["passed"], true);

    let out = run(dir.path(), &["build-graph", "f.json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("9 12\n"), "{text}");
    let r: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(r["input"]["path"], "f.json");
    assert_eq!(r["witness"]["m"], 12);
}

#[test]
fn separator_report_on_stdin_graph() {
    let mut child = bin()
        .args(["separator", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"5 4\n0 1\n1 2\n2 3\n3 4\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["witness"]["size"], 1);
    let checks = r["verification"]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "oracle_minimum" && c["status"] == "pass"));
}

#[test]
fn verify_off_skips_exhaustive_checks() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.txt", "4 3\n0 1\n1 2\n2 3\n");
    let out = run(dir.path(), &["extract", "kr1free", "g.txt", "--r", "3", "--verify", "off"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let checks = r["verification"]["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "skipped"), "{checks:?}");
    assert_eq!(r["witness"]["kind"], "kp_free");
}

#[test]
fn precondition_violation_attaches_clique() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "k4.txt", "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let out = run(dir.path(), &["extract", "independent", "k4.txt", "--s", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "precondition_violated");
    assert_eq!(r["witness"]["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(r["verification"]["passed"], true);
}

#[test]
fn parse_and_schema_errors_exit_4() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "trunc.json", "{\"strings\":[{\"id\":\"a\",\"points\":[[0,0],[1,");
    write(dir.path(), "range.txt", "3 1\n0 7\n");
    write(dir.path(), "extra.json", "{\"strings\":[{\"id\":\"a\",\"points\":[[0,0],[1,1]],\"colour\":1}]}");
    for (file, kind) in [("trunc.json", "parse_error"), ("range.txt", "schema_error"), ("extra.json", "schema_error")] {
        let out = run(dir.path(), &["build-graph", file]);
        assert_eq!(out.status.code(), Some(4), "{file}");
        let r: Value = serde_json::from_slice(&out.stderr[out.stderr.iter().position(|&b| b == b'{').unwrap()..]).unwrap();
        assert_eq!(r["error"]["kind"], kind, "{file}");
    }
}

#[test]
fn size_cap_refusal_exits_5() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["gen", "--kind", "disjoint_segments", "--count", "50", "-o", "f.json"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(dir.path(), &["oracle", "mis", "f.json"]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(report(&out)["error"]["kind"], "too_large");
}

#[test]
fn quasiplanar_commands() {
    let dir = TempDir::new().unwrap();
    run(dir.path(), &["gen", "--kind", "convex_chords", "--count", "6", "-o", "k6.json"]);
    let out = run(dir.path(), &["qp", "check", "k6.json", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["witness"]["quasiplanar"], false);
    assert_eq!(r["witness"]["pairwise_crossing"]["labels"].as_array().unwrap().len(), 3);

    let out = run(dir.path(), &["qp", "sparse", "k6.json", "--s", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let out = run(dir.path(), &["qp", "bound", "--n", "256", "--s", "3"]);
    let bound = report(&out)["witness"]["bound"].as_f64().unwrap();
    assert!((bound - 256.0 * (8.0f64 / 3.0).powi(2)).abs() < 1e-9 * bound);

    let out = run(dir.path(), &["oracle", "crossings", "k6.json", "--r", "4"]);
    assert_eq!(report(&out)["witness"]["found"], false);
}

#[test]
fn params_file_and_strategy_flag() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "p.json", "{\"c\": 0.5, \"strategy\": \"degree_peel\"}");
    write(dir.path(), "bad.json", "{\"c\": 0.5, \"unknown\": 1}");
    write(dir.path(), "g.txt", "3 2\n0 1\n1 2\n");
    let r = report(&run(dir.path(), &["separator", "g.txt", "--params", "p.json"]));
    assert_eq!(r["params"]["strategy"], "degree_peel");
    let r = report(&run(dir.path(), &["separator", "g.txt", "--params", "p.json", "--strategy", "bfs-layer"]));
    assert_eq!(r["params"]["algorithm"]["strategy"], "bfs_layer");
    assert_eq!(run(dir.path(), &["separator", "g.txt", "--params", "bad.json"]).status.code(), Some(4));
}

#[test]
fn timings_only_on_request() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.txt", "3 2\n0 1\n1 2\n");
    let plain = report(&run(dir.path(), &["color-or-clique", "g.txt"]));
    assert!(plain.get("timings_ms").is_none());
    let timed = report(&run(dir.path(), &["color-or-clique", "g.txt", "--timings"]));
    assert!(timed["timings_ms"]["color_or_clique"].is_number());
}

#[test]
fn bad_usage_exits_nonzero() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["extract"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    let out = run(dir.path(), &["gen", "--kind", "grid_paths", "--count", "0"]);
    assert_eq!(out.status.code(), Some(4));
}
