use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn ricciflat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ricciflat")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Exports an atlas graph into `dir` and returns the file path.
fn export(dir: &Path, name: &str, param: Option<&str>, format: &str, file: &str) -> PathBuf {
    let path = dir.join(file);
    let mut args = vec!["atlas", name];
    args.extend(param);
    args.extend(["--format", format, "--output", path.to_str().unwrap()]);
    let o = ricciflat(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn curvature_reports() {
    let dir = tempfile::tempdir().unwrap();
    let c4 = export(dir.path(), "cycle", Some("4"), "edgelist", "c4.txt");
    let o = ricciflat(&["curvature", p(&c4), "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["tool"], "ricciflat");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["input"]["sha256"].as_str().unwrap().len(), 64);
    assert!(v.get("timestamp").is_none());
    let edges = v["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 4);
    assert!(edges.iter().all(|e| e["kappa"] == "1"));

    let r2 = export(dir.path(), "r2", None, "edgelist", "r2.txt");
    let v = json(&ricciflat(&["curvature", p(&r2)]));
    assert_eq!(v["edges"].as_array().unwrap().len(), 18);
    assert!(v["edges"].as_array().unwrap().iter().all(|e| e["kappa"] == "0"));
    assert_eq!(v["is_ricci_flat"], true);
    assert!(v["timestamp"].is_string());

    let k2 = export(dir.path(), "complete", Some("2"), "graph6", "k2.g6");
    let v = json(&ricciflat(&["curvature", p(&k2)]));
    assert_eq!(v["input"]["format"], "graph6");
    assert_eq!(v["edges"][0]["kappa"], "2");
}

#[test]
fn curvature_edge_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = export(dir.path(), "cycle", Some("5"), "edgelist", "c5.txt");
    let o = ricciflat(&["curvature", p(&c5), "--edge", "0", "1", "--alpha", "0", "--alpha", "1/2", "--alpha", "1", "--decimal"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["edges"].as_array().unwrap().len(), 1);
    assert_eq!(v["edges"][0]["kappa"], "1/2");
    assert_eq!(v["edges"][0]["kappa_decimal"], 0.5);
    assert!(v.get("is_ricci_flat").is_none());
    let rows = v["profiles"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1]["alpha"], "1/2");
    assert_eq!(rows[2]["quotient"], Value::Null);

    assert_eq!(code(&ricciflat(&["curvature", p(&c5), "--edge", "0", "2"])), 3);
    assert_eq!(code(&ricciflat(&["curvature", p(&c5), "--edge", "0", "9"])), 3);
    assert_eq!(code(&ricciflat(&["curvature", p(&c5), "--alpha", "3/2"])), 3);
    assert_eq!(code(&ricciflat(&["curvature", p(&c5), "--format", "dot"])), 3);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 2\n0 1\n").unwrap();
    for cmd in ["curvature", "check-flat"] {
        assert_eq!(code(&ricciflat(&[cmd, p(&bad)])), 2);
        assert_eq!(code(&ricciflat(&[cmd, p(&dir.path().join("missing.txt"))])), 2);
    }
    assert_eq!(code(&ricciflat(&["classify", p(&bad), "--edge", "0", "1"])), 2);
    let g6 = dir.path().join("bad.g6");
    std::fs::write(&g6, "C").unwrap();
    assert_eq!(code(&ricciflat(&["check-flat", p(&g6)])), 2);
    // The extension can be overridden.
    let k4 = dir.path().join("k4.txt");
    std::fs::write(&k4, "C~\n").unwrap();
    assert_eq!(code(&ricciflat(&["check-flat", p(&k4)])), 2);
    assert_eq!(code(&ricciflat(&["check-flat", p(&k4), "--input-format", "graph6"])), 1);
}

#[test]
fn check_flat_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let petersen = export(dir.path(), "petersen", None, "graph6", "p.g6");
    assert_eq!(code(&ricciflat(&["check-flat", p(&petersen)])), 0);
    let necklace = export(dir.path(), "diamond-necklace", Some("5"), "edgelist", "n5.txt");
    assert_eq!(code(&ricciflat(&["check-flat", p(&necklace)])), 0);

    let c5 = export(dir.path(), "cycle", Some("5"), "edgelist", "c5.txt");
    let o = ricciflat(&["check-flat", p(&c5)]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["is_ricci_flat"], false);
    let bad = v["non_flat"].as_array().unwrap();
    assert_eq!(bad.len(), 5);
    assert!(bad.iter().all(|e| e["kappa"] == "1/2"));

    let isolated = dir.path().join("iso.txt");
    std::fs::write(&isolated, "3 1\n0 1\n").unwrap();
    assert_eq!(code(&ricciflat(&["check-flat", p(&isolated)])), 3);
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let r2 = export(dir.path(), "r2", None, "edgelist", "r2.txt");
    let r1 = export(dir.path(), "r1", None, "edgelist", "r1.txt");
    let pg = export(dir.path(), "petersen", None, "edgelist", "p.txt");
    let c6 = export(dir.path(), "cycle", Some("6"), "edgelist", "c6.txt");
    for (file, class) in [(&r2, "Deg34B"), (&r1, "Deg44"), (&pg, "Case2"), (&c6, "Case1")] {
        let o = ricciflat(&["classify", p(file), "--edge", "0", "1"]);
        assert_eq!(code(&o), 0);
        assert_eq!(json(&o)["class"], class);
        let o = ricciflat(&["classify", p(file), "--edge", "0", "1", "--format", "table"]);
        assert_eq!(stdout(&o).lines().next(), Some(class));
    }
    let v = json(&ricciflat(&["classify", p(&r2), "--edge", "0", "1"]));
    assert_eq!(v["four_cycles"], 1);
    assert!(!v["witnesses"].as_array().unwrap().is_empty());

    // K4 edges lie on triangles, which neither classifier covers.
    let k4 = export(dir.path(), "complete", Some("4"), "edgelist", "k4.txt");
    let o = ricciflat(&["classify", p(&k4), "--edge", "0", "1"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hypothesis"));
    // A (2,2) edge on a 5-cycle cannot be flat.
    let c5 = export(dir.path(), "cycle", Some("5"), "edgelist", "c5.txt");
    let o = ricciflat(&["classify", p(&c5), "--edge", "0", "1"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["class"], "Violation");
    assert_eq!(code(&ricciflat(&["classify", p(&c5)])), 3);
}

#[test]
fn atlas_exports() {
    let o = ricciflat(&["atlas", "r1", "--format", "dot"]);
    assert_eq!(code(&o), 0);
    let dot = stdout(&o);
    assert!(dot.starts_with("graph"));
    assert_eq!(dot.matches(" -- ").count(), 20);
    assert_eq!(stdout(&ricciflat(&["atlas", "petersen", "--format", "graph6"])).trim(), "IheA@GUAo");
    assert!(stdout(&ricciflat(&["atlas", "cycle", "4"])).starts_with("4 4\n"));
    let v = json(&ricciflat(&["atlas", "r2", "--format", "json", "--no-timestamp"]));
    assert_eq!(v["vertices"], 12);
    assert_eq!(v["edges"].as_array().unwrap().len(), 18);
    assert_eq!(v["expected_flat"], "flat");
    assert_eq!(code(&ricciflat(&["atlas", "cube"])), 3);
    assert_eq!(code(&ricciflat(&["atlas", "cycle"])), 3);
    assert_eq!(code(&ricciflat(&["atlas", "r1", "--format", "table"])), 3);
}

#[test]
fn verify_subcommands() {
    let o = ricciflat(&["verify", "tables"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!((v["passed"].as_u64(), v["total"].as_u64()), (Some(16), Some(16)));
    let o = ricciflat(&["verify", "atlas", "--format", "table"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("26/26 entries pass"));
    assert_eq!(code(&ricciflat(&["verify", "graphs"])), 3);
}

#[test]
fn search_subcommand() {
    let o = ricciflat(&["search", "--mode", "guided", "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let known: Vec<&str> = v["found"].as_array().unwrap().iter().map(|f| f["known"].as_str().unwrap()).collect();
    assert_eq!(known, ["r2", "r1"]);
    assert_eq!(v["matches_expected"], true);
    assert_eq!(v["cases"].as_array().unwrap().len(), 8);
    assert!(v.get("elapsed_ms").is_none());

    let v = json(&ricciflat(&["search", "--max-vertices", "11", "--jobs", "2"]));
    assert_eq!(v["found"].as_array().unwrap().len(), 0);
    assert_eq!(v["complete"], true);
    assert!(v["elapsed_ms"].is_u64());

    // Too small a guard leaves cases unfinished.
    assert_eq!(code(&ricciflat(&["search", "--mode", "guided", "--max-vertices", "16"])), 1);
    assert_eq!(code(&ricciflat(&["search", "--max-vertices", "15"])), 3);
    assert_eq!(code(&ricciflat(&["search", "--mode", "sideways"])), 3);
    assert_eq!(code(&ricciflat(&["search", "--mode", "guided", "--checkpoint", "x.json"])), 3);
}

#[test]
fn search_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let o = ricciflat(&["search", "--max-vertices", "10", "--checkpoint", p(&cp), "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    assert!(cp.exists());
    // A finished checkpoint replays to the same report.
    let again = ricciflat(&["search", "--max-vertices", "10", "--checkpoint", p(&cp), "--no-timestamp"]);
    assert_eq!(o.stdout, again.stdout);
    assert_eq!(code(&ricciflat(&["search", "--max-vertices", "9", "--checkpoint", p(&cp)])), 2);
    std::fs::write(&cp, "garbage").unwrap();
    assert_eq!(code(&ricciflat(&["search", "--max-vertices", "10", "--checkpoint", p(&cp)])), 2);
}

#[test]
fn reports_are_byte_identical_without_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    let pg = export(dir.path(), "petersen", None, "edgelist", "p.txt");
    for args in [
        vec!["curvature", p(&pg), "--no-timestamp"],
        vec!["check-flat", p(&pg), "--no-timestamp"],
        vec!["classify", p(&pg), "--edge", "0", "1", "--no-timestamp"],
        vec!["verify", "tables", "--no-timestamp"],
        vec!["search", "--max-vertices", "9", "--no-timestamp", "--jobs", "1"],
    ] {
        let a = ricciflat(&args);
        let b = ricciflat(&args);
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn help_and_version() {
    assert_eq!(code(&ricciflat(&["--help"])), 0);
    let o = ricciflat(&["--version"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(code(&ricciflat(&[])), 3);
}
