use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entireops")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn report(out: &Path, cmd: &str) -> Value {
    let text = std::fs::read_to_string(out.join(format!("{cmd}_report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn check_five_n_passes_and_sidecars_match() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("five_n.json");
    let out = run(&["check", "--config", cfg.to_str().unwrap(), "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let rep = report(dir.path(), "check");
    assert_eq!(rep["verdict"], "PASS_NUMERIC");
    assert_eq!(rep["exit_code"], 0);
    for c in rep["result"]["conditions"].as_array().unwrap() {
        assert_eq!(c["verdict"], "PASS_NUMERIC", "{c}");
    }
    let sidecars: Vec<&str> = rep["sidecars"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(sidecars.contains(&"check_per_n.csv") && sidecars.contains(&"check_matrices.csv"));

    let (header, rows) = read_csv(&dir.path().join("check_per_n.csv"));
    let per_n = rep["result"]["per_n"].as_array().unwrap();
    assert_eq!(rows.len(), per_n.len());
    for (row, obj) in rows.iter().zip(per_n) {
        for (col, cell) in header.iter().zip(row) {
            let v = &obj[col.as_str()];
            if v.is_null() {
                assert!(cell.is_empty(), "{col}");
            } else {
                let parsed: f64 = cell.parse().unwrap();
                assert_eq!(Some(parsed), v.as_f64(), "{col} = {cell}");
            }
        }
    }
}

#[test]
fn divergent_e_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("neg_divergent_e.json");
    let out = run(&["check", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let rep = report(dir.path(), "check");
    let e = rep["result"]["conditions"].as_array().unwrap().iter().find(|c| c["label"] == "(e)").unwrap();
    assert_eq!(e["verdict"], "FAIL");
    assert_eq!(e["witness"]["type"], "divergent_terms");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("check FAIL"), "{stdout}");
}

#[test]
fn factorial_scalar_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("neg_factorial.json");
    let out = run(&["check32", "--config", cfg.to_str().unwrap(), "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let rep = report(dir.path(), "check32");
    assert_eq!(rep["verdict"], "INCONCLUSIVE");
    assert_eq!(rep["result"]["power"]["ratio_stats"]["delta_unbounded"], true);
}

#[test]
fn zeros_of_z_exp9() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("z_exp9_log.json");
    let out = run(&["zeros", "--config", cfg.to_str().unwrap(), "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("zeros.csv"));
    assert_eq!(header, ["n", "radius", "count"]);
    let counts: Vec<(&str, &str)> = rows.iter().map(|r| (r[1].as_str(), r[2].as_str())).collect();
    assert_eq!(counts, [("0.5", "1"), ("2", "1")]);
}

#[test]
fn orbit_density_sidecar_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("translation.json");
    let out = run(&["orbit", "--config", cfg.to_str().unwrap(), "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(dir.path(), "orbit");
    let curve: Vec<f64> =
        rep["result"]["density"]["density_curve"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let (header, rows) = read_csv(&dir.path().join("density.csv"));
    assert_eq!(header, ["m", "d_m"]);
    let parsed: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(parsed, curve);
}

#[test]
fn overrides_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("dn.json");
    let out = run(&["check", "--config", cfg.to_str().unwrap(), "--nmax", "60", "--kmax", "5", "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(dir.path(), "check");
    assert_eq!(rep["config"]["n_max"], 60);
    assert_eq!(rep["config"]["k_max"], 5);
    assert_eq!(rep["result"]["n_max"], 60);
}

#[test]
fn repeated_runs_are_identical_apart_from_run_info() {
    let cfg = fixture("dn.json");
    let strip = |dir: &Path| {
        let mut v = report(dir, "check");
        v.as_object_mut().unwrap().remove("run_info");
        v
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(run(&["check", "--config", cfg.to_str().unwrap(), "--quiet"], d.path()).status.code(), Some(0));
    }
    assert_eq!(strip(a.path()), strip(b.path()));
    for name in ["check_per_n.csv", "check_matrices.csv"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn invalid_configs_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"annulus": {"r1": -1, "r2": 2, "r3": 2}, "nodes": 100}"#).unwrap();
    let out = run(&["check", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("annulus.r1") && err.contains("nodes = 100"), "{err}");

    std::fs::write(&bad, r#"{"n_max": 10, "bogus": true}"#).unwrap();
    let out = run(&["check", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = run(&["check", "--config", "/nonexistent/cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));

    // A valid file lacking what the command needs is a runtime error too.
    let out = run(&["bg", "--config", fixture("neg_factorial.json").to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn thread_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("translation.json");
    let status = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_entireops"))
            .args(["apply", "--config", cfg.to_str().unwrap(), "--quiet", "--out"])
            .arg(dir.path())
            .env("ENTIREOPS_THREADS", threads)
            .status()
            .unwrap()
            .code()
    };
    assert_eq!(status("2"), Some(0));
    assert_eq!(status("0"), Some(3));
    assert_eq!(status("many"), Some(3));
}

#[test]
fn unknown_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--config", fixture("dn.json").to_str().unwrap()], dir.path());
    assert!(!out.status.success());
}
