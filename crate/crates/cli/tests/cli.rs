use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cascade"))
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn run(cfg: &Path, threads: Option<usize>) -> Output {
    let mut c = bin();
    c.arg("run").arg(cfg);
    if let Some(t) = threads {
        c.arg("--threads").arg(t.to_string());
    }
    c.output().unwrap()
}

fn rows(csv: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(csv).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn outage_sweep(out: &str) -> Value {
    json!({
        "schema_version": 1,
        "scenario": "op",
        "model": {"kind": "irs", "n": [2, 5], "si": {"m": 2, "mean_power": 1}, "id": {"m": 1, "mean_power": 1}},
        "methods": ["exact", "upper", "gamma", "mc"],
        "rho_grid_db": [0, 2, 4, 5, 6, 8, 20, 22, 23, 24, 25, 26, 28],
        "gamma_th_db": 5,
        "mc": {"master_seed": 99, "trials": 20000},
        "output": {"csv": out, "plot_script": "plot.py"}
    })
}

/// ρ (dB) where the log-interpolated curve crosses `level`.
fn crossing(points: &[(f64, f64)], level: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((r0, v0), (r1, v1)) = (w[0], w[1]);
        (v0 >= level && v1 <= level).then(|| {
            let t = (level.log10() - v0.log10()) / (v1.log10() - v0.log10());
            r0 + t * (r1 - r0)
        })
    })
}

#[test]
fn outage_sweep_hits_anchor_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "outage_sweep.json", &outage_sweep("outage_sweep.csv"));
    let o = run(&cfg, None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = dir.path().join("outage_sweep.csv");
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "rho_db,gamma_th_db,n,m,method,value,std_error,flags");
    let all = rows(&csv);
    for (n, want) in [("2", 24.0), ("5", 5.0)] {
        let pts: Vec<(f64, f64)> = all
            .iter()
            .filter(|r| r[2] == n && r[4] == "exact")
            .map(|r| (r[0].parse().unwrap(), r[5].parse().unwrap()))
            .collect();
        let x = crossing(&pts, 1e-4).unwrap();
        assert!((x - want).abs() <= 1.0, "N={n}: crossing at {x} dB");
    }
    assert!(all.iter().all(|r| r[7].split(';').next() == Some("ok")));
    assert!(all.iter().any(|r| r[4] == "upper_ratio" && r[7].contains("crossover")));
    let script = fs::read_to_string(dir.path().join("plot.py")).unwrap();
    assert!(script.contains("\"outage_sweep.csv\""));
    assert!(script.contains("set_yscale(\"log\")"));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = outage_sweep("a.csv");
    cfg["rho_grid_db"] = json!([0, 10, 20]);
    cfg["mc"]["trials"] = json!(200_000);
    let a = write_config(dir.path(), "a.json", &cfg);
    cfg["output"]["csv"] = json!("b.csv");
    let b = write_config(dir.path(), "b.json", &cfg);
    cfg["output"]["csv"] = json!("c.csv");
    let c = write_config(dir.path(), "c.json", &cfg);
    assert!(run(&a, Some(1)).status.success());
    assert!(run(&b, Some(3)).status.success());
    assert!(run(&c, None).status.success());
    let ra = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(ra, fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(ra, fs::read(dir.path().join("c.csv")).unwrap());
}

#[test]
fn empty_grid_is_a_schema_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = outage_sweep("x.csv");
    cfg["rho_grid_db"] = json!([]);
    let p = write_config(dir.path(), "bad.json", &cfg);
    let o = run(&p, None);
    assert_eq!(o.status.code(), Some(2));
    let rec: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(rec["kind"], "schema");
    assert!(rec["message"].as_str().unwrap().contains("rho_grid_db"));
    assert!(!dir.path().join("x.csv").exists());
    assert!(!dir.path().join("plot.py").exists());
    let v = bin().arg("validate").arg(&p).output().unwrap();
    assert_eq!(v.status.code(), Some(2));
}

#[test]
fn schema_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("/methods", json!([])),
        ("/rho_grid_db", json!([5, 3])),
        ("/schema_version", json!(9)),
        ("/model/si", json!({"m": 1, "omega": 1, "mean_power": 1})),
        ("/model/id", json!({"m": 3, "omega": 1})),
        ("/unknown_field", json!(1)),
    ];
    for (ptr, val) in cases {
        let mut cfg = outage_sweep("x.csv");
        if ptr == "/unknown_field" {
            cfg["unknown_field"] = val;
        } else {
            *cfg.pointer_mut(ptr).unwrap() = val;
        }
        let p = write_config(dir.path(), "c.json", &cfg);
        let o = bin().arg("validate").arg(&p).output().unwrap();
        assert_eq!(o.status.code(), Some(2), "{ptr}");
    }
    let good = write_config(dir.path(), "g.json", &outage_sweep("x.csv"));
    let o = bin().arg("validate").arg(&good).output().unwrap();
    assert!(o.status.success());
    let missing = bin().arg("run").arg(dir.path().join("nope.json")).output().unwrap();
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn evaluator_errors_are_flagged_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "schema_version": 1,
        "scenario": "op",
        "model": {"kind": "irs", "n": 60, "si": {"m": 2.5, "omega": 1}, "id": {"m": 1, "omega": 1}},
        "methods": ["upper", "series"],
        "rho_grid_db": [10, 20],
        "gamma_th_db": 5,
        "series": {"order_i": 8},
        "output": {"csv": "e.csv"}
    });
    let p = write_config(dir.path(), "e.json", &cfg);
    let o = run(&p, None);
    assert_eq!(o.status.code(), Some(3));
    let rec: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(rec["kind"], "evaluator");
    assert_eq!(rec["errors"].as_array().unwrap().len(), 2);
    assert_eq!(rec["errors"][0]["method"], "series");
    let r = rows(&dir.path().join("e.csv"));
    assert!(r.iter().filter(|x| x[4] == "series").all(|x| x[7] == "error" && x[5].is_empty()));
    assert!(r.iter().filter(|x| x[4] == "upper").all(|x| x[7].starts_with("ok")));
}

#[test]
fn direct_link_series_is_flagged_unavailable() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = outage_sweep("d.csv");
    cfg["model"]["direct"] = json!({"m": 1, "mean_power": 1});
    cfg["methods"] = json!(["series", "upper"]);
    let p = write_config(dir.path(), "d.json", &cfg);
    assert!(run(&p, None).status.success());
    let r = rows(&dir.path().join("d.csv"));
    assert!(r.iter().filter(|x| x[4] == "series").all(|x| x[7] == "unavailable"));
}

#[test]
fn pdf_scenario_mass_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "schema_version": 1,
        "scenario": "pdf",
        "model": {"kind": "irs", "n": 2, "si": {"m": 2, "mean_power": 1}, "id": {"m": 1, "mean_power": 1}},
        "methods": ["exact", "series", "upper", "clt", "gamma", "mc"],
        "h_grid": {"start": 0.025, "stop": 6.0, "points": 240},
        "mc": {"master_seed": 1, "trials": 200000},
        "output": {"csv": "pdf.csv", "plot_script": "pdf.py"}
    });
    let p = write_config(dir.path(), "pdf.json", &cfg);
    assert!(run(&p, None).status.success());
    let r = rows(&dir.path().join("pdf.csv"));
    for m in ["exact", "clt", "gamma", "mc"] {
        let mass: f64 = r
            .iter()
            .find(|x| x[4] == m && x[7].contains("mass"))
            .map(|x| x[5].parse().unwrap())
            .unwrap();
        assert!((mass - 1.0).abs() < 1e-2, "{m}: {mass}");
    }
    for m in ["series", "upper"] {
        assert!(r.iter().any(|x| x[4] == m && x[7].contains("mass")));
    }
    let script = fs::read_to_string(dir.path().join("pdf.py")).unwrap();
    assert!(script.contains("if False:\n    ax.set_yscale(\"log\")"));
}

#[test]
fn plot_reports_missing_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    fs::write(&csv, "rho_db,gamma_th_db,n,m,method,value,std_error\n1,,2,1,exact,0.1,\n").unwrap();
    let o = bin()
        .args(["plot", csv.to_str().unwrap(), "--scenario", "op", "-o"])
        .arg(dir.path().join("p.py"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let rec: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(rec["message"].as_str().unwrap().contains("`flags`"));
    assert!(!dir.path().join("p.py").exists());
}

#[test]
fn plot_emits_script_for_valid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    fs::write(&csv, "rho_db,gamma_th_db,n,m,method,value,std_error,flags\n1,,2,1,exact,1e-1,,ok\n").unwrap();
    let out = dir.path().join("p.py");
    let o = bin().args(["plot", csv.to_str().unwrap(), "--scenario", "aser", "-o"]).arg(&out).output().unwrap();
    assert!(o.status.success());
    assert!(fs::read_to_string(out).unwrap().contains("average symbol error rate"));
}

#[test]
fn query_outputs_json() {
    let o = bin()
        .args(["query", "op", "--n", "2", "--si", "2:2", "--id", "1:1", "--rho-db", "24", "--gamma-th-db", "5"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let x = v["value"].as_f64().unwrap();
    assert!((x / 1.006e-4 - 1.0).abs() < 1e-3, "{x}");
    let d = bin().args(["query", "diversity", "--n", "3", "--si", "2:2", "--id", "1:1", "--sd", "1:1"]).output().unwrap();
    let v: Value = serde_json::from_slice(&d.stdout).unwrap();
    assert_eq!(v["value"], 4.0);
    let a = bin()
        .args(["query", "aser", "--n", "1", "--si", "2:2", "--id", "1:1", "--rho-db", "30", "--modulation", "bpsk", "--method", "upper"])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() / 5e-4 - 1.0).abs() < 1e-9);
}
