use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use partial_copula::frank_tau_to_theta;
use serde_json::Value;

fn pcopula(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcopula"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_passes_with_default_rule() {
    let out = pcopula(&["verify"]);
    let text = stdout(&out);
    assert_eq!(code(&out), 0, "{text}");
    assert!(text.contains("kendall expected-conditional PolyCE: 0.1396296 vs 377/2700 PASS"), "{text}");
    assert!(text.contains("partial-Frank associativity gap at (0.25,0.5,0.5): > 1e-6 PASS"), "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_fails_with_coarse_rule() {
    let out = pcopula(&["verify", "--order", "4"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn verify_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let out = pcopula(&["verify", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&path);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["all_pass"], true);
    assert!(doc["checks"].as_array().unwrap().len() > 20);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["measure", "--family", "bogus"],
        vec!["measure", "--family", "frank3", "--theta", "abc"],
        vec!["measure", "--family", "fgm3", "--theta", "3"],
        vec!["measure", "--family", "frank3"],
        vec!["measure", "--family", "frank2", "--theta", "1"],
        vec!["grid", "--family", "frank3", "--theta", "2", "--resolution", "8"],
        vec!["sample", "--family", "fgm3", "--theta", "0.5", "--n", "0"],
        vec!["estimate", "--reps", "0"],
        vec!["estimate", "--n", "999"],
        vec!["frobnicate"],
    ] {
        let out = pcopula(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?} computed before failing");
    }
}

#[test]
fn unwritable_output_exits_2() {
    let out = pcopula(&["sample", "--family", "fgm3", "--theta", "0", "--n", "3", "--out", "/nonexistent/dir/s.csv"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sample_header_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = pcopula(&["sample", "--family", "frank3", "--theta", "4", "--n", "5", "--seed", "42", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("u1,u2,u3,v1,v3\n"));
    assert_eq!(text.lines().count(), 6);
    assert!(!text.contains('\r'));
}

#[test]
fn independence_cpit_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    assert_eq!(code(&pcopula(&["sample", "--family", "fgm3", "--theta", "0", "--n", "200", "--out", p.to_str().unwrap()])), 0);
    let (_, rows) = read_csv(&p);
    for r in rows {
        assert_eq!(r[0], r[3]);
        assert_eq!(r[2], r[4]);
    }
}

#[test]
fn sample_json_has_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    assert_eq!(code(&pcopula(&["sample", "--family", "polyce", "--n", "50", "--format", "json", "--out", p.to_str().unwrap()])), 0);
    let text = fs::read_to_string(&p).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["generator"], "chacha20");
    assert_eq!(doc["columns"]["u1"].as_array().unwrap().len(), 50);
    // most uniforms need all 17 digits
    let long = text
        .lines()
        .filter(|l| {
            let t = l.trim().trim_end_matches(',');
            t.starts_with("0.") && t.len() >= 19
        })
        .count();
    assert!(long > 100, "{long}");
}

fn grid_sections(path: &Path) -> Vec<(String, Option<f64>, Option<f64>, Option<f64>, f64)> {
    let (header, rows) = read_csv(path);
    assert_eq!(header, ["section", "z", "x1", "x2", "value"]);
    let opt = |s: &str| (!s.is_empty()).then(|| s.parse::<f64>().unwrap());
    rows.iter()
        .map(|r| (r[0].clone(), opt(&r[1]), opt(&r[2]), opt(&r[3]), r[4].parse().unwrap()))
        .collect()
}

#[test]
fn frank_grid_is_a_density() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.csv");
    let theta = frank_tau_to_theta(0.4).unwrap().to_string();
    let res = 61;
    let out = pcopula(&["grid", "--family", "frank3", "--theta", &theta, "--z", "0.5", "--resolution", &res.to_string(), "--out", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rows = grid_sections(&p);
    for section in ["conditional", "partial"] {
        let values: Vec<f64> = rows.iter().filter(|r| r.0 == section).map(|r| r.4).collect();
        assert_eq!(values.len(), res * res);
        assert!(values.iter().all(|&v| v > 0.0));
        // trapezoid rule over [−3, 3]²
        let h = 6.0 / (res - 1) as f64;
        let w = |i: usize| if i == 0 || i == res - 1 { 0.5 } else { 1.0 };
        let mass: f64 = (0..res)
            .flat_map(|i| (0..res).map(move |j| (i, j)))
            .map(|(i, j)| w(i) * w(j) * values[i * res + j])
            .sum::<f64>()
            * h
            * h;
        assert!((mass - 1.0).abs() < 0.02, "{section}: {mass}");
    }
}

#[test]
fn polyce_kendall_curve_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.csv");
    assert_eq!(code(&pcopula(&["grid", "--family", "polyce", "--resolution", "16", "--out", p.to_str().unwrap()])), 0);
    let curve: Vec<(f64, f64)> = grid_sections(&p)
        .into_iter()
        .filter(|r| r.0 == "kendall")
        .map(|r| (r.1.unwrap(), r.4))
        .collect();
    assert_eq!(curve.len(), 16);
    assert_eq!(curve[0], (0.0, 0.0));
    let (z, tau) = curve[15];
    assert_eq!(z, 1.0);
    assert!((tau - (1.0 / 450.0 + 5.0 / 18.0)).abs() < 1e-9);
}

#[test]
fn fgm_partial_grid_is_standard_normal() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.json");
    assert_eq!(code(&pcopula(&["grid", "--family", "fgm3", "--theta", "1", "--resolution", "16", "--format", "json", "--out", p.to_str().unwrap()])), 0);
    let doc = read_json(&p);
    let x: Vec<f64> = doc["x"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let density = doc["partial"]["density"].as_array().unwrap();
    for (i, row) in density.iter().enumerate() {
        for (j, d) in row.as_array().unwrap().iter().enumerate() {
            let want = (-(x[i] * x[i] + x[j] * x[j]) / 2.0).exp() / (2.0 * std::f64::consts::PI);
            assert!((d.as_f64().unwrap() - want).abs() < 1e-15, "{i},{j}");
        }
    }
}

fn measure_json(args: &[&str]) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.json");
    let mut all = vec!["measure"];
    all.extend_from_slice(args);
    all.extend(["--format", "json", "--out", p.to_str().unwrap()]);
    let out = pcopula(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    read_json(&p)
}

fn measure_entry<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["measures"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["measure"] == name)
        .unwrap()
}

#[test]
fn measure_polyce_kendall_gap() {
    let doc = measure_json(&["--family", "polyce"]);
    let k = measure_entry(&doc, "kendall");
    let gap = k["gap"].as_f64().unwrap();
    assert!((gap - (377.0 / 2700.0 - 251.0 / 1800.0)).abs() < 1e-9, "{gap}");
    assert!(measure_entry(&doc, "spearman")["gap"].as_f64().unwrap() < 1e-12);
}

#[test]
fn measure_fgm_partial_is_independence() {
    let doc = measure_json(&["--family", "fgm3", "--theta", "1"]);
    for m in ["spearman", "kendall", "tail_lower", "tail_upper"] {
        assert!(measure_entry(&doc, m)["partial"].as_f64().unwrap().abs() < 1e-9, "{m}");
    }
}

#[test]
fn measure_clayton_gaps_vanish() {
    let doc = measure_json(&["--family", "clayton3", "--theta", "2"]);
    for m in ["spearman", "kendall", "tail_lower", "tail_upper"] {
        assert!(measure_entry(&doc, m)["gap"].as_f64().unwrap() < 1e-6, "{m}");
    }
}

#[test]
fn partial_grid_matches_product_for_fgm() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.csv");
    assert_eq!(code(&pcopula(&["partial", "--family", "fgm3", "--theta", "1", "--resolution", "11", "--quadrature", "--out", p.to_str().unwrap()])), 0);
    let (header, rows) = read_csv(&p);
    assert_eq!(header, ["u1", "u2", "cdf", "pdf"]);
    assert_eq!(rows.len(), 121);
    for r in rows {
        let (u, v, c): (f64, f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!((c - u * v).abs() < 1e-9);
    }
}

/// Mean and standard error, recomputed from the emitted rows.
fn recompute(rows: &[Vec<String>], header: &[String], k: usize) -> (f64, f64) {
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (s, j) = (col(&format!("theta{k}_stepwise")), col(&format!("theta{k}_joint")));
    let diffs: Vec<f64> = rows
        .iter()
        .map(|r| r[j].parse::<f64>().unwrap() - r[s].parse::<f64>().unwrap())
        .collect();
    let r = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / r;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

#[test]
fn estimate_csv_round_trips_to_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.csv");
    let out = pcopula(&["estimate", "--scenario", "simplified", "--n", "1000", "--reps", "4", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let printed = stdout(&out);
    let (header, rows) = read_csv(&p);
    assert_eq!(rows.len(), 4);
    for k in 1..=3 {
        let (mean, se) = recompute(&rows, &header, k);
        let line = format!("theta{k}: mean(joint − stepwise) = {mean:.6e}, se = {se:.6e}");
        assert!(printed.contains(&line), "missing {line:?} in\n{printed}");
    }
}

#[test]
fn estimate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = pcopula(&["estimate", "--scenario", "nonsimplified", "--n", "1000", "--reps", "2", "--format", "json", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let doc = read_json(&a);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["scenarios"][0]["replicates"].as_array().unwrap().len(), 2);
}

#[test]
fn estimate_single_replication_reports_unavailable_errors() {
    let out = pcopula(&["estimate", "--scenario", "simplified", "--n", "1000", "--reps", "1", "--out", "/dev/null"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("se = unavailable"));
}

#[test]
fn estimate_separates_only_the_nonsimplified_design() {
    let out = pcopula(&["estimate", "--n", "20000", "--reps", "20", "--out", "/dev/null"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let (simplified, nonsimplified) = text.split_once("nonsimplified:").unwrap();
    assert!(simplified.contains("no margin coordinate"), "{text}");
    assert!(nonsimplified.contains("consistent with γ ≠ θ"), "{text}");
    let flagged_margins = nonsimplified
        .lines()
        .filter(|l| (l.contains("theta1") || l.contains("theta2")) && l.ends_with("flagged"))
        .count();
    assert!(flagged_margins >= 1, "{text}");
}
