use std::path::Path;
use std::process::{Command, Output};

fn qprenorm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qprenorm"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .env_remove("RENORM_QP_JOBS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn with_fixed_point() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let o = qprenorm(dir.path(), &["fixed-point"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    dir
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn manifest(dir: &Path, command: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(format!("{command}.manifest.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn default_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = qprenorm(dir.path(), &["--print-default-config"]);
    assert_eq!(code(&o), 0);
    let path = dir.path().join("config.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let o = qprenorm(dir.path(), &["--config", path.to_str().unwrap(), "fixed-point"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn fixed_point_reports_the_scale() {
    let dir = with_fixed_point();
    let art: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fixed_point.json")).unwrap()).unwrap();
    let a = art["a"].as_f64().unwrap();
    assert!(a > -1.0 && a < 0.0);
    assert!(art["residual"].as_f64().unwrap() <= 1e-10);
    let m = manifest(dir.path(), "fixed-point");
    assert_eq!(m["outputs"], serde_json::json!(["fixed_point.json"]));
    assert_eq!(m["command"], "fixed-point");
}

#[test]
fn tight_newton_tolerance_at_higher_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"tol_newton": 1e-14, "n_x": 60, "m_nodes": 256}"#).unwrap();
    let o = qprenorm(dir.path(), &["--config", cfg.to_str().unwrap(), "fixed-point"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let art: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fixed_point.json")).unwrap()).unwrap();
    assert!(art["residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn malformed_and_unknown_config_fields_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, "{\n  \"n_x\": 40,\n").unwrap();
    let o = qprenorm(dir.path(), &["--config", cfg.to_str().unwrap(), "fixed-point"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    std::fs::write(&cfg, r#"{"nx": 40}"#).unwrap();
    assert_eq!(code(&qprenorm(dir.path(), &["--config", cfg.to_str().unwrap(), "fixed-point"])), 4);
    std::fs::write(&cfg, r#"{"delta": 2.0}"#).unwrap();
    assert_eq!(code(&qprenorm(dir.path(), &["--config", cfg.to_str().unwrap(), "fixed-point"])), 4);
}

#[test]
fn solver_failures_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"n_x": 6, "m_nodes": 64}"#).unwrap();
    assert_eq!(code(&qprenorm(dir.path(), &["--config", cfg.to_str().unwrap(), "fixed-point"])), 2);
    std::fs::write(&cfg, r#"{"delta": 0.9, "disc": {"center": 0.0, "radius": 2.5}}"#).unwrap();
    assert_eq!(code(&qprenorm(dir.path(), &["--config", cfg.to_str().unwrap(), "fixed-point"])), 3);
}

#[test]
fn missing_fixed_point_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["spectrum"][..], &["slopes", "--n-max", "1"], &["verify", "--n-max", "1"]] {
        let o = qprenorm(dir.path(), args);
        assert_eq!(code(&o), 5, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn artifact_from_another_truncation_is_rejected() {
    let dir = with_fixed_point();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"n_x": 30}"#).unwrap();
    let o = qprenorm(dir.path(), &["--config", cfg.to_str().unwrap(), "spectrum"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn one_dimensional_spectrum_starts_with_feigenbaum_delta() {
    let dir = with_fixed_point();
    let o = qprenorm(dir.path(), &["spectrum", "--one-dim", "--top", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (h, rows) = read_csv(&dir.path().join("dr_spectrum.csv"));
    assert_eq!(rows.len(), 5);
    let re: f64 = rows[0][column(&h, "re")].parse().unwrap();
    assert!((re - 4.66920).abs() < 1e-3);
}

#[test]
fn spectrum_sweep_rows_and_conjugate_structure() {
    let dir = with_fixed_point();
    let top = 4;
    let o = qprenorm(dir.path(), &["spectrum", "--omega-grid", "512", "--top", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (h, rows) = read_csv(&dir.path().join("spectrum_sweep.csv"));
    assert_eq!(rows.len(), 512 * top);
    let (ire, iim, idef) = (column(&h, "re"), column(&h, "im"), column(&h, "pair_defect"));
    let val = |r: &Vec<String>, i: usize| r[i].parse::<f64>().unwrap();
    assert!(rows.iter().all(|r| val(r, idef) < 1e-8));
    // the spectrum at 1 - w is the conjugate of the spectrum at w
    for j in 1..256 {
        for l in 0..top {
            let a = &rows[j * top + l];
            let nearest = rows[(512 - j) * top..(513 - j) * top]
                .iter()
                .map(|b| ((val(a, ire) - val(b, ire)).powi(2) + (val(a, iim) + val(b, iim)).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8, "omega index {j}");
        }
    }
    let m = manifest(dir.path(), "spectrum");
    assert_eq!(m["outputs"], serde_json::json!(["spectrum_sweep.csv"]));
}

#[test]
fn zero_top_is_a_config_error() {
    let dir = with_fixed_point();
    assert_eq!(code(&qprenorm(dir.path(), &["spectrum", "--top", "0"])), 4);
}

#[test]
fn outputs_are_deterministic() {
    let dir = with_fixed_point();
    let mut first = Vec::new();
    for _ in 0..2 {
        assert_eq!(code(&qprenorm(dir.path(), &["spectrum", "--omega-grid", "16"])), 0);
        assert_eq!(code(&qprenorm(dir.path(), &["slopes", "--n-max", "2"])), 0);
        let args = ["scan", "--alpha-steps", "4", "--eps-steps", "2", "--eps-max", "0.01"];
        assert_eq!(code(&qprenorm(dir.path(), &args)), 0);
        let files: Vec<Vec<u8>> = ["spectrum_sweep.csv", "slopes.csv", "scan.csv"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect();
        if first.is_empty() {
            first = files;
        } else {
            assert_eq!(first, files);
        }
    }
    let jobs = Command::new(env!("CARGO_BIN_EXE_qprenorm"))
        .args(["--out", dir.path().to_str().unwrap(), "slopes", "--n-max", "2"])
        .env("RENORM_QP_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&jobs), 0);
    assert_eq!(std::fs::read(dir.path().join("slopes.csv")).unwrap(), first[1]);
}

#[test]
fn invalid_job_counts_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qprenorm"))
        .args(["--out", dir.path().to_str().unwrap(), "superstable", "--n-max", "2"])
        .env("RENORM_QP_JOBS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
    assert_eq!(code(&qprenorm(dir.path(), &["--jobs", "0", "superstable"])), 4);
}

#[test]
fn superstable_table() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&qprenorm(dir.path(), &["--jobs", "2", "superstable", "--n-max", "7"])), 0);
    let (h, rows) = read_csv(&dir.path().join("superstable.csv"));
    assert_eq!(rows.len(), 8);
    let a1: f64 = rows[1][column(&h, "alpha")].parse().unwrap();
    assert!((a1 - (1.0 + 5f64.sqrt())).abs() < 1e-12);
    let ratio: f64 = rows[6][column(&h, "ratio")].parse().unwrap();
    assert!((ratio - 4.669_201_609).abs() / 4.669_201_609 < 1e-2);
    assert!(rows[0][column(&h, "ratio")].is_empty() && rows[7][column(&h, "ratio")].is_empty());
}

#[test]
fn slopes_and_unforced_slopes() {
    let dir = with_fixed_point();
    assert_eq!(code(&qprenorm(dir.path(), &["slopes", "--n-max", "3"])), 0);
    let (h, rows) = read_csv(&dir.path().join("slopes.csv"));
    assert_eq!(rows.len(), 3);
    let plus: f64 = rows[0][column(&h, "slope_plus")].parse().unwrap();
    assert!((plus - -5.832_914_922_875).abs() < 1e-8);
    assert_eq!(code(&qprenorm(dir.path(), &["slopes", "--n-max", "1", "--unforced"])), 0);
    let (h, rows) = read_csv(&dir.path().join("slopes.csv"));
    assert_eq!(rows.len(), 1);
    for name in ["slope_plus", "slope_minus"] {
        assert_eq!(rows[0][column(&h, name)].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn verify_compares_both_methods() {
    let dir = with_fixed_point();
    let o = qprenorm(dir.path(), &["verify", "--n-max", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (h, rows) = read_csv(&dir.path().join("verify.csv"));
    assert_eq!(rows.len(), 3);
    for r in &rows {
        for name in ["rel_err_plus", "rel_err_minus"] {
            assert!(r[column(&h, name)].parse::<f64>().unwrap() <= 0.05);
        }
    }
    let m = manifest(dir.path(), "verify");
    let outputs: Vec<String> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().into()).collect();
    for n in 1..=3 {
        for b in ["plus", "minus"] {
            let name = format!("boundary_n{n}_{b}.csv");
            assert!(outputs.contains(&name));
            let (h, rows) = read_csv(&dir.path().join(&name));
            assert_eq!(h, ["eps", "alpha", "indicator_min", "indicator_max", "lyapunov"]);
            assert_eq!(rows.len(), 4);
        }
    }
    assert!(outputs.contains(&"verify.csv".to_string()));
    for f in &outputs {
        assert!(dir.path().join(f).exists());
    }
}

#[test]
fn failed_verification_exit_code() {
    let dir = with_fixed_point();
    let o = qprenorm(dir.path(), &["verify", "--n-max", "1", "--tol", "1e-14"]);
    assert_eq!(code(&o), 6, "{}", stderr(&o));
}

#[test]
fn additive_family_file() {
    let dir = with_fixed_point();
    let fam = dir.path().join("family.json");
    std::fs::write(&fam, r#"{"forcing": "additive"}"#).unwrap();
    let o = qprenorm(dir.path(), &["verify", "--n-max", "1", "--family", fam.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    std::fs::write(&fam, r#"{"forcing": "sideways"}"#).unwrap();
    assert_eq!(code(&qprenorm(dir.path(), &["slopes", "--family", fam.to_str().unwrap()])), 4);
}

#[test]
fn scan_classifies_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "scan", "--alpha-min", "3.1", "--alpha-max", "3.4", "--alpha-steps", "4", "--eps-min", "0.0",
        "--eps-max", "0.02", "--eps-steps", "2",
    ];
    assert_eq!(code(&qprenorm(dir.path(), &args)), 0);
    let (h, rows) = read_csv(&dir.path().join("scan.csv"));
    assert_eq!(rows.len(), 8);
    let cls = column(&h, "classification");
    // unforced maps with a period-2 attractor are reducible
    assert!(rows[..4].iter().all(|r| r[cls] == "reducible"));
    assert!(rows[4..].iter().any(|r| r[cls] == "nonreducible"));
    assert_eq!(code(&qprenorm(dir.path(), &["scan", "--alpha-steps", "0"])), 4);
}
