use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nh-diode"));
    c.env_remove("NH_DIODE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn header(csv: &str) -> Vec<String> {
    csv.lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .map(String::from)
        .collect()
}

fn summary(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).expect("summary json on stderr")
}

#[test]
fn diode_row_in_amplitude_table() {
    let o = run(&[
        "amplitudes",
        "--gamma",
        "2pi/3",
        "--phi",
        "pi/3",
        "--k-min",
        "0.01",
        "--k-max",
        "2pi/3",
        "--k-steps",
        "1000",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let cols = header(&text);
    let rows = data_rows(&text);
    let last = rows.last().unwrap();
    let col = |n: &str| cols.iter().position(|c| c == n).unwrap();
    assert!((last[col("abs_tR")] - 1.0).abs() < 1e-6);
    assert!(last[col("abs_tL")] < 1e-6 && last[col("abs_rL")] < 1e-6);
}

#[test]
fn hermitian_grid_conserves_probability() {
    let o = run(&["amplitudes", "--gamma", "0", "--phi", "0"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let cols = header(&text);
    let col = |n: &str| cols.iter().position(|c| c == n).unwrap();
    for r in data_rows(&text) {
        let l = r[col("abs_tL")].powi(2) + r[col("abs_rL")].powi(2);
        let rr = r[col("abs_tR")].powi(2) + r[col("abs_rR")].powi(2);
        assert!((l - 1.0).abs() < 1e-10 && (rr - 1.0).abs() < 1e-10);
    }
}

#[test]
fn solver_check_summary() {
    let o = run(&["amplitudes", "--k-steps", "100", "--check"]);
    assert!(o.status.success());
    assert!(summary(&o)["max_solver_deviation"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn singular_momentum_exit_code() {
    let args = [
        "amplitudes",
        "--gamma",
        "-pi/3",
        "--phi",
        "2pi/3",
        "--k-min",
        "pi/3",
        "--k-max",
        "pi/3",
        "--k-steps",
        "1",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(4));
    let mut allowed = args.to_vec();
    allowed.push("--allow-singular");
    let o = run(&allowed);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().last().unwrap().ends_with(",1"));
    assert_eq!(summary(&o)["singular_k"].as_array().unwrap().len(), 1);
}

#[test]
fn fig3_divergences() {
    let pi = std::f64::consts::PI;
    let locs = |args: &[&str]| -> Vec<f64> {
        let o = run(args);
        assert!(o.status.success());
        summary(&o)["divergences"]
            .as_array()
            .unwrap()
            .iter()
            .map(|d| d["phi"].as_f64().unwrap())
            .collect()
    };
    let d = locs(&["fig3"]);
    assert_eq!(d.len(), 2);
    assert!((d[0] - 5.0 * pi / 6.0).abs() < 1e-8 && (d[1] - 7.0 * pi / 6.0).abs() < 1e-8);
    let d = locs(&["fig3", "--gamma", "pi/3", "--k", "pi/3"]);
    assert!((d[0] - 2.0 * pi / 3.0).abs() < 1e-8 && (d[1] - 4.0 * pi / 3.0).abs() < 1e-8);
    assert!(locs(&["fig3", "--gamma", "0"]).is_empty());
    // a node exactly on a pole
    assert_eq!(run(&["fig3", "--phi-steps", "12"]).status.code(), Some(4));
}

#[test]
fn scan_exit_codes() {
    let o = run(&["singularity-scan"]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&o);
    assert_eq!(s["hits"], 1);
    assert!((s["details"][0]["gamma"].as_f64().unwrap() - (2.0 - 2f64.sqrt()).acos()).abs() < 1e-8);
    assert!(s["details"][0]["sinkc_residual"].as_f64().unwrap() <= 1e-8);
    let o = run(&["singularity-scan", "--gamma-min", "2.0", "--gamma-max", "3.0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(&o)["hits"], 0);
    let o = run(&["singularity-scan", "--diode-check", "--gamma", "0.5235988"]);
    assert!(o.status.success());
    let s = summary(&o);
    assert!((s["m22_abs"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(s["deviation_from_diag"].as_f64().unwrap() < 1e-10);
}

#[test]
fn audit_variants() {
    let o = run(&["audit"]);
    assert_eq!(o.status.code(), Some(0));
    let w = &summary(&o)["worst"];
    assert!(w["rt1"]["residual"].as_f64().unwrap() <= 1e-9);
    assert!(w["rt2"]["residual"].as_f64().unwrap() <= 1e-9);
    let o = run(&["audit", "--center", "pt-dimer"]);
    assert!(summary(&o)["worst"]["pt_modulus"]["residual"].as_f64().unwrap() <= 1e-10);
    let o = run(&["audit", "--center", "triangle", "--gamma", "0", "--phi", "0.9"]);
    let w = &summary(&o)["worst"];
    assert_eq!(w["herm_symmetry"]["applicable"], true);
    assert!(w["herm_symmetry"]["residual"].as_f64().unwrap() <= 1e-10);
    // an absurd threshold turns round-off into a breach
    let o = run(&["audit", "--centers", "5", "--threshold", "1e-30"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evolve_outputs_and_boundary_contact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let sum = dir.path().join("sum.json");
    let o = run(&[
        "evolve",
        "-o",
        out.to_str().unwrap(),
        "--summary",
        sum.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for side in ["left", "right"] {
        let text = std::fs::read_to_string(dir.path().join(format!("traj_{side}.csv"))).unwrap();
        assert_eq!(
            header(&text),
            ["time", "norm_left", "norm_center", "norm_right", "norm_total"]
        );
        assert!(data_rows(&text).len() > 50);
    }
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&sum).unwrap()).unwrap();
    assert!(s["runs"][0]["transmitted"].as_f64().unwrap() < 0.02);
    assert!(s["runs"][1]["transmitted"].as_f64().unwrap() > 0.90);

    let o = run(&["evolve", "--cut", "right", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(summary(&o)["absorber"]["reflected"].as_f64().unwrap() < 0.03);

    let o = run(&["evolve", "--gamma", "0", "--phi", "0", "-o", out.to_str().unwrap()]);
    let s = summary(&o);
    let a = s["runs"][0]["transmitted"].as_f64().unwrap();
    let b = s["runs"][1]["transmitted"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-3);

    let o = run(&["evolve", "--duration", "400", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"gamma": "pi/2", "phi": "pi/2", "k_steps": 7, "format": "json"}"#,
    )
    .unwrap();
    let o = run(&["amplitudes", "--config", cfg.to_str().unwrap(), "--phi", "0.25"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["gamma"].as_f64().unwrap(), std::f64::consts::FRAC_PI_2);
    assert_eq!(v["config"]["phi"].as_f64().unwrap(), 0.25);
    assert_eq!(v["rows"].as_array().unwrap().len(), 7);

    std::fs::write(&cfg, r#"{"gamma": 1.0, "bogus": 2}"#).unwrap();
    assert_eq!(
        run(&["amplitudes", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(64)
    );
    assert_eq!(run(&["amplitudes", "--gamma", "two"]).status.code(), Some(64));
    assert_eq!(run(&["amplitudes", "--k-min", "-1"]).status.code(), Some(64));
    assert_eq!(run(&["nonsense"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn stamp_only_on_request() {
    let plain = run(&["amplitudes", "--k-steps", "3"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("generated_unix"));
    let stamped = run(&["amplitudes", "--k-steps", "3", "--stamp"]);
    assert!(String::from_utf8_lossy(&stamped.stdout).contains("# generated_unix: "));
    let strip = |o: &Output| -> String {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with("# generated_unix"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&plain), strip(&stamped));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let go = |threads: &str, name: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        let o = bin()
            .env("NH_DIODE_THREADS", threads)
            .args(["audit", "--seed", "99", "--centers", "50", "-o", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success());
        std::fs::read(Path::new(&path)).unwrap()
    };
    assert_eq!(go("1", "a.csv"), go("4", "b.csv"));
    let o = bin().env("NH_DIODE_THREADS", "zero").args(["audit"]).output().unwrap();
    assert_eq!(o.status.code(), Some(64));
}
