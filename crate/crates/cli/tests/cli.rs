use std::process::{Command, Output};

use serde_json::Value;

fn tlspin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlspin")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn verify_default_passes() {
    let o = tlspin(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("braid.equation"));
}

#[test]
fn verify_names_degenerate_loop_constant() {
    let o = tlspin(&["verify", "--family", "sp", "--n", "2", "--q", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("DegenerateLoopConstant"), "{}", stderr(&o));
}

#[test]
fn negative_q_is_a_config_error() {
    let o = tlspin(&["verify", "--q", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("configuration error"));
    assert!(stdout(&o).is_empty(), "nothing computed before validation");
}

#[test]
fn verify_json_report() {
    let o = tlspin(&["verify", "--format", "json", "--n", "4", "--q", "2", "--length", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn transmit_recovers_inputs() {
    let o = tlspin(&["transmit", "--c1", "0.6,0", "--c2", "0,0.8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (r1, i1) = complex(&v["recovered_c1"]);
    let (r2, i2) = complex(&v["recovered_c2"]);
    assert!((r1 - 0.6).abs() < 1e-8 && i1.abs() < 1e-8);
    assert!(r2.abs() < 1e-8 && (i2 - 0.8).abs() < 1e-8);
    assert!(v["error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn transmit_rejects_other_specs() {
    assert_eq!(tlspin(&["transmit", "--n", "4"]).status.code(), Some(2));
    assert_eq!(tlspin(&["transmit", "--order", "3"]).status.code(), Some(2));
}

#[test]
fn entropy_curve_peaks_at_ln3() {
    let o = tlspin(&["entropy-curve", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,S,family,N"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 201);
    let peak = rows.iter().copied().fold((0.0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
    assert_eq!(peak.0, 1.0);
    assert!((peak.1 - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn entropy_curve_writes_svg() {
    let dir = std::env::temp_dir().join(format!("tlspin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let svg = dir.join("curve.svg");
    let o = tlspin(&["entropy-curve", "--family", "sp", "--n", "4", "--points", "21", "--svg", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    assert_eq!(tlspin(&["entropy-curve", "--q-min", "2", "--q-max", "1"]).status.code(), Some(2));
}

#[test]
fn evolve_at_zero_returns_input() {
    let o = tlspin(&["evolve", "--t", "0", "--length", "4", "--init", "3,1,2,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["frames"][0]["amplitudes"], v["initial"]);
    assert_eq!(v["initial"][0]["labels"], serde_json::json!([3, 1, 2, 1]));
}

#[test]
fn evolve_methods_agree() {
    let run = |method: &str| -> Value {
        let o = tlspin(&["evolve", "--t", "0.1", "--length", "4", "--method", method]);
        assert_eq!(o.status.code(), Some(0));
        serde_json::from_str(&stdout(&o)).unwrap()
    };
    let a = run("series");
    let b = run("exact");
    let amp = |v: &Value, labels: &Value| -> (f64, f64) {
        v["frames"][0]["amplitudes"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| &r["labels"] == labels)
            .map(|r| (r["re"].as_f64().unwrap(), r["im"].as_f64().unwrap()))
            .unwrap_or((0.0, 0.0))
    };
    for rec in b["frames"][0]["amplitudes"].as_array().unwrap() {
        let (x, y) = amp(&a, &rec["labels"]);
        let (u, w) = amp(&b, &rec["labels"]);
        assert!((x - u).abs() < 1e-10 && (y - w).abs() < 1e-10);
    }
}

#[test]
fn outputs_are_deterministic() {
    for args in [vec!["transmit"], vec!["entropy-curve", "--n", "5"], vec!["evolve", "--length", "5", "--q", "1.5"], vec!["info", "--format", "json"]] {
        let a = tlspin(&args);
        let b = tlspin(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn config_file_below_flags() {
    let dir = std::env::temp_dir().join(format!("tlspin-cfg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "family=so\nn=5\nq=2\n").unwrap();
    let o = tlspin(&["info", "--format", "json", "--config", cfg.to_str().unwrap(), "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 5);
    assert_eq!(v["q"].as_f64(), Some(3.0));
    std::fs::write(&cfg, "colour=blue\n").unwrap();
    assert_eq!(tlspin(&["info", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn info_reports_rapidity() {
    let o = tlspin(&["info", "--format", "json", "--sign", "minus"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k"].as_f64(), Some(3.0));
    assert!((v["lambda"].as_f64().unwrap() - 2.0 / 5f64.sqrt()).abs() < 1e-15);
    assert_eq!(v["rho"], serde_json::json!(["1/2", "0", "-1/2"]));
}

#[test]
fn export_projector_and_hamiltonian() {
    let o = tlspin(&["export", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("row,col,value\n"));
    assert_eq!(text.lines().count(), 10);
    let o = tlspin(&["export", "--operator", "hamiltonian-prime", "--length", "3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim"], 27);
    assert_eq!(tlspin(&["export", "--operator", "hamiltonian", "--length", "5"]).status.code(), Some(2));
}
