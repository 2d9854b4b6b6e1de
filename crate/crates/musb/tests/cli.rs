use std::f64::consts::PI;
use std::process::{Command, Output};

use musb::probes::{builtin, ProbeSpec};
use serde_json::Value;

fn musb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_musb"))
        .args(args)
        .env_remove("MUSB_QUAD_LEVEL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn kernel_classical_value() {
    let out = musb(&["kernel", "--version", "A", "--mu", "0", "--t", "1", "--z", "0.3+0.2i", "--q", "0.5"]);
    let records = json(&out);
    let (re, im) = complex(&records[0]["value"]);
    // (2π)^{-1/4} exp(-z²/2 - q²/4 + qz)
    let (zr, zi, q): (f64, f64, f64) = (0.3, 0.2, 0.5);
    let ar = -(zr * zr - zi * zi) / 2.0 - q * q / 4.0 + q * zr;
    let ai = -zr * zi + q * zi;
    let c = (2.0 * PI).powf(-0.25) * ar.exp();
    assert!((re - c * ai.cos()).abs() < 1e-13 && (im - c * ai.sin()).abs() < 1e-13);
}

#[test]
fn kernel_grid_emits_one_record_per_q() {
    let records = json(&musb(&["kernel", "--version", "c", "--mu", "0.5", "--t", "2", "--grid", "-1:1:5"]));
    let qs: Vec<f64> = records.as_array().unwrap().iter().map(|r| r["q"].as_f64().unwrap()).collect();
    assert_eq!(qs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    assert!(records.as_array().unwrap().iter().all(|r| r["version"] == "C"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["kernel", "--version", "A", "--mu", "-0.5", "--t", "1", "--q", "0"][..],
        &["kernel", "--version", "A", "--mu", "0", "--t", "0", "--q", "0"],
        &["kernel", "--version", "E", "--mu", "0", "--t", "1", "--q", "0"],
        &["heat", "--mu", "0", "--t", "1", "--probe", "no-such-probe"],
        &["transform", "--version", "A", "--mu", "0", "--t", "1", "--probe", "gauss", "--z-grid", "0:1:0,0:1:2"],
        &["verify", "--suite", "ccr", "--jobs", "0"],
        &["verify", "--suite", "ccr", "--mu-grid", "-0.7"],
    ] {
        let out = musb(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = musb(&["kernel", "--version", "A", "--mu", "-0.5", "--t", "1", "--q", "0"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("mu > -1/2"));
}

#[test]
fn invalid_quadrature_level_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_musb"))
        .args(["kernel", "--version", "A", "--mu", "0", "--t", "1", "--q", "0"])
        .env("MUSB_QUAD_LEVEL", "99")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn heat_rows(args: &[&str]) -> Vec<[f64; 4]> {
    let out = musb(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(r.headers().unwrap(), vec!["x", "re", "im", "residual"]);
    r.records()
        .map(|row| {
            let row = row.unwrap();
            [0, 1, 2, 3].map(|i| row[i].parse().unwrap())
        })
        .collect()
}

#[test]
fn heat_preserves_constants() {
    for mu in ["-0.3", "0", "1.5"] {
        let rows = heat_rows(&["heat", "--mu", mu, "--t", "0.7", "--probe", "const"]);
        assert_eq!(rows.len(), 9);
        for [_, re, im, residual] in rows {
            assert!((re - 1.0).abs() < 1e-10 && im.abs() < 1e-12 && residual < 1e-10);
        }
    }
}

#[test]
fn classical_heat_flow_of_a_gaussian() {
    // e^{-q²/2} evolved for t = 1: e^{-x²/4}/√2
    let rows = heat_rows(&["heat", "--mu", "0", "--t", "1", "--probe", "gauss", "--x-grid", "-2:2:5"]);
    for [x, re, _, residual] in rows {
        assert!((re - (-x * x / 4.0).exp() / 2f64.sqrt()).abs() < 1e-12);
        assert!(residual < 1e-10);
    }
}

#[test]
fn transform_of_classical_gaussian() {
    // A_{0,1} applied to e^{-q²/2}: (2π)^{-1/4} √(4π/3) e^{-z²/6}
    let records = json(&musb(&[
        "transform", "--version", "A", "--mu", "0", "--t", "1", "--probe", "hermite-0", "--z-grid", "-1:1:3,-0.5:0.5:2",
    ]));
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 6);
    let c = (2.0 * PI).powf(-0.25) * (4.0 * PI / 3.0).sqrt();
    for r in records {
        let (zr, zi) = complex(&r["z"]);
        let (re, im) = complex(&r["value"]);
        let (ar, ai) = (-(zr * zr - zi * zi) / 6.0, -2.0 * zr * zi / 6.0);
        let (wr, wi) = (c * ar.exp() * ai.cos(), c * ar.exp() * ai.sin());
        assert!((re - wr).hypot(im - wi) < 1e-10, "z = {zr}+{zi}i");
        assert_eq!(r["probe"], "hermite-0");
    }
}

#[test]
fn probe_file_matches_builtin() {
    let spec = builtin("hermite-2", 0.5, 1.0).unwrap().unwrap();
    let file = tempfile::NamedTempFile::new().unwrap();
    let custom = ProbeSpec {
        name: "custom".into(),
        ..spec
    };
    serde_json::to_writer(&file, &custom).unwrap();
    let path = file.path().to_str().unwrap();
    let run = |probe: &str| {
        json(&musb(&[
            "transform", "--version", "B", "--mu", "0.5", "--t", "1", "--probe", probe, "--z-grid", "0:1:2,0.3:0.3:1",
        ]))
    };
    let (a, b) = (run("hermite-2"), run(path));
    for (x, y) in a.as_array().unwrap().iter().zip(b.as_array().unwrap()) {
        assert_eq!(x["value"], y["value"]);
        assert_eq!(y["probe"], "custom");
    }

    std::fs::write(file.path(), "{\"name\": \"bad\"}").unwrap();
    let out = musb(&["heat", "--mu", "0", "--t", "1", "--probe", path]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_output_is_independent_of_jobs() {
    let run = |jobs: &str| {
        let out = musb(&["verify", "--suite", "ccr", "--mu-grid", "-0.4,0,2.5", "--jobs", jobs]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let mut doc: Value = serde_json::from_slice(&out.stdout).unwrap();
        for r in doc["reports"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("wall_time");
        }
        doc
    };
    let serial = run("1");
    assert_eq!(serial, run("3"));
    assert_eq!(serial["summary"]["total"], 9);
    assert_eq!(serial["summary"]["failed"], 0);
    assert_eq!(serial["suite"], "ccr");
}

#[test]
fn verify_csv_has_one_row_per_report() {
    let out = musb(&["verify", "--suite", "special", "--mu-grid", "0,1", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        r.headers().unwrap(),
        vec!["identity_id", "params", "grid_size", "max_residual", "tolerance", "passed", "wall_time_s"]
    );
    let rows: Vec<_> = r.records().map(Result::unwrap).collect();
    // 2 moment checks, 3 fixed, 3 classical, 2 × (eigenfunction + bound)
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|row| &row[5] == "true"));
    assert!(rows.iter().any(|row| &row[1] == "mu=1"));
}

#[test]
fn failing_identity_exits_1() {
    // At t = 0.25 the fixed-step PDE check exceeds its tolerance.
    let out = musb(&["verify", "--suite", "pde", "--mu-grid", "0", "--t-grid", "0.25"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["summary"]["failed"], 1);
}

#[test]
fn non_convergence_exits_3() {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_musb"))
            .args(args)
            .env("MUSB_QUAD_LEVEL", "4")
            .output()
            .unwrap()
    };
    let out = run(&["verify", "--suite", "haar", "--mu-grid", "3", "--t-grid", "4"]);
    assert_eq!(out.status.code(), Some(3));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["errors"].as_array().is_some_and(|e| !e.is_empty()));
    let out = run(&["heat", "--mu", "3", "--t", "0.1", "--probe", "hermite-5"]);
    assert_eq!(out.status.code(), Some(3));
}
