use std::path::Path;
use std::process::Command;

use nalgebra::Matrix4;
use opendeco::two_mode::build_drift;
use opendeco::{OscillatorParams, TwoModeDynamics, TwoModeEnvironment};
use serde_json::{json, Value};
use tempfile::TempDir;
use testkit::integrate_covariance;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(cfg: &Value, args: &[&str]) -> Run {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    run_path(&path, args)
}

fn run_path(path: &Path, args: &[&str]) -> Run {
    let (cmd, rest) = args.split_first().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_opendeco"))
        .arg(cmd)
        .arg("--config")
        .arg(path)
        .args(rest)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Rows of a CSV body as raw cells, header dropped.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap()
}

/// `name,value` output as a lookup.
fn lookup<'a>(csv: &'a str, name: &str) -> Option<&'a str> {
    csv.lines()
        .find_map(|l| l.strip_prefix(name)?.strip_prefix(','))
}

fn reference(c: f64) -> Value {
    json!({
        "oscillator": {"m": 1.0, "omega": 1.0, "hbar": 1.0, "lambda": 0.2, "mu": 0.1},
        "thermal": {"c": c},
        "initial": {"delta": 4.0, "r": 0.0}
    })
}

fn two_mode(dxx: f64, dpxpx: f64, dxpy: f64, lambda: f64) -> Value {
    json!({
        "oscillator": {"m": 1.0, "omega": 1.0, "lambda": lambda},
        "initial": {"delta": 1.0, "r": 0.0},
        "two_mode_env": {"dxx": dxx, "dxpx": 0.0, "dpxpx": dpxpx, "dxy": 0.0, "dxpy": dxpy, "dpxpy": 0.0}
    })
}

#[test]
fn validate_reports_thermal_slack() {
    let ok = run(&reference(2.0), &["validate"]);
    assert_eq!(ok.code, 0);
    assert!(ok.stdout.contains("PASS (lambda^2 - mu^2)*C^2 >= lambda^2"));
    assert!(ok.stdout.contains("slack = 8.000000e-2"), "{}", ok.stdout);

    let bad = run(&reference(1.0), &["validate"]);
    assert_eq!(bad.code, 2);
    assert!(bad
        .stdout
        .contains("FAIL (lambda^2 - mu^2)*C^2 >= lambda^2"));
    assert!(
        bad.stdout.contains("slack = -1.000000e-2"),
        "{}",
        bad.stdout
    );
}

#[test]
fn config_errors_exit_one() {
    let mut cfg = reference(2.0);
    cfg.as_object_mut().unwrap().remove("thermal");
    let r = run(&cfg, &["validate"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("thermal"), "{}", r.stderr);

    let r = run(&json!({"oscillator": {"lambda": "fast"}}), &["validate"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line"), "{}", r.stderr);

    assert_eq!(run(&reference(2.0), &["validate", "--no-such-flag"]).code, 1);
    assert_eq!(
        run_path(Path::new("/nonexistent/run.json"), &["validate"]).code,
        1
    );
}

#[test]
fn deco_grid_examples() {
    let r = run(
        &reference(2.0),
        &[
            "deco-grid",
            "--t-min",
            "0",
            "--t-max",
            "0",
            "--t-steps",
            "1",
            "--c-min",
            "2",
            "--c-max",
            "2",
            "--c-steps",
            "1",
        ],
    );
    assert_eq!(r.code, 0);
    assert_eq!(
        rows(&r.stdout),
        vec![vec![
            "0.00000000000000e0",
            "2.00000000000000e0",
            "2.50000000000000e-1",
            "1.00000000000000e0"
        ]]
    );

    let r = run(
        &reference(2.0),
        &[
            "deco-grid",
            "--asymptotic",
            "--c-min",
            "10",
            "--c-max",
            "10",
            "--c-steps",
            "1",
        ],
    );
    let row = &rows(&r.stdout)[0];
    assert_eq!(row[0], "inf");
    assert!((num(&row[3]) - 0.1).abs() < 1e-14);
}

#[test]
fn deco_grid_full_sweep() {
    let grid = [
        "--t-min",
        "0",
        "--t-max",
        "20",
        "--t-steps",
        "50",
        "--c-min",
        "1",
        "--c-max",
        "10",
        "--c-steps",
        "50",
    ];
    // C below λ/√(λ²−μ²) ≈ 1.1547 violates the thermal constraint
    let strict = run(&reference(2.0), &[&["deco-grid"][..], &grid].concat());
    assert_eq!(strict.code, 2);
    assert!(strict.stderr.contains("C = 1:"), "{}", strict.stderr);

    let r = run(
        &reference(2.0),
        &[&["deco-grid", "--skip-invalid"][..], &grid].concat(),
    );
    assert_eq!(r.code, 0);
    let rows = rows(&r.stdout);
    assert_eq!(rows.len(), 2500);
    let ok: Vec<_> = rows.iter().filter(|r| r[4] == "ok").collect();
    assert_eq!(ok.len(), 50 * 49);
    assert!(ok
        .iter()
        .all(|r| (0.0..=1.0).contains(&num(&r[3])) && num(&r[3]) > 0.0));
    // t is the outer (slow) index
    assert_eq!(rows[49][0], rows[0][0]);
    assert_ne!(rows[50][0], rows[0][0]);
}

#[test]
fn density_examples() {
    let one_node = ["--x-min", "0", "--x-max", "1", "--n", "2"];
    let r = run(
        &reference(10.0),
        &[&["density", "--stationary"][..], &one_node].concat(),
    );
    let rows_ = rows(&r.stdout);
    assert!((num(&rows_[0][2]) - 0.1784124116152771).abs() < 1e-14);
    assert_eq!(num(&rows_[0][3]), 0.0);

    let mut coherent = reference(2.0);
    coherent["initial"]["delta"] = json!(1.0);
    let r = run(
        &coherent,
        &[&["density", "--t", "0"][..], &one_node].concat(),
    );
    assert!((num(&rows(&r.stdout)[0][2]) - 0.5641895835477563).abs() < 1e-14);

    let mut shifted = reference(2.0);
    shifted["initial"] = json!({"delta": 2.0, "r": 0.5, "x0": 0.3, "p0": -0.7});
    let r = run(
        &shifted,
        &[
            "density", "--t", "3", "--x-min", "-2", "--x-max", "2", "--n", "9",
        ],
    );
    let rows_ = rows(&r.stdout);
    assert_eq!(rows_.len(), 81);
    for i in 0..9 {
        for j in 0..9 {
            let (a, b) = (&rows_[9 * i + j], &rows_[9 * j + i]);
            assert!((num(&a[2]) - num(&b[2])).abs() < 1e-14);
            assert!((num(&a[3]) + num(&b[3])).abs() < 1e-14);
        }
    }
    assert_eq!(
        run(
            &reference(2.0),
            &["density", "--t", "0", "--x-min", "0", "--x-max", "1", "--n", "1"]
        )
        .code,
        1
    );
}

#[test]
fn timescales_examples() {
    let r = run(&reference(2.0), &["timescales"]);
    assert_eq!(r.code, 0);
    assert!((num(lookup(&r.stdout, "t_deco_r0").unwrap()) - 5.0 / 21.0).abs() < 1e-14);
    assert_eq!(lookup(&r.stdout, "t_rel"), Some("5.00000000000000e0"));
    assert_eq!(lookup(&r.stdout, "t_d"), None);

    let zero_t =
        json!({"oscillator": {"lambda": 0.2}, "thermal": {"c": 1.0}, "initial": {"delta": 1.0}});
    let r = run(&zero_t, &["timescales"]);
    assert_eq!(lookup(&r.stdout, "t_deco_general"), Some("inf"));
    assert_eq!(lookup(&r.stdout, "t_deco_zero_t"), Some("inf"));

    let r = run(&reference(10.0), &["timescales"]);
    let t_deco = num(lookup(&r.stdout, "t_deco_high_t").unwrap());
    let t_d = num(lookup(&r.stdout, "t_d").unwrap());
    assert!((t_deco - t_d).abs() / t_d <= 0.05);

    assert_eq!(run(&reference(1.0), &["timescales"]).code, 2);
}

#[test]
fn asymptotic_examples() {
    let r = run(&two_mode(0.7, 0.9, 0.0, 1.0), &["asymptotic"]);
    assert_eq!(r.code, 0);
    for name in ["sxy", "sxpy", "sypx", "spxpy"] {
        assert_eq!(num(lookup(&r.stdout, name).unwrap()), 0.0, "{name}");
    }
    assert_eq!(lookup(&r.stdout, "verdict"), Some("separable"));

    let r = run(&two_mode(1.0, 1.0, 0.8, 1.0), &["asymptotic"]);
    assert_eq!(r.code, 0);
    let s = num(lookup(&r.stdout, "s").unwrap());
    assert!((s + 0.1351).abs() < 1e-12);
    assert!((num(lookup(&r.stdout, "s_special").unwrap()) - s).abs() <= 1e-10);
    assert!(num(lookup(&r.stdout, "residual").unwrap()) <= 1e-10);
    assert_eq!(lookup(&r.stdout, "verdict"), Some("entangled"));

    // the mid-window example has an indefinite environment Gram matrix
    let mid = two_mode(0.1, 0.1, 0.5, 0.2);
    let r = run(&mid, &["asymptotic"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("Gram"), "{}", r.stderr);
    let r = run(&mid, &["asymptotic", "--allow-unphysical"]);
    assert_eq!(r.code, 0);
    assert!((num(lookup(&r.stdout, "s").unwrap()) + 0.1826).abs() < 1e-4);
    assert_eq!(lookup(&r.stdout, "verdict"), Some("entangled"));
}

fn covariance_from_row(row: &[String]) -> Matrix4<f64> {
    let e: Vec<f64> = row[1..11].iter().map(|c| num(c)).collect();
    // sxx, sxpx, sxy, sxpy, spxpx, sypx, spxpy, syy, sypy, spypy
    Matrix4::new(
        e[0], e[1], e[2], e[3], e[1], e[4], e[5], e[6], e[2], e[5], e[7], e[8], e[3], e[6], e[8],
        e[9],
    )
}

#[test]
fn propagate_examples() {
    let cfg = two_mode(1.0, 1.0, 0.8, 1.0);
    let r = run(
        &cfg,
        &[
            "propagate",
            "--from-asymptotic",
            "--t-max",
            "5",
            "--steps",
            "10",
        ],
    );
    assert_eq!(r.code, 0);
    let rows_ = rows(&r.stdout);
    let first = covariance_from_row(&rows_[0]);
    for row in &rows_ {
        assert!((covariance_from_row(row) - first).abs().max() < 1e-14);
    }

    // product coherent states start separable and end entangled
    let r = run(&cfg, &["propagate", "--t-max", "10", "--steps", "40"]);
    let rows_ = rows(&r.stdout);
    let s: Vec<f64> = rows_.iter().map(|r| num(&r[11])).collect();
    assert!(s[0] >= 0.0 && *s.last().unwrap() < 0.0);
    let asym = run(&cfg, &["asymptotic"]);
    assert!((s.last().unwrap() - num(lookup(&asym.stdout, "s").unwrap())).abs() < 1e-6);

    let p = OscillatorParams::new(1.0, 1.0, 1.0, 0.0);
    let env = TwoModeEnvironment::special_family(1.0, 0.0, 0.8, 1.0, 1.0, 1.0);
    let dynamics = TwoModeDynamics::new(&env, &p).unwrap();
    let times: Vec<f64> = rows_.iter().map(|r| num(&r[0])).collect();
    let ode = integrate_covariance(
        build_drift(&p).unwrap().matrix(),
        dynamics.diffusion.matrix(),
        &covariance_from_row(&rows_[0]),
        &times,
        1e-2,
    );
    for (row, oracle) in rows_.iter().zip(&ode) {
        assert!((covariance_from_row(row) - oracle).abs().max() <= 1e-8);
    }
}

#[test]
fn scan_examples() {
    let cfg = json!({"oscillator": {"m": 1.0, "omega": 1.0, "lambda": 0.2}});
    let r = run(
        &cfg,
        &[
            "scan",
            "--dxx-min",
            "0.1",
            "--dxx-max",
            "0.1",
            "--dxx-steps",
            "1",
            "--dxpy-min",
            "0",
            "--dxpy-max",
            "1.5",
            "--dxpy-steps",
            "151",
        ],
    );
    assert_eq!(r.code, 0);
    let rows_ = rows(&r.stdout);
    let upper = 0.2_f64.hypot(1.0);
    let mut sign_changes = Vec::new();
    for w in rows_.windows(2) {
        let (a, b) = (num(&w[0][2]), num(&w[1][2]));
        if (a < 0.0) != (b < 0.0) {
            sign_changes.push(num(&w[1][1]));
        }
    }
    assert_eq!(sign_changes.len(), 2, "{sign_changes:?}");
    assert!(sign_changes[0] <= 0.01 + 1e-12);
    assert!((sign_changes[1] - upper).abs() <= 0.01);

    let r2 = run(
        &cfg,
        &[
            "scan",
            "--dxx-min",
            "0.1",
            "--dxx-max",
            "0.1",
            "--dxx-steps",
            "1",
            "--dxpy-min",
            "0",
            "--dxpy-max",
            "1.5",
            "--dxpy-steps",
            "151",
        ],
    );
    assert_eq!(r.stdout, r2.stdout);

    let r = run(
        &cfg,
        &[
            "scan",
            "--dxx-min",
            "0.01",
            "--dxx-max",
            "0.09",
            "--dxx-steps",
            "5",
            "--dxpy-min",
            "0",
            "--dxpy-max",
            "1",
            "--dxpy-steps",
            "5",
        ],
    );
    let rows_ = rows(&r.stdout);
    assert_eq!(rows_.len(), 25);
    assert!(rows_
        .iter()
        .all(|r| r[5] == "invalid-window" && r[4] == "na"));
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t.csv");
    let r = run(&reference(2.0), &["timescales", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    assert!(std::fs::read_to_string(out)
        .unwrap()
        .starts_with("name,value\n"));
}
