use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn wpfeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpfeq"))
        .args(args)
        .env_remove("WPFEQ_TOL")
        .env_remove("WPFEQ_SEED")
        .env_remove("WPFEQ_N")
        .env_remove("WPFEQ_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

fn assert_schema(v: &Value) {
    for key in ["command", "params", "checks", "pass", "max_residual", "wall_time_s"] {
        assert!(v.get(key).is_some(), "missing {key} in {v}");
    }
}

#[test]
fn symbolic_all_passes() {
    let o = wpfeq(&["symbolic", "--which", "all"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5, "{text}");
}

#[test]
fn symbolic_reports_eqf_cofactor() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = wpfeq(&["symbolic", "--which", "eqf", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    assert_schema(&v);
    assert_eq!(v["checks"][0]["detail"][0]["cofactor"], "24");
}

#[test]
fn symbolic_usage_error() {
    assert_eq!(code(&wpfeq(&["symbolic", "--which", "bogus"])), 64);
    assert_eq!(code(&wpfeq(&["frobnicate"])), 64);
}

#[test]
fn theorem1_lattice_shift_passes() {
    let o = wpfeq(&["verify", "theorem1", "--periods", "2,0,0,2", "--shift-frac", "1/3,0", "--n", "1000"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_schema(&v);
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["command"], "verify theorem1");
}

#[test]
fn theorem1_off_lattice_is_an_expected_failure() {
    let o = wpfeq(&["verify", "theorem1", "--periods", "2,0,0,2", "--shift-frac", "0.1,0", "--n", "300"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["checks"][0]["detail"]["observed"], "fail");
    let o = wpfeq(&["verify", "theorem1", "--periods", "2,0,0,2", "--shift-frac", "0.1,0", "--n", "300", "--expect", "pass"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn sigma_identity() {
    let o = wpfeq(&["verify", "sigma", "--periods", "2,0,0,2", "--n", "500"]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["max_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn theorem2_expected_failure() {
    let g = "0.2,0,0,0.3,0,0";
    assert_eq!(code(&wpfeq(&["verify", "theorem2", "--periods", "2,0,0,2", "--gammas", g, "--n", "300", "--expect", "fail"])), 0);
    assert_eq!(code(&wpfeq(&["verify", "theorem2", "--periods", "2,0,0,2", "--gammas", g, "--n", "300"])), 0);
    assert_eq!(code(&wpfeq(&["verify", "theorem2", "--periods", "2,0,0,2", "--gammas", g, "--n", "300", "--expect", "pass"])), 1);
    let sum = "0.4,0,0,0.6,1.6,1.4";
    assert_eq!(code(&wpfeq(&["verify", "theorem2", "--periods", "2,0,0,2", "--gammas", sum, "--n", "300", "--expect", "pass"])), 0);
}

#[test]
fn other_verifications_pass() {
    for args in [
        &["verify", "derived", "--n", "50"][..],
        &["verify", "factfun", "--n", "50"],
        &["verify", "factfun", "--family", "exp", "--n", "50"],
        &["verify", "constant"],
        &["verify", "constant", "--delta-g", "2"],
        &["verify", "constant", "--zero-f", "--delta-g", "2"],
    ] {
        let o = wpfeq(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_schema(&json(&o));
    }
    assert_eq!(code(&wpfeq(&["verify", "constant", "--delta-g", "2", "--expect", "pass"])), 1);
}

#[test]
fn config_errors() {
    assert_eq!(code(&wpfeq(&["verify", "theorem1", "--periods", "2,0"])), 65);
    assert_eq!(code(&wpfeq(&["verify", "theorem1", "--periods", "1,0,2,0"])), 65);
    assert_eq!(code(&wpfeq(&["verify", "theorem1", "--tol", "0"])), 65);
    assert_eq!(code(&wpfeq(&["verify", "theorem2"])), 65);
    assert_eq!(code(&wpfeq(&["gen", "--family", "exp", "--delta", "0"])), 65);
    assert_eq!(code(&wpfeq(&["gen", "--family", "exp", "--grid", "1:0:1"])), 65);
}

#[test]
fn environment_overrides_defaults_and_flags_override_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_wpfeq"));
        c.args(["verify", "sigma", "--n", "20"]);
        if let Some(f) = flag {
            c.args(["--tol", f]);
        }
        match env {
            Some(e) => c.env("WPFEQ_TOL", e),
            None => c.env_remove("WPFEQ_TOL"),
        };
        let v: Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        v["checks"][0]["tolerance"].as_f64().unwrap()
    };
    assert_eq!(run(None, None), 1e-8);
    assert_eq!(run(Some("1e-3"), None), 1e-3);
    assert_eq!(run(Some("1e-3"), Some("1e-5")), 1e-5);
}

#[test]
fn gen_then_fit_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("wp.csv");
    let o = wpfeq(&["gen", "--family", "wp", "--g2", "4", "--g3", "0", "--grid", "0.2:1.2:0.01", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x_re,x_im,w_re,w_im\n"));
    assert_eq!(text.lines().count(), 102);

    let o = wpfeq(&["fit", csv.to_str().unwrap(), "--expect", "weierstrass"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_schema(&v);
    assert_eq!(v["result"]["family"], "weierstrass");
    let g2 = v["result"]["g2"][0].as_f64().unwrap();
    let g3 = v["result"]["g3"][0].as_f64().unwrap();
    assert!((g2 - 4.0).abs() <= 1e-4 * 4.0 && g3.abs() <= 1e-4, "{g2} {g3}");
}

#[test]
fn fit_from_stdin() {
    let gen = Command::new(env!("CARGO_BIN_EXE_wpfeq"))
        .args(["gen", "--family", "exp", "--delta", "1"])
        .output()
        .unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_wpfeq"))
        .args(["fit", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(&gen.stdout).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["result"]["family"], "exponential");
    assert!((v["result"]["delta"][0].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn fit_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("short.csv");
    std::fs::write(&p, "x_re,x_im,w_re,w_im\n0,0,1,0\n0.1,0,2,0\n0.2,0,3,0\n").unwrap();
    let o = wpfeq(&["fit", p.to_str().unwrap()]);
    assert_eq!(code(&o), 66);
    assert!(String::from_utf8_lossy(&o.stderr).contains("too few points"));
    assert_eq!(code(&wpfeq(&["fit", dir.path().join("missing.csv").to_str().unwrap()])), 66);
}

#[test]
fn fit_rejection_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("abs.csv");
    let mut text = String::from("x_re,x_im,w_re,w_im\n");
    for k in 0..101 {
        let x = -0.5 + 0.01 * k as f64;
        text.push_str(&format!("{x},0,{},0\n", x.abs()));
    }
    std::fs::write(&p, text).unwrap();
    let o = wpfeq(&["fit", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"]["family"], "not_a_solution");
    assert_eq!(code(&wpfeq(&["fit", p.to_str().unwrap(), "--expect", "any"])), 1);
}

#[test]
fn scan_grid_is_deterministic() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = Command::new(env!("CARGO_BIN_EXE_wpfeq"))
            .args(["scan", "--periods", "2,0,0,2", "--seed", "7", "--csv", "r.csv", "--out", "r.json"])
            .current_dir(d.path())
            .env_remove("WPFEQ_TOL")
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
    }
    let file = |i: usize, n: &str| std::fs::read(dirs[i].path().join(n)).unwrap();
    let a = file(0, "r.csv");
    assert_eq!(a, file(1, "r.csv"));
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_re,x_im,y_re,y_im,residual"));
    let residuals: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(residuals.len(), 1024);
    assert!(residuals.iter().all(|r| *r <= 1e-8));

    // identical apart from the wall-clock time
    let strip = |b: Vec<u8>| {
        let t = String::from_utf8(b).unwrap();
        t.lines().filter(|l| !l.contains("wall_time_s")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(strip(file(0, "r.json")), strip(file(1, "r.json")));
    assert_schema(&read_json(&dirs[0].path().join("r.json")));
}

#[test]
fn scan_off_lattice_has_a_floor() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let out = dir.path().join("s.json");
    let o = wpfeq(&["scan", "--periods", "2,0,0,2", "--shift-frac", "0.1,0", "--csv", csv.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    assert!(v["checks"][0]["detail"]["min_residual"].as_f64().unwrap() > 1e-6);
}

#[test]
fn gen_examples() {
    let o = wpfeq(&["gen", "--family", "linear", "--alpha", "2", "--beta", "1", "--grid", "0:1:0.5"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let w: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(w, vec![1.0, 2.0, 3.0]);

    let o = wpfeq(&["gen", "--family", "exp", "--delta", "1", "--grid", "0:1:0.25"]);
    for l in String::from_utf8(o.stdout).unwrap().lines().skip(1) {
        let v: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
        assert!((v[2] - v[0].exp()).abs() <= 1e-15 * v[0].exp());
    }
}

#[test]
fn eval_degenerate_lattice() {
    let o = wpfeq(&["eval", "--g2", "0", "--g3", "0", "--z", "0.5", "--order", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let wp: Vec<f64> = v["result"]["wp"].as_array().unwrap().iter().map(|c| c[0].as_f64().unwrap()).collect();
    let want = [4.0, -16.0, 96.0, -768.0];
    for (a, b) in wp.iter().zip(want) {
        assert!((a - b).abs() <= 1e-9 * b.abs());
    }
}

#[test]
fn floats_are_written_with_seventeen_digits() {
    let o = wpfeq(&["eval", "--periods", "2,0,0,2", "--z", "0.3,0.1"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let re = text.lines().find(|l| l.contains('e') && l.trim_start().starts_with(|c: char| c == '-' || c.is_ascii_digit())).unwrap();
    let mantissa = re.trim().trim_end_matches(',').split('e').next().unwrap().trim_start_matches('-');
    assert_eq!(mantissa.replace('.', "").len(), 17, "{re}");
}
