use serde_json::Value;
use wpfeq_demo::{classify_csv, evaluate, sample_wp, scan_shift};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

#[test]
fn evaluate_square_lattice() {
    let v = parse(&evaluate(1.0, 0.0, 0.0, 1.0, 0.5, 0.0));
    // ℘(ω₁/2) is real and ℘′ vanishes at a half period.
    assert!(v["wp"][1].as_f64().unwrap().abs() < 1e-12);
    assert!(v["wp_prime"][0].as_f64().unwrap().abs() < 1e-10);
    assert!(v["g3"][0].as_f64().unwrap().abs() < 1e-10);
    assert!(v["sigma"].is_array() && v["zeta"].is_array());
}

#[test]
fn evaluate_reports_errors() {
    assert!(parse(&evaluate(1.0, 0.0, 2.0, 0.0, 0.3, 0.0))["error"].is_string());
    assert!(parse(&evaluate(1.0, 0.0, 0.0, 1.0, 0.0, 0.0))["error"].is_string());
}

#[test]
fn scan_third_period_passes_generic_shift_fails() {
    let ok = parse(&scan_shift(1.0, 0.0, 0.0, 1.0, 1.0 / 3.0, 0.0, 200, 1));
    assert_eq!(ok["pass"], true, "{ok}");
    assert_eq!(ok["three_shift_in_lattice"], true);
    let bad = parse(&scan_shift(1.0, 0.0, 0.0, 1.0, 0.1, 0.05, 200, 1));
    assert_eq!(bad["pass"], false, "{bad}");
    assert_eq!(bad["three_shift_in_lattice"], false);
}

#[test]
fn scan_is_deterministic() {
    let a = scan_shift(1.0, 0.0, 0.3, 1.1, 0.0, 0.0, 100, 5);
    assert_eq!(a, scan_shift(1.0, 0.0, 0.3, 1.1, 0.0, 0.0, 100, 5));
}

#[test]
fn sampled_wp_classifies_as_weierstrass() {
    let csv = sample_wp(2.0, 0.0, 0.4, 1.7, 0.4, 0.01, 101);
    let v = parse(&classify_csv(&csv));
    assert_eq!(v["family"], "weierstrass", "{v}");
}

#[test]
fn classify_rejects_bad_csv() {
    assert!(parse(&classify_csv("x_re,x_im,w_re,w_im\n1,0,2\n"))["error"].is_string());
}
