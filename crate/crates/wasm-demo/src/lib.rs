//! Three browser entry points over `wpfeq`. Every function returns a JSON
//! string; failures come back as `{"error": "..."}` rather than exceptions.

use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use wpfeq::classify::{classify_samples, SampleSet, Thresholds};
use wpfeq::elliptic::EllipticContext;
use wpfeq::verify::{scan, FunctionFamily, TripleSampler};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn error(msg: impl ToString) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn lattice(w1: Complex64, w2: Complex64) -> Result<Arc<EllipticContext>, String> {
    EllipticContext::from_periods(w1, w2).map(Arc::new).map_err(|e| e.to_string())
}

/// ℘, ℘′, ζ and σ at `z` on the lattice spanned by `w1`, `w2`.
#[wasm_bindgen]
pub fn evaluate(w1_re: f64, w1_im: f64, w2_re: f64, w2_im: f64, z_re: f64, z_im: f64) -> String {
    let ctx = match lattice(c(w1_re, w1_im), c(w2_re, w2_im)) {
        Ok(ctx) => ctx,
        Err(e) => return error(e),
    };
    let z = c(z_re, z_im);
    match ctx.jets(z, 1) {
        Ok(j) => json!({
            "g2": pair(ctx.g2()),
            "g3": pair(ctx.g3()),
            "wp": pair(j.value()),
            "wp_prime": pair(j.derivative()),
            "zeta": ctx.zeta(z).ok().map(pair),
            "sigma": ctx.sigma(z).ok().map(pair),
        })
        .to_string(),
        Err(e) => error(e),
    }
}

/// Residual scan of `f = g = h = ℘(· + d)` with `d = s·ω₁ + t·ω₂`.
/// Expected to pass exactly when `3d` is a lattice point.
#[wasm_bindgen]
pub fn scan_shift(w1_re: f64, w1_im: f64, w2_re: f64, w2_im: f64, s: f64, t: f64, count: u32, seed: u32) -> String {
    let ctx = match lattice(c(w1_re, w1_im), c(w2_re, w2_im)) {
        Ok(ctx) => ctx,
        Err(e) => return error(e),
    };
    let d = c(w1_re, w1_im) * s + c(w2_re, w2_im) * t;
    let fam = FunctionFamily::wp(ctx.clone(), d);
    let sampler = TripleSampler::for_context(&ctx, seed as u64, count.max(1) as usize);
    match scan(&fam, &fam, &fam, &sampler, 1e-8) {
        Ok(r) => json!({
            "shift": pair(d),
            "three_shift_in_lattice": ctx.is_lattice_point(d * 3.0).unwrap_or(false),
            "samples": r.samples,
            "max_residual": r.max_residual,
            "mean_residual": r.mean_residual,
            "tolerance": r.tolerance,
            "pass": r.pass,
        })
        .to_string(),
        Err(e) => error(e),
    }
}

/// Classifies samples in the `x_re,x_im,w_re,w_im` CSV format.
#[wasm_bindgen]
pub fn classify_csv(text: &str) -> String {
    let samples = match SampleSet::read_csv(text.as_bytes()) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    match classify_samples(&samples, &Thresholds::default()) {
        Ok(cl) => serde_json::to_string(&cl).unwrap_or_else(error),
        Err(e) => error(e),
    }
}

/// CSV of `℘(x)` on the real grid `x = x0 + k·h`, for seeding the page.
#[wasm_bindgen]
pub fn sample_wp(w1_re: f64, w1_im: f64, w2_re: f64, w2_im: f64, x0: f64, h: f64, n: u32) -> String {
    let ctx = match lattice(c(w1_re, w1_im), c(w2_re, w2_im)) {
        Ok(ctx) => ctx,
        Err(e) => return error(e),
    };
    let mut out = String::from("x_re,x_im,w_re,w_im\n");
    for k in 0..n {
        let x = c(x0 + h * k as f64, 0.0);
        match ctx.wp(x) {
            Ok(w) => out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", x.re, x.im, w.re, w.im)),
            Err(e) => return error(e),
        }
    }
    out
}
