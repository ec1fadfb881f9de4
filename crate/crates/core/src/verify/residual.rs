use num_complex::Complex64;
use serde::Serialize;

use super::family::{family_jets, FunctionFamily};
use super::sampler::TripleSampler;
use super::VerifyError;
use crate::elliptic::{EllipticContext, EllipticError, JetValues};
use crate::jet::{build_abc, build_addet, det3_poly, DiffPolynomial};

/// Summary of a residual scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub samples: usize,
    pub attempts: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    /// Triple attaining the maximum.
    pub worst: Option<[Complex64; 3]>,
    pub tolerance: f64,
    pub pass: bool,
}

/// One accepted triple and its residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleResidual {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
    pub residual: f64,
}

impl ResidualReport {
    pub fn from_samples(samples: &[SampleResidual], attempts: usize, tolerance: f64) -> Self {
        let mut max = 0.0f64;
        let mut worst = None;
        let mut sum = 0.0;
        for s in samples {
            sum += s.residual;
            if worst.is_none() || s.residual > max || s.residual.is_nan() {
                max = s.residual;
                worst = Some([s.x, s.y, s.z]);
            }
        }
        let n = samples.len();
        let mean = if n > 0 { sum / n as f64 } else { 0.0 };
        ResidualReport {
            samples: n,
            attempts,
            max_residual: max,
            mean_residual: mean,
            worst,
            tolerance,
            pass: n > 0 && max <= tolerance,
        }
    }
}

/// `det [[1,1,1],[f,g,h],[f′,g′,h′]] = (g−f)h′ − (g′−f′)h + (fg′ − gf′)`,
/// summed as `f(g′−h′) + g(h′−f′) + h(f′−g′)` so that a column swap negates
/// the result bit for bit.
pub fn det3(jf: &JetValues, jg: &JetValues, jh: &JetValues) -> Complex64 {
    let (f, df) = (jf.value(), jf.derivative());
    let (g, dg) = (jg.value(), jg.derivative());
    let (h, dh) = (jh.value(), jh.derivative());
    let t = [f * (dg - dh), g * (dh - df), h * (df - dg)];
    Complex64::new(odd_sum(t.map(|v| v.re)), odd_sum(t.map(|v| v.im)))
}

// order-independent sum with odd_sum(−t) == −odd_sum(t) exactly
fn odd_sum(t: [f64; 3]) -> f64 {
    let sorted = |mut v: [f64; 3]| {
        v.sort_by(f64::total_cmp);
        v[0] + v[1] + v[2]
    };
    (sorted(t) - sorted(t.map(|v| -v))) / 2.0
}

/// Product of the row magnitudes `max(1, |f|, |g|, |h|)` and
/// `max(1, |f′|, |g′|, |h′|)`.
pub fn row_scale(jf: &JetValues, jg: &JetValues, jh: &JetValues) -> f64 {
    let r1 = [jf, jg, jh].iter().map(|j| j.value().norm()).fold(1.0, f64::max);
    let r2 = [jf, jg, jh].iter().map(|j| j.derivative().norm()).fold(1.0, f64::max);
    r1 * r2
}

/// `|det| / row_scale` at `(x, y, z)`.
pub fn residual_at(
    ff: &FunctionFamily,
    fg: &FunctionFamily,
    fh: &FunctionFamily,
    t: [Complex64; 3],
) -> Result<f64, VerifyError> {
    let jf = family_jets(ff, t[0], 1)?;
    let jg = family_jets(fg, t[1], 1)?;
    let jh = family_jets(fh, t[2], 1)?;
    Ok(det3(&jf, &jg, &jh).norm() / row_scale(&jf, &jg, &jh))
}

/// Relative residual of the three-function determinant at `z = −x − y`.
pub fn residual(
    ff: &FunctionFamily,
    fg: &FunctionFamily,
    fh: &FunctionFamily,
    x: Complex64,
    y: Complex64,
) -> Result<f64, VerifyError> {
    residual_at(ff, fg, fh, [x, y, -x - y])
}

fn is_rejection(e: &VerifyError) -> bool {
    matches!(
        e,
        VerifyError::Elliptic(EllipticError::PoleProximity(_) | EllipticError::SeriesNoConverge(_))
    )
}

/// Draws admissible triples and evaluates `eval` on each. Triples too
/// close to a pole of one of `families` (position `i` against `t[i]`), or
/// with coinciding points, are redrawn; so are triples where `eval`
/// reports a pole or a series failure.
pub fn scan_with(
    sampler: &TripleSampler,
    families: [&FunctionFamily; 3],
    mut eval: impl FnMut([Complex64; 3]) -> Result<f64, VerifyError>,
) -> Result<(Vec<SampleResidual>, usize), VerifyError> {
    let mut out = Vec::with_capacity(sampler.count);
    let mut attempts = 0usize;
    while out.len() < sampler.count {
        if attempts >= sampler.max_attempts() {
            return Err(VerifyError::SamplerExhausted {
                accepted: out.len(),
                attempts,
            });
        }
        let t = sampler.triple(attempts as u64);
        attempts += 1;
        if sampler.is_degenerate(&t)
            || families
                .iter()
                .zip(t.iter())
                .any(|(f, x)| f.pole_distance(*x) < sampler.pole_exclusion)
        {
            continue;
        }
        match eval(t) {
            Ok(r) => out.push(SampleResidual {
                x: t[0],
                y: t[1],
                z: t[2],
                residual: r,
            }),
            Err(e) if is_rejection(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok((out, attempts))
}

/// Residual scan of the determinant equation for `(f, g, h)`.
pub fn scan(
    ff: &FunctionFamily,
    fg: &FunctionFamily,
    fh: &FunctionFamily,
    sampler: &TripleSampler,
    tol: f64,
) -> Result<ResidualReport, VerifyError> {
    Ok(scan_samples(ff, fg, fh, sampler, tol)?.0)
}

/// [`scan`] together with the per-triple residuals.
pub fn scan_samples(
    ff: &FunctionFamily,
    fg: &FunctionFamily,
    fh: &FunctionFamily,
    sampler: &TripleSampler,
    tol: f64,
) -> Result<(ResidualReport, Vec<SampleResidual>), VerifyError> {
    let (samples, attempts) = scan_with(sampler, [ff, fg, fh], |t| residual_at(ff, fg, fh, t))?;
    Ok((ResidualReport::from_samples(&samples, attempts, tol), samples))
}

/// `2σ(a+b+c)σ(a−b)σ(b−c)σ(c−a) / (σ(a)³σ(b)³σ(c)³)`, combined in
/// mantissa/exponent form.
pub fn sigma_quotient(ctx: &EllipticContext, a: Complex64, b: Complex64, c: Complex64) -> Result<Complex64, VerifyError> {
    for z in [a, b, c] {
        if ctx.distance_to_pole(z) < ctx.tolerances().pole {
            return Err(EllipticError::PoleProximity(z).into());
        }
    }
    // factors in an order that ignores argument signs, so swapping two
    // arguments negates the result exactly
    let mut factors = [(a + b + c, 1), (a - b, 1), (b - c, 1), (c - a, 1), (a, -3), (b, -3), (c, -3)];
    let key = |z: Complex64| {
        let z = if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) { -z } else { z };
        (z.re + 0.0, z.im + 0.0)
    };
    factors.sort_by(|p, q| {
        let (kp, kq) = (key(p.0), key(q.0));
        kp.0.total_cmp(&kq.0).then(kp.1.total_cmp(&kq.1)).then(p.1.cmp(&q.1))
    });
    let mut mant = Complex64::new(2.0, 0.0);
    let mut expo = Complex64::new(0.0, 0.0);
    for (z, power) in factors {
        let (m, e) = ctx.sigma_parts(z)?;
        if power == 1 {
            mant *= m;
        } else {
            mant /= m * m * m;
        }
        expo += e * power as f64;
    }
    Ok(mant * expo.exp())
}

/// Points within the exclusion radius of `Λ` for any of `a, b, c`,
/// `a + b + c` or their differences.
fn sigma_inadmissible(ctx: &EllipticContext, t: &[Complex64; 3], r: f64) -> bool {
    let [a, b, c] = *t;
    [a, b, c, a + b + c, a - b, b - c, c - a]
        .iter()
        .any(|z| ctx.distance_to_pole(*z) < r)
}

/// `|det(℘ jets at a, b, c) − sigma_quotient| / |det|` over unconstrained
/// triples.
pub fn lemma2_check(ctx: &EllipticContext, sampler: &TripleSampler, tol: f64) -> Result<ResidualReport, VerifyError> {
    let s = sampler.with_constraint(false);
    let fam = FunctionFamily::wp(std::sync::Arc::new(ctx.clone()), Complex64::new(0.0, 0.0));
    let (samples, attempts) = scan_with(&s, [&fam, &fam, &fam], |t| {
        if sigma_inadmissible(ctx, &t, s.pole_exclusion) {
            return Err(EllipticError::PoleProximity(t[0]).into());
        }
        let j: Vec<_> = t.iter().map(|z| ctx.jets(*z, 1)).collect::<Result<_, _>>()?;
        let d = det3(&j[0], &j[1], &j[2]);
        let q = sigma_quotient(ctx, t[0], t[1], t[2])?;
        Ok((d - q).norm() / d.norm())
    })?;
    Ok(ResidualReport::from_samples(&samples, attempts, tol))
}

/// For `f = g = h = ℘(· + d)`, compares each triple's residual with
/// `|sigma_quotient(x+d, y+d, z+d)| / row_scale`; the reported residual is
/// their relative difference.
pub fn sigma_prediction_check(
    ctx: &EllipticContext,
    shift: Complex64,
    sampler: &TripleSampler,
    tol: f64,
) -> Result<(ResidualReport, ResidualReport), VerifyError> {
    let fam = FunctionFamily::wp(std::sync::Arc::new(ctx.clone()), shift);
    let mut raw = Vec::new();
    let (samples, attempts) = scan_with(sampler, [&fam, &fam, &fam], |t| {
        let s = [t[0] + shift, t[1] + shift, t[2] + shift];
        if sigma_inadmissible(ctx, &s, sampler.pole_exclusion) {
            return Err(EllipticError::PoleProximity(t[0]).into());
        }
        let j: Vec<_> = s.iter().map(|z| ctx.jets(*z, 1)).collect::<Result<_, _>>()?;
        let scale = row_scale(&j[0], &j[1], &j[2]);
        let r = det3(&j[0], &j[1], &j[2]).norm() / scale;
        let pred = sigma_quotient(ctx, s[0], s[1], s[2])?.norm() / scale;
        raw.push(SampleResidual {
            x: t[0],
            y: t[1],
            z: t[2],
            residual: r,
        });
        Ok((r - pred).abs() / pred)
    })?;
    Ok((
        ResidualReport::from_samples(&raw, attempts, f64::INFINITY),
        ResidualReport::from_samples(&samples, attempts, tol),
    ))
}

/// Expected outcome from lattice membership of the shift sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Pass,
    Fail,
    /// Within `10·ε_lattice` of `Λ` but not on it.
    Indeterminate,
}

/// Lattice membership of `z`, with the indeterminate band.
pub fn lattice_expectation(ctx: &EllipticContext, z: Complex64) -> Result<Expectation, VerifyError> {
    let (s, t) = ctx.lattice_coordinates(z)?;
    let d = (s - s.round()).abs().max((t - t.round()).abs());
    let eps = ctx.tolerances().lattice;
    Ok(if d <= eps {
        Expectation::Pass
    } else if d <= 10.0 * eps {
        Expectation::Indeterminate
    } else {
        Expectation::Fail
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftTestReport {
    pub report: ResidualReport,
    pub expected: Expectation,
    /// `−(γ₁ + γ₂)`, equivalent to `γ₃` when the sum lies in `Λ`.
    pub gamma3_prime: Complex64,
    /// The scan outcome agrees with the expectation.
    pub consistent: bool,
}

/// Scan of `f = ℘(·+γ₁)`, `g = ℘(·+γ₂)`, `h = ℘(·+γ₃)`.
pub fn theorem2_shift_test(
    ctx: &std::sync::Arc<EllipticContext>,
    gammas: [Complex64; 3],
    sampler: &TripleSampler,
    tol: f64,
) -> Result<ShiftTestReport, VerifyError> {
    let [f, g, h] = gammas.map(|s| FunctionFamily::wp(ctx.clone(), s));
    let report = scan(&f, &g, &h, sampler, tol)?;
    let expected = lattice_expectation(ctx, gammas[0] + gammas[1] + gammas[2])?;
    let consistent = match expected {
        Expectation::Pass => report.pass,
        Expectation::Fail => !report.pass,
        Expectation::Indeterminate => true,
    };
    Ok(ShiftTestReport {
        report,
        expected,
        gamma3_prime: -(gammas[0] + gammas[1]),
        consistent,
    })
}

fn relative(p: &DiffPolynomial, jf: &JetValues, jg: &JetValues) -> Result<f64, VerifyError> {
    let (v, scale) = p.evaluate_scaled(jf, jg)?;
    Ok(if scale > 0.0 { v.norm() / scale } else { v.norm() })
}

/// Evaluates the three-column determinant over `(k, l, s)` and the
/// differentiated determinant over `(k, l)` on the jets of `f` at `x` and
/// `g` at `y`. Residuals are relative to the sum of term magnitudes.
#[allow(clippy::too_many_arguments)]
pub fn derived_determinant_check(
    ff: &FunctionFamily,
    fg: &FunctionFamily,
    fh: &FunctionFamily,
    (k, l, s): (usize, usize, usize),
    sampler: &TripleSampler,
    tol: f64,
) -> Result<(ResidualReport, ResidualReport), VerifyError> {
    let cols = [build_abc(k)?, build_abc(l)?, build_abc(s)?];
    let m = [
        [cols[0].0.clone(), cols[1].0.clone(), cols[2].0.clone()],
        [cols[0].1.clone(), cols[1].1.clone(), cols[2].1.clone()],
        [cols[0].2.clone(), cols[1].2.clone(), cols[2].2.clone()],
    ];
    let three = det3_poly(&m);
    let ad = build_addet(k, l)?;
    let order = three
        .jet_order(true)
        .into_iter()
        .chain(three.jet_order(false))
        .chain(ad.jet_order(true))
        .chain(ad.jet_order(false))
        .max()
        .unwrap_or(0) as usize;
    let mut second = Vec::new();
    let (first, attempts) = scan_with(sampler, [ff, fg, fh], |t| {
        let jf = family_jets(ff, t[0], order)?;
        let jg = family_jets(fg, t[1], order)?;
        let r7 = relative(&three, &jf, &jg)?;
        let r8 = relative(&ad, &jf, &jg)?;
        second.push(SampleResidual {
            x: t[0],
            y: t[1],
            z: t[2],
            residual: r8,
        });
        Ok(r7)
    })?;
    Ok((
        ResidualReport::from_samples(&first, attempts, tol),
        ResidualReport::from_samples(&second, attempts, tol),
    ))
}
