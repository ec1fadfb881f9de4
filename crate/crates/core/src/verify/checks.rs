use num_complex::Complex64;

use super::family::{family_jets, FunctionFamily};
use super::residual::{row_scale, scan_with, ResidualReport, SampleResidual};
use super::sampler::TripleSampler;
use super::VerifyError;
use crate::elliptic::EllipticContext;

fn ground_state_sum(fam: &FunctionFamily, x: Complex64, y: Complex64) -> Result<Complex64, VerifyError> {
    let z = -x - y;
    let (fx, fy, fz) = (fam.antiderivative(x)?, fam.antiderivative(y)?, fam.antiderivative(z)?);
    Ok(fx * fy + fy * fz + fz * fx)
}

/// Central-difference `(∂x − ∂y)∂x∂y` of `S` with step `h` (second order).
fn operator_fd(fam: &FunctionFamily, x: Complex64, y: Complex64, h: f64) -> Result<Complex64, VerifyError> {
    let s = |i: f64, j: f64| ground_state_sum(fam, x + h * i, y + h * j);
    let (pp, mm) = (s(1.0, 1.0)?, s(-1.0, -1.0)?);
    let (pm, mp) = (s(1.0, -1.0)?, s(-1.0, 1.0)?);
    let (zp, zm) = (s(0.0, 1.0)?, s(0.0, -1.0)?);
    let (pz, mz) = (s(1.0, 0.0)?, s(-1.0, 0.0)?);
    let dxxy = pp - zp * 2.0 + mp - pm + zm * 2.0 - mm;
    let dxyy = pp - pz * 2.0 + pm - mp + mz * 2.0 - mm;
    Ok((dxxy - dxyy) / (2.0 * h * h * h))
}

/// `(∂x − ∂y)∂x∂y [F(x)F(y) + F(y)F(z) + F(z)F(x)]` at `z = −x − y`, by
/// central differences with one Richardson step (`h` and `2h`). On exact
/// data this equals minus the determinant of `f = F′`.
pub fn factfun_operator(fam: &FunctionFamily, x: Complex64, y: Complex64, h: f64) -> Result<Complex64, VerifyError> {
    let fine = operator_fd(fam, x, y, h)?;
    let coarse = operator_fd(fam, x, y, 2.0 * h)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Finite-difference annihilation residual of the ground-state sum built
/// from `F` with `F′ = f`, normalised by the determinant row scale of `f`.
pub fn factfun_check(
    fam: &FunctionFamily,
    sampler: &TripleSampler,
    h_step: f64,
    tol: f64,
) -> Result<ResidualReport, VerifyError> {
    if !(h_step > 0.0) {
        return Err(VerifyError::InvalidArgument("h_step must be positive".into()));
    }
    let (samples, attempts) = scan_with(sampler, [fam, fam, fam], |t| {
        let j: Vec<_> = t.iter().map(|z| family_jets(fam, *z, 1)).collect::<Result<_, _>>()?;
        let r = factfun_operator(fam, t[0], t[1], h_step)?;
        Ok(r.norm() / row_scale(&j[0], &j[1], &j[2]))
    })?;
    Ok(ResidualReport::from_samples(&samples, attempts, tol))
}

/// `|f(x)g′(y) − f′(x)g(y)|` over `max(1,|f|,|g|)·max(1,|f′|,|g′|)`, the
/// determinant with `h ≡ 0`.
pub fn constant_case_check(
    ff: &FunctionFamily,
    fg: &FunctionFamily,
    sampler: &TripleSampler,
    tol: f64,
) -> Result<ResidualReport, VerifyError> {
    let zero = FunctionFamily::constant(Complex64::new(0.0, 0.0));
    let (samples, attempts) = scan_with(sampler, [ff, fg, &zero], |t| {
        let jf = family_jets(ff, t[0], 1)?;
        let jg = family_jets(fg, t[1], 1)?;
        let v = jf.value() * jg.derivative() - jf.derivative() * jg.value();
        let s0 = 1f64.max(jf.value().norm()).max(jg.value().norm());
        let s1 = 1f64.max(jf.derivative().norm()).max(jg.derivative().norm());
        Ok(v.norm() / (s0 * s1))
    })?;
    Ok(ResidualReport::from_samples(&samples, attempts, tol))
}

fn probe_report(
    x: Complex64,
    probes: &[Complex64],
    target: Complex64,
    tol: f64,
    mut value: impl FnMut(Complex64) -> Result<Complex64, VerifyError>,
) -> Result<ResidualReport, VerifyError> {
    let mut samples = Vec::with_capacity(probes.len());
    let mut first = None;
    let scale = target.norm().max(1.0);
    for &y in probes {
        let b = value(y)?;
        let b0 = *first.get_or_insert(b);
        let r = (b - target).norm().max((b - b0).norm()) / scale;
        samples.push(SampleResidual {
            x,
            y,
            z: -x - y,
            residual: r,
        });
    }
    Ok(ResidualReport::from_samples(&samples, probes.len(), tol))
}

fn check_probe(fx: Complex64, gy: Complex64, y: Complex64) -> Result<(), VerifyError> {
    if (fx - gy).norm() <= 1e-8 * fx.norm().max(1.0) {
        Err(VerifyError::DegenerateProbe(y))
    } else {
        Ok(())
    }
}

/// With `f = g = ℘`, evaluates
/// `B(x, y) = f′(f′² − g′²)/(f−g)³ − 2f′f″/(f−g)² + f‴/(f−g)` at each probe
/// `y`. Each probe's residual is the larger of its distance to
/// `(f′f⁗ − f″f‴)/(3f′²)` at `x` and to the first probe's value, relative to
/// the target.
pub fn c_function_check(
    ctx: &EllipticContext,
    x: Complex64,
    probes: &[Complex64],
    tol: f64,
) -> Result<ResidualReport, VerifyError> {
    let jx = ctx.jets(x, 4)?;
    let v = &jx.values;
    let target = (v[1] * v[4] - v[2] * v[3]) / (v[1] * v[1] * 3.0);
    probe_report(x, probes, target, tol, |y| {
        let (g, dg) = ctx.wp_pair(y)?;
        check_probe(v[0], g, y)?;
        let d = v[0] - g;
        Ok(v[1] * (v[1] * v[1] - dg * dg) / (d * d * d) - v[1] * v[2] * 2.0 / (d * d) + v[3] / d)
    })
}

/// `(f′(x) − f′(y))/(f(x) − f(y))` against `C₁ = f″(x)/f′(x)` for a
/// single family, same residual convention as [`c_function_check`].
pub fn c1_check(fam: &FunctionFamily, x: Complex64, probes: &[Complex64], tol: f64) -> Result<ResidualReport, VerifyError> {
    let jx = family_jets(fam, x, 2)?;
    let target = jx.values[2] / jx.values[1];
    probe_report(x, probes, target, tol, |y| {
        let jy = family_jets(fam, y, 1)?;
        check_probe(jx.value(), jy.value(), y)?;
        Ok((jx.derivative() - jy.derivative()) / (jx.value() - jy.value()))
    })
}
