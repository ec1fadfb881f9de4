//! Slow direct lattice sum for `℘`, kept as an oracle for the series path.

use num_complex::Complex64;

use super::context::EllipticContext;
use super::lattice::Periods;
use super::EllipticError;

/// A truncated lattice sum and an estimate of its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSum {
    pub value: Complex64,
    pub tail: f64,
    pub cutoff: usize,
}

/// `z⁻² + Σ′ [(z−λ)⁻² − λ⁻²]` over `|m|, |n| ≤ cutoff`.
///
/// The box is symmetric, so the ±λ pairs cancel down to
/// `6z²λ⁻⁴ + O(λ⁻⁶)` and the neglected part is bounded by
/// `6|z|² Σ_{|λ|>r} |λ|⁻⁴ ≈ 6π|z|² / (A r²)` with `r` the inradius of the
/// box; the reported tail doubles that.
pub fn lattice_sum_truncated(periods: &Periods, z: Complex64, cutoff: usize) -> LatticeSum {
    let m = cutoff as i64;
    let mut sum = z.inv() * z.inv();
    for i in -m..=m {
        // accumulate each row separately to limit rounding growth
        let mut row = Complex64::new(0.0, 0.0);
        for j in -m..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let lam = periods.w1 * i as f64 + periods.w2 * j as f64;
            let a = (z - lam).inv();
            let b = lam.inv();
            row += a * a - b * b;
        }
        sum += row;
    }
    let area = periods.cell_area();
    let inradius = cutoff as f64 * area / periods.w1.norm().max(periods.w2.norm());
    let tail = 2.0 * 6.0 * std::f64::consts::PI * z.norm_sqr() / (area * inradius * inradius);
    LatticeSum {
        value: sum,
        tail,
        cutoff,
    }
}

/// `℘(z)` from the defining lattice sum at cutoffs `M = 200` and `2M + 1`,
/// Richardson-extrapolated in `(M + ½)⁻²`. The reported tail is the
/// distance between the extrapolant and the larger truncation.
pub fn lattice_sum_reference(ctx: &EllipticContext, z: Complex64) -> Result<LatticeSum, EllipticError> {
    lattice_sum_reference_at(ctx, z, 200)
}

pub(crate) fn lattice_sum_reference_at(
    ctx: &EllipticContext,
    z: Complex64,
    cutoff: usize,
) -> Result<LatticeSum, EllipticError> {
    let periods = ctx.periods().ok_or(EllipticError::NoPeriods)?;
    if ctx.distance_to_pole(z) < ctx.tolerances().pole {
        return Err(EllipticError::PoleProximity(z));
    }
    let coarse = lattice_sum_truncated(periods, z, cutoff);
    let fine = lattice_sum_truncated(periods, z, 2 * cutoff + 1);
    let h1 = (cutoff as f64 + 0.5).powi(2);
    let h2 = ((2 * cutoff + 1) as f64 + 0.5).powi(2);
    let value = (fine.value * h2 - coarse.value * h1) / (h2 - h1);
    Ok(LatticeSum {
        value,
        tail: (value - fine.value).norm(),
        cutoff: 2 * cutoff + 1,
    })
}
