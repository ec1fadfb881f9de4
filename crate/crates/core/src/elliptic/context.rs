use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lattice::{eisenstein_sums, Periods};
use super::series::{laurent_coefficients, sigma_coefficients};
use super::EllipticError;

/// Number of Laurent coefficients carried (`c₂ … c₆₀`).
pub(crate) const LAURENT_TERMS: usize = 60;
/// Number of σ Taylor coefficients carried (`b₀ … b₁₂₀`).
pub(crate) const SIGMA_TERMS: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSet {
    /// Evaluations closer than this to a lattice point are rejected.
    pub pole: f64,
    /// Target truncation error of every series.
    pub series: f64,
    /// Lattice coordinates within this of an integer count as lattice points.
    pub lattice: f64,
    /// Relative discriminant threshold for the degeneracy tag.
    pub disc: f64,
}

impl ToleranceSet {
    pub fn with_scale(scale: f64) -> Self {
        ToleranceSet {
            pole: 1e-8 * scale,
            series: 1e-12,
            lattice: 1e-9,
            disc: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    Generic,
    /// `Δ = 0` with `(g₂, g₃) ≠ (0, 0)`: trigonometric degeneration.
    SemiDegenerate,
    /// `g₂ = g₃ = 0`: `℘(z) = 1/z²`.
    FullyDegenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub g2: Complex64,
    pub g3: Complex64,
    pub discriminant: Complex64,
    pub degeneracy: Degeneracy,
}

impl Invariants {
    pub fn new(g2: Complex64, g3: Complex64, eps_disc: f64) -> Self {
        let discriminant = g2 * g2 * g2 - g3 * g3 * 27.0;
        let size = g2.norm().powi(3).max(27.0 * g3.norm_sqr());
        let degeneracy = if g2.norm() == 0.0 && g3.norm() == 0.0 {
            Degeneracy::FullyDegenerate
        } else if discriminant.norm() <= eps_disc * size {
            Degeneracy::SemiDegenerate
        } else {
            Degeneracy::Generic
        };
        Invariants {
            g2,
            g3,
            discriminant,
            degeneracy,
        }
    }
}

/// Everything needed to evaluate `℘`, `℘′`, `σ`, `ζ` for one lattice.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct EllipticContext {
    pub(crate) invariants: Invariants,
    pub(crate) periods: Option<Periods>,
    pub(crate) reduced: Option<Periods>,
    pub(crate) laurent: Vec<Complex64>,
    pub(crate) sigma: Vec<Complex64>,
    pub(crate) tol: ToleranceSet,
    /// Distance from the origin to the nearest other pole (estimated when
    /// only invariants are known; infinite in the rational case).
    pub(crate) pole_radius: f64,
    /// Radius inside which the truncated Laurent series is used directly.
    pub(crate) r_safe: f64,
    /// Number of Laurent coefficients used on the safe disc.
    pub(crate) laurent_len: usize,
    /// Radius inside which the σ Taylor series is used directly.
    pub(crate) r_taylor: f64,
    /// Quasi-periods `η(ω) = 2ζ(ω/2)` of the reduced basis.
    pub(crate) eta: Option<(Complex64, Complex64)>,
}

impl EllipticContext {
    /// Context for the lattice generated by `ω₁, ω₂`; the invariants are
    /// `g₂ = 60 Σ′ λ⁻⁴`, `g₃ = 140 Σ′ λ⁻⁶`.
    pub fn from_periods(w1: Complex64, w2: Complex64) -> Result<Self, EllipticError> {
        let scale = w1.norm().min(w2.norm());
        Self::from_periods_with(w1, w2, ToleranceSet::with_scale(scale))
    }

    pub fn from_periods_with(
        w1: Complex64,
        w2: Complex64,
        tol: ToleranceSet,
    ) -> Result<Self, EllipticError> {
        let periods = Periods::new(w1, w2, tol.lattice)?;
        let reduced = periods.reduced();
        let (g4, g6) = eisenstein_sums(&reduced);
        let invariants = Invariants::new(g4 * 60.0, g6 * 140.0, tol.disc);
        let mut ctx = Self::assemble(invariants, Some(periods), Some(reduced), tol);
        let eta1 = ctx.zeta_local(reduced.w1 / 2.0)? * 2.0;
        let eta2 = ctx.zeta_local(reduced.w2 / 2.0)? * 2.0;
        ctx.eta = Some((eta1, eta2));
        Ok(ctx)
    }

    /// Context known only through its invariants. Lattice queries are not
    /// available; `℘` is evaluated near the origin by series and duplication.
    pub fn from_invariants(g2: Complex64, g3: Complex64) -> Self {
        let probe = Invariants::new(g2, g3, 1e-12);
        let rho = estimate_pole_radius(&laurent_coefficients(g2, g3, LAURENT_TERMS));
        let tol = ToleranceSet::with_scale(rho.min(1.0));
        Self::assemble(probe, None, None, tol)
    }

    pub fn from_invariants_with(g2: Complex64, g3: Complex64, tol: ToleranceSet) -> Self {
        Self::assemble(Invariants::new(g2, g3, tol.disc), None, None, tol)
    }

    fn assemble(
        invariants: Invariants,
        periods: Option<Periods>,
        reduced: Option<Periods>,
        tol: ToleranceSet,
    ) -> Self {
        let laurent = laurent_coefficients(invariants.g2, invariants.g3, LAURENT_TERMS);
        let sigma = sigma_coefficients(invariants.g2, invariants.g3, SIGMA_TERMS);
        let pole_radius = match reduced {
            Some(r) => r.w1.norm(),
            None => estimate_pole_radius(&laurent),
        };
        let (r_safe, laurent_len) = safe_radius(&laurent, pole_radius, tol.series);
        let r_taylor = if pole_radius.is_finite() {
            pole_radius
        } else {
            f64::INFINITY
        };
        EllipticContext {
            invariants,
            periods,
            reduced,
            laurent,
            sigma,
            tol,
            pole_radius,
            r_safe,
            laurent_len,
            r_taylor,
            eta: None,
        }
    }

    pub fn invariants(&self) -> &Invariants {
        &self.invariants
    }

    pub fn g2(&self) -> Complex64 {
        self.invariants.g2
    }

    pub fn g3(&self) -> Complex64 {
        self.invariants.g3
    }

    pub fn periods(&self) -> Option<&Periods> {
        self.periods.as_ref()
    }

    /// Lagrange–Gauss reduced basis of the lattice, when periods are known.
    pub fn reduced_periods(&self) -> Option<&Periods> {
        self.reduced.as_ref()
    }

    pub fn tolerances(&self) -> &ToleranceSet {
        &self.tol
    }

    /// Laurent coefficients `c_k` (index = `k`).
    pub fn laurent_coeffs(&self) -> &[Complex64] {
        &self.laurent
    }

    /// σ Taylor coefficients `b_N` of `z^{2N+1}`.
    pub fn sigma_coeffs(&self) -> &[Complex64] {
        &self.sigma
    }

    /// Distance from the origin to the nearest other pole (exact with
    /// periods, a coefficient-growth estimate otherwise).
    pub fn pole_radius(&self) -> f64 {
        self.pole_radius
    }

    pub fn safe_radius(&self) -> f64 {
        self.r_safe
    }

    /// Quasi-periods `(η₁, η₂)` of the reduced basis.
    pub fn quasi_periods(&self) -> Option<(Complex64, Complex64)> {
        self.eta
    }

    /// Radius of the disc on which `σ` and `ζ` are accepted in an
    /// invariant-only context.
    pub fn validity_radius(&self) -> f64 {
        if self.periods.is_some() {
            f64::INFINITY
        } else {
            1.25 * std::f64::consts::SQRT_2 * self.pole_radius
        }
    }

    /// Same context with the invariants of `Λ/t`, i.e. the one satisfying
    /// `℘(z; ctx') = t²℘(tz; ctx)`.
    pub fn rescaled(&self, t: Complex64) -> Result<Self, EllipticError> {
        match self.periods {
            Some(p) => Self::from_periods(p.w1 / t, p.w2 / t),
            None => Ok(Self::from_invariants(
                self.g2() * t.powi(4),
                self.g3() * t.powi(6),
            )),
        }
    }

    /// Lattice coordinates `(s, t)` of `z` in the stored periods.
    pub fn lattice_coordinates(&self, z: Complex64) -> Result<(f64, f64), EllipticError> {
        Ok(self.periods.ok_or(EllipticError::NoPeriods)?.coordinates(z))
    }

    /// `z′ ≡ z (mod Λ)` with `z′ = s·ω₁ + t·ω₂`, `s, t ∈ [0, 1)`.
    pub fn reduce_to_cell(&self, z: Complex64) -> Result<Complex64, EllipticError> {
        let p = self.periods.ok_or(EllipticError::NoPeriods)?;
        let (s, t) = p.coordinates(z);
        let frac = |x: f64| {
            let r = x.round();
            if (x - r).abs() <= self.tol.lattice {
                0.0
            } else {
                x - x.floor()
            }
        };
        let m = (s - frac(s)).round();
        let n = (t - frac(t)).round();
        Ok(z - p.point(m, n))
    }

    pub fn is_lattice_point(&self, z: Complex64) -> Result<bool, EllipticError> {
        let p = self.periods.ok_or(EllipticError::NoPeriods)?;
        let (s, t) = p.coordinates(z);
        Ok((s - s.round()).abs() <= self.tol.lattice && (t - t.round()).abs() <= self.tol.lattice)
    }

    /// Distance from `z` to `Λ` (with periods) or to the origin.
    pub fn distance_to_pole(&self, z: Complex64) -> f64 {
        match self.reduced {
            Some(r) => r.distance_to_lattice(z),
            None => z.norm(),
        }
    }
}

/// `ρ ≈ min |c_k|^{-1/(2k)}` over the high end of the coefficient list.
/// `c_k ≈ (2k−1) Σ′ λ^{-2k}` there, so this slightly underestimates the
/// distance to the nearest nonzero pole.
fn estimate_pole_radius(c: &[Complex64]) -> f64 {
    let kmax = c.len() - 1;
    let mut rho = f64::INFINITY;
    for (k, ck) in c.iter().enumerate().skip(kmax.saturating_sub(12).max(2)) {
        let a = ck.norm();
        if a > 0.0 && a.is_finite() {
            rho = rho.min(a.powf(-1.0 / (2.0 * k as f64)));
        }
    }
    rho
}

/// Largest radius `r ≤ 0.7ρ` on which the Laurent tail `|c_k| r^{2k}` has
/// dropped below `eps` by the last carried coefficient, together with the
/// number of coefficients worth summing there.
fn safe_radius(c: &[Complex64], rho: f64, eps: f64) -> (f64, usize) {
    let kmax = c.len() - 1;
    if !rho.is_finite() {
        return (f64::INFINITY, 2);
    }
    let mut r = 0.7 * rho;
    loop {
        let tail = (kmax - 4..=kmax)
            .map(|k| c[k].norm() * r.powi(2 * k as i32))
            .fold(0.0, f64::max);
        if tail < eps * 1e-3 || r < 1e-3 * rho {
            break;
        }
        r *= 0.9;
    }
    let mut len = kmax;
    while len > 2 && c[len].norm() * r.powi(2 * len as i32) < eps * 1e-6 {
        len -= 1;
    }
    (r, len)
}
