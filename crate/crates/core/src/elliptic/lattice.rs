use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EllipticError;

/// Generators of the period lattice `Λ = {m·ω₁ + n·ω₂ : m, n ∈ ℤ}`.
///
/// Stored with `Im(ω₂/ω₁) > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Periods {
    pub w1: Complex64,
    pub w2: Complex64,
}

impl Periods {
    /// Validates the pair and swaps it if needed so that `Im(ω₂/ω₁) > 0`.
    pub fn new(w1: Complex64, w2: Complex64, eps_lattice: f64) -> Result<Self, EllipticError> {
        if w1.norm() == 0.0 || w2.norm() == 0.0 {
            return Err(EllipticError::DegenerateLattice(0.0));
        }
        let tau = w2 / w1;
        if !tau.im.is_finite() || tau.im.abs() <= eps_lattice * tau.norm().max(1.0) {
            return Err(EllipticError::DegenerateLattice(tau.im));
        }
        if tau.im > 0.0 {
            Ok(Periods { w1, w2 })
        } else {
            Ok(Periods { w1: w2, w2: w1 })
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.w2 / self.w1
    }

    /// Area of the fundamental parallelogram.
    pub fn cell_area(&self) -> f64 {
        (self.w1.conj() * self.w2).im.abs()
    }

    pub fn point(&self, s: f64, t: f64) -> Complex64 {
        self.w1 * s + self.w2 * t
    }

    /// Real lattice coordinates `(s, t)` with `z = s·ω₁ + t·ω₂`.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let det = self.w1.re * self.w2.im - self.w2.re * self.w1.im;
        let s = (z.re * self.w2.im - self.w2.re * z.im) / det;
        let t = (self.w1.re * z.im - z.re * self.w1.im) / det;
        (s, t)
    }

    /// Lagrange–Gauss reduced basis of the same lattice: `|ω₁|` is the
    /// shortest nonzero lattice vector and `τ` lies in the standard
    /// fundamental domain, so `Im τ ≥ √3/2`.
    pub fn reduced(&self) -> Periods {
        let (mut a, mut b) = (self.w1, self.w2);
        if b.norm_sqr() < a.norm_sqr() {
            std::mem::swap(&mut a, &mut b);
        }
        for _ in 0..200 {
            let mu = ((a.conj() * b).re / a.norm_sqr()).round();
            b -= a * mu;
            if b.norm_sqr() < a.norm_sqr() {
                std::mem::swap(&mut a, &mut b);
            } else {
                break;
            }
        }
        if (b / a).im < 0.0 {
            b = -b;
        }
        Periods { w1: a, w2: b }
    }

    /// Splits `z = z₀ + m·ω₁ + n·ω₂` with `z₀` the representative closest to
    /// the origin. Call on a reduced basis; the 3×3 neighbourhood search is
    /// exact there.
    pub fn nearest_representative(&self, z: Complex64) -> (Complex64, i64, i64) {
        let (s, t) = self.coordinates(z);
        let (m0, n0) = (s.round(), t.round());
        let mut best = (z - self.point(m0, n0), m0 as i64, n0 as i64);
        for dm in -1..=1 {
            for dn in -1..=1 {
                let (m, n) = (m0 + dm as f64, n0 + dn as f64);
                let cand = z - self.point(m, n);
                if cand.norm_sqr() < best.0.norm_sqr() {
                    best = (cand, m as i64, n as i64);
                }
            }
        }
        best
    }

    /// Distance from `z` to the nearest lattice point (reduced basis).
    pub fn distance_to_lattice(&self, z: Complex64) -> f64 {
        self.nearest_representative(z).0.norm()
    }

    /// Radius of the Voronoi cell around the origin (reduced basis).
    pub fn circumradius(&self) -> f64 {
        let mut r: f64 = 0.0;
        // Voronoi vertices are circumcentres of triangles of neighbouring
        // lattice points; probing the corner midpoints of the cell is enough
        // to bound the farthest point from above.
        for &(s, t) in &[(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)] {
            let p = self.point(s, t);
            r = r.max(self.nearest_representative(p).0.norm());
        }
        for &(s, t) in &[(0.5, 0.0), (0.0, 0.5)] {
            r = r.max(self.point(s, t).norm());
        }
        // Circumcentre of (0, ω₁, ω₂) and (0, ω₁, ω₁ - ω₂) style triangles.
        for &(a, b) in &[
            (self.w1, self.w2),
            (self.w1, self.w2 - self.w1),
            (self.w1, self.w1 - self.w2),
            (self.w2, self.w2 + self.w1),
        ] {
            if let Some(c) = circumcentre(a, b) {
                r = r.max(self.nearest_representative(c).0.norm());
            }
        }
        r
    }
}

/// Circumcentre of the triangle `(0, a, b)`.
fn circumcentre(a: Complex64, b: Complex64) -> Option<Complex64> {
    let d = 2.0 * (a.re * b.im - a.im * b.re);
    if d == 0.0 {
        return None;
    }
    let (a2, b2) = (a.norm_sqr(), b.norm_sqr());
    Some(Complex64::new(
        (b.im * a2 - a.im * b2) / d,
        (a.re * b2 - b.re * a2) / d,
    ))
}

fn divisor_power_sum(n: u64, p: i32) -> f64 {
    let mut s = 0.0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += (d as f64).powi(p);
            let e = n / d;
            if e != d {
                s += (e as f64).powi(p);
            }
        }
        d += 1;
    }
    s
}

/// `(G₄, G₆) = (Σ′ λ⁻⁴, Σ′ λ⁻⁶)` through the `E₄`, `E₆` q-expansions.
/// Expects a reduced basis so that `|q| ≤ e^{-π√3}`.
pub(crate) fn eisenstein_sums(reduced: &Periods) -> (Complex64, Complex64) {
    let tau = reduced.tau();
    let q = (Complex64::i() * 2.0 * PI * tau).exp();
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..200u64 {
        qn *= q;
        let t4 = qn * (240.0 * divisor_power_sum(n, 3));
        let t6 = qn * (504.0 * divisor_power_sum(n, 5));
        e4 += t4;
        e6 -= t6;
        if t6.norm() < 1e-18 && t4.norm() < 1e-18 {
            break;
        }
    }
    let w1 = reduced.w1;
    let g4 = e4 * (PI.powi(4) / 45.0) / w1.powi(4);
    let g6 = e6 * (2.0 * PI.powi(6) / 945.0) / w1.powi(6);
    (g4, g6)
}
