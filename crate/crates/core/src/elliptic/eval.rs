use num_complex::Complex64;

use super::context::EllipticContext;
use super::{is_finite, EllipticError, JetValues, MAX_JET_ORDER};

const MAX_HALVINGS: u32 = 40;

/// `(℘, ℘′, ζ)` at one point, carried together through duplication.
#[derive(Debug, Clone, Copy)]
struct Local {
    p: Complex64,
    dp: Complex64,
    zeta: Complex64,
}

impl EllipticContext {
    /// Laurent sums on the safe disc.
    fn laurent_local(&self, u: Complex64) -> Local {
        let w = u * u;
        let c = &self.laurent;
        let mut sp = Complex64::new(0.0, 0.0);
        let mut sdp = Complex64::new(0.0, 0.0);
        let mut sz = Complex64::new(0.0, 0.0);
        for k in (2..=self.laurent_len).rev() {
            let kf = k as f64;
            sp = sp * w + c[k];
            sdp = sdp * w + c[k] * (2.0 * kf - 2.0);
            sz = sz * w + c[k] / (2.0 * kf - 1.0);
        }
        // sp = Σ c_k w^{k-2}
        let inv = u.inv();
        let inv2 = inv * inv;
        Local {
            p: inv2 + sp * w,
            dp: -inv2 * inv * 2.0 + sdp * u,
            zeta: inv - sz * w * u,
        }
    }

    /// `℘(2u), ℘′(2u), ζ(2u)` from the values at `u`.
    fn duplicate(&self, l: Local) -> Local {
        let g2 = self.invariants.g2;
        let pp = l.p * l.p * 6.0 - g2 / 2.0;
        let r = pp / l.dp;
        Local {
            p: -l.p * 2.0 + r * r / 4.0,
            dp: -l.dp + l.p * r * 3.0 - r * r * r / 4.0,
            zeta: l.zeta * 2.0 + r / 2.0,
        }
    }

    /// Series plus duplication without lattice reduction.
    fn eval_local(&self, z: Complex64) -> Result<Local, EllipticError> {
        if z.norm() < self.tol.pole {
            return Err(EllipticError::PoleProximity(z));
        }
        let mut u = z;
        let mut halvings = 0;
        while u.norm() > self.r_safe {
            u /= 2.0;
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(EllipticError::SeriesNoConverge(z));
            }
        }
        let mut l = self.laurent_local(u);
        for _ in 0..halvings {
            l = self.duplicate(l);
        }
        if is_finite(l.p) && is_finite(l.dp) && is_finite(l.zeta) {
            Ok(l)
        } else {
            Err(EllipticError::PoleProximity(z))
        }
    }

    pub(crate) fn zeta_local(&self, z: Complex64) -> Result<Complex64, EllipticError> {
        Ok(self.eval_local(z)?.zeta)
    }

    /// Nearest-lattice-point representative `z₀` and the lattice vector
    /// `λ = z − z₀` in reduced coordinates.
    fn split(&self, z: Complex64) -> (Complex64, i64, i64) {
        match self.reduced {
            Some(r) => r.nearest_representative(z),
            None => (z, 0, 0),
        }
    }

    fn check_pole(&self, z: Complex64, z0: Complex64) -> Result<(), EllipticError> {
        if z0.norm() < self.tol.pole {
            Err(EllipticError::PoleProximity(z))
        } else {
            Ok(())
        }
    }

    /// `(℘(z), ℘′(z))`.
    pub fn wp_pair(&self, z: Complex64) -> Result<(Complex64, Complex64), EllipticError> {
        let (z0, _, _) = self.split(z);
        self.check_pole(z, z0)?;
        let l = self.eval_local(z0).map_err(|e| relabel(e, z))?;
        Ok((l.p, l.dp))
    }

    /// `℘(z; g₂, g₃)`.
    pub fn wp(&self, z: Complex64) -> Result<Complex64, EllipticError> {
        Ok(self.wp_pair(z)?.0)
    }

    /// `℘′(z)`.
    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64, EllipticError> {
        Ok(self.wp_pair(z)?.1)
    }

    /// `(℘, ℘′, …, ℘⁽ᵒʳᵈᵉʳ⁾)` at `z`, the higher derivatives obtained by
    /// differentiating `℘″ = 6℘² − g₂/2`.
    pub fn jets(&self, z: Complex64, order: usize) -> Result<JetValues, EllipticError> {
        if order > MAX_JET_ORDER {
            return Err(EllipticError::JetOrder(order));
        }
        let (p, dp) = self.wp_pair(z)?;
        let g2 = self.invariants.g2;
        let d2 = p * p * 6.0 - g2 / 2.0;
        let d3 = p * dp * 12.0;
        let d4 = dp * dp * 12.0 + p * d2 * 12.0;
        let d5 = dp * d2 * 36.0 + p * d3 * 12.0;
        let all = [p, dp, d2, d3, d4, d5];
        Ok(JetValues::new(z, all[..=order].to_vec()))
    }

    fn check_validity(&self, z: Complex64) -> Result<(), EllipticError> {
        if self.periods.is_none() && z.norm() > self.validity_radius() {
            Err(EllipticError::SeriesNoConverge(z))
        } else {
            Ok(())
        }
    }

    /// `η(λ)` for `λ = m·ω₁ + n·ω₂` in the reduced basis.
    fn eta_of(&self, m: i64, n: i64) -> Complex64 {
        match self.eta {
            Some((e1, e2)) => e1 * m as f64 + e2 * n as f64,
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Weierstrass `ζ`, with `ζ′ = −℘` and `ζ(z) ~ 1/z`.
    ///
    /// With periods the quasi-periodicity `ζ(z + λ) = ζ(z) + η(λ)` moves the
    /// argument to the central cell first.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64, EllipticError> {
        self.check_validity(z)?;
        let (z0, m, n) = self.split(z);
        self.check_pole(z, z0)?;
        let l = self.eval_local(z0).map_err(|e| relabel(e, z))?;
        Ok(l.zeta + self.eta_of(m, n))
    }

    /// Plain Taylor sum `Σ b_N z^{2N+1}`, `None` if it fails to settle or
    /// cancels too heavily to trust.
    fn sigma_taylor(&self, z: Complex64) -> Option<Complex64> {
        let w = z * z;
        let mut term_pow = z;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut quiet = 0;
        for b in &self.sigma {
            let t = b * term_pow;
            sum += t;
            abs_sum += t.norm();
            if t.norm() <= 1e-3 * self.tol.series * sum.norm() {
                quiet += 1;
                if quiet >= 4 {
                    break;
                }
            } else {
                quiet = 0;
            }
            term_pow *= w;
        }
        if quiet < 4 || abs_sum > 1e4 * sum.norm() {
            None
        } else {
            Some(sum)
        }
    }

    /// `σ` near the origin: Taylor series on `|u| ≤ r_taylor`, extended by
    /// `σ(2u) = −℘′(u) σ(u)⁴`.
    fn sigma_local(&self, z: Complex64) -> Result<Complex64, EllipticError> {
        if z.norm() == 0.0 {
            return Ok(z);
        }
        let mut u = z;
        let mut halvings = 0;
        while u.norm() > self.r_taylor {
            u /= 2.0;
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(EllipticError::SeriesNoConverge(z));
            }
        }
        let mut s = self
            .sigma_taylor(u)
            .ok_or(EllipticError::SeriesNoConverge(z))?;
        if halvings > 0 {
            let mut l = self.eval_local(u).map_err(|_| EllipticError::SeriesNoConverge(z))?;
            for _ in 0..halvings {
                let s2 = s * s;
                s = -l.dp * s2 * s2;
                l = self.duplicate(l);
            }
        }
        if is_finite(s) {
            Ok(s)
        } else {
            Err(EllipticError::SeriesNoConverge(z))
        }
    }

    /// `σ(z) = mantissa · exp(exponent)`.
    ///
    /// Products and quotients of σ values can be combined in this form
    /// without overflow; with periods,
    /// `σ(z₀ + λ) = (−1)^{m+n+mn} e^{η(λ)(z₀ + λ/2)} σ(z₀)`.
    pub fn sigma_parts(&self, z: Complex64) -> Result<(Complex64, Complex64), EllipticError> {
        self.check_validity(z)?;
        // odd by construction: evaluate on one half-plane only
        if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) {
            let (m, e) = self.sigma_parts(-z)?;
            return Ok((-m, e));
        }
        let (z0, m, n) = self.split(z);
        let base = self.sigma_local(z0)?;
        if m == 0 && n == 0 {
            return Ok((base, Complex64::new(0.0, 0.0)));
        }
        let r = self.reduced.expect("lattice split implies periods");
        let lambda = r.w1 * m as f64 + r.w2 * n as f64;
        let sign = if (m + n + m * n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Ok((base * sign, self.eta_of(m, n) * (z0 + lambda / 2.0)))
    }

    /// Weierstrass `σ`: entire, odd, `σ(z) = z + O(z⁵)`, simple zeros on `Λ`.
    pub fn sigma(&self, z: Complex64) -> Result<Complex64, EllipticError> {
        let (m, e) = self.sigma_parts(z)?;
        let v = m * e.exp();
        if is_finite(v) {
            Ok(v)
        } else {
            Err(EllipticError::SeriesNoConverge(z))
        }
    }
}

fn relabel(e: EllipticError, z: Complex64) -> EllipticError {
    match e {
        EllipticError::PoleProximity(_) => EllipticError::PoleProximity(z),
        EllipticError::SeriesNoConverge(_) => EllipticError::SeriesNoConverge(z),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn rational_case_is_exact() {
        let ctx = EllipticContext::from_invariants(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(ctx.wp(c(0.5, 0.0)).unwrap(), c(4.0, 0.0));
        assert_eq!(ctx.wp_prime(c(0.5, 0.0)).unwrap(), c(-16.0, 0.0));
        let j = ctx.jets(c(1.0, 0.0), 5).unwrap();
        let want = [1.0, -2.0, 6.0, -24.0, 120.0, -720.0];
        for (v, w) in j.values.iter().zip(want) {
            assert_eq!(*v, c(w, 0.0));
        }
        assert_eq!(ctx.jets(c(1.0, 0.0), 2).unwrap().values.len(), 3);
        assert_eq!(ctx.sigma(c(0.7, 0.2)).unwrap(), c(0.7, 0.2));
    }

    #[test]
    fn jets_order_limit() {
        let ctx = EllipticContext::from_invariants(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(ctx.jets(c(0.3, 0.0), 6), Err(EllipticError::JetOrder(6)));
    }

    #[test]
    fn pole_is_rejected() {
        let ctx = EllipticContext::from_periods(c(2.0, 0.0), c(0.0, 2.0)).unwrap();
        assert!(matches!(ctx.wp(c(2.0, 2.0)), Err(EllipticError::PoleProximity(_))));
        assert!(matches!(ctx.zeta(c(0.0, 0.0)), Err(EllipticError::PoleProximity(_))));
    }

    #[test]
    fn differential_equation_holds() {
        let ctx = EllipticContext::from_invariants(c(4.0, 0.0), c(0.0, 0.0));
        let z = c(0.3, 0.0);
        let (p, dp) = ctx.wp_pair(z).unwrap();
        let rhs = p * p * p * 4.0 - p * 4.0;
        assert!(rel(dp * dp, rhs) < 1e-9);
    }

    #[test]
    fn duplication_agrees_with_direct_series() {
        let ctx = EllipticContext::from_invariants(c(1.3, 0.2), c(-0.4, 0.1));
        let u = c(0.2, 0.15);
        let direct = ctx.laurent_local(u * 2.0);
        let dup = ctx.duplicate(ctx.laurent_local(u));
        assert!(rel(dup.p, direct.p) < 1e-13);
        assert!(rel(dup.dp, direct.dp) < 1e-12);
        assert!(rel(dup.zeta, direct.zeta) < 1e-13);
    }

    #[test]
    fn legendre_relation() {
        for (w1, w2) in [(c(2.0, 0.0), c(0.0, 2.0)), (c(1.0, 0.3), c(-0.4, 1.6))] {
            let ctx = EllipticContext::from_periods(w1, w2).unwrap();
            let r = ctx.reduced_periods().unwrap();
            let (e1, e2) = ctx.quasi_periods().unwrap();
            let lhs = e1 * r.w2 - e2 * r.w1;
            assert!((lhs - c(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-10, "{lhs}");
        }
    }

    #[test]
    fn sigma_quasi_periodic_matches_taylor() {
        let ctx = EllipticContext::from_periods(c(2.0, 0.0), c(0.5, 1.8)).unwrap();
        // a point just past the Voronoi boundary, where the plain Taylor sum
        // is still accurate
        let z = c(1.15, 0.2);
        let direct = ctx.sigma_taylor(z).unwrap();
        assert!(rel(ctx.sigma(z).unwrap(), direct) < 1e-11);
    }
}
