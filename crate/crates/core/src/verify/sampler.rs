use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::{EllipticContext, Periods};

/// Where sample points are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleDomain {
    /// `s·ω₁ + t·ω₂` with `s, t ∈ [margin, 1 − margin]`.
    Cell(Periods),
    /// Uniform in the disc of the given radius.
    Disc(f64),
    /// Uniform in the square `|Re|, |Im| ≤ half-width`.
    Box(f64),
}

/// Deterministic source of triples `(x, y, z)`.
///
/// Attempt `i` uses its own ChaCha stream, so the accepted set does not
/// depend on evaluation order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleSampler {
    pub seed: u64,
    pub count: usize,
    pub margin: f64,
    pub pole_exclusion: f64,
    pub domain: SampleDomain,
    /// `z = −x − y` when set, otherwise `z` is drawn independently.
    pub constrained: bool,
}

/// Attempts allowed per requested sample before giving up.
pub const MAX_ATTEMPTS_PER_SAMPLE: usize = 100;

impl TripleSampler {
    /// Constrained triples in the fundamental cell of `ctx`, or in a disc
    /// well inside the pole radius for invariant-only contexts.
    pub fn for_context(ctx: &EllipticContext, seed: u64, count: usize) -> Self {
        let (domain, scale) = match ctx.periods() {
            Some(p) => (SampleDomain::Cell(*p), p.w1.norm().min(p.w2.norm())),
            None => {
                let rho = ctx.pole_radius();
                let r = if rho.is_finite() { 0.3 * rho } else { 1.0 };
                (SampleDomain::Disc(r), r)
            }
        };
        TripleSampler {
            seed,
            count,
            margin: 0.05,
            pole_exclusion: 5e-2 * scale,
            domain,
            constrained: true,
        }
    }

    /// Independent `x, y, z` in `|Re|, |Im| ≤ half_width`.
    pub fn unconstrained(seed: u64, count: usize, half_width: f64) -> Self {
        TripleSampler {
            seed,
            count,
            margin: 0.0,
            pole_exclusion: 0.0,
            domain: SampleDomain::Box(half_width),
            constrained: false,
        }
    }

    pub fn with_pole_exclusion(mut self, r: f64) -> Self {
        self.pole_exclusion = r;
        self
    }

    pub fn with_constraint(mut self, constrained: bool) -> Self {
        self.constrained = constrained;
        self
    }

    pub fn max_attempts(&self) -> usize {
        self.count.saturating_mul(MAX_ATTEMPTS_PER_SAMPLE)
    }

    fn point(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        match self.domain {
            SampleDomain::Cell(p) => {
                let lo = self.margin;
                let hi = 1.0 - self.margin;
                let s = rng.random_range(lo..=hi);
                let t = rng.random_range(lo..=hi);
                p.point(s, t)
            }
            SampleDomain::Disc(r) => {
                let rad = r * rng.random::<f64>().sqrt();
                let th = rng.random_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(rad, th)
            }
            SampleDomain::Box(w) => Complex64::new(rng.random_range(-w..=w), rng.random_range(-w..=w)),
        }
    }

    /// Candidate triple for attempt `index`.
    pub fn triple(&self, index: u64) -> [Complex64; 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let x = self.point(&mut rng);
        let y = self.point(&mut rng);
        let z = if self.constrained { -x - y } else { self.point(&mut rng) };
        [x, y, z]
    }

    /// `true` if two of the points coincide within the exclusion radius
    /// (modulo the lattice for cell sampling), which would make two
    /// determinant columns equal.
    pub fn is_degenerate(&self, t: &[Complex64; 3]) -> bool {
        let dist = |a: Complex64| match self.domain {
            SampleDomain::Cell(p) => p.reduced().distance_to_lattice(a),
            _ => a.norm(),
        };
        let r = self.pole_exclusion.max(1e-12);
        dist(t[0] - t[1]) < r || dist(t[1] - t[2]) < r || dist(t[2] - t[0]) < r
    }
}
