//! Weierstrass elliptic functions over the complex plane.
//!
//! An [`EllipticContext`] is built either from a pair of periods (the lattice
//! `Λ = {m·ω₁ + n·ω₂}`) or directly from the invariants `g₂, g₃`. Evaluation
//! of `℘` and `℘′` runs the Laurent series inside a disc where its tail is
//! negligible and extends it with the duplication formula; with periods
//! available the argument is first moved to the nearest-lattice-point
//! representative, so every evaluation stays inside the well-conditioned
//! region. `σ` and `ζ` reuse the same machinery plus their quasi-periods.

mod context;
mod eval;
mod lattice;
mod reference;
mod series;

pub use context::{Degeneracy, EllipticContext, Invariants, ToleranceSet};
pub use lattice::Periods;
pub use reference::{lattice_sum_reference, lattice_sum_truncated, LatticeSum};
pub use series::{laurent_coefficients, sigma_coefficients};

use num_complex::Complex64;
use thiserror::Error;

/// Highest derivative order carried by a [`JetValues`].
pub const MAX_JET_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    #[error("degenerate lattice: Im(w2/w1) = {0:e} is zero within tolerance")]
    DegenerateLattice(f64),
    #[error("argument {0} is within the pole tolerance of a lattice point")]
    PoleProximity(Complex64),
    #[error("series evaluation did not converge at {0}")]
    SeriesNoConverge(Complex64),
    #[error("operation requires lattice periods, but the context was built from invariants")]
    NoPeriods,
    #[error("jet order {0} exceeds the supported maximum of 5")]
    JetOrder(usize),
}

/// The values `(f, f′, …, f⁽ᵒʳᵈᵉʳ⁾)` of a function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct JetValues {
    pub order: usize,
    pub values: Vec<Complex64>,
    pub at: Complex64,
}

impl JetValues {
    pub fn new(at: Complex64, values: Vec<Complex64>) -> Self {
        assert!(!values.is_empty(), "a jet holds at least the value");
        JetValues {
            order: values.len() - 1,
            values,
            at,
        }
    }

    /// `i`-th derivative, if carried.
    pub fn get(&self, i: usize) -> Option<Complex64> {
        self.values.get(i).copied()
    }

    pub fn value(&self) -> Complex64 {
        self.values[0]
    }

    pub fn derivative(&self) -> Complex64 {
        self.values[1]
    }

    /// Jets of `α·f + β`.
    pub fn affine(&self, alpha: Complex64, beta: Complex64) -> JetValues {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 0 { alpha * v + beta } else { alpha * v })
            .collect();
        JetValues {
            order: self.order,
            values,
            at: self.at,
        }
    }
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
