//! Numerical checks of the determinant functional equation and its
//! consequences on sampled triples `x + y + z = 0`.

mod checks;
mod family;
mod residual;
mod sampler;

pub use checks::{c1_check, c_function_check, constant_case_check, factfun_check, factfun_operator};
pub use family::{family_jets, FunctionFamily};
pub use residual::{
    det3, derived_determinant_check, lattice_expectation, lemma2_check, residual, residual_at, row_scale, scan,
    scan_samples, scan_with, sigma_prediction_check, sigma_quotient, theorem2_shift_test, Expectation,
    ResidualReport, SampleResidual, ShiftTestReport,
};
pub use sampler::{SampleDomain, TripleSampler, MAX_ATTEMPTS_PER_SAMPLE};

use num_complex::Complex64;

use crate::elliptic::EllipticError;
use crate::jet::JetError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sampler exhausted: {accepted} admissible triples after {attempts} attempts")]
    SamplerExhausted { accepted: usize, attempts: usize },
    #[error("probe {0} gives f(x) = g(y)")]
    DegenerateProbe(Complex64),
}
