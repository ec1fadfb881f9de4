//! Fits the necessary ODE `w′² = p₃w³ + p₂w² + p₁w + p₀` (or its linear
//! branch `w′ = l₁w + l₀`) to samples and decides the solution family.

mod decide;
mod fit;
mod samples;

pub use decide::{classify, classify_samples, reconstruct, Classification, Evidence, Family, Thresholds, MIN_SAMPLES};
pub use fit::{fit_cubic, fit_linear, from_normal_form, to_normal_form, FitResult, Model, NormalForm, MAX_CONDITION};
pub use samples::{derivative_error_estimate, estimate_jets, SampleSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("too few points: got {got}, need at least {need}")]
    TooFewPoints { got: usize, need: usize },
    #[error("sample abscissae do not form a uniform grid")]
    GridNotUniform,
    #[error("duplicate sample abscissa")]
    DuplicateAbscissa,
    #[error("non-finite sample value")]
    NonFinite,
    #[error("ill-conditioned fit (condition {condition:e})")]
    IllConditionedFit { condition: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("cubic coefficient is zero; no normal form")]
    DegenerateCubic,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("csv: {0}")]
    Csv(String),
}
