use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Weierstrass functional-equation toolkit.
///
/// Complex values are written `re,im` (or just `re`). Periods take four
/// reals: ω₁ then ω₂. Options marked with an environment variable are
/// resolved as flag > environment > default.
///
/// Exit codes: 0 success or expected outcome, 1 verification failure,
/// 2 internal error, 64 usage, 65 configuration, 66 input.
#[derive(Debug, Parser)]
#[command(name = "wpfeq", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify the exact jet-polynomial identities.
    Symbolic(SymbolicArgs),
    /// Numerical verification of the functional equation and its consequences.
    Verify(VerifyArgs),
    /// Classify samples read from CSV.
    Fit(FitArgs),
    /// Per-triple residual grid for plotting.
    Scan(ScanArgs),
    /// Generate samples of a solution family.
    Gen(GenArgs),
    /// Point evaluation of ℘, ℘′, ζ and σ.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// JSON report destination (stdout if absent).
    #[arg(long, env = "WPFEQ_OUT")]
    pub out: Option<PathBuf>,
    /// Seed of the triple sampler.
    #[arg(long, env = "WPFEQ_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LatticeArgs {
    /// Generators ω₁, ω₂ as four reals.
    #[arg(long, env = "WPFEQ_PERIODS", allow_hyphen_values = true, conflicts_with_all = ["g2", "g3"])]
    pub periods: Option<String>,
    /// Invariant g₂ (used with --g3 instead of --periods).
    #[arg(long, env = "WPFEQ_G2", allow_hyphen_values = true)]
    pub g2: Option<String>,
    /// Invariant g₃.
    #[arg(long, env = "WPFEQ_G3", allow_hyphen_values = true)]
    pub g3: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    All,
    Factorization,
    Rewrites,
    Eqf,
    Coefficients,
    Eta,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SymbolicArgs {
    /// Identities to certify (comma separated).
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub which: Vec<Which>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyKind {
    /// f = g = h = ℘(·+d).
    Theorem1,
    /// f, g, h = ℘(·+γ₁), ℘(·+γ₂), ℘(·+γ₃).
    Theorem2,
    /// Determinant against the σ quotient on unconstrained triples.
    Sigma,
    /// Differentiated determinants on jets of ℘(·+d).
    Derived,
    /// Finite-difference ground-state operator check.
    Factfun,
    /// Two-function reduction when one function is constant.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
    /// Decide from lattice membership or the family parameters.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FactfunFamily {
    Wp,
    Exp,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub kind: VerifyKind,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Shift d as a complex value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "shift_frac")]
    pub shift: Option<String>,
    /// Shift d in lattice coordinates: d = s·ω₁ + t·ω₂ (s, t may be fractions like 1/3).
    #[arg(long, allow_hyphen_values = true)]
    pub shift_frac: Option<String>,
    /// Shifts γ₁, γ₂, γ₃ as six reals (theorem2).
    #[arg(long, allow_hyphen_values = true)]
    pub gammas: Option<String>,
    /// Number of sampled triples.
    #[arg(long, env = "WPFEQ_N")]
    pub n: Option<usize>,
    /// Tolerance on the maximum relative residual.
    #[arg(long, env = "WPFEQ_TOL")]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub expect: Expect,
    /// Columns k,l,s of the derived determinant.
    #[arg(long, default_value = "1,2,3")]
    pub kls: String,
    /// Family for the factfun check.
    #[arg(long, value_enum, default_value = "wp")]
    pub family: FactfunFamily,
    /// Finite-difference step for factfun.
    #[arg(long)]
    pub h: Option<f64>,
    /// Rate of f = e^{δx} (constant).
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub delta_f: String,
    /// Rate of g = e^{δy} (constant).
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub delta_g: String,
    /// Use f = 0 (constant).
    #[arg(long)]
    pub zero_f: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Weierstrass,
    Exponential,
    Linear,
    Constant,
    /// Any family except not_a_solution.
    Any,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Sample CSV (`-` for stdin).
    pub input: PathBuf,
    /// Exit 1 unless the samples classify as this family.
    #[arg(long, value_enum)]
    pub expect: Option<FamilyTag>,
    /// Central-difference order (2, 4, or 6 = Richardson-refined 4).
    #[arg(long, default_value_t = 6)]
    pub stencil: usize,
    /// Misfit threshold for both ODE fits.
    #[arg(long, env = "WPFEQ_TOL")]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "shift_frac")]
    pub shift: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub shift_frac: Option<String>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// Residual CSV destination (`-` for stdout).
    #[arg(long, default_value = "-")]
    pub csv: PathBuf,
    #[arg(long, env = "WPFEQ_TOL", default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GenFamily {
    Wp,
    Exp,
    Linear,
    Constant,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: GenFamily,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub beta: String,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub delta: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub shift: String,
    /// Real sample grid start:end:step (inclusive).
    #[arg(long, allow_hyphen_values = true, default_value = "0.2:1.2:0.01")]
    pub grid: String,
    /// Imaginary part added to every abscissa.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub grid_im: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Evaluation point.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    /// Highest ℘ derivative to report.
    #[arg(long, default_value_t = 1)]
    pub order: usize,
    #[command(flatten)]
    pub common: Common,
}
