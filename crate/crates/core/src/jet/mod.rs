//! Exact differential polynomials in jet variables and the symbolic
//! identities behind the characterisation proof.
//!
//! `fᵢ` stands for `f⁽ⁱ⁾(x)` and `gᵢ` for `g⁽ⁱ⁾(y)`. All coefficients are
//! exact rationals, so an identity either holds or it does not.

mod eta;
mod identities;
mod poly;
mod ratfun;

pub use eta::{eta_expansion_check, eta_expansion_check_against, EtaSeries};
pub use identities::{
    build_abc, build_addet, det3_poly, eqf_check, eqf_check_against, eqf_product, factor_rewrite_check,
    factor_rewrite_check_with, factorization_check, factorization_check_against, ode_elimination_check,
    ode_elimination_check_with, run_all, t1_poly, t2_poly, CofactorReport, Identity,
};
pub use poly::{DiffPolynomial, Direction, Monomial, Var, MAX_ORDER};
pub use ratfun::RationalFunction;

/// Errors from the jet engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JetError {
    #[error("derivative of {0} exceeds the supported jet order {max}", max = MAX_ORDER)]
    JetOrderOverflow(Var),
    #[error("no value supplied for {0}")]
    MissingJet(Var),
    #[error("truncation order {0} is below the minimum of 5")]
    TruncationTooLow(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
