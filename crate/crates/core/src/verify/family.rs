use std::sync::Arc;

use num_complex::Complex64;

use super::VerifyError;
use crate::elliptic::{EllipticContext, JetValues, MAX_JET_ORDER};

/// A closed-form candidate solution.
#[derive(Debug, Clone)]
pub enum FunctionFamily {
    /// `α·℘(x + shift) + β`.
    WeierstrassShifted {
        ctx: Arc<EllipticContext>,
        shift: Complex64,
        alpha: Complex64,
        beta: Complex64,
    },
    /// `α·e^{δx} + β`, `δ ≠ 0`.
    Exponential {
        alpha: Complex64,
        beta: Complex64,
        delta: Complex64,
    },
    /// `α·x + β`, `α ≠ 0`.
    Linear { alpha: Complex64, beta: Complex64 },
    Constant { c: Complex64 },
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl FunctionFamily {
    pub fn wp(ctx: Arc<EllipticContext>, shift: Complex64) -> Self {
        FunctionFamily::WeierstrassShifted {
            ctx,
            shift,
            alpha: one(),
            beta: zero(),
        }
    }

    pub fn exponential(alpha: Complex64, beta: Complex64, delta: Complex64) -> Result<Self, VerifyError> {
        if delta == zero() {
            return Err(VerifyError::InvalidFamily("exponential rate must be nonzero".into()));
        }
        Ok(FunctionFamily::Exponential { alpha, beta, delta })
    }

    pub fn linear(alpha: Complex64, beta: Complex64) -> Result<Self, VerifyError> {
        if alpha == zero() {
            return Err(VerifyError::InvalidFamily("linear slope must be nonzero".into()));
        }
        Ok(FunctionFamily::Linear { alpha, beta })
    }

    pub fn constant(c: Complex64) -> Self {
        FunctionFamily::Constant { c }
    }

    /// `x ↦ α·f(δx + γ) + β`.
    pub fn transform(
        &self,
        alpha: Complex64,
        beta: Complex64,
        delta: Complex64,
        gamma: Complex64,
    ) -> Result<Self, VerifyError> {
        if alpha == zero() || delta == zero() {
            return Err(VerifyError::InvalidFamily("transform needs α ≠ 0 and δ ≠ 0".into()));
        }
        Ok(match self {
            FunctionFamily::WeierstrassShifted {
                ctx,
                shift,
                alpha: a0,
                beta: b0,
            } => {
                // ℘(δx + s; Λ) = δ⁻² ℘(x + s/δ; Λ/δ)
                let scaled = if delta == one() {
                    ctx.clone()
                } else {
                    Arc::new(ctx.rescaled(delta)?)
                };
                FunctionFamily::WeierstrassShifted {
                    ctx: scaled,
                    shift: (shift + gamma) / delta,
                    alpha: alpha * a0 / (delta * delta),
                    beta: alpha * b0 + beta,
                }
            }
            FunctionFamily::Exponential {
                alpha: a0,
                beta: b0,
                delta: d0,
            } => FunctionFamily::Exponential {
                alpha: alpha * a0 * (d0 * gamma).exp(),
                beta: alpha * b0 + beta,
                delta: d0 * delta,
            },
            FunctionFamily::Linear { alpha: a0, beta: b0 } => FunctionFamily::Linear {
                alpha: alpha * a0 * delta,
                beta: alpha * (a0 * gamma + b0) + beta,
            },
            FunctionFamily::Constant { c } => FunctionFamily::Constant { c: alpha * c + beta },
        })
    }

    /// Distance from `x` to the nearest pole (infinite for entire families).
    pub fn pole_distance(&self, x: Complex64) -> f64 {
        match self {
            FunctionFamily::WeierstrassShifted { ctx, shift, .. } => ctx.distance_to_pole(x + shift),
            _ => f64::INFINITY,
        }
    }

    pub fn context(&self) -> Option<&Arc<EllipticContext>> {
        match self {
            FunctionFamily::WeierstrassShifted { ctx, .. } => Some(ctx),
            _ => None,
        }
    }

    /// An antiderivative `F` with `F′ = f`: `−αζ(x + s) + βx`,
    /// `(α/δ)e^{δx} + βx`, `αx²/2 + βx` or `cx`.
    pub fn antiderivative(&self, x: Complex64) -> Result<Complex64, VerifyError> {
        Ok(match self {
            FunctionFamily::WeierstrassShifted { ctx, shift, alpha, beta } => {
                -alpha * ctx.zeta(x + shift)? + beta * x
            }
            FunctionFamily::Exponential { alpha, beta, delta } => alpha / delta * (delta * x).exp() + beta * x,
            FunctionFamily::Linear { alpha, beta } => alpha * x * x / 2.0 + beta * x,
            FunctionFamily::Constant { c } => c * x,
        })
    }
}

/// `(f, f′, …, f⁽ᵒʳᵈᵉʳ⁾)` at `x` in closed form.
pub fn family_jets(fam: &FunctionFamily, x: Complex64, order: usize) -> Result<JetValues, VerifyError> {
    if order > MAX_JET_ORDER {
        return Err(crate::elliptic::EllipticError::JetOrder(order).into());
    }
    let values = match fam {
        FunctionFamily::WeierstrassShifted { ctx, shift, alpha, beta } => {
            let j = ctx.jets(x + shift, order)?.affine(*alpha, *beta);
            return Ok(JetValues::new(x, j.values));
        }
        FunctionFamily::Exponential { alpha, beta, delta } => {
            let e = alpha * (delta * x).exp();
            let mut v = Vec::with_capacity(order + 1);
            let mut d = e;
            v.push(e + beta);
            for _ in 0..order {
                d *= delta;
                v.push(d);
            }
            v
        }
        FunctionFamily::Linear { alpha, beta } => {
            let mut v = vec![zero(); order + 1];
            v[0] = alpha * x + beta;
            if order >= 1 {
                v[1] = *alpha;
            }
            v
        }
        FunctionFamily::Constant { c } => {
            let mut v = vec![zero(); order + 1];
            v[0] = *c;
            v
        }
    };
    Ok(JetValues::new(x, values))
}
