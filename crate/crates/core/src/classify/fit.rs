use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::ClassifyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// `w′² = p₃w³ + p₂w² + p₁w + p₀`, coefficients `[p₀, p₁, p₂, p₃]`.
    Cubic,
    /// `w′ = l₁w + l₀`, coefficients `[l₀, l₁]`.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: Model,
    pub coefficients: Vec<Complex64>,
    /// `‖A·p − r‖ / ‖r‖` (relative root-mean-square misfit).
    pub residual: f64,
    /// Spectral condition number of the column-equilibrated design matrix.
    pub condition: f64,
}

/// Condition number above which a cubic fit is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative spread below which the samples count as one constant.
const FLAT: f64 = 1e-12;

fn least_squares(columns: &[Vec<Complex64>], rhs: &[Complex64], weights: &[f64]) -> (Vec<Complex64>, f64, f64) {
    let n = rhs.len();
    let k = columns.len();
    let columns: Vec<Vec<Complex64>> = columns
        .iter()
        .map(|c| c.iter().zip(weights).map(|(v, w)| v * *w).collect())
        .collect();
    let rhs: Vec<Complex64> = rhs.iter().zip(weights).map(|(v, w)| v * *w).collect();
    let scales: Vec<f64> = columns
        .iter()
        .map(|c| {
            let s = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let a = DMatrix::from_fn(n, k, |i, j| columns[j][i] / scales[j]);
    let b = DVector::from_column_slice(&rhs);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let y = svd
        .solve(&b, smax * 1e-15)
        .unwrap_or_else(|_| DVector::zeros(k));
    let r = &a * &y - &b;
    let bn = b.norm();
    let residual = if bn > 0.0 { r.norm() / bn } else { r.norm() };
    let coef = (0..k).map(|j| y[j] / scales[j]).collect();
    (coef, residual, condition)
}

fn check_spread(pairs: &[(Complex64, Complex64)]) -> Result<(), ClassifyError> {
    let w0 = pairs[0].0;
    let scale = pairs.iter().map(|p| p.0.norm()).fold(1.0, f64::max);
    if pairs.iter().all(|p| (p.0 - w0).norm() <= FLAT * scale) {
        Err(ClassifyError::DegenerateInput("samples are constant".into()))
    } else {
        Ok(())
    }
}

/// Least-squares fit of `w′² = p₃w³ + p₂w² + p₁w + p₀` to `(w, w′)`.
pub fn fit_cubic(pairs: &[(Complex64, Complex64)]) -> Result<FitResult, ClassifyError> {
    if pairs.len() < 5 {
        return Err(ClassifyError::TooFewPoints {
            got: pairs.len(),
            need: 5,
        });
    }
    check_spread(pairs)?;
    let cols: Vec<Vec<Complex64>> = (0..4)
        .map(|p| pairs.iter().map(|(w, _)| w.powi(p)).collect())
        .collect();
    let rhs: Vec<_> = pairs.iter().map(|(_, d)| d * d).collect();
    // rows scaled to unit size so points near a pole do not dominate
    let weights: Vec<f64> = pairs.iter().map(|(w, _)| 1.0 / w.norm().max(1.0).powi(3)).collect();
    let (coefficients, residual, condition) = least_squares(&cols, &rhs, &weights);
    if !(condition <= MAX_CONDITION) {
        return Err(ClassifyError::IllConditionedFit { condition });
    }
    Ok(FitResult {
        model: Model::Cubic,
        coefficients,
        residual,
        condition,
    })
}

/// Least-squares fit of `w′ = l₁w + l₀`.
pub fn fit_linear(pairs: &[(Complex64, Complex64)]) -> Result<FitResult, ClassifyError> {
    if pairs.len() < 3 {
        return Err(ClassifyError::TooFewPoints {
            got: pairs.len(),
            need: 3,
        });
    }
    check_spread(pairs)?;
    let cols = vec![
        vec![Complex64::new(1.0, 0.0); pairs.len()],
        pairs.iter().map(|p| p.0).collect(),
    ];
    let rhs: Vec<_> = pairs.iter().map(|p| p.1).collect();
    let weights: Vec<f64> = pairs.iter().map(|(w, _)| 1.0 / w.norm().max(1.0)).collect();
    let (coefficients, residual, condition) = least_squares(&cols, &rhs, &weights);
    Ok(FitResult {
        model: Model::Linear,
        coefficients,
        residual,
        condition,
    })
}

/// Normal form of a cubic ODE: `w = a·W + b` turns
/// `w′² = p₃w³ + p₂w² + p₁w + p₀` into `W′² = 4W³ − g₂W − g₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalForm {
    pub g2: Complex64,
    pub g3: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

/// `a = 4/p₃`, `b = −p₂/(3p₃)`; `g₂`, `g₃` from the shifted cubic.
/// `p = [p₀, p₁, p₂, p₃]`.
pub fn to_normal_form(p: [Complex64; 4], eps: f64) -> Result<NormalForm, ClassifyError> {
    let [p0, p1, p2, p3] = p;
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if p3.norm() <= eps * scale.max(f64::MIN_POSITIVE) {
        return Err(ClassifyError::DegenerateCubic);
    }
    let a = 4.0 / p3;
    let b = -p2 / (3.0 * p3);
    // Σ pᵢ(aW + b)ⁱ = a²(4W³ − g₂W − g₃); the W² term vanishes by choice of b
    let lin = 3.0 * p3 * b * b + 2.0 * p2 * b + p1;
    let cst = p3 * b * b * b + p2 * b * b + p1 * b + p0;
    Ok(NormalForm {
        g2: -lin / a,
        g3: -cst / (a * a),
        a,
        b,
    })
}

/// Inverse of [`to_normal_form`].
pub fn from_normal_form(nf: &NormalForm) -> [Complex64; 4] {
    let NormalForm { g2, g3, a, b } = *nf;
    let p3 = 4.0 / a;
    let p2 = -3.0 * p3 * b;
    let p1 = -g2 * a - 3.0 * p3 * b * b - 2.0 * p2 * b;
    let p0 = -g3 * a * a - p3 * b * b * b - p2 * b * b - p1 * b;
    [p0, p1, p2, p3]
}
