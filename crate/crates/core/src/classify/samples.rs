use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ClassifyError;

/// Samples `(x, w)` of an unknown function, optionally with known
/// derivatives `w′`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<(Complex64, Complex64)>,
    pub derivatives: Option<Vec<Complex64>>,
    /// Common step `x_{i+1} − x_i` if the abscissae form a uniform grid.
    pub step: Option<Complex64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    x_re: f64,
    x_im: f64,
    w_re: f64,
    w_im: f64,
}

/// Relative tolerance for calling a grid uniform.
const GRID_TOL: f64 = 1e-9;

fn detect_step(points: &[(Complex64, Complex64)]) -> Option<Complex64> {
    if points.len() < 2 {
        return None;
    }
    let h = points[1].0 - points[0].0;
    if h.norm() == 0.0 {
        return None;
    }
    points
        .windows(2)
        .all(|p| (p[1].0 - p[0].0 - h).norm() <= GRID_TOL * h.norm())
        .then_some(h)
}

impl SampleSet {
    pub fn new(points: Vec<(Complex64, Complex64)>) -> Result<Self, ClassifyError> {
        let mut xs: Vec<_> = points.iter().map(|p| (p.0.re, p.0.im)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        if xs.windows(2).any(|w| w[0] == w[1]) {
            return Err(ClassifyError::DuplicateAbscissa);
        }
        if points.iter().any(|(x, w)| !(x.re.is_finite() && x.im.is_finite() && w.re.is_finite() && w.im.is_finite())) {
            return Err(ClassifyError::NonFinite);
        }
        let step = detect_step(&points);
        Ok(SampleSet {
            points,
            derivatives: None,
            step,
        })
    }

    pub fn with_derivatives(points: Vec<(Complex64, Complex64)>, derivatives: Vec<Complex64>) -> Result<Self, ClassifyError> {
        if derivatives.len() != points.len() {
            return Err(ClassifyError::DegenerateInput("derivative count differs from sample count".into()));
        }
        let mut s = Self::new(points)?;
        s.derivatives = Some(derivatives);
        Ok(s)
    }

    /// `w(x₀ + k·h)` for `k = 0..n`.
    pub fn on_grid(x0: Complex64, h: Complex64, n: usize, w: impl Fn(Complex64) -> Complex64) -> Result<Self, ClassifyError> {
        let pts = (0..n).map(|k| {
            let x = x0 + h * k as f64;
            (x, w(x))
        });
        Self::new(pts.collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Reads the `x_re,x_im,w_re,w_im` format.
    pub fn read_csv(r: impl Read) -> Result<Self, ClassifyError> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut pts = Vec::new();
        for row in rdr.deserialize() {
            let row: Row = row.map_err(|e| ClassifyError::Csv(e.to_string()))?;
            pts.push((Complex64::new(row.x_re, row.x_im), Complex64::new(row.w_re, row.w_im)));
        }
        Self::new(pts)
    }

    /// Writes the `x_re,x_im,w_re,w_im` format with 17 significant digits.
    pub fn write_csv(&self, w: impl Write) -> Result<(), ClassifyError> {
        let mut wtr = csv::Writer::from_writer(w);
        let err = |e: csv::Error| ClassifyError::Csv(e.to_string());
        wtr.write_record(["x_re", "x_im", "w_re", "w_im"]).map_err(err)?;
        for (x, w) in &self.points {
            wtr.write_record([x.re, x.im, w.re, w.im].map(|v| format!("{v:.16e}"))).map_err(err)?;
        }
        wtr.flush().map_err(|e| ClassifyError::Csv(e.to_string()))
    }
}

/// `(x, w, w′)` from provided derivatives, or by central differences of
/// order 2 or 4 on a uniform grid (end points without a full stencil are
/// dropped). Order 6 is the order-4 stencil at steps `h` and `2h` combined
/// by one Richardson step.
pub fn estimate_jets(s: &SampleSet, stencil_order: usize) -> Result<Vec<(Complex64, Complex64, Complex64)>, ClassifyError> {
    if let Some(d) = &s.derivatives {
        return Ok(s.points.iter().zip(d).map(|(&(x, w), &dw)| (x, w, dw)).collect());
    }
    let half = match stencil_order {
        2 => 1,
        4 => 2,
        6 => 4,
        o => return Err(ClassifyError::InvalidArgument(format!("stencil order {o} not in {{2, 4, 6}}"))),
    };
    if s.len() < 2 * half + 1 {
        return Err(ClassifyError::TooFewPoints {
            got: s.len(),
            need: 2 * half + 1,
        });
    }
    let h = s.step.ok_or(ClassifyError::GridNotUniform)?;
    let w = |i: usize| s.points[i].1;
    Ok((half..s.len() - half)
        .map(|i| {
            let d4 = |k: usize| (w(i - 2 * k) - w(i - k) * 8.0 + w(i + k) * 8.0 - w(i + 2 * k)) / (h * 12.0 * k as f64);
            let d = match half {
                1 => (w(i + 1) - w(i - 1)) / (h * 2.0),
                2 => d4(1),
                _ => {
                    let (fine, coarse) = (d4(1), d4(2));
                    fine + (fine - coarse) / 15.0
                }
            };
            (s.points[i].0, w(i), d)
        })
        .collect())
}

/// Root-mean-square relative size of the derivative truncation error,
/// estimated by comparing the order-4 stencil at steps `h` and `2h`.
/// Zero when derivatives are supplied.
pub fn derivative_error_estimate(s: &SampleSet) -> f64 {
    if s.derivatives.is_some() || s.step.is_none() || s.len() < 9 {
        return 0.0;
    }
    let h = s.step.unwrap();
    let w = |i: usize| s.points[i].1;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 4..s.len() - 4 {
        let d1 = (w(i - 2) - w(i - 1) * 8.0 + w(i + 1) * 8.0 - w(i + 2)) / (h * 12.0);
        let d2 = (w(i - 4) - w(i - 2) * 8.0 + w(i + 2) * 8.0 - w(i + 4)) / (h * 24.0);
        num += ((d2 - d1) / 15.0).norm_sqr();
        den += d1.norm_sqr();
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        0.0
    }
}
