use std::sync::Arc;

use num_complex::Complex64;
use wpfeq::elliptic::EllipticContext;

use crate::args::LatticeArgs;
use crate::CliError;

/// A real written as a decimal or a fraction `p/q`.
pub fn real(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Config(format!("malformed number `{s}`"));
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (f64, f64) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
            if q == 0.0 {
                return Err(bad());
            }
            p / q
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Comma-separated reals, exactly `n` of them.
pub fn reals(s: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s.split(',').map(real).collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(CliError::Config(format!("expected {n} comma-separated reals, got `{s}`")));
    }
    Ok(v)
}

/// `re,im` or `re`.
pub fn complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(real(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(real(re)?, real(im)?)),
        _ => Err(CliError::Config(format!("malformed complex value `{s}`"))),
    }
}

/// `start:end:step`, inclusive of `end` up to rounding.
pub fn grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, h] = parts.as_slice() else {
        return Err(CliError::Config(format!("grid must be start:end:step, got `{s}`")));
    };
    let (a, b, h) = (real(a)?, real(b)?, real(h)?);
    if !(h > 0.0) || b < a {
        return Err(CliError::Config(format!("grid `{s}` needs step > 0 and end ≥ start")));
    }
    let n = ((b - a) / h + 1e-9).floor() as usize + 1;
    if n > 10_000_000 {
        return Err(CliError::Config(format!("grid `{s}` has too many points")));
    }
    Ok((0..n).map(|k| a + h * k as f64).collect())
}

/// Context from `--periods` or `--g2/--g3`; the square lattice with
/// generators 2 and 2i when neither is given.
pub fn context(l: &LatticeArgs) -> Result<Arc<EllipticContext>, CliError> {
    let ctx = match (&l.periods, &l.g2, &l.g3) {
        (Some(p), _, _) => {
            let v = reals(p, 4)?;
            EllipticContext::from_periods(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
                .map_err(|e| CliError::Config(e.to_string()))?
        }
        (None, Some(g2), Some(g3)) => EllipticContext::from_invariants(complex(g2)?, complex(g3)?),
        (None, None, None) => EllipticContext::from_periods(Complex64::new(2.0, 0.0), Complex64::new(0.0, 2.0))
            .map_err(|e| CliError::Config(e.to_string()))?,
        _ => return Err(CliError::Config("--g2 and --g3 must be given together".into())),
    };
    Ok(Arc::new(ctx))
}

/// Shift from `--shift` (absolute) or `--shift-frac` (lattice coordinates).
pub fn shift(ctx: &EllipticContext, abs: &Option<String>, frac: &Option<String>) -> Result<Complex64, CliError> {
    match (abs, frac) {
        (Some(s), _) => complex(s),
        (None, Some(f)) => {
            let v = reals(f, 2)?;
            let p = ctx
                .periods()
                .ok_or_else(|| CliError::Config("--shift-frac needs --periods".into()))?;
            Ok(p.point(v[0], v[1]))
        }
        (None, None) => Ok(Complex64::new(0.0, 0.0)),
    }
}
