use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::identities::{CofactorReport, Identity};
use super::poly::{ratio, DiffPolynomial, Var, MAX_ORDER};
use super::JetError;

type P = DiffPolynomial;

/// Truncated power series in `η` with coefficients in the jets of `f` at
/// `ξ`. `coefficients[k]` multiplies `ηᵏ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaSeries {
    pub coefficients: Vec<P>,
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

impl EtaSeries {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Taylor series of `f⁽ᵈ⁾(ξ + η)` to order `n`.
    pub fn taylor(d: u8, n: usize) -> Result<Self, JetError> {
        let mut coefficients = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let idx = d as usize + k;
            if idx > MAX_ORDER as usize {
                return Err(JetError::JetOrderOverflow(Var::F(MAX_ORDER)));
            }
            let c = BigRational::new(BigInt::one(), factorial(k));
            coefficients.push(P::f(idx as u8).scale(&c));
        }
        Ok(EtaSeries { coefficients })
    }

    /// `s(η) − s(−η)`.
    pub fn delta(&self) -> Self {
        self.reflect(|k, c| if k % 2 == 1 { c.scale(&ratio(2, 1)) } else { P::zero() })
    }

    /// `(s(η) + s(−η)) / 2`.
    pub fn mu(&self) -> Self {
        self.reflect(|k, c| if k % 2 == 0 { c.clone() } else { P::zero() })
    }

    fn reflect(&self, keep: impl Fn(usize, &P) -> P) -> Self {
        EtaSeries {
            coefficients: self.coefficients.iter().enumerate().map(|(k, c)| keep(k, c)).collect(),
        }
    }

    /// Product truncated to the shorter order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coefficients = (0..=n)
            .map(|k| {
                (0..=k).fold(P::zero(), |acc, i| {
                    acc + &self.coefficients[i] * &other.coefficients[k - i]
                })
            })
            .collect();
        EtaSeries { coefficients }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        EtaSeries {
            coefficients: (0..=n)
                .map(|k| &self.coefficients[k] - &other.coefficients[k])
                .collect(),
        }
    }
}

/// `(a_k, b_k, c_k)` of the relations `a_k F′ − b_k F + c_k = 0` read off
/// at odd powers `η^{2k−1}`.
pub(crate) fn eta_relations(order: usize) -> Result<Vec<(P, P, P)>, JetError> {
    if order < 5 {
        return Err(JetError::TruncationTooLow(order));
    }
    let s = EtaSeries::taylor(0, order)?;
    let sp = EtaSeries::taylor(1, order)?;
    let (df, dfp) = (s.delta(), sp.delta());
    let lhs = df.mul(&sp.mu()).sub(&dfp.mul(&s.mu()));
    Ok((1..=order)
        .step_by(2)
        .map(|j| {
            (
                df.coefficients[j].clone(),
                dfp.coefficients[j].clone(),
                -&lhs.coefficients[j],
            )
        })
        .collect())
}

fn expected_relations() -> Vec<(P, P, P)> {
    let f = P::f;
    let n = P::int;
    vec![
        (f(1), f(2), f(0) * f(2) - f(1).pow(2)),
        (f(3), f(4), n(-4) * f(1) * f(3) + f(0) * f(4) + n(3) * f(2).pow(2)),
    ]
}

/// First two relations of the `η`-expansion against the listed
/// coefficients, each up to its own rational normalisation.
pub fn eta_expansion_check(order: usize) -> Result<CofactorReport, JetError> {
    eta_expansion_check_against(order, &expected_relations())
}

pub fn eta_expansion_check_against(order: usize, expected: &[(P, P, P)]) -> Result<CofactorReport, JetError> {
    let got = eta_relations(order)?;
    let mut identities = Vec::new();
    let mut scales = Vec::new();
    let mut holds = true;
    for (k, ((a, b, c), (ea, eb, ec))) in got.iter().zip(expected).enumerate() {
        let power = 2 * k + 1;
        let lambda = a.div_exact(ea).filter(|q| q.as_single_term().is_some_and(|(m, _)| m.degree() == 0));
        let Some(lambda) = lambda else {
            holds = false;
            continue;
        };
        for (name, lhs, rhs) in [("a", a, ea), ("b", b, eb), ("c", c, ec)] {
            let id = Identity {
                label: format!("{name}{} at eta^{power}", k + 1),
                lhs: lhs.clone(),
                cofactor: lambda.clone(),
                rhs: rhs.clone(),
            };
            holds &= id.holds();
            identities.push(id);
        }
        scales.push(format!("eta^{power}: {lambda}"));
    }
    holds &= scales.len() == expected.len();
    let cofactor = identities.first().map(|i| i.cofactor.clone()).unwrap_or_default();
    Ok(CofactorReport {
        name: "eta_expansion".into(),
        holds,
        cofactor: if holds { cofactor } else { P::zero() },
        note: format!("per-order normalisation {}", scales.join(", ")),
        identities: if holds { identities } else { Vec::new() },
    })
}
