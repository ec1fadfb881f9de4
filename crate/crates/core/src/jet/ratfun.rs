use std::ops::{Add, Mul, Neg, Sub};

use super::poly::{DiffPolynomial, Direction, Var};
use super::JetError;

/// Quotient of two differential polynomials, kept unreduced.
#[derive(Debug, Clone)]
pub struct RationalFunction {
    pub num: DiffPolynomial,
    pub den: DiffPolynomial,
}

impl RationalFunction {
    pub fn new(num: DiffPolynomial, den: DiffPolynomial) -> Self {
        RationalFunction { num, den }
    }

    pub fn poly(p: DiffPolynomial) -> Self {
        RationalFunction::new(p, DiffPolynomial::one())
    }

    pub fn inv(&self) -> Self {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    /// Quotient rule.
    pub fn derive(&self, dir: Direction) -> Result<Self, JetError> {
        let dn = self.num.derive(dir)?;
        let dd = self.den.derive(dir)?;
        Ok(RationalFunction::new(
            &dn * &self.den - &self.num * &dd,
            self.den.pow(2),
        ))
    }

    pub fn substitute(&self, subs: &[(Var, DiffPolynomial)]) -> Self {
        RationalFunction::new(self.num.substitute(subs), self.den.substitute(subs))
    }

    /// `self == other` as rational functions.
    pub fn equals(&self, other: &RationalFunction) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunction::new(
            &self.num * &rhs.den + &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::new(-&self.num, self.den.clone())
    }
}
