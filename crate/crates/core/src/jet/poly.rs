use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::JetError;
use crate::elliptic::JetValues;

/// Highest jet index a variable may carry.
pub const MAX_ORDER: u8 = 6;
const NVARS: usize = 20;

/// A polynomial variable: the jets `f₀…f₆` (of `f` at `x`) and `g₀…g₆` (of
/// `g` at `y`), plus constant symbols `p₀…p₃`, `l₀, l₁` for the ODE
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    F(u8),
    G(u8),
    P(u8),
    L(u8),
}

impl Var {
    fn index(self) -> usize {
        match self {
            Var::F(i) => i as usize,
            Var::G(i) => 7 + i as usize,
            Var::P(i) => 14 + i as usize,
            Var::L(i) => 18 + i as usize,
        }
    }

    fn from_index(i: usize) -> Var {
        match i {
            0..=6 => Var::F(i as u8),
            7..=13 => Var::G((i - 7) as u8),
            14..=17 => Var::P((i - 14) as u8),
            _ => Var::L((i - 18) as u8),
        }
    }

    fn valid(self) -> bool {
        match self {
            Var::F(i) | Var::G(i) => i <= MAX_ORDER,
            Var::P(i) => i <= 3,
            Var::L(i) => i <= 1,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::F(i) => write!(f, "f{i}"),
            Var::G(i) => write!(f, "g{i}"),
            Var::P(i) => write!(f, "p{i}"),
            Var::L(i) => write!(f, "l{i}"),
        }
    }
}

/// Derivation applied by [`DiffPolynomial::derive`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `∂x`: `fᵢ → fᵢ₊₁`, `gᵢ → 0`.
    X,
    /// `∂y`: `gᵢ → gᵢ₊₁`, `fᵢ → 0`.
    Y,
    /// `∂̄ = ∂y − ∂x`.
    Bar,
}

/// Exponent vector, ordered graded-lexicographically with
/// `f₀ < f₁ < … < g₀ < … < p₀ < … < l₁`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial([u8; NVARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; NVARS])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exponent(&self, v: Var) -> u8 {
        self.0[v.index()]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }

    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(Monomial(e))
    }

    fn vars(&self) -> impl Iterator<Item = (Var, u8)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (Var::from_index(i), e))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in self.vars() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Polynomial with exact rational coefficients in the jet variables.
///
/// Zero coefficients are never stored, so structural equality is
/// polynomial equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct DiffPolynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl DiffPolynomial {
    pub fn zero() -> Self {
        DiffPolynomial::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPolynomial { terms }
    }

    /// The variable `v` as a polynomial.
    ///
    /// # Panics
    /// If the index is out of range (`fᵢ`, `gᵢ` with `i > 6`).
    pub fn var(v: Var) -> Self {
        assert!(v.valid(), "variable {v} out of range");
        let mut m = Monomial::one();
        m.0[v.index()] = 1;
        Self::term(BigRational::one(), m)
    }

    pub fn f(i: u8) -> Self {
        Self::var(Var::F(i))
    }

    pub fn g(i: u8) -> Self {
        Self::var(Var::G(i))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Greatest term in the monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// `Some(c)` if this is a single term `c·m`.
    pub fn as_single_term(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Highest jet index of `f` (resp. `g`) that appears, if any.
    pub fn jet_order(&self, of_f: bool) -> Option<u8> {
        let mut best = None;
        for m in self.terms.keys() {
            for (v, _) in m.vars() {
                match (v, of_f) {
                    (Var::F(i), true) | (Var::G(i), false) => {
                        best = Some(best.map_or(i, |b: u8| b.max(i)))
                    }
                    _ => {}
                }
            }
        }
        best
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        DiffPolynomial {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &BigRational) -> Self {
        DiffPolynomial {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Applies the derivation `dir`, extended to products by Leibniz.
    pub fn derive(&self, dir: Direction) -> Result<Self, JetError> {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            for (v, e) in m.vars() {
                let (next, sign) = match (v, dir) {
                    (Var::F(i), Direction::X) => (Var::F(i + 1), 1),
                    (Var::F(i), Direction::Bar) => (Var::F(i + 1), -1),
                    (Var::G(i), Direction::Y | Direction::Bar) => (Var::G(i + 1), 1),
                    _ => continue,
                };
                if !next.valid() {
                    return Err(JetError::JetOrderOverflow(v));
                }
                let mut nm = *m;
                nm.0[v.index()] -= 1;
                nm.0[next.index()] += 1;
                out.add_term(nm, c * rat(sign * e as i64));
            }
        }
        Ok(out)
    }

    /// Simultaneous substitution `vᵢ → qᵢ`.
    pub fn substitute(&self, subs: &[(Var, DiffPolynomial)]) -> Self {
        let mut powers: Vec<Vec<DiffPolynomial>> = subs.iter().map(|_| vec![Self::one()]).collect();
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            let mut rest = *m;
            let mut piece = Self::term(c.clone(), Monomial::one());
            for (k, (v, q)) in subs.iter().enumerate() {
                let e = m.exponent(*v) as usize;
                if e == 0 {
                    continue;
                }
                rest.0[v.index()] = 0;
                while powers[k].len() <= e {
                    let next = &powers[k][powers[k].len() - 1] * q;
                    powers[k].push(next);
                }
                piece = &piece * &powers[k][e];
            }
            for (pm, pc) in piece.mul_term(&rest, &BigRational::one()).terms {
                out.add_term(pm, pc);
            }
        }
        out
    }

    /// Replaces every `gᵢ` by `fᵢ` (restriction to the diagonal `y = x`
    /// with `g = f`).
    pub fn diagonal(&self) -> Self {
        let subs: Vec<_> = (0..=MAX_ORDER).map(|i| (Var::G(i), Self::f(i))).collect();
        self.substitute(&subs)
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &DiffPolynomial) -> Option<DiffPolynomial> {
        let (dm, dc) = d.leading_term()?;
        let (dm, dc) = (*dm, dc.clone());
        let mut rem = self.clone();
        let mut quot = DiffPolynomial::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            rem = &rem - &d.mul_term(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Evaluates with `value(v)` supplying each variable.
    pub fn evaluate_with(
        &self,
        value: impl Fn(Var) -> Option<Complex64>,
    ) -> Result<(Complex64, f64), JetError> {
        let mut cache: [Option<Complex64>; NVARS] = [None; NVARS];
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for (m, c) in &self.terms {
            let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (v, e) in m.vars() {
                let x = match cache[v.index()] {
                    Some(x) => x,
                    None => {
                        let x = value(v).ok_or(JetError::MissingJet(v))?;
                        cache[v.index()] = Some(x);
                        x
                    }
                };
                t *= x.powi(e as i32);
            }
            sum += t;
            abs_sum += t.norm();
        }
        Ok((sum, abs_sum))
    }

    /// Substitution homomorphism into ℂ: `fᵢ ↦ f⁽ⁱ⁾(x)`, `gᵢ ↦ g⁽ⁱ⁾(y)`.
    pub fn evaluate(&self, f_jets: &JetValues, g_jets: &JetValues) -> Result<Complex64, JetError> {
        Ok(self.evaluate_scaled(f_jets, g_jets)?.0)
    }

    /// Value together with `Σ |term|`, the natural scale for a relative
    /// residual.
    pub fn evaluate_scaled(
        &self,
        f_jets: &JetValues,
        g_jets: &JetValues,
    ) -> Result<(Complex64, f64), JetError> {
        self.evaluate_with(|v| match v {
            Var::F(i) => f_jets.get(i as usize),
            Var::G(i) => g_jets.get(i as usize),
            _ => None,
        })
    }
}

impl fmt::Display for DiffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let is_one = *m == Monomial::one();
            if a.is_one() && !is_one {
                write!(f, "{m}")?;
            } else if is_one {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &DiffPolynomial {
    type Output = DiffPolynomial;
    fn add(self, rhs: &DiffPolynomial) -> DiffPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &DiffPolynomial {
    type Output = DiffPolynomial;
    fn sub(self, rhs: &DiffPolynomial) -> DiffPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &DiffPolynomial {
    type Output = DiffPolynomial;
    fn mul(self, rhs: &DiffPolynomial) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &DiffPolynomial {
    type Output = DiffPolynomial;
    fn neg(self) -> DiffPolynomial {
        DiffPolynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for DiffPolynomial {
            type Output = DiffPolynomial;
            fn $method(self, rhs: DiffPolynomial) -> DiffPolynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&DiffPolynomial> for DiffPolynomial {
            type Output = DiffPolynomial;
            fn $method(self, rhs: &DiffPolynomial) -> DiffPolynomial {
                (&self).$method(rhs)
            }
        }
        impl $tr<DiffPolynomial> for &DiffPolynomial {
            type Output = DiffPolynomial;
            fn $method(self, rhs: DiffPolynomial) -> DiffPolynomial {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for DiffPolynomial {
    type Output = DiffPolynomial;
    fn neg(self) -> DiffPolynomial {
        -&self
    }
}
