//! Exact arithmetic in `Z[v, v^-1]` with `v^2 = q`.
//!
//! Every polynomial in this crate (trace functions, KL, inverse KL and
//! R-polynomials) lives here. Half-integral powers of `q` are integral powers
//! of `v`, so normalizations like `q_x^{-1/2} T_x` stay exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Element of `Z[v, v^-1]`, stored as exponent -> nonzero coefficient.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, BigInt>,
}

/// Where to evaluate a [`LaurentPoly`].
#[derive(Clone, Debug)]
pub enum EvalPoint {
    /// `v = 1`, i.e. `q^{1/2} = 1`.
    VOne,
    /// `v = r` for a nonzero rational `r`.
    V(BigRational),
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c * v^e`.
    pub fn monomial(c: impl Into<BigInt>, e: i32) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn v_pow(e: i32) -> Self {
        Self::monomial(1, e)
    }

    /// `q^k = v^{2k}`.
    pub fn q_pow(k: i32) -> Self {
        Self::monomial(1, 2 * k)
    }

    /// `Q = q^{-1/2} - q^{1/2} = v^-1 - v`.
    pub fn capital_q() -> Self {
        Self::from_terms([(-1, BigInt::one()), (1, -BigInt::one())])
    }

    /// `(-1)^n` as a constant.
    pub fn sign(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Self::one()
        } else {
            Self::monomial(-1, 0)
        }
    }

    /// Polynomial in `q` from coefficients of `q^0, q^1, ...`.
    pub fn from_q_coeffs<I, C>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<BigInt>,
    {
        Self::from_terms(
            coeffs
                .into_iter()
                .enumerate()
                .map(|(i, c)| (2 * i as i32, c.into())),
        )
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, BigInt)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i32) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// The involution `v -> v^-1`.
    pub fn bar(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// True if only even `v`-exponents occur, i.e. the element lies in `Z[q, q^-1]`.
    pub fn is_in_q(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }

    /// Coefficients of `q^0 .. q^d` if this is an honest polynomial in `q`.
    pub fn q_coeffs(&self) -> Option<Vec<BigInt>> {
        if !self.is_in_q() || self.min_exp().is_some_and(|e| e < 0) {
            return None;
        }
        let Some(top) = self.max_exp() else {
            return Some(Vec::new());
        };
        Some((0..=top / 2).map(|k| self.coeff(2 * k)).collect())
    }

    /// Degree in `q`, for polynomials in `q` (`None` for zero).
    pub fn q_degree(&self) -> Option<i32> {
        self.max_exp().map(|e| e.div_euclid(2))
    }

    /// Exact evaluation.
    pub fn eval(&self, at: &EvalPoint) -> Result<BigRational> {
        match at {
            EvalPoint::VOne => Ok(BigRational::from_integer(
                self.terms.values().fold(BigInt::zero(), |acc, c| acc + c),
            )),
            EvalPoint::V(r) => {
                if r.is_zero() {
                    return Err(Error::ZeroEvaluationPoint);
                }
                let mut acc = BigRational::zero();
                for (e, c) in &self.terms {
                    let p = if *e >= 0 {
                        num_traits::pow(r.clone(), *e as usize)
                    } else {
                        num_traits::pow(r.recip(), (-*e) as usize)
                    };
                    acc += p * BigRational::from_integer(c.clone());
                }
                Ok(acc)
            }
        }
    }

    /// Writes `self = q^alpha * R(Q)` with `R` having integer coefficients,
    /// where `alpha = two_alpha / 2`.
    pub fn q_expand(&self, two_alpha: i32) -> Result<QPoly> {
        let mut rest = self.shift(-two_alpha);
        let mut coeffs: Vec<BigInt> = Vec::new();
        while let Some(top) = rest.max_exp() {
            if top < 0 {
                return Err(Error::NotExpandable);
            }
            let n = top as usize;
            // Q^n = (-1)^n v^n + lower terms
            let mut c = rest.coeff(top);
            if n % 2 == 1 {
                c = -c;
            }
            if coeffs.len() <= n {
                coeffs.resize(n + 1, BigInt::zero());
            }
            rest -= &QPoly::monomial(c.clone(), n).to_laurent();
            coeffs[n] = c;
        }
        Ok(QPoly::new(coeffs))
    }

    /// Canonical text encoding: `c*v^e` terms by ascending exponent joined by `+`;
    /// zero encodes as `0`.
    pub fn encode(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(e, c)| format!("{c}*v^{e}"))
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn decode(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let bad = || Error::Parse(format!("bad Laurent polynomial encoding {s:?}"));
        let mut p = Self::zero();
        let mut last: Option<i32> = None;
        // A coefficient may itself be negative ("1*v^0+-2*v^2"), so split on
        // '+' only where it starts a new term.
        for term in split_terms(s) {
            let (c, e) = term.split_once("*v^").ok_or_else(bad)?;
            let c: BigInt = c.parse().map_err(|_| bad())?;
            let e: i32 = e.parse().map_err(|_| bad())?;
            if c.is_zero() || last.is_some_and(|l| l >= e) {
                return Err(bad());
            }
            last = Some(e);
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Human-readable form in `q^{1/2}` powers, e.g. `1 - 2q + q^2`.
    pub fn to_q_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let var = match e {
                0 => String::new(),
                2 => "q".into(),
                e if e % 2 == 0 => format!("q^{}", e / 2),
                e => format!("q^({e}/2)"),
            };
            if var.is_empty() || !abs.is_one() {
                out.push_str(&abs.to_string());
            }
            out.push_str(&var);
        }
        out
    }
}

fn split_terms(s: &str) -> Vec<&str> {
    let bytes = s.as_bytes();
    let mut parts = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        // '+' that follows a digit of the previous exponent starts a term.
        if bytes[i] == b'+' && bytes[i - 1].is_ascii_digit() {
            parts.push(&s[start..i]);
            start = i + 1;
        }
    }
    parts.push(&s[start..]);
    parts
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({})", self.to_q_string())
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::decode(s)
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        Self::monomial(c, 0)
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c);
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

/// Polynomial in `Q = q^{-1/2} - q^{1/2}` with integer coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<BigInt>,
}

impl AddAssign for LaurentPoly {
    fn add_assign(&mut self, rhs: LaurentPoly) {
        *self += &rhs;
    }
}

impl SubAssign for LaurentPoly {
    fn sub_assign(&mut self, rhs: LaurentPoly) {
        *self -= &rhs;
    }
}

macro_rules! mixed_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$f(rhs)
            }
        }

        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$f(&rhs)
            }
        }
    )*};
}

mixed_ops!(Add add, Sub sub, Mul mul);

impl QPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: BigInt, n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, n: usize) -> BigInt {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Exponents with a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn add_monomial(&mut self, n: usize, c: BigInt) {
        if self.coeffs.len() <= n {
            self.coeffs.resize(n + 1, BigInt::zero());
        }
        self.coeffs[n] += c;
        *self = Self::new(std::mem::take(&mut self.coeffs));
    }

    /// Re-expands in `v`.
    pub fn to_laurent(&self) -> LaurentPoly {
        let q = LaurentPoly::capital_q();
        let mut power = LaurentPoly::one();
        let mut out = LaurentPoly::zero();
        for c in &self.coeffs {
            out += &power.scale(c);
            power = &power * &q;
        }
        out
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, n) in self.support().enumerate() {
            let c = &self.coeffs[n];
            let abs = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if n == 0 || !abs.is_one() {
                write!(f, "{abs}")?;
            }
            match n {
                0 => {}
                1 => f.write_str("Q")?,
                n => write!(f, "Q^{n}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(e: i32) -> LaurentPoly {
        LaurentPoly::v_pow(e)
    }

    #[test]
    fn difference_of_squares() {
        let a = &v(1) + &v(-1);
        let b = &v(1) - &v(-1);
        assert_eq!(&a * &b, &v(2) - &v(-2));
    }

    #[test]
    fn q_poly_display() {
        let p = QPoly::new([1, -2, 0, 1].into_iter().map(BigInt::from).collect());
        assert_eq!(p.to_string(), "1 - 2Q + Q^3");
        assert_eq!(QPoly::new(vec![0.into(), 1.into()]).to_string(), "Q");
        assert_eq!(QPoly::zero().to_string(), "0");
    }

    #[test]
    fn zero_annihilates() {
        let a = LaurentPoly::from_q_coeffs([3, -1, 7]);
        assert!((&LaurentPoly::zero() * &a).is_zero());
    }

    #[test]
    fn one_minus_q_squared() {
        let a = LaurentPoly::from_q_coeffs([1, -1]);
        assert_eq!(&a * &a, LaurentPoly::from_q_coeffs([1, -2, 1]));
        assert_eq!((&a * &a).encode(), "1*v^0+-2*v^2+1*v^4");
    }

    #[test]
    fn bar_examples() {
        let a = &v(2) - &LaurentPoly::one();
        assert_eq!(a.bar(), &v(-2) - &LaurentPoly::one());
        assert_eq!(LaurentPoly::capital_q().bar(), -LaurentPoly::capital_q());
    }

    #[test]
    fn q_expand_examples() {
        let f = LaurentPoly::from_q_coeffs([1, -1]);
        let r = f.q_expand(1).unwrap();
        assert_eq!(r, QPoly::monomial(1.into(), 1));

        let f = LaurentPoly::from_q_coeffs([1, -2, 1]);
        assert_eq!(f.q_expand(2).unwrap(), QPoly::monomial(1.into(), 2));

        let f = LaurentPoly::from_q_coeffs([1, 1]);
        assert_eq!(f.q_expand(1), Err(Error::NotExpandable));
    }

    #[test]
    fn eval_examples() {
        let f = LaurentPoly::from_q_coeffs([1, 1, 1]);
        assert_eq!(
            f.eval(&EvalPoint::VOne).unwrap(),
            BigRational::from_integer(3.into())
        );
        assert!(LaurentPoly::zero()
            .eval(&EvalPoint::VOne)
            .unwrap()
            .is_zero());
        assert!(LaurentPoly::capital_q()
            .eval(&EvalPoint::VOne)
            .unwrap()
            .is_zero());
        let half = BigRational::new(1.into(), 2.into());
        // Q at v = 1/2 is 2 - 1/2
        assert_eq!(
            LaurentPoly::capital_q().eval(&EvalPoint::V(half)).unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        assert_eq!(
            f.eval(&EvalPoint::V(BigRational::zero())),
            Err(Error::ZeroEvaluationPoint)
        );
    }

    #[test]
    fn encoding_round_trip_and_rejects() {
        let f = LaurentPoly::from_terms([(-3, BigInt::from(-5)), (0, 1.into()), (4, 12.into())]);
        assert_eq!(f.encode(), "-5*v^-3+1*v^0+12*v^4");
        assert_eq!(LaurentPoly::decode(&f.encode()).unwrap(), f);
        assert_eq!(LaurentPoly::decode("0").unwrap(), LaurentPoly::zero());
        assert!(LaurentPoly::decode("1*v^2+1*v^0").is_err());
        assert!(LaurentPoly::decode("0*v^1").is_err());
        assert!(LaurentPoly::decode("x").is_err());
    }

    #[test]
    fn big_coefficients_do_not_overflow() {
        let mut p = LaurentPoly::from_q_coeffs([1, 1]);
        for _ in 0..7 {
            p = &p * &p;
        }
        // (1+q)^128 has central binomial coefficient C(128, 64) > 2^64
        let c: BigInt = p.coeff(128);
        assert!(c > BigInt::from(u64::MAX));
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-6i32..6, -20i64..20), 0..6).prop_map(|ts| {
            LaurentPoly::from_terms(ts.into_iter().map(|(e, c)| (e, BigInt::from(c))))
        })
    }

    proptest! {
        #[test]
        fn bar_is_multiplicative_involution(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
            prop_assert_eq!(a.bar().bar(), a);
        }

        #[test]
        fn q_expand_round_trips(coeffs in prop::collection::vec(-9i64..9, 0..6), two_alpha in -4i32..5) {
            let r = QPoly::new(coeffs.into_iter().map(BigInt::from).collect());
            let f = r.to_laurent().shift(two_alpha);
            let back = f.q_expand(two_alpha).unwrap();
            prop_assert_eq!(&back, &r);
            prop_assert_eq!(back.to_laurent().shift(two_alpha), f);
        }

        #[test]
        fn encoding_round_trips(a in arb_poly()) {
            prop_assert_eq!(LaurentPoly::decode(&a.encode()).unwrap(), a);
        }
    }
}
