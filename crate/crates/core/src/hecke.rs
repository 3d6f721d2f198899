//! The Iwahori-Hecke algebra `H = (+)_w Z[v, v^-1] T_w` of the extended affine
//! Weyl group with `(T_s - q)(T_s + 1) = 0` and `T_omega` invertible for
//! length-zero `omega`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::affweyl::AffineWeylElement as Elem;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::rootdata::RootDatum;

#[derive(Clone)]
pub struct HeckeElement {
    datum: Arc<RootDatum>,
    terms: BTreeMap<Elem, LaurentPoly>,
}

impl HeckeElement {
    pub fn zero(datum: &Arc<RootDatum>) -> Self {
        HeckeElement {
            datum: Arc::clone(datum),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(datum: &Arc<RootDatum>) -> Self {
        Self::t(&Elem::identity(datum))
    }

    /// `T_x`.
    pub fn t(x: &Elem) -> Self {
        Self::term(x, LaurentPoly::one())
    }

    /// `c T_x`.
    pub fn term(x: &Elem, c: LaurentPoly) -> Self {
        let mut h = Self::zero(x.datum());
        h.add_term(x.clone(), c);
        h
    }

    /// `T~_x = q_x^{-1/2} T_x`.
    pub fn t_tilde(x: &Elem) -> Self {
        Self::term(x, LaurentPoly::v_pow(-(x.length() as i32)))
    }

    /// `T_x^{-1}`.
    pub fn t_inv(x: &Elem) -> Self {
        Self::one(x.datum()).mul_t_inv(x)
    }

    /// `T~_x^{-1} = q_x^{1/2} T_x^{-1}`.
    pub fn t_tilde_inv(x: &Elem) -> Self {
        Self::t_inv(x).scale(&LaurentPoly::v_pow(x.length() as i32))
    }

    pub fn from_terms<I: IntoIterator<Item = (Elem, LaurentPoly)>>(
        datum: &Arc<RootDatum>,
        terms: I,
    ) -> Self {
        let mut h = Self::zero(datum);
        for (x, c) in terms {
            h.add_term(x, c);
        }
        h
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero coefficients in increasing element order.
    pub fn terms(&self) -> &BTreeMap<Elem, LaurentPoly> {
        &self.terms
    }

    pub fn coeff(&self, x: &Elem) -> LaurentPoly {
        self.terms.get(x).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = &Elem> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, x: Elem, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(x) {
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

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.datum.id() != other.datum.id() {
            return Err(Error::DatumMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.add_term(x.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&LaurentPoly::from(-1)))
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        Self::from_terms(
            &self.datum,
            self.terms.iter().map(|(x, a)| (x.clone(), a * c)),
        )
    }

    /// `self * T_omega` for `omega` of length zero.
    pub fn mul_length_zero(&self, omega: &Elem) -> Self {
        debug_assert_eq!(omega.length(), 0);
        Self::from_terms(
            &self.datum,
            self.terms.iter().map(|(x, c)| (x.mul(omega), c.clone())),
        )
    }

    /// `T_omega * self` for `omega` of length zero.
    pub fn length_zero_mul(&self, omega: &Elem) -> Self {
        debug_assert_eq!(omega.length(), 0);
        Self::from_terms(
            &self.datum,
            self.terms.iter().map(|(x, c)| (omega.mul(x), c.clone())),
        )
    }

    /// `self * T_{s_i}`.
    pub fn mul_t_simple(&self, i: usize) -> Self {
        let q = LaurentPoly::q_pow(1);
        let qm1 = &q - &LaurentPoly::one();
        let mut out = Self::zero(&self.datum);
        for (x, c) in &self.terms {
            let xs = x.mul_simple(i);
            if xs.length() > x.length() {
                out.add_term(xs, c.clone());
            } else {
                out.add_term(xs, c * &q);
                out.add_term(x.clone(), c * &qm1);
            }
        }
        out
    }

    /// `self * T_{s_i}^{-1}`, using `T_s^{-1} = q^{-1} T_s + (q^{-1} - 1)`.
    pub fn mul_t_simple_inv(&self, i: usize) -> Self {
        let qi = LaurentPoly::q_pow(-1);
        let qi1 = &qi - &LaurentPoly::one();
        let mut out = Self::zero(&self.datum);
        for (x, c) in &self.terms {
            let xs = x.mul_simple(i);
            if xs.length() > x.length() {
                out.add_term(xs, c * &qi);
                out.add_term(x.clone(), c * &qi1);
            } else {
                out.add_term(xs, c.clone());
            }
        }
        out
    }

    /// `self * T_y`.
    pub fn mul_t(&self, y: &Elem) -> Self {
        let (omega, word) = y.reduced_word();
        let mut h = self.mul_length_zero(&omega);
        for &i in &word {
            h = h.mul_t_simple(i);
        }
        h
    }

    /// `self * T_y^{-1}`, one simple reflection at a time.
    pub fn mul_t_inv(&self, y: &Elem) -> Self {
        let (omega, word) = y.reduced_word();
        let mut h = self.clone();
        for &i in word.iter().rev() {
            h = h.mul_t_simple_inv(i);
        }
        h.mul_length_zero(&omega.inv())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.datum);
        for (y, b) in &other.terms {
            for (x, c) in self.mul_t(y).terms {
                out.add_term(x, c * b);
            }
        }
        Ok(out)
    }

    /// Product; panics on datum mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("datum mismatch")
    }

    /// The involution `sum a_w T_w -> sum bar(a_w) T_{w^-1}^{-1}`.
    pub fn bar(&self) -> Self {
        let mut out = Self::zero(&self.datum);
        for (w, a) in &self.terms {
            let ab = a.bar();
            for (x, c) in Self::t_inv(&w.inv()).terms {
                out.add_term(x, c * &ab);
            }
        }
        out
    }

    /// Map from canonical element encodings to polynomial encodings.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .terms
            .iter()
            .map(|(x, c)| (x.encode(), serde_json::Value::String(c.encode())))
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn from_json(datum: &Arc<RootDatum>, v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("Hecke element must be a JSON object".into()))?;
        let mut h = Self::zero(datum);
        for (k, c) in obj {
            let c = c
                .as_str()
                .ok_or_else(|| Error::Parse("coefficient must be a string".into()))?;
            h.add_term(Elem::decode(datum, k)?, LaurentPoly::decode(c)?);
        }
        Ok(h)
    }
}

impl PartialEq for HeckeElement {
    fn eq(&self, other: &Self) -> bool {
        self.datum.id() == other.datum.id() && self.terms == other.terms
    }
}

impl Eq for HeckeElement {}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(x, c)| format!("({}) T[{}]", c.to_q_string(), x))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn h_mul(a: &HeckeElement, b: &HeckeElement) -> Result<HeckeElement> {
    a.try_mul(b)
}

#[allow(non_snake_case)]
pub fn h_inv_T(w: &Elem) -> HeckeElement {
    HeckeElement::t_inv(w)
}

pub fn h_bar(a: &HeckeElement) -> HeckeElement {
    a.bar()
}
