//! The extended affine Weyl group `X_*(T) x| W`.
//!
//! Elements are stored as `t_lam * w` with `w` a finite Weyl group index.
//! Lengths and the Bruhat order are taken relative to the base alcove
//! `{ x : -1 < <alpha, x> < 0 for all alpha > 0 }`, whose walls give the simple
//! affine reflections `s_1, .., s_r` (finite) and `s_0 = t_{-theta^vee} s_theta`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rootdata::{Coweight, DatumId, RootDatum, WeylIdx};

/// Element `t_lam * w` of the extended affine Weyl group.
#[derive(Clone)]
pub struct AffineWeylElement {
    datum: Arc<RootDatum>,
    lam: Coweight,
    w: WeylIdx,
    len: u32,
}

fn length_of(d: &RootDatum, lam: &Coweight, w: WeylIdx) -> u32 {
    let weyl = d.weyl();
    d.positive_roots()
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let k = r.pair(&lam.0);
            if weyl.inv_positive(w, j) {
                k.unsigned_abs() as u32
            } else {
                (k + 1).unsigned_abs() as u32
            }
        })
        .sum()
}

impl AffineWeylElement {
    pub fn new(datum: &Arc<RootDatum>, lam: Coweight, w: WeylIdx) -> Result<Self> {
        datum.check_dim(&lam)?;
        if w as usize >= datum.weyl().order() {
            return Err(Error::Parse(format!("finite Weyl index {w} out of range")));
        }
        Ok(Self::raw(datum, lam, w))
    }

    fn raw(datum: &Arc<RootDatum>, lam: Coweight, w: WeylIdx) -> Self {
        let len = length_of(datum, &lam, w);
        AffineWeylElement {
            datum: Arc::clone(datum),
            lam,
            w,
            len,
        }
    }

    pub fn identity(datum: &Arc<RootDatum>) -> Self {
        Self::raw(datum, Coweight::zero(datum.dim()), datum.weyl().identity())
    }

    pub fn translation(datum: &Arc<RootDatum>, lam: &Coweight) -> Result<Self> {
        datum.check_dim(lam)?;
        Ok(Self::raw(datum, lam.clone(), datum.weyl().identity()))
    }

    pub fn finite(datum: &Arc<RootDatum>, w: WeylIdx) -> Self {
        Self::raw(datum, Coweight::zero(datum.dim()), w)
    }

    /// Number of simple affine reflections (`s_0, .., s_r`).
    pub fn num_simple(datum: &RootDatum) -> usize {
        if datum.simple_roots().is_empty() {
            0
        } else {
            datum.simple_roots().len() + 1
        }
    }

    /// Simple affine reflection `s_i`; `i = 0` is the affine one.
    pub fn simple(datum: &Arc<RootDatum>, i: usize) -> Self {
        if i == 0 {
            let theta = datum.highest_root().expect("s_0 needs a root");
            let lam = Coweight(theta.coroot.iter().map(|c| -c).collect());
            Self::raw(datum, lam, datum.highest_reflection().unwrap())
        } else {
            Self::finite(datum, datum.weyl().simple(i - 1))
        }
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn datum_id(&self) -> DatumId {
        self.datum.id()
    }

    pub fn translation_part(&self) -> &Coweight {
        &self.lam
    }

    pub fn finite_part(&self) -> WeylIdx {
        self.w
    }

    pub fn length(&self) -> u32 {
        self.len
    }

    /// `(-1)^length`.
    pub fn sign(&self) -> i64 {
        if self.len.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_identity(&self) -> bool {
        self.w == self.datum.weyl().identity() && self.lam.is_zero()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.datum.id() != other.datum.id() {
            return Err(Error::DatumMismatch);
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul(other))
    }

    /// `(t_lam w)(t_mu u) = t_{lam + w(mu)} (w u)`. Panics on datum mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.datum.id(), other.datum.id(), "datum mismatch");
        let weyl = self.datum.weyl();
        let moved = weyl.act(self.w, &other.lam.0);
        let lam = Coweight(self.lam.0.iter().zip(&moved).map(|(a, b)| a + b).collect());
        Self::raw(&self.datum, lam, weyl.mul(self.w, other.w))
    }

    pub fn inv(&self) -> Self {
        let weyl = self.datum.weyl();
        let wi = weyl.inverse(self.w);
        let lam = Coweight(weyl.act(wi, &self.lam.0).iter().map(|a| -a).collect());
        Self::raw(&self.datum, lam, wi)
    }

    /// `self * s_i`.
    pub fn mul_simple(&self, i: usize) -> Self {
        self.mul(&Self::simple(&self.datum, i))
    }

    /// `s_i * self`.
    pub fn simple_mul(&self, i: usize) -> Self {
        Self::simple(&self.datum, i).mul(self)
    }

    pub fn has_right_descent(&self, i: usize) -> bool {
        self.mul_simple(i).len < self.len
    }

    pub fn has_left_descent(&self, i: usize) -> bool {
        self.simple_mul(i).len < self.len
    }

    pub fn first_right_descent(&self) -> Option<usize> {
        (0..Self::num_simple(&self.datum)).find(|&i| self.has_right_descent(i))
    }

    /// `self = omega * s_{i_1} ... s_{i_k}` with `k = length` and `omega` of length zero.
    /// The word is found by peeling off the smallest right descent at each step.
    pub fn reduced_word(&self) -> (Self, Vec<usize>) {
        let mut word = Vec::with_capacity(self.len as usize);
        let mut cur = self.clone();
        while let Some(i) = cur.first_right_descent() {
            word.push(i);
            cur = cur.mul_simple(i);
        }
        word.reverse();
        (cur, word)
    }

    /// The length-zero component `omega` of `self = omega * x_aff`.
    pub fn omega(&self) -> Self {
        self.reduced_word().0
    }

    pub fn in_affine_weyl_group(&self) -> bool {
        self.omega().is_identity()
    }

    pub fn from_word(omega: &Self, word: &[usize]) -> Self {
        word.iter().fold(omega.clone(), |acc, &i| acc.mul_simple(i))
    }

    /// Bruhat order via the lifting property: for `ys < y`,
    /// `x <= y` iff `min(x, xs) <= ys`.
    pub fn bruhat_leq(&self, y: &Self) -> Result<bool> {
        self.check_same(y)?;
        let mut x = self.clone();
        let mut y = y.clone();
        loop {
            if x.len > y.len {
                return Ok(false);
            }
            let Some(i) = y.first_right_descent() else {
                return Ok(x == y);
            };
            y = y.mul_simple(i);
            let xs = x.mul_simple(i);
            if xs.len < x.len {
                x = xs;
            }
        }
    }

    /// Minimal length in its coset `x W`, i.e. no finite right descents.
    pub fn is_minimal_coset(&self) -> bool {
        (1..Self::num_simple(&self.datum)).all(|i| !self.has_right_descent(i))
    }

    /// The Bruhat interval `[., self]`, sorted.
    pub fn lower_ideal(&self) -> Vec<Self> {
        let mut set = HashSet::new();
        self.extend_lower_ideal(&mut set);
        let mut v: Vec<Self> = set.into_iter().collect();
        v.sort();
        v
    }

    fn extend_lower_ideal(&self, set: &mut HashSet<Self>) {
        let (omega, word) = self.reduced_word();
        let mut cur = vec![omega];
        for &i in &word {
            let mut seen: HashSet<Self> = cur.iter().cloned().collect();
            let extra: Vec<Self> = cur
                .iter()
                .map(|z| z.mul_simple(i))
                .filter(|z| seen.insert(z.clone()))
                .collect();
            cur.extend(extra);
        }
        set.extend(cur);
    }

    /// Canonical text form `t[lam]*w[s1.s2]`.
    pub fn encode(&self) -> String {
        let lam: Vec<String> = self.lam.0.iter().map(|c| c.to_string()).collect();
        let word: Vec<String> = self
            .datum
            .weyl()
            .word(self.w)
            .iter()
            .map(|i| format!("s{}", i + 1))
            .collect();
        format!("t[{}]*w[{}]", lam.join(","), word.join("."))
    }

    pub fn decode(datum: &Arc<RootDatum>, s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad element encoding {s:?}"));
        let s = s.trim();
        let rest = s.strip_prefix("t[").ok_or_else(bad)?;
        let (lam, rest) = rest.split_once("]*w[").ok_or_else(bad)?;
        let word = rest.strip_suffix(']').ok_or_else(bad)?;
        let lam: Vec<i64> = if lam.is_empty() {
            Vec::new()
        } else {
            lam.split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad())?
        };
        let r = datum.simple_roots().len();
        let mut letters = Vec::new();
        if !word.is_empty() {
            for t in word.split('.') {
                let i: usize = t
                    .strip_prefix('s')
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(bad)?;
                if i == 0 || i > r {
                    return Err(bad());
                }
                letters.push((i - 1) as u8);
            }
        }
        Self::new(datum, Coweight(lam), datum.weyl().from_word(&letters))
    }

    /// Human-readable form: `omega * s_{i_1} ... s_{i_k}` with translations written out.
    pub fn word_string(&self) -> String {
        let (omega, word) = self.reduced_word();
        let mut parts = Vec::new();
        if !omega.is_identity() {
            parts.push(format!("tau{}", omega.encode()));
        }
        parts.extend(word.iter().map(|i| format!("s{i}")));
        if parts.is_empty() {
            "e".to_string()
        } else {
            parts.join(" ")
        }
    }

    fn order_key(&self) -> (DatumId, u32, &[i64], &[u8]) {
        (
            self.datum.id(),
            self.len,
            &self.lam.0,
            self.datum.weyl().word(self.w),
        )
    }
}

impl PartialEq for AffineWeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.w == other.w && self.lam == other.lam && self.datum.id() == other.datum.id()
    }
}

impl Eq for AffineWeylElement {}

impl Hash for AffineWeylElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.lam.hash(state);
        self.w.hash(state);
    }
}

impl Ord for AffineWeylElement {
    /// By length, then translation, then the reduced word of the finite part.
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for AffineWeylElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AffineWeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl fmt::Debug for AffineWeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (len {})", self.encode(), self.len)
    }
}

/// `t_lam`.
pub fn aw_translation(datum: &Arc<RootDatum>, lam: &Coweight) -> Result<AffineWeylElement> {
    AffineWeylElement::translation(datum, lam)
}

/// `Adm(mu) = { x : x <= t_lam for some lam in W mu }`, sorted.
pub fn aw_adm(datum: &Arc<RootDatum>, mu: &Coweight) -> Result<Vec<AffineWeylElement>> {
    datum.require_dominant(mu)?;
    let mut set = HashSet::new();
    for lam in datum.weyl_orbit(mu) {
        AffineWeylElement::translation(datum, &lam)?.extend_lower_ideal(&mut set);
    }
    let mut v: Vec<AffineWeylElement> = set.into_iter().collect();
    v.sort();
    Ok(v)
}

/// Minimal length representatives of `W / W_mu` inside the finite Weyl group.
pub fn minimal_coset_reps(datum: &RootDatum, mu: &Coweight) -> Vec<WeylIdx> {
    let stab = datum.stabilizer_simple(mu);
    let weyl = datum.weyl();
    weyl.elements()
        .filter(|&w| {
            stab.iter()
                .all(|&i| weyl.length(weyl.mul(w, weyl.simple(i))) > weyl.length(w))
        })
        .collect()
}
