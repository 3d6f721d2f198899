//! Based root data for `GL_n`, `GSp_2n` and `G_2`, their finite Weyl groups,
//! dominance order and weight multiplicities of the dual group.
//!
//! Coweights are integer vectors in a fixed coordinate lattice:
//!
//! * `GL_n`: `X_*(T) = Z^n`, positive roots `e_i - e_j` for `i < j`.
//! * `GSp_2n`: `X_*(T) = Z^n x Z`, a coweight `(a_1, .., a_n; c)` sits in `GL_2n`
//!   as `(a_1, .., a_n, c - a_n, .., c - a_1)`. Simple roots `a_i - a_{i+1}` and
//!   `2 a_n - c`, simple coroots `e_i - e_{i+1}` and `e_n`.
//! * `G_2`: coordinates are coefficients of the two fundamental coweights,
//!   the first dual to the short simple root, the second to the long one.
//!   The three-coordinate notation `(x_1, x_2, x_3)` (with `x_1 + x_2 + x_3`
//!   divisible by 3, taken modulo `(1,1,1)`) reads the coweight as a weight of
//!   the dual `G_2` in its standard realization; `(2,1,0)` is the fundamental
//!   coweight paired trivially with the short simple root.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    GL,
    GSp,
    G2,
}

/// Identifies a root datum: `(GL, n)` is `GL_n`, `(GSp, n)` is `GSp_2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DatumId {
    pub family: Family,
    pub rank: usize,
}

impl fmt::Display for DatumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::GL => write!(f, "GL{}", self.rank),
            Family::GSp => write!(f, "GSp{}", 2 * self.rank),
            Family::G2 => f.write_str("G2"),
        }
    }
}

impl FromStr for DatumId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown group {s:?} (expected e.g. GL4, GSp6, G2)"));
        let (family, rank) = if s.eq_ignore_ascii_case("G2") {
            (Family::G2, 2)
        } else if let Some(n) = s.strip_prefix("GSp").or_else(|| s.strip_prefix("gsp")) {
            let m: usize = n.parse().map_err(|_| bad())?;
            if !m.is_multiple_of(2) {
                return Err(bad());
            }
            (Family::GSp, m / 2)
        } else if let Some(n) = s.strip_prefix("GL").or_else(|| s.strip_prefix("gl")) {
            (Family::GL, n.parse().map_err(|_| bad())?)
        } else {
            return Err(bad());
        };
        Ok(DatumId { family, rank })
    }
}

/// An integer vector in the coordinate lattice of a root datum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coweight(pub Vec<i64>);

impl Coweight {
    pub fn zero(dim: usize) -> Self {
        Coweight(vec![0; dim])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Coweight) -> Coweight {
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Coweight) -> Coweight {
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Coweight {
        Coweight(self.0.iter().map(|a| -a).collect())
    }

    pub fn scaled(&self, k: i64) -> Coweight {
        Coweight(self.0.iter().map(|a| k * a).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A root (as a functional on the coweight lattice) with its coroot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    pub root: Vec<i64>,
    pub coroot: Vec<i64>,
}

impl Root {
    pub fn pair(&self, x: &[i64]) -> i64 {
        dot(&self.root, x)
    }

    pub fn negated(&self) -> Root {
        Root {
            root: self.root.iter().map(|a| -a).collect(),
            coroot: self.coroot.iter().map(|a| -a).collect(),
        }
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Index of an element of the finite Weyl group.
pub type WeylIdx = u16;

const TABLE_LIMIT: usize = 2048;

/// The finite Weyl group as a list of integer matrices acting on coweights.
#[derive(Debug)]
pub struct FiniteWeyl {
    dim: usize,
    mats: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, WeylIdx>,
    table: Option<Vec<WeylIdx>>,
    inverse: Vec<WeylIdx>,
    lengths: Vec<u32>,
    words: Vec<Vec<u8>>,
    simple: Vec<WeylIdx>,
    /// `inv_positive[w][j]`: is `w^-1(alpha_j)` positive, for positive root `j`.
    inv_positive: Vec<Vec<bool>>,
}

impl FiniteWeyl {
    pub fn order(&self) -> usize {
        self.mats.len()
    }

    pub fn identity(&self) -> WeylIdx {
        0
    }

    pub fn simple(&self, i: usize) -> WeylIdx {
        self.simple[i]
    }

    pub fn matrix(&self, w: WeylIdx) -> &[i64] {
        &self.mats[w as usize]
    }

    pub fn mul(&self, a: WeylIdx, b: WeylIdx) -> WeylIdx {
        match &self.table {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => {
                let m = mat_mul(&self.mats[a as usize], &self.mats[b as usize], self.dim);
                self.index[&m]
            }
        }
    }

    pub fn inverse(&self, w: WeylIdx) -> WeylIdx {
        self.inverse[w as usize]
    }

    pub fn length(&self, w: WeylIdx) -> u32 {
        self.lengths[w as usize]
    }

    /// Reduced word (0-based simple indices) obtained by peeling off the
    /// smallest right descent repeatedly.
    pub fn word(&self, w: WeylIdx) -> &[u8] {
        &self.words[w as usize]
    }

    pub fn act(&self, w: WeylIdx, x: &[i64]) -> Vec<i64> {
        mat_vec(&self.mats[w as usize], x, self.dim)
    }

    pub fn inv_positive(&self, w: WeylIdx, root: usize) -> bool {
        self.inv_positive[w as usize][root]
    }

    pub fn from_word(&self, word: &[u8]) -> WeylIdx {
        word.iter().fold(self.identity(), |acc, &i| {
            self.mul(acc, self.simple[i as usize])
        })
    }

    pub fn lookup(&self, mat: &[i64]) -> Option<WeylIdx> {
        self.index.get(mat).copied()
    }

    pub fn elements(&self) -> impl Iterator<Item = WeylIdx> {
        0..self.order() as WeylIdx
    }
}

fn mat_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn mat_vec(a: &[i64], x: &[i64], n: usize) -> Vec<i64> {
    (0..n).map(|i| dot(&a[i * n..(i + 1) * n], x)).collect()
}

fn reflection_matrix(r: &Root, n: usize) -> Vec<i64> {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
        for j in 0..n {
            m[i * n + j] -= r.coroot[i] * r.root[j];
        }
    }
    m
}

/// A based root datum of one of the supported families.
#[derive(Debug)]
pub struct RootDatum {
    id: DatumId,
    dim: usize,
    simple: Vec<Root>,
    positive: Vec<Root>,
    highest: Option<usize>,
    fundamental: Vec<Coweight>,
    height_point: Vec<i64>,
    form: Vec<i64>,
    /// Left inverse of the simple-coroot matrix: rows give simple-coroot coefficients.
    coroot_coeffs: Vec<Vec<Rational64>>,
    weyl: FiniteWeyl,
    s_theta: Option<WeylIdx>,
}

impl RootDatum {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let id = DatumId { family, rank };
        let unsupported = || Error::UnsupportedFamilyRank(format!("{family:?} rank {rank}"));
        let (dim, simple, height_point, fundamental) = match family {
            Family::GL => {
                if !(1..=8).contains(&rank) {
                    return Err(unsupported());
                }
                let n = rank;
                let simple = (0..n - 1)
                    .map(|i| {
                        let mut v = vec![0; n];
                        v[i] = 1;
                        v[i + 1] = -1;
                        Root {
                            root: v.clone(),
                            coroot: v,
                        }
                    })
                    .collect();
                let height_point = (0..n as i64).rev().collect();
                let fundamental = (1..n)
                    .map(|i| Coweight((0..n).map(|j| i64::from(j < i)).collect()))
                    .collect();
                (n, simple, height_point, fundamental)
            }
            Family::GSp => {
                if !(2..=4).contains(&rank) {
                    return Err(unsupported());
                }
                let n = rank;
                let dim = n + 1;
                let mut simple: Vec<Root> = (0..n - 1)
                    .map(|i| {
                        let mut v = vec![0; dim];
                        v[i] = 1;
                        v[i + 1] = -1;
                        Root {
                            root: v.clone(),
                            coroot: v,
                        }
                    })
                    .collect();
                let mut long = vec![0; dim];
                long[n - 1] = 2;
                long[n] = -1;
                let mut co = vec![0; dim];
                co[n - 1] = 1;
                simple.push(Root {
                    root: long,
                    coroot: co,
                });
                let mut height_point: Vec<i64> = (1..=n as i64).rev().collect();
                height_point.push(1);
                let fundamental = (1..=n)
                    .map(|i| {
                        let mut v: Vec<i64> = (0..n).map(|j| i64::from(j < i)).collect();
                        v.push(i64::from(i == n));
                        Coweight(v)
                    })
                    .collect();
                (dim, simple, height_point, fundamental)
            }
            Family::G2 => {
                if rank != 2 {
                    return Err(unsupported());
                }
                let simple = vec![
                    Root {
                        root: vec![1, 0],
                        coroot: vec![2, -3],
                    },
                    Root {
                        root: vec![0, 1],
                        coroot: vec![-1, 2],
                    },
                ];
                let fundamental = vec![Coweight(vec![1, 0]), Coweight(vec![0, 1])];
                (2, simple, vec![1, 1], fundamental)
            }
        };
        Self::from_simple(id, dim, simple, height_point, fundamental)
    }

    fn from_simple(
        id: DatumId,
        dim: usize,
        simple: Vec<Root>,
        height_point: Vec<i64>,
        fundamental: Vec<Coweight>,
    ) -> Result<Self> {
        // All roots: orbit of the simple roots under simple reflections.
        let mut seen: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
        let mut queue: VecDeque<Root> = simple.iter().cloned().collect();
        while let Some(r) = queue.pop_front() {
            if seen.contains_key(&r.root) {
                continue;
            }
            seen.insert(r.root.clone(), r.coroot.clone());
            for s in &simple {
                let c = dot(&r.root, &s.coroot);
                let d = dot(&s.root, &r.coroot);
                let root: Vec<i64> = r.root.iter().zip(&s.root).map(|(a, b)| a - c * b).collect();
                let coroot: Vec<i64> = r
                    .coroot
                    .iter()
                    .zip(&s.coroot)
                    .map(|(a, b)| a - d * b)
                    .collect();
                if !seen.contains_key(&root) {
                    queue.push_back(Root { root, coroot });
                }
            }
        }
        let mut positive: Vec<Root> = seen
            .into_iter()
            .map(|(root, coroot)| Root { root, coroot })
            .filter(|r| r.pair(&height_point) > 0)
            .collect();
        // Deterministic: by height, then lexicographically.
        positive.sort_by(|a, b| {
            a.pair(&height_point)
                .cmp(&b.pair(&height_point))
                .then_with(|| b.root.cmp(&a.root))
        });
        let highest = positive
            .iter()
            .enumerate()
            .max_by_key(|(_, r)| r.pair(&height_point))
            .map(|(i, _)| i);

        let weyl = build_weyl(dim, &simple, &positive, &height_point);

        let mut form = vec![0i64; dim * dim];
        for w in weyl.elements() {
            let m = weyl.matrix(w);
            for i in 0..dim {
                for j in 0..dim {
                    form[i * dim + j] += (0..dim)
                        .map(|k| m[k * dim + i] * m[k * dim + j])
                        .sum::<i64>();
                }
            }
        }

        let coroot_coeffs = left_inverse(&simple, &form, dim);
        let s_theta = highest.map(|i| {
            weyl.lookup(&reflection_matrix(&positive[i], dim))
                .expect("reflection in the highest root lies in W")
        });

        let datum = RootDatum {
            id,
            dim,
            simple,
            positive,
            highest,
            fundamental,
            height_point,
            form,
            coroot_coeffs,
            weyl,
            s_theta,
        };
        datum.validate()?;
        Ok(datum)
    }

    fn validate(&self) -> Result<()> {
        let r = self.simple.len();
        let expected_positive = match self.id.family {
            Family::GL => self.id.rank * (self.id.rank - 1) / 2,
            Family::GSp => self.id.rank * self.id.rank,
            Family::G2 => 6,
        };
        if self.positive.len() != expected_positive {
            return Err(Error::Invariant(format!(
                "{}: {} positive roots, expected {expected_positive}",
                self.id,
                self.positive.len()
            )));
        }
        for i in 0..r {
            for j in 0..r {
                let a = dot(&self.simple[j].root, &self.simple[i].coroot);
                if self.cartan_entry(i, j) != a {
                    return Err(Error::Invariant(format!(
                        "{}: Cartan matrix mismatch",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Expected Cartan matrix `<alpha_i^vee, alpha_j>` for the declared family.
    fn cartan_entry(&self, i: usize, j: usize) -> i64 {
        if i == j {
            return 2;
        }
        let r = self.simple.len();
        match self.id.family {
            Family::GL => {
                if i.abs_diff(j) == 1 {
                    -1
                } else {
                    0
                }
            }
            Family::GSp => {
                if i.abs_diff(j) != 1 {
                    0
                } else if i == r - 2 && j == r - 1 {
                    -2
                } else {
                    -1
                }
            }
            Family::G2 => {
                if i == 0 {
                    -3
                } else {
                    -1
                }
            }
        }
    }

    pub fn id(&self) -> DatumId {
        self.id
    }

    pub fn family(&self) -> Family {
        self.id.family
    }

    pub fn rank(&self) -> usize {
        self.id.rank
    }

    /// Rank of the coordinate lattice.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn simple_roots(&self) -> &[Root] {
        &self.simple
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    pub fn highest_root(&self) -> Option<&Root> {
        self.highest.map(|i| &self.positive[i])
    }

    /// The reflection in the highest root, if there are roots at all.
    pub fn highest_reflection(&self) -> Option<WeylIdx> {
        self.s_theta
    }

    pub fn fundamental_coweights(&self) -> &[Coweight] {
        &self.fundamental
    }

    pub fn weyl(&self) -> &FiniteWeyl {
        &self.weyl
    }

    /// Point with `<alpha_i, p> = 1` for every simple root.
    pub fn height_point(&self) -> &[i64] {
        &self.height_point
    }

    pub fn coxeter_number(&self) -> i64 {
        self.highest_root()
            .map_or(1, |r| r.pair(&self.height_point) + 1)
    }

    /// Sum of the positive coroots (`2 rho^vee`).
    pub fn two_rho_check(&self) -> Coweight {
        let mut v = vec![0; self.dim];
        for r in &self.positive {
            for (a, b) in v.iter_mut().zip(&r.coroot) {
                *a += b;
            }
        }
        Coweight(v)
    }

    /// W-invariant positive definite form on coweights.
    pub fn form(&self, x: &[i64], y: &[i64]) -> i64 {
        let n = self.dim;
        (0..n)
            .map(|i| x[i] * (0..n).map(|j| self.form[i * n + j] * y[j]).sum::<i64>())
            .sum()
    }

    pub fn check_dim(&self, c: &Coweight) -> Result<()> {
        if c.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: c.dim(),
            });
        }
        Ok(())
    }

    /// The pairing `<alpha, lambda>`.
    pub fn pair(&self, cowt: &Coweight, root: &Root) -> Result<i64> {
        self.check_dim(cowt)?;
        if root.root.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: root.root.len(),
            });
        }
        Ok(root.pair(&cowt.0))
    }

    pub fn is_dominant(&self, c: &Coweight) -> bool {
        self.simple.iter().all(|r| r.pair(&c.0) >= 0)
    }

    pub fn require_dominant(&self, c: &Coweight) -> Result<()> {
        self.check_dim(c)?;
        if self.is_dominant(c) {
            Ok(())
        } else {
            Err(Error::NotDominant(self.format_coweight(c)))
        }
    }

    pub fn is_minuscule(&self, c: &Coweight) -> bool {
        self.positive.iter().all(|r| r.pair(&c.0).abs() <= 1)
    }

    pub fn act(&self, w: WeylIdx, c: &Coweight) -> Coweight {
        Coweight(self.weyl.act(w, &c.0))
    }

    /// Dominant conjugate and a Weyl element `w` with `w(c)` dominant.
    pub fn dominant_conjugate(&self, c: &Coweight) -> (Coweight, WeylIdx) {
        let mut x = c.clone();
        let mut w = self.weyl.identity();
        'outer: loop {
            for (i, r) in self.simple.iter().enumerate() {
                let k = r.pair(&x.0);
                if k < 0 {
                    for (a, b) in x.0.iter_mut().zip(&r.coroot) {
                        *a -= k * b;
                    }
                    w = self.weyl.mul(self.weyl.simple(i), w);
                    continue 'outer;
                }
            }
            return (x, w);
        }
    }

    /// Coefficients of `c` in the basis of simple coroots, if `c` lies in their span.
    pub fn simple_coroot_coefficients(&self, c: &Coweight) -> Option<Vec<Rational64>> {
        let coeffs: Vec<Rational64> = self
            .coroot_coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&c.0)
                    .map(|(a, b)| a * Rational64::from_integer(*b))
                    .sum()
            })
            .collect();
        let mut back = vec![Rational64::zero(); self.dim];
        for (k, s) in coeffs.iter().zip(&self.simple) {
            for (a, b) in back.iter_mut().zip(&s.coroot) {
                *a += k * Rational64::from_integer(*b);
            }
        }
        let ok = back
            .iter()
            .zip(&c.0)
            .all(|(a, b)| *a == Rational64::from_integer(*b));
        ok.then_some(coeffs)
    }

    /// `lam <= mu`: `mu - lam` is a nonnegative integral sum of positive coroots.
    pub fn dominance_leq(&self, lam: &Coweight, mu: &Coweight) -> bool {
        if lam.dim() != self.dim || mu.dim() != self.dim {
            return false;
        }
        match self.simple_coroot_coefficients(&mu.sub(lam)) {
            Some(cs) => cs
                .iter()
                .all(|c| c.is_integer() && *c >= Rational64::zero()),
            None => false,
        }
    }

    fn height_of_difference(&self, lam: &Coweight, mu: &Coweight) -> i64 {
        self.simple_coroot_coefficients(&mu.sub(lam))
            .map(|cs| cs.iter().map(|c| c.to_integer()).sum())
            .unwrap_or(i64::MAX)
    }

    /// The full Weyl orbit, sorted.
    pub fn weyl_orbit(&self, c: &Coweight) -> Vec<Coweight> {
        let set: BTreeSet<Coweight> = self.weyl.elements().map(|w| self.act(w, c)).collect();
        set.into_iter().collect()
    }

    /// Dominant coweights `lam <= mu`, starting with `mu`, ordered by the height
    /// of `mu - lam` and then by descending coordinates.
    pub fn dominant_below(&self, mu: &Coweight) -> Result<Vec<Coweight>> {
        self.require_dominant(mu)?;
        let mut found: BTreeSet<Coweight> = BTreeSet::new();
        let mut queue = VecDeque::from([mu.clone()]);
        found.insert(mu.clone());
        while let Some(lam) = queue.pop_front() {
            for r in &self.positive {
                let next = Coweight(lam.0.iter().zip(&r.coroot).map(|(a, b)| a - b).collect());
                let (d, _) = self.dominant_conjugate(&next);
                if !found.contains(&d) && self.dominance_leq(&d, mu) {
                    found.insert(d.clone());
                    queue.push_back(d);
                }
            }
        }
        let mut out: Vec<Coweight> = found.into_iter().collect();
        out.sort_by(|a, b| {
            self.height_of_difference(a, mu)
                .cmp(&self.height_of_difference(b, mu))
                .then_with(|| b.cmp(a))
        });
        Ok(out)
    }

    /// Multiplicity of the weight `lam` (any, not necessarily dominant) in the irreducible representation of the
    /// dual group with highest weight `mu` (Freudenthal's recursion on the
    /// coweight lattice, coroots playing the role of roots).
    pub fn weight_multiplicity(&self, mu: &Coweight, lam: &Coweight) -> Result<u64> {
        self.require_dominant(mu)?;
        self.check_dim(lam)?;
        let (lam, _) = self.dominant_conjugate(lam);
        if !self.dominance_leq(&lam, mu) {
            return Ok(0);
        }
        Ok(self
            .weight_multiplicities(mu)?
            .get(&lam)
            .copied()
            .unwrap_or(0))
    }

    /// All dominant weights of `V_mu` with their multiplicities.
    pub fn weight_multiplicities(&self, mu: &Coweight) -> Result<BTreeMap<Coweight, u64>> {
        let dominant = self.dominant_below(mu)?;
        let rho2 = self.two_rho_check();
        let norm = |x: &Coweight| self.form(&x.0, &x.0) as i128;
        let mu_term = norm(mu);
        let mut mult: BTreeMap<Coweight, u64> = BTreeMap::new();
        for lam in &dominant {
            if lam == mu {
                mult.insert(lam.clone(), 1);
                continue;
            }
            let mut sum: i128 = 0;
            for r in &self.positive {
                let beta = Coweight(r.coroot.clone());
                let mut k = 1;
                loop {
                    let shifted = lam.add(&beta.scaled(k));
                    let (d, _) = self.dominant_conjugate(&shifted);
                    let Some(&m) = mult.get(&d) else { break };
                    sum += m as i128 * self.form(&shifted.0, &beta.0) as i128;
                    k += 1;
                }
            }
            let diff = mu.sub(lam);
            let denom = mu_term - norm(lam) + self.form(&diff.0, &rho2.0) as i128;
            let num = 2 * sum;
            if denom <= 0 || num % denom != 0 {
                return Err(Error::Invariant(format!(
                    "Freudenthal recursion produced a non-integral multiplicity at {lam}"
                )));
            }
            mult.insert(lam.clone(), (num / denom) as u64);
        }
        Ok(mult)
    }

    /// `dim V_mu` by the Weyl dimension formula for the dual group.
    pub fn weyl_dimension(&self, mu: &Coweight) -> BigInt {
        let rho2 = self.two_rho_check();
        let shifted: Vec<i64> = mu.0.iter().zip(&rho2.0).map(|(a, b)| 2 * a + b).collect();
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for r in &self.positive {
            num *= BigInt::from(r.pair(&shifted));
            den *= BigInt::from(r.pair(&rho2.0));
        }
        num / den
    }

    /// Parses a coweight. Accepts internal coordinates, and for `GSp_2n` the
    /// `2n`-coordinate `GL_2n` form, for `G_2` the three-coordinate form.
    pub fn parse_coweight(&self, s: &str) -> Result<Coweight> {
        let coords: Vec<i64> = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad coweight {s:?}")))?;
        let n = self.id.rank;
        match self.id.family {
            Family::GSp if coords.len() == 2 * n => {
                let a = &coords[..n];
                let c = a[n - 1] + coords[n];
                for i in 0..n {
                    if coords[2 * n - 1 - i] != c - a[i] {
                        return Err(Error::Parse(format!(
                            "{s:?} is not a symplectic similitude coweight"
                        )));
                    }
                }
                let mut v = a.to_vec();
                v.push(c);
                Ok(Coweight(v))
            }
            Family::G2 if coords.len() == 3 => {
                if (coords[0] + coords[1] + coords[2]).rem_euclid(3) != 0 {
                    return Err(Error::Parse(format!(
                        "G2 coordinates {s:?} must sum to a multiple of 3"
                    )));
                }
                let long = coords[0] - coords[1];
                let short = (-coords[0] + 2 * coords[1] - coords[2]) / 3;
                Ok(Coweight(vec![short, long]))
            }
            _ => {
                let c = Coweight(coords);
                self.check_dim(&c)?;
                Ok(c)
            }
        }
    }

    /// Formats a coweight in the conventional notation of the family.
    pub fn format_coweight(&self, c: &Coweight) -> String {
        let coords: Vec<i64> = match self.id.family {
            Family::GL => c.0.clone(),
            Family::GSp => {
                let n = self.id.rank;
                let (a, cc) = (&c.0[..n], c.0[n]);
                a.iter()
                    .copied()
                    .chain(a.iter().rev().map(|x| cc - x))
                    .collect()
            }
            Family::G2 => {
                let (s, l) = (c.0[0], c.0[1]);
                vec![3 * s + 2 * l, 3 * s + l, 0]
            }
        };
        let parts: Vec<String> = coords.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }

    /// Minimal decomposition `lam = lam1 - lam2` with both parts dominant:
    /// `lam2 = sum_i max(0, -<alpha_i, lam>) varpi_i`.
    pub fn dominant_split(&self, lam: &Coweight) -> (Coweight, Coweight) {
        let mut lam2 = Coweight::zero(self.dim);
        for (r, w) in self.simple.iter().zip(&self.fundamental) {
            let k = r.pair(&lam.0);
            if k < 0 {
                lam2 = lam2.add(&w.scaled(-k));
            }
        }
        (lam.add(&lam2), lam2)
    }

    /// Stabilizer of `mu` among the simple reflections (0-based indices).
    pub fn stabilizer_simple(&self, mu: &Coweight) -> Vec<usize> {
        (0..self.simple.len())
            .filter(|&i| self.simple[i].pair(&mu.0) == 0)
            .collect()
    }
}

fn build_weyl(dim: usize, simple: &[Root], positive: &[Root], height_point: &[i64]) -> FiniteWeyl {
    let mut id = vec![0; dim * dim];
    for i in 0..dim {
        id[i * dim + i] = 1;
    }
    let gens: Vec<Vec<i64>> = simple.iter().map(|r| reflection_matrix(r, dim)).collect();
    let mut mats = vec![id.clone()];
    let mut index: HashMap<Vec<i64>, WeylIdx> = HashMap::from([(id, 0)]);
    let mut frontier = 0;
    while frontier < mats.len() {
        let m = mats[frontier].clone();
        for g in &gens {
            let p = mat_mul(&m, g, dim);
            if !index.contains_key(&p) {
                index.insert(p.clone(), mats.len() as WeylIdx);
                mats.push(p);
            }
        }
        frontier += 1;
    }
    let order = mats.len();
    let simple_idx: Vec<WeylIdx> = gens.iter().map(|g| index[g]).collect();

    let inv_positive: Vec<Vec<bool>> = mats
        .iter()
        .map(|m| {
            positive
                .iter()
                .map(|r| {
                    // (w^-1 alpha)(x) = alpha(w x): the row vector alpha * M.
                    let img: Vec<i64> = (0..dim)
                        .map(|j| (0..dim).map(|i| r.root[i] * m[i * dim + j]).sum())
                        .collect();
                    dot(&img, height_point) > 0
                })
                .collect()
        })
        .collect();
    let lengths: Vec<u32> = inv_positive
        .iter()
        .map(|v| v.iter().filter(|p| !**p).count() as u32)
        .collect();

    let table = (order <= TABLE_LIMIT).then(|| {
        let mut t = vec![0 as WeylIdx; order * order];
        for a in 0..order {
            for b in 0..order {
                t[a * order + b] = index[&mat_mul(&mats[a], &mats[b], dim)];
            }
        }
        t
    });
    let mut weyl = FiniteWeyl {
        dim,
        mats,
        index,
        table,
        inverse: Vec::new(),
        lengths,
        words: Vec::new(),
        simple: simple_idx,
        inv_positive,
    };
    weyl.inverse = (0..order as WeylIdx)
        .map(|w| {
            (0..order as WeylIdx)
                .find(|&u| weyl.mul(w, u) == 0)
                .expect("finite group element has an inverse")
        })
        .collect();
    weyl.words = (0..order as WeylIdx)
        .map(|w| {
            let mut word = Vec::new();
            let mut cur = w;
            while weyl.length(cur) > 0 {
                let i = (0..simple.len())
                    .find(|&i| weyl.length(weyl.mul(cur, weyl.simple[i])) < weyl.length(cur))
                    .expect("nonidentity element has a right descent");
                word.push(i as u8);
                cur = weyl.mul(cur, weyl.simple[i]);
            }
            word.reverse();
            word
        })
        .collect();
    weyl
}

/// Rows `F` with `F * C = I` for `C` the matrix of simple coroots, built as
/// `(C^T B C)^-1 C^T B` for the invariant form `B`.
#[allow(clippy::needless_range_loop)]
fn left_inverse(simple: &[Root], form: &[i64], dim: usize) -> Vec<Vec<Rational64>> {
    let r = simple.len();
    if r == 0 {
        return Vec::new();
    }
    let r64 = Rational64::from_integer;
    // C^T B: r x dim
    let ctb: Vec<Vec<Rational64>> = simple
        .iter()
        .map(|s| {
            (0..dim)
                .map(|j| r64((0..dim).map(|i| s.coroot[i] * form[i * dim + j]).sum()))
                .collect()
        })
        .collect();
    // Gram = C^T B C: r x r
    let mut gram: Vec<Vec<Rational64>> = (0..r)
        .map(|a| {
            (0..r)
                .map(|b| (0..dim).map(|j| ctb[a][j] * r64(simple[b].coroot[j])).sum())
                .collect()
        })
        .collect();
    let mut rhs = ctb;
    // Gauss-Jordan on [gram | rhs].
    for col in 0..r {
        let pivot = (col..r)
            .find(|&i| !gram[i][col].is_zero())
            .expect("simple coroots are independent");
        gram.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = gram[col][col].recip();
        for x in gram[col].iter_mut() {
            *x *= inv;
        }
        for x in rhs[col].iter_mut() {
            *x *= inv;
        }
        for i in 0..r {
            if i != col && !gram[i][col].is_zero() {
                let f = gram[i][col];
                for j in 0..r {
                    let t = gram[col][j];
                    gram[i][j] -= f * t;
                }
                for j in 0..dim {
                    let t = rhs[col][j];
                    rhs[i][j] -= f * t;
                }
            }
        }
    }
    rhs
}
