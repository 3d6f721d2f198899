//! Kazhdan-Lusztig polynomials `P_{x,w}`, inverse KL polynomials `Q_{x,w}` and
//! R-polynomials `R_{x,y}`, memoized per column and optionally persisted.
//!
//! Conventions: `C''_w = eps_w sum_x P_{x,w} T_x`, `T_w = sum_x eps_w Q_{x,w} C''_x`
//! and `T_{y^-1}^{-1} = sum_x eps_x eps_y q_y^{-1} R_{x,y} T_x`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::RwLock;

use crate::affweyl::AffineWeylElement as Elem;
use crate::error::{Error, Result};
use crate::hecke::HeckeElement;
use crate::laurent::LaurentPoly;
use crate::rootdata::RootDatum;

/// Tag recorded in cache headers naming the base alcove convention.
pub const CONVENTION_TAG: &str = "antidominant";

/// Environment variable consulted for the cache directory.
pub const CACHE_ENV: &str = "AFFHECKE_CACHE_DIR";

pub type Column = Arc<HashMap<Elem, LaurentPoly>>;

/// Memo store for one root datum. Safe to share between threads.
pub struct KlStore {
    datum: Arc<RootDatum>,
    cache_file: Option<PathBuf>,
    p_cols: RwLock<HashMap<Elem, Column>>,
    q_cols: RwLock<HashMap<Elem, Column>>,
    r_cols: RwLock<HashMap<Elem, Column>>,
    ideals: RwLock<HashMap<Elem, Arc<Vec<Elem>>>>,
    /// Records read from disk, not yet assembled into columns.
    loaded: RwLock<HashMap<Elem, HashMap<Elem, LaurentPoly>>>,
}

fn sign_poly(e: i64) -> LaurentPoly {
    LaurentPoly::from(e)
}

impl KlStore {
    pub fn new(datum: &Arc<RootDatum>) -> Self {
        KlStore {
            datum: Arc::clone(datum),
            cache_file: None,
            p_cols: RwLock::default(),
            q_cols: RwLock::default(),
            r_cols: RwLock::default(),
            ideals: RwLock::default(),
            loaded: RwLock::default(),
        }
    }

    /// A store backed by `<dir>/<group>.klcache`. Unreadable, corrupt or
    /// mismatched files are ignored.
    pub fn with_cache_dir(datum: &Arc<RootDatum>, dir: &Path) -> Self {
        let mut store = Self::new(datum);
        let file = dir.join(format!("{}.klcache", datum.id()));
        if let Ok(text) = fs::read_to_string(&file) {
            if let Some(records) = store.parse_cache(&text) {
                *store.loaded.write() = records;
            }
        }
        store.cache_file = Some(file);
        store
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    fn header(&self) -> String {
        format!("klcache v1 {} {}", self.datum.id(), CONVENTION_TAG)
    }

    fn parse_cache(&self, text: &str) -> Option<HashMap<Elem, HashMap<Elem, LaurentPoly>>> {
        let mut lines = text.lines();
        if lines.next()? != self.header() {
            return None;
        }
        let mut out: HashMap<Elem, HashMap<Elem, LaurentPoly>> = HashMap::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            let (x, w, p) = (parts.next()?, parts.next()?, parts.next()?);
            if parts.next().is_some() {
                return None;
            }
            let x = Elem::decode(&self.datum, x).ok()?;
            let w = Elem::decode(&self.datum, w).ok()?;
            let p = LaurentPoly::decode(p).ok()?;
            out.entry(w).or_default().insert(x, p);
        }
        Some(out)
    }

    /// Writes every computed `P_{x,w}` to the cache file, if there is one.
    pub fn save(&self) -> Result<()> {
        let Some(file) = &self.cache_file else {
            return Ok(());
        };
        let mut records: Vec<(Elem, Elem, LaurentPoly)> = Vec::new();
        for (w, col) in self.p_cols.read().iter() {
            for (x, p) in col.iter() {
                records.push((x.clone(), w.clone(), p.clone()));
            }
        }
        for (w, col) in self.loaded.read().iter() {
            if self.p_cols.read().contains_key(w) {
                continue;
            }
            for (x, p) in col {
                records.push((x.clone(), w.clone(), p.clone()));
            }
        }
        records.sort_by(|a, b| (&a.1, &a.0).cmp(&(&b.1, &b.0)));
        if let Some(dir) = file.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = file.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
            writeln!(f, "{}", self.header())?;
            for (x, w, p) in &records {
                writeln!(f, "{} {} {}", x.encode(), w.encode(), p.encode())?;
            }
            f.flush()?;
        }
        fs::rename(&tmp, file)?;
        Ok(())
    }

    fn check(&self, x: &Elem) -> Result<()> {
        if x.datum_id() != self.datum.id() {
            return Err(Error::DatumMismatch);
        }
        Ok(())
    }

    /// The Bruhat interval below `w`, sorted.
    pub fn ideal(&self, w: &Elem) -> Arc<Vec<Elem>> {
        if let Some(v) = self.ideals.read().get(w) {
            return Arc::clone(v);
        }
        let v = Arc::new(w.lower_ideal());
        self.ideals.write().insert(w.clone(), Arc::clone(&v));
        v
    }

    /// `x -> P_{x,w}` for every `x <= w`.
    pub fn kl_column(&self, w: &Elem) -> Column {
        if let Some(c) = self.p_cols.read().get(w) {
            return Arc::clone(c);
        }
        let col = self
            .loaded_column(w)
            .unwrap_or_else(|| Arc::new(self.compute_kl_column(w)));
        self.p_cols.write().insert(w.clone(), Arc::clone(&col));
        col
    }

    fn loaded_column(&self, w: &Elem) -> Option<Column> {
        let loaded = self.loaded.read();
        let recs = loaded.get(w)?;
        let ideal = self.ideal(w);
        if recs.len() != ideal.len() || !ideal.iter().all(|x| recs.contains_key(x)) {
            return None;
        }
        Some(Arc::new(recs.clone()))
    }

    fn compute_kl_column(&self, w: &Elem) -> HashMap<Elem, LaurentPoly> {
        let ideal = self.ideal(w);
        let Some(s) = w.first_right_descent() else {
            return HashMap::from([(w.clone(), LaurentPoly::one())]);
        };
        let v = w.mul_simple(s);
        let pv = self.kl_column(&v);
        let lw = w.length() as i32;
        let lv = v.length() as i32;
        // Correction terms: z < v with zs < z and mu(z, v) != 0.
        let mut corrections: Vec<(LaurentPoly, Column)> = Vec::new();
        for z in self.ideal(&v).iter() {
            let lz = z.length() as i32;
            if lz >= lv || (lv - lz) % 2 == 0 || !z.has_right_descent(s) {
                continue;
            }
            let mu = pv[z].coeff(lv - lz - 1);
            if mu == 0.into() {
                continue;
            }
            corrections.push((LaurentPoly::monomial(mu, lw - lz), self.kl_column(z)));
        }
        let q = LaurentPoly::q_pow(1);
        let zero = LaurentPoly::zero();
        let mut col = HashMap::with_capacity(ideal.len());
        for x in ideal.iter() {
            let xs = x.mul_simple(s);
            let p_xs = pv.get(&xs).unwrap_or(&zero);
            let p_x = pv.get(x).unwrap_or(&zero);
            let mut p = if xs.length() < x.length() {
                p_xs + &(&q * p_x)
            } else {
                &(&q * p_xs) + p_x
            };
            for (coef, pz) in &corrections {
                if let Some(pxz) = pz.get(x) {
                    p -= coef * pxz;
                }
            }
            if !p.is_zero() {
                col.insert(x.clone(), p);
            }
        }
        col
    }

    pub fn kl(&self, x: &Elem, w: &Elem) -> Result<LaurentPoly> {
        self.check(x)?;
        self.check(w)?;
        Ok(self.kl_column(w).get(x).cloned().unwrap_or_default())
    }

    /// `x -> Q_{x,w}` for every `x <= w`, solving
    /// `sum_z eps_x eps_z P_{x,z} Q_{z,w} = delta_{x,w}` downward in length.
    pub fn inv_kl_column(&self, w: &Elem) -> Column {
        if let Some(c) = self.q_cols.read().get(w) {
            return Arc::clone(c);
        }
        let ideal = self.ideal(w);
        let mut col: HashMap<Elem, LaurentPoly> = HashMap::with_capacity(ideal.len());
        col.insert(w.clone(), LaurentPoly::one());
        let mut done: Vec<(Elem, Column)> = vec![(w.clone(), self.kl_column(w))];
        for x in ideal.iter().rev() {
            if x == w {
                continue;
            }
            let mut acc = LaurentPoly::zero();
            for (z, pz) in &done {
                if let (Some(pxz), Some(qzw)) = (pz.get(x), col.get(z)) {
                    let t = pxz * qzw;
                    if (x.length() + z.length()) % 2 == 0 {
                        acc -= t;
                    } else {
                        acc += t;
                    }
                }
            }
            if !acc.is_zero() {
                col.insert(x.clone(), acc);
            }
            done.push((x.clone(), self.kl_column(x)));
        }
        let col = Arc::new(col);
        self.q_cols.write().insert(w.clone(), Arc::clone(&col));
        col
    }

    pub fn inv_kl(&self, x: &Elem, w: &Elem) -> Result<LaurentPoly> {
        self.check(x)?;
        self.check(w)?;
        Ok(self.inv_kl_column(w).get(x).cloned().unwrap_or_default())
    }

    /// `x -> R_{x,y}` for every `x <= y`, by the right-descent recursion.
    pub fn rpoly_column(&self, y: &Elem) -> Column {
        if let Some(c) = self.r_cols.read().get(y) {
            return Arc::clone(c);
        }
        let col = match y.first_right_descent() {
            None => HashMap::from([(y.clone(), LaurentPoly::one())]),
            Some(s) => {
                let ys = y.mul_simple(s);
                let prev = self.rpoly_column(&ys);
                let q = LaurentPoly::q_pow(1);
                let qm1 = &q - &LaurentPoly::one();
                let zero = LaurentPoly::zero();
                let mut col = HashMap::new();
                for x in self.ideal(y).iter() {
                    let xs = x.mul_simple(s);
                    let r = if xs.length() < x.length() {
                        prev.get(&xs).cloned().unwrap_or_default()
                    } else {
                        &(&qm1 * prev.get(x).unwrap_or(&zero))
                            + &(&q * prev.get(&xs).unwrap_or(&zero))
                    };
                    if !r.is_zero() {
                        col.insert(x.clone(), r);
                    }
                }
                col
            }
        };
        let col = Arc::new(col);
        self.r_cols.write().insert(y.clone(), Arc::clone(&col));
        col
    }

    pub fn rpoly(&self, x: &Elem, y: &Elem) -> Result<LaurentPoly> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.rpoly_column(y).get(x).cloned().unwrap_or_default())
    }

    /// `C''_w = eps_w sum_x P_{x,w} T_x`.
    pub fn c_basis(&self, w: &Elem) -> HeckeElement {
        let e = sign_poly(w.sign());
        HeckeElement::from_terms(
            &self.datum,
            self.kl_column(w).iter().map(|(x, p)| (x.clone(), p * &e)),
        )
    }

    /// Coefficients of `a` in the `C''` basis.
    pub fn t_to_c(&self, a: &HeckeElement) -> Result<BTreeMap<Elem, LaurentPoly>> {
        if a.datum().id() != self.datum.id() {
            return Err(Error::DatumMismatch);
        }
        let mut out: BTreeMap<Elem, LaurentPoly> = BTreeMap::new();
        for (w, aw) in a.terms() {
            let e = sign_poly(w.sign());
            for (x, q) in self.inv_kl_column(w).iter() {
                let c = &(aw * q) * &e;
                let slot = out.entry(x.clone()).or_default();
                *slot += c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// `sum_w c_w C''_w` in the `T` basis.
    pub fn c_to_t(&self, coeffs: &BTreeMap<Elem, LaurentPoly>) -> Result<HeckeElement> {
        let mut out = HeckeElement::zero(&self.datum);
        for (w, c) in coeffs {
            self.check(w)?;
            for (x, p) in self.c_basis(w).terms() {
                out.add_term(x.clone(), p * c);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisDirection {
    TToC,
    CToT,
}

pub fn h_rpoly(store: &KlStore, x: &Elem, y: &Elem) -> Result<LaurentPoly> {
    store.rpoly(x, y)
}

pub fn h_klpoly(store: &KlStore, x: &Elem, w: &Elem) -> Result<LaurentPoly> {
    store.kl(x, w)
}

pub fn h_inv_klpoly(store: &KlStore, v: &Elem, y: &Elem) -> Result<LaurentPoly> {
    store.inv_kl(v, y)
}

/// Coefficients of `a` in the requested basis: `TToC` reads `a` in the `T`
/// basis, `CToT` reads its coefficients as `C''` coefficients.
pub fn h_change_basis(
    store: &KlStore,
    a: &HeckeElement,
    direction: BasisDirection,
) -> Result<BTreeMap<Elem, LaurentPoly>> {
    match direction {
        BasisDirection::TToC => store.t_to_c(a),
        BasisDirection::CToT => Ok(store.c_to_t(a.terms())?.terms().clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affweyl::aw_adm;
    use crate::rootdata::{Coweight, Family};
    use proptest::prelude::*;

    fn datum(f: Family, r: usize) -> Arc<RootDatum> {
        Arc::new(RootDatum::new(f, r).unwrap())
    }

    fn elem(d: &Arc<RootDatum>, word: &[usize], shift: bool) -> Elem {
        let n = Elem::num_simple(d);
        let mut start = Elem::identity(d);
        if shift {
            let mut lam = vec![0; d.dim()];
            lam[0] = 1;
            start = Elem::translation(d, &Coweight(lam)).unwrap();
        }
        word.iter().fold(start, |acc, &i| acc.mul_simple(i % n))
    }

    fn qp(c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_q_coeffs(c.iter().copied())
    }

    #[test]
    fn s4_singular_kl_polynomial() {
        let d = datum(Family::GL, 4);
        let store = KlStore::new(&d);
        let x = Elem::simple(&d, 2);
        let w = elem(&d, &[2, 1, 3, 2], false);
        assert_eq!(w.length(), 4);
        assert_eq!(store.kl(&x, &w).unwrap(), qp(&[1, 1]));
        assert_eq!(store.kl(&Elem::identity(&d), &w).unwrap(), qp(&[1, 1]));
        assert_eq!(store.kl(&w, &x).unwrap(), LaurentPoly::zero());
    }

    #[test]
    fn c_basis_of_simple() {
        let d = datum(Family::GL, 2);
        let store = KlStore::new(&d);
        let s = Elem::simple(&d, 1);
        let c = store.c_basis(&s);
        let expected = HeckeElement::from_terms(
            &d,
            [
                (Elem::identity(&d), LaurentPoly::from(-1)),
                (s.clone(), LaurentPoly::from(-1)),
            ],
        );
        assert_eq!(c, expected);
        assert_eq!(store.c_basis(&Elem::identity(&d)), HeckeElement::one(&d));
    }

    #[test]
    fn covering_rpoly() {
        let d = datum(Family::GL, 3);
        let store = KlStore::new(&d);
        let s = Elem::simple(&d, 0);
        assert_eq!(store.rpoly(&Elem::identity(&d), &s).unwrap(), qp(&[-1, 1]));
        assert_eq!(store.rpoly(&s, &s).unwrap(), LaurentPoly::one());
    }

    /// Extracts `R_{x,y}` from the `T`-expansion of `T_{y^-1}^{-1}`.
    fn rpoly_oracle(y: &Elem, x: &Elem) -> LaurentPoly {
        let h = HeckeElement::t_inv(&y.inv());
        let c = h.coeff(x);
        &(&c * &LaurentPoly::q_pow(y.length() as i32)) * &LaurentPoly::from(x.sign() * y.sign())
    }

    /// Independent check of `P`: `q_w^{-1/2} sum_x P_{x,w} T_x` is bar invariant
    /// and the degree bound holds. These conditions determine `P` uniquely.
    fn assert_kl_column_valid(store: &KlStore, w: &Elem) {
        let col = store.kl_column(w);
        let c = HeckeElement::from_terms(
            store.datum(),
            col.iter()
                .map(|(x, p)| (x.clone(), p * &LaurentPoly::v_pow(-(w.length() as i32)))),
        );
        assert_eq!(c.bar(), c, "bar invariance for {w}");
        for (x, p) in col.iter() {
            let coeffs = p.q_coeffs().expect("P is a polynomial in q");
            assert!(coeffs.iter().all(|c| *c >= 0.into()), "positivity");
            if x != w {
                assert!(2 * (coeffs.len() as i64 - 1) < (w.length() - x.length()) as i64);
            } else {
                assert!(p.is_one());
            }
        }
    }

    #[test]
    fn kl_columns_are_bar_invariant() {
        for (f, r, mu) in [
            (Family::GL, 3, vec![1, 1, 0]),
            (Family::GL, 3, vec![2, 1, 0]),
            (Family::GSp, 2, vec![1, 1, 1]),
            (Family::G2, 2, vec![0, 1]),
        ] {
            let d = datum(f, r);
            let store = KlStore::new(&d);
            for w in aw_adm(&d, &Coweight(mu)).unwrap() {
                assert_kl_column_valid(&store, &w);
            }
        }
    }

    #[test]
    fn p_q_inversion_on_adm() {
        let d = datum(Family::GL, 4);
        let store = KlStore::new(&d);
        let adm = aw_adm(&d, &Coweight(vec![1, 1, 0, 0])).unwrap();
        for x in &adm {
            for w in &adm {
                let mut s = LaurentPoly::zero();
                for z in store.ideal(w).iter() {
                    let p = store.kl(x, z).unwrap();
                    if p.is_zero() {
                        continue;
                    }
                    let t = &p * &store.inv_kl(z, w).unwrap();
                    s += &t * &LaurentPoly::from(x.sign() * z.sign());
                }
                let expected = if x == w {
                    LaurentPoly::one()
                } else {
                    LaurentPoly::zero()
                };
                assert_eq!(s, expected);
            }
        }
    }

    #[test]
    fn small_intervals_have_trivial_polynomials() {
        let d = datum(Family::GSp, 2);
        let store = KlStore::new(&d);
        let w = elem(&d, &[0, 1, 2, 1, 0, 2], true);
        for x in store.ideal(&w).iter() {
            let y = elem(&d, &[1, 2], false).mul(x);
            for v in store.ideal(&y).iter() {
                if y.length() - v.length() <= 2 {
                    assert!(store.kl(v, &y).unwrap().is_one());
                    assert!(store.inv_kl(v, &y).unwrap().is_one());
                }
            }
        }
    }

    #[test]
    fn change_basis_round_trip() {
        let d = datum(Family::GL, 4);
        let store = KlStore::new(&d);
        let adm = aw_adm(&d, &Coweight(vec![1, 1, 0, 0])).unwrap();
        let h = HeckeElement::from_terms(
            &d,
            adm.iter()
                .enumerate()
                .map(|(k, x)| (x.clone(), LaurentPoly::from_q_coeffs([k as i64 - 7, 2]))),
        );
        let c = h_change_basis(&store, &h, BasisDirection::TToC).unwrap();
        assert_eq!(store.c_to_t(&c).unwrap(), h);
    }

    #[test]
    fn cache_persistence() {
        let dir = tempfile::tempdir().unwrap();
        let d = datum(Family::GL, 3);
        let w = elem(&d, &[0, 1, 2, 1, 0], true);
        let expected = {
            let store = KlStore::with_cache_dir(&d, dir.path());
            let col = store.kl_column(&w);
            store.save().unwrap();
            col
        };
        let store = KlStore::with_cache_dir(&d, dir.path());
        assert!(store.loaded.read().contains_key(&w));
        assert_eq!(*store.kl_column(&w), *expected);

        // Corrupt or foreign files are ignored.
        let file = dir.path().join("GL3.klcache");
        fs::write(&file, "klcache v1 GL3 antidominant\ngarbage\n").unwrap();
        let store = KlStore::with_cache_dir(&d, dir.path());
        assert!(store.loaded.read().is_empty());
        assert_eq!(*store.kl_column(&w), *expected);
        fs::write(&file, "klcache v0 GL3 standard\n").unwrap();
        assert!(KlStore::with_cache_dir(&d, dir.path())
            .loaded
            .read()
            .is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rpoly_matches_bar_expansion(word in prop::collection::vec(0usize..3, 0..7),
                                       shift in any::<bool>(), gsp in any::<bool>()) {
            let d = if gsp { datum(Family::GSp, 2) } else { datum(Family::GL, 3) };
            let store = KlStore::new(&d);
            let y = elem(&d, &word, shift);
            for x in store.ideal(&y).iter() {
                prop_assert_eq!(store.rpoly(x, &y).unwrap(), rpoly_oracle(&y, x));
            }
        }
    }
}
