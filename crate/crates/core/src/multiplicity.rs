//! Multiplicities of the intersection complexes `IC_w(-i)` in nearby cycles,
//! i.e. the `C''`-coefficients of the nearby-cycles trace function, together
//! with Bruhat configurations and table summaries.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::affweyl::{aw_adm, minimal_coset_reps, AffineWeylElement as Elem};
use crate::central::c_kottwitz;
use crate::error::{Error, Result};
use crate::hecke::HeckeElement;
use crate::kl::KlStore;
use crate::laurent::LaurentPoly;
use crate::rootdata::{Coweight, RootDatum};

#[derive(Clone, Debug)]
pub struct MultiplicityRow {
    pub element: Elem,
    /// `m(w) = sum_i m(w, i) q^i`.
    pub mult: LaurentPoly,
    /// Number of admissible `x > w` with `l(x) = l(w) + 1, l(w) + 2, ...`.
    pub config: Vec<usize>,
}

impl MultiplicityRow {
    /// Coefficients `m(w,0), m(w,1), ...` if `m(w)` is a polynomial in `q`.
    pub fn coefficients(&self) -> Option<Vec<BigInt>> {
        self.mult.q_coeffs()
    }

    pub fn length(&self) -> u32 {
        self.element.length()
    }
}

#[derive(Clone, Debug)]
pub struct MultiplicityTable {
    datum: Arc<RootDatum>,
    mu: Coweight,
    mu_length: u32,
    rows: Vec<MultiplicityRow>,
    index: HashMap<Elem, usize>,
    trace: HeckeElement,
}

/// One line of the summarized table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub length: u32,
    pub count: usize,
    pub multiplicities: Vec<String>,
    pub config: Vec<usize>,
}

fn coefficient_strings(p: &LaurentPoly) -> Vec<String> {
    match p.q_coeffs() {
        Some(c) => c.iter().map(|x| x.to_string()).collect(),
        None => vec![p.to_q_string()],
    }
}

/// Computes `m(w)` for all `w` in `Adm(mu)` by downward induction on length:
/// `eps_w m(w) = f_w - sum_{x > w} eps_x m(x) P_{w,x}` where `f` is the
/// nearby-cycles trace function.
pub fn m_compute(store: &KlStore, mu: &Coweight) -> Result<MultiplicityTable> {
    let datum = store.datum();
    datum.require_dominant(mu)?;
    let adm = aw_adm(datum, mu)?;
    let trace = c_kottwitz(datum, mu)?;
    let mu_length = Elem::translation(datum, mu)?.length();

    let supp: Vec<&Elem> = trace.support().collect();
    if supp.len() != adm.len() || supp.iter().zip(&adm).any(|(a, b)| *a != b) {
        return Err(Error::Invariant(format!(
            "support of the trace function ({} elements) differs from Adm(mu) ({} elements)",
            supp.len(),
            adm.len()
        )));
    }

    let columns: Vec<_> = adm.par_iter().map(|x| store.kl_column(x)).collect();
    let pos: HashMap<Elem, usize> = adm
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();

    // Signed multiplicities eps_x m(x), filled from the top length down.
    let mut signed: Vec<Option<LaurentPoly>> = vec![None; adm.len()];
    let mut by_length: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, x) in adm.iter().enumerate() {
        by_length.entry(x.length()).or_default().push(i);
    }
    for (_, layer) in by_length.iter().rev() {
        let done = &signed;
        let values: Vec<LaurentPoly> = layer
            .par_iter()
            .map(|&i| {
                let w = &adm[i];
                let mut m = trace.coeff(w);
                for (j, x) in adm.iter().enumerate() {
                    if x.length() <= w.length() {
                        continue;
                    }
                    if let (Some(p), Some(mx)) = (columns[j].get(w), &done[j]) {
                        m -= mx * p;
                    }
                }
                m
            })
            .collect();
        for (&i, v) in layer.iter().zip(values) {
            signed[i] = Some(v);
        }
    }

    let mut rows = Vec::with_capacity(adm.len());
    for (i, w) in adm.iter().enumerate() {
        let mult = signed[i].take().unwrap() * LaurentPoly::from(w.sign());
        let mut config: Vec<usize> = Vec::new();
        for (j, x) in adm.iter().enumerate() {
            if x.length() > w.length() && columns[j].contains_key(w) {
                let k = (x.length() - w.length() - 1) as usize;
                if config.len() <= k {
                    config.resize(k + 1, 0);
                }
                config[k] += 1;
            }
        }
        rows.push(MultiplicityRow {
            element: w.clone(),
            mult,
            config,
        });
    }
    Ok(MultiplicityTable {
        datum: Arc::clone(datum),
        mu: mu.clone(),
        mu_length,
        rows,
        index: pos,
        trace,
    })
}

impl MultiplicityTable {
    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn mu(&self) -> &Coweight {
        &self.mu
    }

    /// `l(t_mu)`.
    pub fn mu_length(&self) -> u32 {
        self.mu_length
    }

    /// Rows in increasing element order; the keys are exactly `Adm(mu)`.
    pub fn rows(&self) -> &[MultiplicityRow] {
        &self.rows
    }

    pub fn adm(&self) -> impl Iterator<Item = &Elem> {
        self.rows.iter().map(|r| &r.element)
    }

    pub fn row(&self, w: &Elem) -> Option<&MultiplicityRow> {
        self.index.get(w).map(|&i| &self.rows[i])
    }

    /// The nearby-cycles trace function the table was computed from.
    pub fn trace(&self) -> &HeckeElement {
        &self.trace
    }

    /// `m(w)` as `C''`-coefficients.
    pub fn c_coefficients(&self) -> BTreeMap<Elem, LaurentPoly> {
        self.rows
            .iter()
            .filter(|r| !r.mult.is_zero())
            .map(|r| (r.element.clone(), r.mult.clone()))
            .collect()
    }

    /// Length-zero rows (`tau`).
    pub fn tau(&self) -> Option<&MultiplicityRow> {
        self.rows.iter().find(|r| r.length() == 0)
    }

    pub fn title(&self) -> String {
        format!(
            "{} mu={}",
            self.datum.id(),
            self.datum.format_coweight(&self.mu)
        )
    }

    /// Rows grouped by (length, multiplicities, configuration), ordered by
    /// length, then configuration, then multiplicities.
    pub fn summarize(&self) -> Vec<SummaryRow> {
        let mut groups: BTreeMap<(u32, Vec<usize>, Vec<String>), usize> = BTreeMap::new();
        for r in &self.rows {
            *groups
                .entry((r.length(), r.config.clone(), coefficient_strings(&r.mult)))
                .or_default() += 1;
        }
        let mut out: Vec<SummaryRow> = groups
            .into_iter()
            .map(|((length, config, multiplicities), count)| SummaryRow {
                length,
                count,
                multiplicities,
                config,
            })
            .collect();
        // Numeric order on the multiplicity vectors for ties in configuration.
        out.sort_by(|a, b| {
            (a.length, &a.config)
                .cmp(&(b.length, &b.config))
                .then_with(|| {
                    let num = |r: &SummaryRow| -> Vec<BigInt> {
                        r.multiplicities
                            .iter()
                            .map(|s| s.parse().unwrap_or_default())
                            .collect()
                    };
                    num(a).cmp(&num(b))
                })
        });
        out
    }

    /// Plain text table in the layout
    /// `l=<len> | <count> | <multiplicities> | <configuration>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.title()).unwrap();
        writeln!(s, "Number of admissible alcoves: {}", self.rows.len()).unwrap();
        writeln!(
            s,
            "Length | #Alcoves | Multiplicities | Bruhat configuration"
        )
        .unwrap();
        let mut last = None;
        for r in self.summarize() {
            let len = if last == Some(r.length) {
                String::new()
            } else {
                format!("l={}", r.length)
            };
            last = Some(r.length);
            let config = if r.config.is_empty() {
                "-".to_string()
            } else {
                r.config
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            writeln!(
                s,
                "{:<5}| {} | {} | {}",
                len,
                r.count,
                r.multiplicities.join(", "),
                config
            )
            .unwrap();
        }
        s
    }

    /// One line per alcove.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("element,length,multiplicities,configuration\n");
        for r in &self.rows {
            let config: Vec<String> = r.config.iter().map(|c| c.to_string()).collect();
            writeln!(
                s,
                "{},{},{},{}",
                r.element.encode(),
                r.length(),
                coefficient_strings(&r.mult).join(";"),
                config.join(";")
            )
            .unwrap();
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "element": r.element.encode(),
                    "length": r.length(),
                    "multiplicity": r.mult.encode(),
                    "coefficients": coefficient_strings(&r.mult),
                    "configuration": r.config,
                })
            })
            .collect();
        serde_json::json!({
            "group": self.datum.id().to_string(),
            "mu": self.datum.format_coweight(&self.mu),
            "mu_length": self.mu_length,
            "admissible": self.rows.len(),
            "rows": rows,
            "summary": self.summarize(),
        })
    }
}

/// Configuration vector of `w`.
pub fn m_bruhat_config(table: &MultiplicityTable, w: &Elem) -> Result<Vec<usize>> {
    table
        .row(w)
        .map(|r| r.config.clone())
        .ok_or_else(|| Error::NotInAdm(w.encode()))
}

pub fn m_summarize(table: &MultiplicityTable) -> Vec<SummaryRow> {
    table.summarize()
}

/// `sum over minimal representatives of W / W_mu of q^l`.
pub fn m_minuscule_poincare_oracle(datum: &RootDatum, mu: &Coweight) -> Result<LaurentPoly> {
    datum.require_dominant(mu)?;
    if !datum.is_minuscule(mu) {
        return Err(Error::NotMinuscule(datum.format_coweight(mu)));
    }
    let mut p = LaurentPoly::zero();
    for w in minimal_coset_reps(datum, mu) {
        p += LaurentPoly::q_pow(datum.weyl().length(w) as i32);
    }
    Ok(p)
}

/// Per-element outcome of the structural checks.
#[derive(Clone, Debug, Serialize)]
pub struct RowReport {
    pub element: String,
    pub degree_bound: bool,
    pub palindromic: bool,
    pub unimodal: bool,
    pub endpoints: bool,
    pub nonnegative: bool,
}

impl RowReport {
    pub fn all(&self) -> bool {
        self.degree_bound && self.palindromic && self.unimodal && self.endpoints && self.nonnegative
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub rows: Vec<RowReport>,
    /// Every `m(w)` is nonzero, so the support is `Adm(mu)`.
    pub support_is_adm: bool,
}

impl PropertyReport {
    pub fn degree_bound(&self) -> bool {
        self.rows.iter().all(|r| r.degree_bound)
    }

    /// Palindromic and unimodal.
    pub fn shape(&self) -> bool {
        self.rows.iter().all(|r| r.palindromic && r.unimodal)
    }

    pub fn endpoints(&self) -> bool {
        self.rows.iter().all(|r| r.endpoints)
    }

    pub fn nonnegative(&self) -> bool {
        self.rows.iter().all(|r| r.nonnegative)
    }

    pub fn all(&self) -> bool {
        self.support_is_adm && self.rows.iter().all(RowReport::all)
    }

    pub fn failures(&self) -> Vec<&RowReport> {
        self.rows.iter().filter(|r| !r.all()).collect()
    }
}

/// Checks one multiplicity polynomial against the expected span `top = l(t_mu) - l(w)`.
pub fn check_multiplicity(element: String, m: &LaurentPoly, top: u32) -> RowReport {
    let Some(c) = m.q_coeffs() else {
        return RowReport {
            element,
            degree_bound: false,
            palindromic: false,
            unimodal: false,
            endpoints: false,
            nonnegative: false,
        };
    };
    let zero = BigInt::from(0);
    let one = BigInt::from(1);
    let degree_bound = c.len() as u32 <= top + 1;
    let mut padded = c.clone();
    padded.resize(top as usize + 1, zero.clone());
    let palindromic = degree_bound && padded.iter().eq(padded.iter().rev());
    let half = padded.len().div_ceil(2);
    let unimodal = padded[..half].windows(2).all(|w| w[0] <= w[1]);
    let endpoints = degree_bound && padded.first() == Some(&one) && padded.last() == Some(&one);
    let nonnegative = c.iter().all(|x| *x >= zero);
    RowReport {
        element,
        degree_bound,
        palindromic,
        unimodal,
        endpoints,
        nonnegative,
    }
}

pub fn m_property_report(table: &MultiplicityTable) -> PropertyReport {
    let rows = table
        .rows
        .iter()
        .map(|r| check_multiplicity(r.element.encode(), &r.mult, table.mu_length - r.length()))
        .collect();
    let support_is_adm = table.rows.iter().all(|r| !r.mult.is_zero());
    PropertyReport {
        rows,
        support_is_adm,
    }
}

/// Re-expands `sum m(w) C''_w` in the `T` basis and compares with the trace function.
pub fn m_base_change_consistent(store: &KlStore, table: &MultiplicityTable) -> Result<bool> {
    Ok(store.c_to_t(&table.c_coefficients())? == table.trace)
}

/// For minuscule `mu`: `sum_{w in Adm, w >= x} eps_w = eps_mu` for every admissible `x`.
pub fn m_epsilon_sum_identity(store: &KlStore, table: &MultiplicityTable) -> bool {
    let eps_mu = if table.mu_length.is_multiple_of(2) {
        1
    } else {
        -1
    };
    let adm: Vec<&Elem> = table.adm().collect();
    adm.iter().all(|x| {
        let s: i64 = adm
            .iter()
            .filter(|w| store.kl_column(w).contains_key(x))
            .map(|w| w.sign())
            .sum();
        s == eps_mu
    })
}

/// Group of elements sharing a fingerprint of their upper Bruhat graph in `Adm`.
#[derive(Clone, Debug, Serialize)]
pub struct FingerprintGroup {
    pub length: u32,
    pub config: Vec<usize>,
    pub fingerprint: Vec<(u32, usize)>,
    pub elements: usize,
    pub distinct_multiplicities: usize,
}

/// Groups admissible elements by (config, multiset of (length, up-degree) over
/// the elements above), and counts how many distinct multiplicities each group has.
pub fn m_fingerprint_report(store: &KlStore, table: &MultiplicityTable) -> Vec<FingerprintGroup> {
    let adm: Vec<&Elem> = table.adm().collect();
    let above = |w: &Elem| -> Vec<&Elem> {
        adm.iter()
            .copied()
            .filter(|x| x.length() > w.length() && store.kl_column(x).contains_key(w))
            .collect()
    };
    let up_degree: HashMap<&Elem, usize> = adm
        .iter()
        .map(|&w| {
            (
                w,
                above(w)
                    .iter()
                    .filter(|x| x.length() == w.length() + 1)
                    .count(),
            )
        })
        .collect();
    type Key = (u32, Vec<usize>, Vec<(u32, usize)>);
    let mut groups: BTreeMap<Key, Vec<&LaurentPoly>> = BTreeMap::new();
    for r in &table.rows {
        let mut fp: Vec<(u32, usize)> = above(&r.element)
            .iter()
            .map(|x| (x.length(), up_degree[x]))
            .collect();
        fp.sort();
        groups
            .entry((r.length(), r.config.clone(), fp))
            .or_default()
            .push(&r.mult);
    }
    groups
        .into_iter()
        .map(|((length, config, fingerprint), ms)| {
            let mut distinct: Vec<&LaurentPoly> = Vec::new();
            for m in &ms {
                if !distinct.contains(m) {
                    distinct.push(m);
                }
            }
            FingerprintGroup {
                length,
                config,
                fingerprint,
                elements: ms.len(),
                distinct_multiplicities: distinct.len(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::Family;

    fn datum(f: Family, r: usize) -> Arc<RootDatum> {
        Arc::new(RootDatum::new(f, r).unwrap())
    }

    fn cw(v: &[i64]) -> Coweight {
        Coweight(v.to_vec())
    }

    #[test]
    fn gl4_minuscule_tau() {
        let d = datum(Family::GL, 4);
        let store = KlStore::new(&d);
        let mu = cw(&[1, 1, 0, 0]);
        let t = m_compute(&store, &mu).unwrap();
        assert_eq!(t.rows().len(), 33);
        let tau = t.tau().unwrap();
        assert_eq!(tau.mult, LaurentPoly::from_q_coeffs([1, 1, 2, 1, 1]));
        assert_eq!(tau.config, vec![4, 10, 12, 6]);
        assert_eq!(m_minuscule_poincare_oracle(&d, &mu).unwrap(), tau.mult);
        assert_eq!(t.summarize().len(), 6);
        assert!(m_property_report(&t).all());
        assert!(m_base_change_consistent(&store, &t).unwrap());
        assert!(m_epsilon_sum_identity(&store, &t));
    }

    #[test]
    fn maximal_elements_have_empty_config() {
        let d = datum(Family::GSp, 2);
        let store = KlStore::new(&d);
        let t = m_compute(&store, &cw(&[1, 1, 1])).unwrap();
        for r in t.rows() {
            if r.length() == t.mu_length() {
                assert!(r.config.is_empty());
                assert!(r.mult.is_one());
            }
        }
        let outside = Elem::translation(&d, &cw(&[2, 0, 1])).unwrap();
        assert!(matches!(
            m_bruhat_config(&t, &outside),
            Err(Error::NotInAdm(_))
        ));
    }

    #[test]
    fn trivial_coweight() {
        let d = datum(Family::GL, 3);
        let store = KlStore::new(&d);
        let t = m_compute(&store, &cw(&[0, 0, 0])).unwrap();
        assert_eq!(t.rows().len(), 1);
        assert!(t.rows()[0].mult.is_one());
        assert_eq!(t.summarize().len(), 1);
    }

    #[test]
    fn gl2_all_ones() {
        let d = datum(Family::GL, 2);
        let store = KlStore::new(&d);
        for a in 1..=5 {
            let t = m_compute(&store, &cw(&[a, 0])).unwrap();
            for r in t.rows() {
                let n = (t.mu_length() - r.length()) as usize + 1;
                assert_eq!(r.mult, LaurentPoly::from_q_coeffs(vec![1; n]));
            }
        }
    }

    #[test]
    fn report_flags_non_palindromic() {
        let r = check_multiplicity("x".into(), &LaurentPoly::from_q_coeffs([1, 2, 2]), 2);
        assert!(!r.palindromic && !r.endpoints && r.degree_bound);
        let r = check_multiplicity("x".into(), &LaurentPoly::from_q_coeffs([1, 1, 1, 1]), 2);
        assert!(!r.degree_bound);
        let r = check_multiplicity("x".into(), &LaurentPoly::from_q_coeffs([1, 3, 2, 3, 1]), 4);
        assert!(r.palindromic && !r.unimodal);
        assert!(m_minuscule_poincare_oracle(&datum(Family::GL, 3), &cw(&[2, 0, 0])).is_err());
    }
}
