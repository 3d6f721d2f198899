//! Cross-checks between independent computations, grouped into suites for the
//! command line and the acceptance tests.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::affweyl::AffineWeylElement as Elem;
use crate::central::{c_property_p, c_theta, c_theta_split, c_z};
use crate::error::Result;
use crate::golden::{self, GoldenCase};
use crate::hecke::HeckeElement;
use crate::kl::KlStore;
use crate::laurent::{LaurentPoly, QPoly};
use crate::multiplicity::{
    m_base_change_consistent, m_compute, m_epsilon_sum_identity, m_minuscule_poincare_oracle,
    m_property_report, MultiplicityTable,
};
use crate::rootdata::{Coweight, DatumId, Family, RootDatum};
use crate::wakimoto::{tilde_coefficients, wk_function, wk_q1_check, wk_rv_polys};

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((ok, detail)) => Self::new(name, ok, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

pub fn datum_for(id: DatumId) -> Result<Arc<RootDatum>> {
    Ok(Arc::new(RootDatum::new(id.family, id.rank)?))
}

/// Datum and coweight of a reference table.
pub fn golden_case_input(case: &GoldenCase) -> Result<(Arc<RootDatum>, Coweight)> {
    let d = datum_for(case.group.parse()?)?;
    let mu = d.parse_coweight(case.mu)?;
    Ok((d, mu))
}

/// Elements of the affine Weyl group of length at most `max_len`, by length then encoding.
pub fn affine_elements_up_to(datum: &Arc<RootDatum>, max_len: u32) -> Vec<Elem> {
    let n = Elem::num_simple(datum);
    let mut all = vec![Elem::identity(datum)];
    let mut layer = all.clone();
    for _ in 0..max_len {
        let mut next: Vec<Elem> = Vec::new();
        for x in &layer {
            for s in 0..n {
                let y = x.mul_simple(s);
                if y.length() > x.length() && !next.contains(&y) {
                    next.push(y);
                }
            }
        }
        next.sort();
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn random_affine(datum: &Arc<RootDatum>, rng: &mut ChaCha8Rng, max_len: usize) -> Elem {
    let n = Elem::num_simple(datum);
    let k = rng.random_range(0..=max_len);
    (0..k).fold(Elem::identity(datum), |x, _| {
        x.mul_simple(rng.random_range(0..n))
    })
}

fn sign(e: i64) -> LaurentPoly {
    LaurentPoly::from(e)
}

/// `R_{x,y}` from the recursion equals the coefficient read off `T_{y^-1}^{-1}`,
/// for every `x` and every `y` of length at most `max_len`.
pub fn check_rpoly_recursion(store: &KlStore, max_len: u32) -> CheckOutcome {
    let ys = affine_elements_up_to(store.datum(), max_len);
    let bad: usize = ys
        .par_iter()
        .map(|y| {
            let bar = HeckeElement::t_inv(&y.inv());
            let col = store.rpoly_column(y);
            let scale = &LaurentPoly::q_pow(y.length() as i32) * &sign(y.sign());
            let mut bad = 0;
            for x in store.ideal(y).iter() {
                let oracle = &(&bar.coeff(x) * &scale) * &sign(x.sign());
                if col.get(x).cloned().unwrap_or_default() != oracle {
                    bad += 1;
                }
            }
            bad + bar.support().filter(|x| !col.contains_key(x)).count()
        })
        .sum();
    CheckOutcome::new(
        format!(
            "R recursion = bar expansion, {} l(y)<={max_len}",
            store.datum().id()
        ),
        bad == 0,
        format!("{} elements y, {bad} mismatches", ys.len()),
    )
}

/// `sum_z eps_x eps_z Q_{x,z} P_{z,w} = delta_{x,w}` for all `x <= w` in `elems`.
pub fn check_qp_identity(store: &KlStore, elems: &[Elem]) -> (usize, usize) {
    let qcols: HashMap<&Elem, _> = elems
        .par_iter()
        .map(|z| (z, store.inv_kl_column(z)))
        .collect();
    elems
        .par_iter()
        .map(|w| {
            let pw = store.kl_column(w);
            let mut pairs = 0;
            let mut bad = 0;
            for x in store.ideal(w).iter() {
                pairs += 1;
                let mut acc = LaurentPoly::zero();
                for (z, pzw) in pw.iter() {
                    let qz = qcols
                        .get(z)
                        .cloned()
                        .unwrap_or_else(|| store.inv_kl_column(z));
                    if let Some(qxz) = qz.get(x) {
                        let t = qxz * pzw;
                        if (x.length() + z.length()) % 2 == 0 {
                            acc += t;
                        } else {
                            acc -= t;
                        }
                    }
                }
                let want = if x == w {
                    LaurentPoly::one()
                } else {
                    LaurentPoly::zero()
                };
                if acc != want {
                    bad += 1;
                }
            }
            (pairs, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// `q^{l(y)-l(v)} Q_{v,y}(q^-1) = sum_{v<=z<=y} R_{z,y} Q_{v,z}` together with
/// `Q_{v,v} = 1` and `deg Q_{v,y} <= (l(y)-l(v)-1)/2`, for all `v <= y` in `elems`.
/// These conditions determine `Q` from `R`.
pub fn check_inverse_kl_recursion(store: &KlStore, elems: &[Elem]) -> (usize, usize) {
    let qcols: HashMap<&Elem, _> = elems
        .par_iter()
        .map(|z| (z, store.inv_kl_column(z)))
        .collect();
    elems
        .par_iter()
        .map(|y| {
            let ry = store.rpoly_column(y);
            let qy = store.inv_kl_column(y);
            let mut pairs = 0;
            let mut bad = 0;
            for v in store.ideal(y).iter() {
                pairs += 1;
                let n = (y.length() - v.length()) as i32;
                let q = qy.get(v).cloned().unwrap_or_default();
                let lhs = q.bar().shift(2 * n);
                let mut rhs = LaurentPoly::zero();
                for (z, rzy) in ry.iter() {
                    let qz = qcols
                        .get(z)
                        .cloned()
                        .unwrap_or_else(|| store.inv_kl_column(z));
                    if let Some(qvz) = qz.get(v) {
                        rhs += rzy * qvz;
                    }
                }
                let degree_ok = if n == 0 {
                    q.is_one()
                } else {
                    q.is_in_q() && q.q_degree().is_none_or(|d| 2 * d < n)
                };
                if lhs != rhs || !degree_ok {
                    bad += 1;
                }
            }
            (pairs, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Closed form of `T~_v T~_{w^-1}^{-1}` against the Hecke product for random
/// pairs with `l(v) + l(w) <= max_total`.
pub fn check_wakimoto_random(
    datum: &Arc<RootDatum>,
    seed: u64,
    pairs: usize,
    max_total: usize,
) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(Elem, Elem)> = (0..pairs)
        .map(|_| {
            let a = rng.random_range(0..=max_total);
            (
                random_affine(datum, &mut rng, a),
                random_affine(datum, &mut rng, max_total - a),
            )
        })
        .collect();
    let bad = wakimoto_mismatches(&inputs);
    CheckOutcome::new(
        format!(
            "Wakimoto closed form = Hecke product, {} random",
            datum.id()
        ),
        bad.is_empty(),
        format!("{pairs} pairs (seed {seed}), {} mismatches", bad.len()),
    )
}

/// Same comparison for every pair of affine Weyl elements with `l(v) + l(w) <= max_total`.
pub fn check_wakimoto_exhaustive(datum: &Arc<RootDatum>, max_total: u32) -> CheckOutcome {
    let elems = affine_elements_up_to(datum, max_total);
    let inputs: Vec<(Elem, Elem)> = elems
        .iter()
        .flat_map(|v| {
            elems
                .iter()
                .filter(move |w| v.length() + w.length() <= max_total)
                .map(move |w| (v.clone(), w.clone()))
        })
        .collect();
    let bad = wakimoto_mismatches(&inputs);
    CheckOutcome::new(
        format!(
            "Wakimoto closed form = Hecke product, {} l(v)+l(w)<={max_total}",
            datum.id()
        ),
        bad.is_empty(),
        format!("{} pairs, {} mismatches", inputs.len(), bad.len()),
    )
}

fn wakimoto_mismatches(inputs: &[(Elem, Elem)]) -> Vec<String> {
    inputs
        .par_iter()
        .filter_map(|(v, w)| {
            let ok = (|| -> Result<bool> {
                let direct = tilde_coefficients(&wk_function(v, w)?.product)?;
                let closed = wk_rv_polys(v, w)?;
                let closed: Vec<(&Elem, &QPoly)> =
                    closed.iter().filter(|(_, p)| !p.is_zero()).collect();
                let direct: Vec<(&Elem, &QPoly)> = direct.iter().collect();
                let parity = closed.iter().all(|(x, p)| {
                    p.support()
                        .all(|k| (k as u32 + x.length()) % 2 == (v.length() + w.length()) % 2)
                });
                Ok(closed == direct && parity)
            })();
            match ok {
                Ok(true) => None,
                _ => Some(format!("{v} {w}")),
            }
        })
        .collect()
}

/// Property (P) with `d = l(v) + l(w)` for normalized Wakimoto functions.
pub fn check_wakimoto_property_p(
    datum: &Arc<RootDatum>,
    seed: u64,
    pairs: usize,
    max_total: usize,
) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let inputs: Vec<(Elem, Elem)> = (0..pairs)
        .map(|_| {
            let a = rng.random_range(0..=max_total);
            (
                random_affine(datum, &mut rng, a),
                random_affine(datum, &mut rng, max_total - a),
            )
        })
        .collect();
    let bad = inputs
        .par_iter()
        .filter(|(v, w)| match wk_function(v, w) {
            Ok(f) => !c_property_p(&f.normalized, (v.length() + w.length()) as i64),
            Err(_) => true,
        })
        .count();
    CheckOutcome::new(
        format!("property (P) for Wakimoto functions, {}", datum.id()),
        bad == 0,
        format!("{pairs} pairs (seed {seed}), {bad} failures"),
    )
}

/// `Theta_lam` computed from its canonical split and from the split shifted by
/// a random dominant coweight agree, for `count` random `lam`.
pub fn check_theta_independence(
    datum: &Arc<RootDatum>,
    seed: u64,
    count: usize,
    bound: i64,
) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e7a);
    let dim = datum.dim();
    let random_cw = |rng: &mut ChaCha8Rng, b: i64| {
        Coweight((0..dim).map(|_| rng.random_range(-b..=b)).collect())
    };
    let inputs: Vec<(Coweight, Coweight)> = (0..count)
        .map(|_| {
            let lam = random_cw(&mut rng, bound);
            let nu = datum.dominant_conjugate(&random_cw(&mut rng, 1)).0;
            (lam, nu)
        })
        .collect();
    let bad: Vec<String> = inputs
        .par_iter()
        .filter_map(|(lam, nu)| {
            let (l1, l2) = datum.dominant_split(lam);
            let a = c_theta(datum, lam).ok()?;
            let b = c_theta_split(datum, &l1.add(nu), &l2.add(nu)).ok()?;
            (a != b).then(|| datum.format_coweight(lam))
        })
        .collect();
    CheckOutcome::new(
        format!("Theta independent of the dominant split, {}", datum.id()),
        bad.is_empty(),
        format!("{count} coweights (seed {seed}), failures: {bad:?}"),
    )
}

/// Generators of the Hecke algebra: `T_s` for simple `s` and `T_tau` for the
/// length-zero parts of the coordinate translations.
pub fn hecke_generators(datum: &Arc<RootDatum>) -> Vec<HeckeElement> {
    let mut gens: Vec<HeckeElement> = (0..Elem::num_simple(datum))
        .map(|i| HeckeElement::t(&Elem::simple(datum, i)))
        .collect();
    for i in 0..datum.dim() {
        let mut e = vec![0; datum.dim()];
        e[i] = 1;
        let tau = Elem::translation(datum, &Coweight(e))
            .expect("dimension matches")
            .omega();
        if !tau.is_identity() {
            gens.push(HeckeElement::t(&tau));
        }
    }
    gens
}

pub fn check_centrality(datum: &Arc<RootDatum>, lam: &Coweight) -> CheckOutcome {
    let name = format!(
        "z_lam central, {} lam={}",
        datum.id(),
        datum.format_coweight(lam)
    );
    let r = c_z(datum, lam).map(|z| {
        let gens = hecke_generators(datum);
        let bad = gens.par_iter().filter(|g| z.mul(g) != g.mul(&z)).count();
        (
            bad == 0,
            format!("{} generators, {bad} failures", gens.len()),
        )
    });
    CheckOutcome::from_result(name, r)
}

pub fn check_q1_family(store: &KlStore, mu: &Coweight) -> CheckOutcome {
    let d = store.datum();
    let orbit = d.weyl_orbit(mu);
    let bad: Vec<String> = orbit
        .iter()
        .filter(|lam| !matches!(wk_q1_check(store, lam), Ok(true)))
        .map(|lam| d.format_coweight(lam))
        .collect();
    CheckOutcome::new(
        format!(
            "q=1 specialization, {} orbit of {}",
            d.id(),
            d.format_coweight(mu)
        ),
        bad.is_empty(),
        format!("{} coweights, failures: {bad:?}", orbit.len()),
    )
}

/// `m(w) = 1 + q + ... + q^{l(t_mu) - l(w)}` for every admissible `w`.
pub fn all_ones(table: &MultiplicityTable) -> bool {
    table.rows().iter().all(|r| {
        let top = table.mu_length() - r.length();
        r.mult == LaurentPoly::from_q_coeffs(vec![1; top as usize + 1])
    })
}

/// Structural checks on a computed table.
pub fn table_checks(store: &KlStore, table: &MultiplicityTable) -> Vec<CheckOutcome> {
    let d = table.datum();
    let label = table.title();
    let mut out = Vec::new();
    let report = m_property_report(table);
    out.push(CheckOutcome::new(
        format!("(A) degree bound, {label}"),
        report.degree_bound(),
        "",
    ));
    out.push(CheckOutcome::new(
        format!("(B) palindromic and unimodal, {label}"),
        report.shape(),
        "",
    ));
    out.push(CheckOutcome::new(
        format!("(C) unit endpoints, {label}"),
        report.endpoints(),
        "",
    ));
    out.push(CheckOutcome::new(
        format!("nonnegative with support Adm, {label}"),
        report.nonnegative() && report.support_is_adm,
        "",
    ));
    out.push(CheckOutcome::from_result(
        format!("base change reproduces trace, {label}"),
        m_base_change_consistent(store, table).map(|ok| (ok, String::new())),
    ));
    out.push(CheckOutcome::new(
        format!("property (P) for the trace, {label}"),
        c_property_p(table.trace(), table.mu_length() as i64),
        "",
    ));
    if d.is_minuscule(table.mu()) {
        out.push(CheckOutcome::new(
            format!("eps-sum identity, {label}"),
            m_epsilon_sum_identity(store, table),
            "",
        ));
        let r = m_minuscule_poincare_oracle(d, table.mu()).map(|p| {
            let got = table.tau().map(|r| r.mult.clone()).unwrap_or_default();
            (
                got == p,
                format!(
                    "m(tau) = {}, coset polynomial = {}",
                    got.to_q_string(),
                    p.to_q_string()
                ),
            )
        });
        out.push(CheckOutcome::from_result(
            format!("m(tau) = coset Poincare polynomial, {label}"),
            r,
        ));
    }
    out
}

/// `properties` suite for one group and coweight.
pub fn suite_properties(store: &KlStore, mu: &Coweight) -> Result<Vec<CheckOutcome>> {
    let table = m_compute(store, mu)?;
    let mut out = table_checks(store, &table);
    let adm: Vec<Elem> = table.adm().cloned().collect();
    let (pairs, bad) = check_qp_identity(store, &adm);
    out.push(CheckOutcome::new(
        format!("Q.P = identity on Adm, {}", table.title()),
        bad == 0,
        format!("{pairs} pairs, {bad} mismatches"),
    ));
    let (pairs, bad) = check_inverse_kl_recursion(store, &adm);
    out.push(CheckOutcome::new(
        format!("inverse KL recursion on Adm, {}", table.title()),
        bad == 0,
        format!("{pairs} pairs, {bad} mismatches"),
    ));
    out.push(check_centrality(store.datum(), mu));
    Ok(out)
}

/// `oracles` suite: R-polynomials, Wakimoto functions, Theta and the `q = 1`
/// specialization on small groups.
pub fn suite_oracles(seed: u64) -> Result<Vec<CheckOutcome>> {
    let gl3 = Arc::new(RootDatum::new(Family::GL, 3)?);
    let gsp4 = Arc::new(RootDatum::new(Family::GSp, 2)?);
    let gl2 = Arc::new(RootDatum::new(Family::GL, 2)?);
    let g2 = Arc::new(RootDatum::new(Family::G2, 2)?);
    let mut out = Vec::new();
    for d in [&gl3, &gsp4] {
        let store = KlStore::new(d);
        out.push(check_rpoly_recursion(&store, 6));
        let tops: Vec<Elem> = affine_elements_up_to(d, 6);
        let (pairs, bad) = check_inverse_kl_recursion(&store, &tops);
        out.push(CheckOutcome::new(
            format!("sum Q_wx R_xy = q_y/q_w Q_wy(1/q), {} l<=6", d.id()),
            bad == 0,
            format!("{pairs} pairs, {bad} mismatches"),
        ));
        out.push(check_wakimoto_random(d, seed, 200, 8));
        out.push(check_wakimoto_property_p(d, seed, 50, 6));
    }
    for d in [&gl3, &gsp4, &g2] {
        out.push(check_theta_independence(d, seed, 20, 2));
    }
    let store2 = KlStore::new(&gl2);
    let store3 = KlStore::new(&gl3);
    for mu in [vec![1, 0], vec![2, 0]] {
        out.push(check_q1_family(&store2, &Coweight(mu)));
    }
    out.push(check_q1_family(&store3, &Coweight(vec![1, 1, 0])));
    Ok(out)
}

/// `golden` suite: the reference tables whose group (and coweight, if given) match.
pub fn suite_golden(group: Option<&str>, mu: Option<&str>) -> Result<Vec<CheckOutcome>> {
    let strip = |s: &str| s.replace([' ', '(', ')'], "");
    let cases: Vec<&GoldenCase> = golden::GOLDEN
        .iter()
        .filter(|c| group.is_none_or(|g| c.group.eq_ignore_ascii_case(g)))
        .filter(|c| mu.is_none_or(|m| strip(m) == strip(c.mu)))
        .collect();
    let mut out = Vec::new();
    for case in cases {
        let (d, mu) = golden_case_input(case)?;
        let store = KlStore::new(&d);
        let table = m_compute(&store, &mu)?;
        let count_ok = table.rows().len() == case.admissible;
        let diff = golden::compare(case, &table);
        out.push(CheckOutcome::new(
            format!("golden {} mu={}", case.group, case.mu),
            count_ok && diff.is_ok(),
            match diff {
                Ok(()) => format!("{} admissible alcoves", table.rows().len()),
                Err(d) => d,
            },
        ));
    }
    Ok(out)
}
