//! Wakimoto functions `T~_v T~_{w^-1}^{-1}` and their expansion through
//! `v`-distinguished subexpressions, plus minimal expressions for `Theta_lam`.
//!
//! With `w = s_1 ... s_r` reduced, `T~_{w^-1}^{-1} = prod_j (T~_{s_j} + Q)` and
//! `T~_v T~_{w^-1}^{-1} = sum_x R^v_{x,w}(Q) T~_x`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::affweyl::AffineWeylElement as Elem;
use crate::central::c_theta;
use crate::error::{Error, Result};
use crate::hecke::HeckeElement;
use crate::kl::KlStore;
use crate::laurent::{EvalPoint, LaurentPoly, QPoly};
use crate::rootdata::{Coweight, RootDatum};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subexpression {
    /// Reduced word `s_1 ... s_r` of `w` (simple affine indices).
    pub base_word: Vec<usize>,
    /// `sigma_0 = v, .., sigma_r`.
    pub sigma: Vec<Elem>,
    /// Number of steps with `sigma_{j-1} = sigma_j`.
    pub n_stat: usize,
    /// Number of steps with `sigma_{j-1} > sigma_j`.
    pub m_stat: usize,
}

impl Subexpression {
    pub fn end(&self) -> &Elem {
        self.sigma.last().expect("sigma_0 is always present")
    }
}

fn require_affine(x: &Elem) -> Result<()> {
    if x.in_affine_weyl_group() {
        Ok(())
    } else {
        Err(Error::NotInAffineWeylGroup(x.encode()))
    }
}

/// Every `v`-distinguished subexpression of the reduced word of `w`, in
/// depth-first order (going up before staying).
pub fn wk_all_distinguished(v: &Elem, w: &Elem) -> Result<Vec<Subexpression>> {
    require_affine(w)?;
    let (_, word) = w.reduced_word();
    Ok(distinguished_for_word(v, &word))
}

pub fn distinguished_for_word(v: &Elem, word: &[usize]) -> Vec<Subexpression> {
    let mut out = Vec::new();
    let mut path = vec![v.clone()];
    dfs(word, &mut path, 0, 0, &mut out);
    out
}

fn dfs(word: &[usize], path: &mut Vec<Elem>, n: usize, m: usize, out: &mut Vec<Subexpression>) {
    let j = path.len() - 1;
    if j == word.len() {
        out.push(Subexpression {
            base_word: word.to_vec(),
            sigma: path.clone(),
            n_stat: n,
            m_stat: m,
        });
        return;
    }
    let cur = path[j].clone();
    let next = cur.mul_simple(word[j]);
    let up = next.length() > cur.length();
    path.push(next);
    dfs(word, path, n, if up { m } else { m + 1 }, out);
    path.pop();
    if up {
        path.push(cur);
        dfs(word, path, n + 1, m, out);
        path.pop();
    }
}

/// `D(x)`: the distinguished subexpressions ending at `x`.
pub fn wk_distinguished(v: &Elem, w: &Elem, x: &Elem) -> Result<Vec<Subexpression>> {
    Ok(wk_all_distinguished(v, w)?
        .into_iter()
        .filter(|s| s.end() == x)
        .collect())
}

/// `R^v_{x,w}(Q) = sum_{sigma in D(x)} Q^{n(sigma)}` for `v, w` in the affine Weyl group.
pub fn wk_rv_poly(v: &Elem, w: &Elem, x: &Elem) -> Result<QPoly> {
    require_affine(v)?;
    let mut p = QPoly::zero();
    for s in wk_distinguished(v, w, x)? {
        p.add_monomial(s.n_stat, BigInt::from(1));
    }
    Ok(p)
}

/// All `R^v_{x,w}` at once, keyed by `x`.
pub fn wk_rv_polys(v: &Elem, w: &Elem) -> Result<BTreeMap<Elem, QPoly>> {
    require_affine(v)?;
    let mut out: BTreeMap<Elem, QPoly> = BTreeMap::new();
    for s in wk_all_distinguished(v, w)? {
        out.entry(s.end().clone())
            .or_insert_with(QPoly::zero)
            .add_monomial(s.n_stat, BigInt::from(1));
    }
    Ok(out)
}

pub struct WakimotoFunction {
    /// `T~_v T~_{w^-1}^{-1}`.
    pub product: HeckeElement,
    /// `eps_v eps_w q_w T_v T_{w^-1}^{-1} = eps_v eps_w q_v^{1/2} q_w^{1/2} T~_v T~_{w^-1}^{-1}`.
    pub normalized: HeckeElement,
}

/// Direct Hecke algebra computation, valid for all of the extended group.
pub fn wk_function(v: &Elem, w: &Elem) -> Result<WakimotoFunction> {
    if v.datum_id() != w.datum_id() {
        return Err(Error::DatumMismatch);
    }
    let product = HeckeElement::t_tilde(v)
        .mul_t_inv(&w.inv())
        .scale(&LaurentPoly::v_pow(w.length() as i32));
    let pre = LaurentPoly::monomial(v.sign() * w.sign(), (v.length() + w.length()) as i32);
    let normalized = product.scale(&pre);
    Ok(WakimotoFunction {
        product,
        normalized,
    })
}

/// `T~`-coefficients of a Hecke element, written as polynomials in `Q`.
pub fn tilde_coefficients(h: &HeckeElement) -> Result<BTreeMap<Elem, QPoly>> {
    h.terms()
        .iter()
        .map(|(x, c)| Ok((x.clone(), c.shift(x.length() as i32).q_expand(0)?)))
        .collect()
}

/// For `prod_i T~_{t_i}^{e_i}` with `l(t_1 ... t_k) = sum l(t_i)`, checks
/// `deg_Q c_x <= l(t_1 ... t_k) - l(x)` for every `T~`-coefficient `c_x`.
pub fn wk_min_expr_degree_check(factors: &[(Elem, i8)]) -> Result<bool> {
    let Some((first, _)) = factors.first() else {
        return Ok(true);
    };
    let datum = Arc::clone(first.datum());
    let mut prod_elem = Elem::identity(&datum);
    let mut total = 0;
    let mut h = HeckeElement::one(&datum);
    for (t, e) in factors {
        if t.datum_id() != datum.id() {
            return Err(Error::DatumMismatch);
        }
        prod_elem = prod_elem.mul(t);
        total += t.length();
        let f = match e {
            1 => HeckeElement::t_tilde(t),
            -1 => HeckeElement::t_tilde_inv(t),
            _ => return Err(Error::Parse(format!("exponent must be +1 or -1, got {e}"))),
        };
        h = h.mul(&f);
    }
    if prod_elem.length() != total {
        return Err(Error::NotMinimal);
    }
    for (x, c) in tilde_coefficients(&h)? {
        if let Some(deg) = c.degree() {
            if deg as i64 > total as i64 - x.length() as i64 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Minimal expression `Theta_lam = T~_omega prod_j T~_{s_j}^{e_j}` read off
/// the alcove walk along the reduced word `t_lam = omega s_1 ... s_k`: a step
/// gets `+1` when it crosses its wall in the direction in which the positive
/// root of that wall increases.
pub fn wk_theta_min_expression(datum: &Arc<RootDatum>, lam: &Coweight) -> Result<Vec<(Elem, i8)>> {
    let t = Elem::translation(datum, lam)?;
    let (omega, word) = t.reduced_word();
    let h = datum.coxeter_number();
    // Interior point of the base alcove, scaled by h: -p0.
    let p: Vec<i64> = datum.height_point().iter().map(|x| -x).collect();
    let center = |x: &Elem| -> Vec<i64> {
        let up = datum.weyl().act(x.finite_part(), &p);
        x.translation_part()
            .0
            .iter()
            .zip(&up)
            .map(|(a, b)| h * a + b)
            .collect()
    };
    let mut out = vec![(omega.clone(), 1i8)];
    let mut cur = omega;
    for &i in &word {
        let next = cur.mul_simple(i);
        // Wall of cur * A' crossed by this step: linear part u(alpha) where
        // cur = t_mu u and alpha is the root of the wall of s_i.
        let alpha = match i {
            0 => datum.highest_root().unwrap().root.clone(),
            _ => datum.simple_roots()[i - 1].root.clone(),
        };
        // u(alpha) as a functional: alpha o u^{-1}.
        let uinv = datum.weyl().matrix(datum.weyl().inverse(cur.finite_part()));
        let n = datum.dim();
        let beta: Vec<i64> = (0..n)
            .map(|j| (0..n).map(|k| alpha[k] * uinv[k * n + j]).sum())
            .collect();
        let beta_pos = datum
            .height_point()
            .iter()
            .zip(&beta)
            .map(|(a, b)| a * b)
            .sum::<i64>()
            > 0;
        let delta: i64 = center(&next)
            .iter()
            .zip(center(&cur))
            .zip(&beta)
            .map(|((a, b), c)| (a - b) * c)
            .sum();
        let increases = (delta > 0) == beta_pos;
        out.push((Elem::simple(datum, i), if increases { 1 } else { -1 }));
        cur = next;
    }
    Ok(out)
}

/// Evaluates `prod T~_{t_i}^{e_i}`.
pub fn product_of_factors(datum: &Arc<RootDatum>, factors: &[(Elem, i8)]) -> HeckeElement {
    factors
        .iter()
        .fold(HeckeElement::one(datum), |acc, (t, e)| {
            if *e > 0 {
                acc.mul_t(t)
                    .scale(&LaurentPoly::v_pow(-(t.length() as i32)))
            } else {
                acc.mul_t_inv(t)
                    .scale(&LaurentPoly::v_pow(t.length() as i32))
            }
        })
}

/// Specialization at `q = 1`: the `C''`-coefficients `a_w` of
/// `eps_lam q_lam^{1/2} Theta_lam` satisfy `a_w(1) = Q_{w,t_lam}(1)`, and
/// `a_w != 0` exactly for `w <= t_lam`.
pub fn wk_q1_check(store: &KlStore, lam: &Coweight) -> Result<bool> {
    let datum = store.datum();
    let t = Elem::translation(datum, lam)?;
    let f = c_theta(datum, lam)?.scale(&LaurentPoly::monomial(t.sign(), t.length() as i32));
    let a = store.t_to_c(&f)?;
    let qcol = store.inv_kl_column(&t);
    let ideal = store.ideal(&t);
    if a.len() != ideal.len() || !ideal.iter().all(|w| a.contains_key(w)) {
        return Ok(false);
    }
    for w in ideal.iter() {
        let lhs = a[w].eval(&EvalPoint::VOne)?;
        let rhs = qcol
            .get(w)
            .cloned()
            .unwrap_or_default()
            .eval(&EvalPoint::VOne)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affweyl::aw_adm;
    use crate::central::c_property_p;
    use crate::rootdata::Family;
    use proptest::prelude::*;

    fn datum(f: Family, r: usize) -> Arc<RootDatum> {
        Arc::new(RootDatum::new(f, r).unwrap())
    }

    fn affine(d: &Arc<RootDatum>, word: &[usize]) -> Elem {
        let n = Elem::num_simple(d);
        word.iter()
            .fold(Elem::identity(d), |acc, &i| acc.mul_simple(i % n))
    }

    #[test]
    fn single_reflection() {
        let d = datum(Family::GL, 3);
        let e = Elem::identity(&d);
        let s = Elem::simple(&d, 1);
        let up = wk_distinguished(&e, &s, &s).unwrap();
        assert_eq!(up.len(), 1);
        assert_eq!(up[0].sigma, vec![e.clone(), s.clone()]);
        assert_eq!(up[0].n_stat, 0);
        let stay = wk_distinguished(&e, &s, &e).unwrap();
        assert_eq!(stay.len(), 1);
        assert_eq!(stay[0].n_stat, 1);
        assert_eq!(wk_rv_poly(&e, &s, &s).unwrap(), QPoly::new(vec![1.into()]));
        assert_eq!(
            wk_rv_poly(&e, &s, &e).unwrap(),
            QPoly::new(vec![0.into(), 1.into()])
        );
        assert_eq!(wk_rv_poly(&e, &e, &e).unwrap(), QPoly::new(vec![1.into()]));
        let f = wk_function(&e, &s).unwrap().product;
        let expected = HeckeElement::t_tilde(&s)
            .add(&HeckeElement::term(&e, LaurentPoly::capital_q()))
            .unwrap();
        assert_eq!(f, expected);
        assert_eq!(
            wk_function(&s, &e).unwrap().product,
            HeckeElement::t_tilde(&s)
        );
        // length parity: nothing of length 2 below e * s
        let s2 = affine(&d, &[1, 2]);
        assert!(wk_distinguished(&e, &s, &s2).unwrap().is_empty());
    }

    #[test]
    fn subexpression_length_formula() {
        let d = datum(Family::GSp, 2);
        let v = affine(&d, &[0, 1, 2]);
        let w = affine(&d, &[1, 0, 2, 1]);
        for s in wk_all_distinguished(&v, &w).unwrap() {
            assert_eq!(
                s.end().length() as i64,
                (v.length() + w.length()) as i64 - s.n_stat as i64 - 2 * s.m_stat as i64
            );
        }
    }

    #[test]
    fn restricted_to_affine_weyl_group() {
        let d = datum(Family::GL, 2);
        let tau = Elem::translation(&d, &Coweight(vec![1, 0]))
            .unwrap()
            .omega();
        let e = Elem::identity(&d);
        assert!(matches!(
            wk_rv_poly(&tau, &e, &tau),
            Err(Error::NotInAffineWeylGroup(_))
        ));
        assert!(matches!(
            wk_rv_poly(&e, &tau, &tau),
            Err(Error::NotInAffineWeylGroup(_))
        ));
        // wk_function handles length-zero parts
        let f = wk_function(&e, &tau).unwrap().product;
        assert_eq!(f, HeckeElement::t(&tau));
    }

    #[test]
    fn word_independence() {
        let d = datum(Family::GL, 3);
        let v = affine(&d, &[0, 2]);
        // two reduced words of the same element: s1 s2 s1 = s2 s1 s2
        let a = distinguished_for_word(&v, &[1, 2, 1]);
        let b = distinguished_for_word(&v, &[2, 1, 2]);
        let collect = |subs: &[Subexpression]| {
            let mut m: BTreeMap<Elem, QPoly> = BTreeMap::new();
            for s in subs {
                m.entry(s.end().clone())
                    .or_insert_with(QPoly::zero)
                    .add_monomial(s.n_stat, 1.into());
            }
            m
        };
        assert_eq!(collect(&a), collect(&b));
    }

    #[test]
    fn theta_minimal_expressions_gl() {
        for n in 2..=5 {
            let d = datum(Family::GL, n);
            let mut mu = vec![0; n];
            mu[0] = 1;
            if n > 2 {
                mu[1] = 1;
            }
            for lam in d.weyl_orbit(&Coweight(mu)) {
                let factors = wk_theta_min_expression(&d, &lam).unwrap();
                assert_eq!(
                    product_of_factors(&d, &factors),
                    c_theta(&d, &lam).unwrap(),
                    "{lam}"
                );
                assert!(wk_min_expr_degree_check(&factors).unwrap());
            }
        }
    }

    #[test]
    fn theta_minimal_expressions_other_types() {
        for (f, r, mu) in [
            (Family::GSp, 2, vec![1, 0, 0]),
            (Family::G2, 2, vec![0, 1]),
            (Family::GL, 3, vec![2, 1, 0]),
        ] {
            let d = datum(f, r);
            for lam in d.weyl_orbit(&Coweight(mu)) {
                let factors = wk_theta_min_expression(&d, &lam).unwrap();
                assert_eq!(
                    product_of_factors(&d, &factors),
                    c_theta(&d, &lam).unwrap(),
                    "{lam}"
                );
            }
        }
    }

    #[test]
    fn degree_check_preconditions() {
        let d = datum(Family::GL, 3);
        let t = Elem::translation(&d, &Coweight(vec![1, 0, 0])).unwrap();
        assert!(wk_min_expr_degree_check(&[(t.clone(), 1)]).unwrap());
        let s = Elem::simple(&d, 1);
        assert!(matches!(
            wk_min_expr_degree_check(&[(s.clone(), 1), (s, -1)]),
            Err(Error::NotMinimal)
        ));
    }

    #[test]
    fn q1_specialization() {
        for (f, r, lams) in [
            (
                Family::GL,
                2,
                vec![vec![1, 0], vec![0, 1], vec![2, 0], vec![0, 2]],
            ),
            (
                Family::GL,
                3,
                vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
            ),
        ] {
            let d = datum(f, r);
            let store = KlStore::new(&d);
            for lam in lams {
                assert!(
                    wk_q1_check(&store, &Coweight(lam.clone())).unwrap(),
                    "{lam:?}"
                );
            }
        }
    }

    #[test]
    fn wakimoto_property_p() {
        let d = datum(Family::GL, 3);
        let adm = aw_adm(&d, &Coweight(vec![1, 1, 0])).unwrap();
        for v in adm.iter().filter(|x| x.in_affine_weyl_group()).take(6) {
            for w in adm.iter().filter(|x| x.in_affine_weyl_group()).take(6) {
                let f = wk_function(v, w).unwrap().normalized;
                assert!(
                    c_property_p(&f, (v.length() + w.length()) as i64),
                    "{v} {w}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn closed_form_matches_product(wv in prop::collection::vec(0usize..3, 0..4),
                                       ww in prop::collection::vec(0usize..3, 0..4),
                                       gsp in any::<bool>()) {
            let d = if gsp { datum(Family::GSp, 2) } else { datum(Family::GL, 3) };
            let v = affine(&d, &wv);
            let w = affine(&d, &ww);
            let direct = tilde_coefficients(&wk_function(&v, &w).unwrap().product).unwrap();
            let closed = wk_rv_polys(&v, &w).unwrap();
            let closed: BTreeMap<Elem, QPoly> = closed.into_iter().filter(|(_, p)| !p.is_zero()).collect();
            prop_assert_eq!(&direct, &closed);
            for (x, p) in &closed {
                let parity = (v.length() + w.length() + x.length()) % 2;
                prop_assert!(p.support().all(|k| k as u32 % 2 == parity));
            }
        }
    }
}
