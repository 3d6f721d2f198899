//! Bernstein functions, the central elements `z_lam`, the trace function of
//! nearby cycles and the palindromicity property (P).

use std::sync::Arc;

use rayon::prelude::*;

use crate::affweyl::AffineWeylElement as Elem;
use crate::error::{Error, Result};
use crate::hecke::HeckeElement;
use crate::laurent::LaurentPoly;
use crate::rootdata::{Coweight, RootDatum};

/// `Theta_lam = T~_{t_lam1} T~_{t_lam2}^{-1}` for the decomposition
/// `lam = lam1 - lam2` of [`RootDatum::dominant_split`].
pub fn c_theta(datum: &Arc<RootDatum>, lam: &Coweight) -> Result<HeckeElement> {
    datum.check_dim(lam)?;
    let (lam1, lam2) = datum.dominant_split(lam);
    c_theta_split(datum, &lam1, &lam2)
}

/// `T~_{t_lam1} T~_{t_lam2}^{-1}` for dominant `lam1`, `lam2`.
pub fn c_theta_split(
    datum: &Arc<RootDatum>,
    lam1: &Coweight,
    lam2: &Coweight,
) -> Result<HeckeElement> {
    datum.require_dominant(lam1)?;
    datum.require_dominant(lam2)?;
    let t1 = Elem::translation(datum, lam1)?;
    let t2 = Elem::translation(datum, lam2)?;
    let scale = LaurentPoly::v_pow(t2.length() as i32);
    Ok(HeckeElement::t_tilde(&t1).mul_t_inv(&t2).scale(&scale))
}

/// `z_lam = sum over the Weyl orbit of lam of Theta_nu`.
pub fn c_z(datum: &Arc<RootDatum>, lam: &Coweight) -> Result<HeckeElement> {
    datum.require_dominant(lam)?;
    let thetas: Vec<HeckeElement> = datum
        .weyl_orbit(lam)
        .par_iter()
        .map(|nu| c_theta(datum, nu))
        .collect::<Result<_>>()?;
    let mut z = HeckeElement::zero(datum);
    for t in &thetas {
        z = z.add(t)?;
    }
    Ok(z)
}

/// `eps_mu q_mu^{1/2} sum_{lam <= mu dominant} m_mu(lam) z_lam`.
pub fn c_kottwitz(datum: &Arc<RootDatum>, mu: &Coweight) -> Result<HeckeElement> {
    datum.require_dominant(mu)?;
    let t_mu = Elem::translation(datum, mu)?;
    let mults = datum.weight_multiplicities(mu)?;
    let mut f = HeckeElement::zero(datum);
    for (lam, m) in &mults {
        if *m == 0 {
            continue;
        }
        f = f.add(&c_z(datum, lam)?.scale(&LaurentPoly::from(*m as i64)))?;
    }
    let prefactor = LaurentPoly::monomial(t_mu.sign(), t_mu.length() as i32);
    let f = f.scale(&prefactor);
    if f.terms().values().any(|c| !c.is_in_q()) {
        return Err(Error::Invariant(
            "nearby-cycles function has odd powers of q^{1/2}".into(),
        ));
    }
    Ok(f)
}

/// `c_y = eps_d eps_y q^{-d} q_y^{-1} bar(c_y)` for every coefficient of `g`.
fn coefficients_palindromic(g: &HeckeElement, d: i64) -> bool {
    g.terms().iter().all(|(y, c)| {
        let e = if (d + y.length() as i64) % 2 == 0 {
            1
        } else {
            -1
        };
        let twist = LaurentPoly::monomial(e, -2 * (d as i32 + y.length() as i32));
        *c == &twist * &c.bar()
    })
}

/// Property (P) for the function `f` and integer `d`: the dual function
/// `g = bar(f)` (Kazhdan-Lusztig involution) satisfies
/// `g_y = eps_d eps_y q^{-d} q_y^{-1} bar(g_y)` for all `y`.
pub fn c_property_p(f: &HeckeElement, d: i64) -> bool {
    coefficients_palindromic(&f.bar(), d)
}

/// The same condition applied to an already dualized function.
pub fn c_property_p_dual(dual: &HeckeElement, d: i64) -> bool {
    coefficients_palindromic(dual, d)
}

/// Coefficientwise test `bar(f_x) = eps_x eps_mu q_x q_mu^{-1} f_x` for
/// functions self-dual up to the twist by `q^{-l(t_mu)}`.
pub fn c_self_dual_twisted(f: &HeckeElement, mu_length: u32) -> bool {
    f.terms().iter().all(|(x, c)| {
        let e = if (x.length() + mu_length).is_multiple_of(2) {
            1
        } else {
            -1
        };
        let twist = LaurentPoly::monomial(e, 2 * (x.length() as i32 - mu_length as i32));
        c.bar() == &twist * c
    })
}
