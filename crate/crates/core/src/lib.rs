//! Exact arithmetic in Iwahori-Hecke algebras of extended affine Weyl groups:
//! Kazhdan-Lusztig data, Bernstein functions, the trace function of nearby
//! cycles and its multiplicities in the `C''` basis.
//!
//! Alcoves are indexed from the antidominant base alcove `{-1 < <alpha, x> < 0}`,
//! and `s_0 = t_{-theta^vee} s_theta`.

pub mod affweyl;
pub mod central;
pub mod checks;
pub mod error;
pub mod golden;
pub mod hecke;
pub mod kl;
pub mod laurent;
pub mod multiplicity;
pub mod rootdata;
pub mod wakimoto;

pub use affweyl::{aw_adm, aw_translation, minimal_coset_reps, AffineWeylElement};
pub use central::{c_kottwitz, c_property_p, c_self_dual_twisted, c_theta, c_theta_split, c_z};
pub use error::{Error, Result};
pub use hecke::{h_bar, h_inv_T, h_mul, HeckeElement};
pub use kl::{h_change_basis, h_inv_klpoly, h_klpoly, h_rpoly, BasisDirection, KlStore};
pub use laurent::{EvalPoint, LaurentPoly, QPoly};
pub use multiplicity::{
    m_bruhat_config, m_compute, m_minuscule_poincare_oracle, m_property_report, m_summarize,
    MultiplicityRow, MultiplicityTable, PropertyReport, SummaryRow,
};
pub use rootdata::{Coweight, DatumId, Family, FiniteWeyl, Root, RootDatum, WeylIdx};
pub use wakimoto::{
    wk_distinguished, wk_function, wk_min_expr_degree_check, wk_q1_check, wk_rv_poly,
    wk_theta_min_expression, Subexpression, WakimotoFunction,
};
