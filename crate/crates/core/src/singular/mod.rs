//! Log canonical thresholds of monomial data and ramification growth `e_f(D)`.
//!
//! Everything beyond monomial ideals and monomial maps is computed over an
//! explicit valuation family and labelled as such.

mod efd;
mod lct;
pub mod lp;

pub use efd::{
    characteristic_polynomial, cn_calculator, component_multiplicity, efd_estimate, efd_monomial_exact, family_order,
    ord_pullback_hyperplane, remark44_m0, remark44_m0_from_sequence, EfdEstimate, EfdExact, ExponentMatrix, M0Report,
    ValuationFamily,
};
pub use lct::{
    family_max_ord, lct_form_interval, lct_lower_bound_canonical, lct_monomial, lct_snc, lct_valuation_search,
    CertificateKind, LctResult, MonomialIdeal, Threshold,
};
