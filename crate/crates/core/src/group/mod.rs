//! Deck groups ℤᵈ and ℤ/m, bounded functions on them, the translation action,
//! coboundary certificates and Følner means.

mod certificate;
mod element;
mod ell_infty;

pub use certificate::{certificate_residual, certify_trivial, certify_trivial_within, check_certificate, CoinvariantCertificate};
pub use element::{Group, GroupElement};
pub use ell_infty::{
  act, coboundary, coboundary_mean_bound, finite_group_class, fingerprint, folner_mean, EllInftyFn, Ray,
};
