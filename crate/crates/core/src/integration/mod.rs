//! The integration map `∫ᵠ : Ω_bⁿ(M) → ℓ∞(G)`, partition functions, and the
//! φ-independence, equivariance and Stokes checks.

mod map;
mod partition;
mod stokes;

pub use map::{
  check_equivariance, check_phi_independence, class_of, integrate_phi, PhiIndependence, PHI_INDEPENDENCE_TOLERANCE,
};
pub(crate) use map::certify_difference;
pub(crate) use partition::weighted_nodes;
pub use partition::{build_phi_indicator, build_phi_smooth, PartitionFunction, PartitionMode};
pub use stokes::{stokes_check, StokesReport, STOKES_TOLERANCE};
