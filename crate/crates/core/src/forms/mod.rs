//! Differential forms on box windows: exterior derivative, sup norm,
//! translation pullback and affine tube pushforward.

mod derivative;
mod form;
pub mod io;
mod tube;

pub use derivative::{exterior_derivative, exterior_derivative_exact};
pub use form::{multi_indices, omitting, pullback_translation, sup_norm_form, DifferentialForm};
pub(crate) use tube::minor;
pub use tube::{pullback_affine, pushforward_tube, TubeEmbedding};
