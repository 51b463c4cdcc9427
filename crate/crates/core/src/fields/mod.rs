//! Grid-sampled scalar fields with quadrature, running integrals,
//! differentiation and a mollifier library.

mod analytic;
mod field;
pub(crate) mod grid;
pub mod io;
mod mollifier;
mod quadrature;
pub(crate) mod stencil;

pub use analytic::{AnalyticFn, Factor, Term};
pub use field::{sup_norm, Extension, ScalarField};
pub use grid::{Grid, MIN_INTERVALS};
pub use mollifier::{mollifier_1d, smooth_step, Mollifier};
pub use quadrature::{
  cumulative_integral, integrate, integrate_window, partial_derivative, partial_derivative_exact, trailing_integral,
};
