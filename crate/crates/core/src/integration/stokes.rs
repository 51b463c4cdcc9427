use serde::Serialize;

use crate::{
  error::{Error, Result},
  fields::{Extension, Grid, ScalarField},
  group::{fingerprint, EllInftyFn},
  integration::{
    map::{boundary_model, certify_difference},
    integrate_phi, PartitionFunction, PartitionMode,
  },
  model::{boundary_restriction, ModelForm},
};

/// Agreement required between the two Stokes fingerprints.
pub const STOKES_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct StokesReport {
  pub interior:              EllInftyFn,
  pub boundary:              EllInftyFn,
  pub interior_fingerprint:  f64,
  pub boundary_fingerprint:  f64,
  pub certificate_pairs:     usize,
  pub certificate_residual:  f64,
  pub certificate_validated: bool,
}

/// Restrict `φ` to the boundary row `row` of the strip.
fn restrict_phi(phi: &PartitionFunction, row: i64) -> Result<PartitionFunction> {
  let grid = phi.phi.grid();
  let line = Grid::lattice(vec![grid.lo()[0]], vec![grid.shape()[0]], phi.resolution)?;
  let data = (0..grid.shape()[0] as i64).map(|i| phi.phi.value_global(&[grid.lo()[0] + i, row])).collect();
  Ok(PartitionFunction {
    model:      boundary_model(phi.model)?,
    resolution: phi.resolution,
    mode:       PartitionMode::FundamentalDomainIndicator,
    phi:        ScalarField::new(line, data, Extension::ZeroExtend)?,
    pieces:     vec![],
  }
  .with_mode(phi.mode))
}

impl PartitionFunction {
  fn with_mode(mut self, mode: PartitionMode) -> Self {
    self.mode = mode;
    self
  }
}

/// Compare `∫_M dω` with `∫_{∂M} i*ω` for a strip `1`-form and certify that
/// the representatives differ by a trivial class.
pub fn stokes_check(omega: &ModelForm, phi: &PartitionFunction, radius: i64) -> Result<StokesReport> {
  if !omega.model().has_boundary() {
    return Err(Error::NoBoundary);
  }
  let exact = [omega.periodic(), omega.local()]
    .into_iter()
    .flatten()
    .all(|p| p.components().iter().all(|c| c.generator().is_some()));
  let d_omega = if exact { omega.exterior_derivative_exact()? } else { omega.exterior_derivative()? };
  let interior = integrate_phi(phi, &d_omega, radius)?;
  let (bottom, top) = boundary_restriction(omega)?;
  let n = omega.resolution() as i64;
  let boundary = integrate_phi(&restrict_phi(phi, 0)?, &bottom, radius)?
    .axpy(1.0, &integrate_phi(&restrict_phi(phi, n)?, &top, radius)?)?;
  let difference = interior.sub(&boundary)?.pruned();
  let cert = certify_difference(&difference, radius, STOKES_TOLERANCE)?;
  Ok(StokesReport {
    interior_fingerprint: fingerprint(&interior),
    boundary_fingerprint: fingerprint(&boundary),
    interior,
    boundary,
    certificate_pairs: cert.certificate.len(),
    certificate_residual: cert.residual,
    certificate_validated: cert.validated,
  })
}
