use serde::Serialize;

use crate::{
  builders::{bump_comb, cell_bumps},
  error::{Error, Result},
  group::{fingerprint, EllInftyFn, Group, GroupElement},
  integration::{certify_difference, integrate_phi, PartitionFunction, PhiIndependence},
  model::ModelForm,
  transport::CoverData,
};

/// Fingerprint agreement required of a witness.
pub const SURJECTIVITY_TOLERANCE: f64 = 1e-9;

/// A top form whose class is a prescribed bounded function.
#[derive(Clone, Debug)]
pub struct SurjectivityWitness {
  pub omega:      ModelForm,
  /// Cells carrying a deviation bump.
  pub cells:      usize,
  /// Ray points kept inside `[-R, R]^d`; the rest of each ray is dropped.
  pub ray_points: usize,
}

/// `ω_f = Σ_g f(g)·β(x − g)` with `β` the unit bump in the first core:
/// the background becomes a periodic comb, deviations single bumps, and rays
/// are truncated to the window.
pub fn surjectivity_witness(f: &EllInftyFn, cover: &CoverData, radius: i64) -> Result<SurjectivityWitness> {
  let model = cover.model;
  let group = model.group();
  if f.group() != group {
    return Err(Error::Incompatible(format!("function on {:?} for a {} cover", f.group(), model.name())));
  }
  if let Group::Cyclic(_) = group {
    let weights: Vec<(GroupElement, f64)> = group.window(0).into_iter().map(|g| (g.clone(), f.eval(&g))).collect();
    let cells = weights.iter().filter(|(_, w)| *w != 0.0).count();
    return Ok(SurjectivityWitness { omega: cell_bumps(cover, &weights)?, cells, ray_points: 0 });
  }
  if let Some(g) = f.deviation().keys().find(|g| !group.in_window(g, radius)) {
    let required = g.0.iter().map(|v| v.abs()).max().unwrap_or(0);
    return Err(Error::WindowTooSmall { given: radius, required });
  }
  let mut weights: Vec<(GroupElement, f64)> = f.deviation().iter().map(|(g, v)| (g.clone(), *v)).collect();
  let mut ray_points = 0;
  for g in group.window(radius) {
    let w: f64 = f.rays().iter().filter(|r| r.contains(&g)).map(|r| r.weight).sum();
    if w != 0.0 {
      weights.push((g, w));
      ray_points += 1;
    }
  }
  let cells = weights.len();
  let omega = bump_comb(cover, f.background())?.axpy(1.0, &cell_bumps(cover, &weights)?)?;
  Ok(SurjectivityWitness { omega, cells, ray_points })
}

/// Round trip of [`surjectivity_witness`] through the integration map.
#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityReport {
  pub target_fingerprint:  f64,
  pub witness_fingerprint: f64,
  pub cells:               usize,
  pub ray_points:          usize,
  /// Certificate for `∫ᵠω_f − f`.
  pub difference:          PhiIndependence,
}

impl SurjectivityReport {
  pub fn fingerprint_error(&self) -> f64 { (self.target_fingerprint - self.witness_fingerprint).abs() }

  pub fn passed(&self) -> bool { self.fingerprint_error() <= SURJECTIVITY_TOLERANCE && self.difference.validated }
}

/// Build the witness for `f`, integrate it against `φ` and certify that the
/// representative differs from `f` by a coboundary sum. Only ray-free `f`
/// can pass: a truncated ray is not a coboundary.
pub fn check_surjectivity(
  f: &EllInftyFn,
  cover: &CoverData,
  phi: &PartitionFunction,
  radius: i64,
) -> Result<SurjectivityReport> {
  let witness = surjectivity_witness(f, cover, radius)?;
  let represented = integrate_phi(phi, &witness.omega, radius)?;
  let difference = certify_difference(&represented.sub(f)?.pruned(), radius, SURJECTIVITY_TOLERANCE)?;
  Ok(SurjectivityReport {
    target_fingerprint: fingerprint(f),
    witness_fingerprint: fingerprint(&represented),
    cells: witness.cells,
    ray_points: witness.ray_points,
    difference,
  })
}
