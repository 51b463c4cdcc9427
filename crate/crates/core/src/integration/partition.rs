use serde::{Deserialize, Serialize};

use crate::{
  error::{Error, Result},
  fields::{Extension, Grid, ScalarField},
  group::GroupElement,
  model::Model,
  transport::CoverData,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMode {
  FundamentalDomainIndicator,
  SmoothPartition,
}

/// A compactly supported `φ` on `M` with `Σ_g φ(g·x) = 1`.
#[derive(Clone, Debug)]
pub struct PartitionFunction {
  pub model:      Model,
  pub resolution: usize,
  pub mode:       PartitionMode,
  pub phi:        ScalarField,
  /// The lifted `φᵢ` of a smooth partition (empty for an indicator).
  pub pieces:     Vec<ScalarField>,
}

impl PartitionFunction {
  /// `(g·φ)(x) = φ(x − g)`.
  pub fn translated(&self, g: &GroupElement) -> Self {
    let shift = self.model.index_shift(g, self.resolution);
    Self {
      phi: self.phi.translated(&shift),
      pieces: self.pieces.iter().map(|p| p.translated(&shift)).collect(),
      ..self.clone()
    }
  }

  /// Quadrature nodes of `φ`: global index and `φ·weight` for every nonzero sample.
  pub fn nodes(&self) -> Vec<(Vec<i64>, f64)> { weighted_nodes(self.model, self.resolution, &self.phi) }

  /// Largest deviation of the orbit sum `Σ_g φ(x + g)` from 1 over the
  /// samples of one fundamental cell.
  pub fn orbit_sum_defect(&self) -> f64 {
    let cell = self.model.periodic_grid(self.resolution).expect("valid resolution");
    let cell = match self.model {
      Model::Circle { .. } => Grid::lattice(vec![0], vec![self.resolution], self.resolution).expect("valid"),
      _ => cell,
    };
    let lattice = self.model.lattice_axes();
    let n = self.resolution as i64;
    let mut bins = vec![0.0; cell.len()];
    for (idx, &v) in self.phi.grid().global_indices().zip(self.phi.data()) {
      let reduced: Vec<i64> = idx.iter().enumerate().map(|(a, &i)| if a < lattice { i.rem_euclid(n) } else { i }).collect();
      if let Some(local) = cell.local(&reduced) {
        bins[cell.ravel(&local)] += v;
      }
    }
    bins.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
  }
}

pub(crate) fn weighted_nodes(model: Model, resolution: usize, phi: &ScalarField) -> Vec<(Vec<i64>, f64)> {
  let grid = phi.grid();
  grid
    .global_indices()
    .zip(phi.data())
    .filter(|(_, &v)| v != 0.0)
    .map(|(idx, &v)| {
      let w: f64 = idx.iter().enumerate().map(|(a, &i)| model.axis_weight(a, i, resolution)).product();
      (idx, v * w)
    })
    .collect()
}

/// Indicator of the fundamental cell `[0,1)^d` (times `[0,1]` on the strip).
pub fn build_phi_indicator(model: Model, resolution: usize) -> Result<PartitionFunction> {
  let grid = match model {
    Model::Circle { .. } => Grid::lattice(vec![0], vec![resolution], resolution)?,
    _ => model.periodic_grid(resolution)?,
  };
  Ok(PartitionFunction {
    model,
    resolution,
    mode: PartitionMode::FundamentalDomainIndicator,
    phi: ScalarField::constant(grid, Extension::ZeroExtend, 1.0),
    pieces: vec![],
  })
}

/// `φ = Σ φᵢ` from the cover's lifted partition functions.
pub fn build_phi_smooth(cover: &CoverData) -> Result<PartitionFunction> {
  let first = cover.patches.first().ok_or_else(|| Error::Geometry("empty cover".into()))?;
  let mut grid = first.phi.grid().clone();
  for p in &cover.patches[1..] {
    grid = grid.union(p.phi.grid())?;
  }
  let mut total = ScalarField::zeros(grid.clone(), Extension::ZeroExtend);
  let pieces: Vec<ScalarField> = cover
    .patches
    .iter()
    .map(|p| p.phi.resampled(&grid, Extension::ZeroExtend))
    .collect::<Result<_>>()?;
  for p in &pieces {
    total = total.axpy(1.0, p)?;
  }
  Ok(PartitionFunction {
    model: cover.model,
    resolution: cover.resolution,
    mode: PartitionMode::SmoothPartition,
    phi: total,
    pieces,
  })
}
