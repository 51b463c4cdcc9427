use serde::Serialize;

use crate::{
  error::{Error, Result},
  fields::{smooth_step, Extension, Grid, ScalarField},
  forms::TubeEmbedding,
  model::Model,
};

/// Side of a lattice patch (in cell units).
pub const PATCH_SIDE: f64 = 0.75;
/// Height of a strip boundary band.
pub const BAND_HEIGHT: f64 = 9.0 / 16.0;

const RAMP_START: f64 = 1.0 / 32.0;
const RAMP_WIDTH: f64 = 3.0 / 16.0;
const BAND_RAMP_START: f64 = 15.0 / 32.0;
const BAND_RAMP_WIDTH: f64 = 1.0 / 16.0;
/// Distance of the band cores from the strip boundary.
const BAND_CORE_START: f64 = 3.0 / 32.0;

/// Lattice-axis extent of the class-level transport cell (within the
/// plateau `[RAMP_START + RAMP_WIDTH, 1 + RAMP_START]` of `φ`).
const TRANSPORT_CELL: (f64, f64) = (0.25, 1.0);
/// Bounded-axis extent of the transport cell, clear of the strip boundary.
const BAND_TRANSPORT_CELL: (f64, f64) = (0.125, 0.875);

/// Distance from the lift edges over which every `φᵢ` vanishes identically,
/// along lattice axes and along the bounded strip axis.
pub const LATTICE_MARGIN: f64 = RAMP_START;
pub const BAND_MARGIN: f64 = BAND_HEIGHT - BAND_RAMP_START - BAND_RAMP_WIDTH;

/// Partition weight of the patch with offset `0` along a lattice axis, as a
/// function of the coordinate reduced mod 1; the offset-`1/2` patch gets the
/// complement.
fn lattice_weight(t: f64) -> f64 {
  let t = t.rem_euclid(1.0);
  if t < 0.5 {
    smooth_step((t - RAMP_START) / RAMP_WIDTH)
  } else {
    1.0 - smooth_step((t - 0.5 - RAMP_START) / RAMP_WIDTH)
  }
}

/// Partition weight of the bottom band along the bounded strip axis.
fn band_weight(t: f64) -> f64 { 1.0 - smooth_step((t - BAND_RAMP_START) / BAND_RAMP_WIDTH) }

/// One patch `Aᵢ` of the quotient with its chosen lift `Cᵢ`.
#[derive(Clone, Debug)]
pub struct Patch {
  pub index:     usize,
  /// Affine chart from the unit box onto the lift `Cᵢ`.
  pub chart:     TubeEmbedding,
  /// Intervals per axis of the chart's unit-box grid (aligned with the model lattice).
  pub intervals: Vec<usize>,
  /// Whether the chart domain is `Q′` (last axis starts on `∂M`).
  pub boundary:  bool,
  /// Lifted core `Dᵢ` as a coordinate box: the plateau where `φᵢ ≡ 1`.
  pub core:      Vec<(f64, f64)>,
  /// Lift `Cᵢ` as a coordinate box.
  pub lift:      Vec<(f64, f64)>,
  /// `φᵢ` sampled on the lattice window covering `Cᵢ`.
  pub phi:       ScalarField,
}

impl Patch {
  /// Whether `x` lies in the closed lift.
  pub fn contains(&self, x: &[f64]) -> bool {
    x.iter().zip(&self.lift).all(|(t, (a, b))| *t >= a - 1e-12 && *t <= b + 1e-12)
  }
}

/// A cover of `G\M` by `2^d` patches with disjoint cores and a partition of
/// unity `λᵢ` with `λᵢ ≡ 1` on the cores.
#[derive(Clone, Debug)]
pub struct CoverData {
  pub model:      Model,
  pub resolution: usize,
  pub patches:    Vec<Patch>,
}

/// Summary of a cover for reports.
#[derive(Clone, Debug, Serialize)]
pub struct CoverSummary {
  pub patches: usize,
  pub cores:   Vec<Vec<(f64, f64)>>,
  pub lifts:   Vec<Vec<(f64, f64)>>,
}

impl CoverData {
  pub fn summary(&self) -> CoverSummary {
    CoverSummary {
      patches: self.patches.len(),
      cores:   self.patches.iter().map(|p| p.core.clone()).collect(),
      lifts:   self.patches.iter().map(|p| p.lift.clone()).collect(),
    }
  }

  /// Smallest resolution at which every `φᵢ` vanishes on the four samples
  /// nearest each interior lift edge, so masses taken with the model weights
  /// agree with the composite rule on the chart domains.
  pub fn min_resolution(model: Model) -> usize {
    let margin = if model.has_boundary() { BAND_MARGIN } else { LATTICE_MARGIN };
    let n = (3.0 / margin).ceil() as usize;
    n.div_ceil(32) * 32
  }

  /// Lifted core of patch `index` translated by `g` along the lattice axes.
  pub fn core_at(&self, index: usize, g: &[i64]) -> Vec<(f64, f64)> {
    self.patches[index]
      .core
      .iter()
      .enumerate()
      .map(|(a, &(lo, hi))| {
        let s = g.get(a).copied().unwrap_or(0) as f64;
        (lo + s, hi + s)
      })
      .collect()
  }

  /// Cell used by class-level transports, translated by `g`: `φ ≡ 1` on it
  /// while every other translate of `φ` vanishes there. Wider than the cores,
  /// so the tube bumps are smoother.
  pub fn transport_cell(&self, g: &[i64]) -> Vec<(f64, f64)> {
    (0..self.model.dims())
      .map(|a| match g.get(a) {
        Some(&s) if a < self.model.lattice_axes() => (s as f64 + TRANSPORT_CELL.0, s as f64 + TRANSPORT_CELL.1),
        _ => BAND_TRANSPORT_CELL,
      })
      .collect()
  }

  /// Patch adjacency tree used for mass routing: the parent of `i` clears
  /// the highest set bit of `i`.
  pub fn parent(&self, index: usize) -> Option<usize> {
    if index == 0 {
      return None;
    }
    let top = usize::BITS - 1 - index.leading_zeros();
    Some(index & !(1 << top))
  }
}

/// Build the standard cover of the model's quotient.
pub fn build_cover(model: Model, resolution: usize) -> Result<CoverData> {
  if !resolution.is_multiple_of(32) {
    return Err(Error::InvalidGrid(format!("cover needs a resolution divisible by 32, got {resolution}")));
  }
  let lattice = model.lattice_axes();
  let dims = model.dims();
  if dims > 3 {
    return Err(Error::Geometry("cover construction is limited to dimension 3".into()));
  }
  let n = resolution as f64;
  let mut patches = Vec::new();
  for index in 0..1usize << dims {
    let bit = |a: usize| (index >> a) & 1 == 1;
    let mut matrix = vec![vec![0.0; dims]; dims];
    let mut offset = vec![0.0; dims];
    let mut intervals = Vec::with_capacity(dims);
    let mut core = Vec::with_capacity(dims);
    let mut lift = Vec::with_capacity(dims);
    let mut boundary = false;
    for a in 0..dims {
      if a < lattice {
        let o = if bit(a) { 0.5 } else { 0.0 };
        lift.push((o, o + PATCH_SIDE));
        core.push((o + RAMP_START + RAMP_WIDTH, o + 0.5 + RAMP_START));
        intervals.push((PATCH_SIDE * n).round() as usize);
        matrix[a][a] = PATCH_SIDE;
        offset[a] = o;
      } else {
        boundary = true;
        intervals.push((BAND_HEIGHT * n).round() as usize);
        if bit(a) {
          lift.push((1.0 - BAND_HEIGHT, 1.0));
          core.push((1.0 - BAND_RAMP_START, 1.0 - BAND_CORE_START));
          matrix[a][a] = -BAND_HEIGHT;
          offset[a] = 1.0;
          // keep the chart orientation-preserving by flipping the first axis
          matrix[0][0] = -matrix[0][0];
          offset[0] += PATCH_SIDE;
        } else {
          lift.push((0.0, BAND_HEIGHT));
          core.push((BAND_CORE_START, BAND_RAMP_START));
          matrix[a][a] = BAND_HEIGHT;
        }
      }
    }
    let chart = TubeEmbedding::new(matrix, offset)?;
    let lo: Vec<i64> = lift.iter().map(|(a, _)| (a * n).round() as i64).collect();
    let shape: Vec<usize> = lift.iter().map(|(a, b)| ((b - a) * n).round() as usize + 1).collect();
    let grid = Grid::lattice(lo, shape, resolution)?;
    let phi = ScalarField::from_fn(grid, Extension::ZeroExtend, |x| {
      (0..dims)
        .map(|a| {
          if a < lattice {
            let w = lattice_weight(x[a]);
            if bit(a) { 1.0 - w } else { w }
          } else {
            let w = band_weight(x[a]);
            if bit(a) { 1.0 - w } else { w }
          }
        })
        .product()
    })?;
    patches.push(Patch { index, chart, intervals, boundary, core, lift, phi });
  }
  Ok(CoverData { model, resolution, patches })
}
