use serde::Serialize;

use crate::{
  error::{Error, Result},
  fields::{Extension, Grid, Mollifier, ScalarField},
  forms::{pushforward_tube, DifferentialForm, TubeEmbedding},
  model::Model,
  poincare::primitive_box,
};

/// A coordinate box `Π [lo_a, hi_a]`.
pub type CellBox = Vec<(f64, f64)>;

/// Fraction of the tube half-length occupied by the source and target bumps.
const BUMP_FILL: f64 = 0.9;

/// Mass transport between two cells: `ρ` has integral `−1` over the source,
/// `+1` over the target and vanishes elsewhere; `dν = ρ` with `ν` compactly
/// supported in the tube.
#[derive(Clone, Debug)]
pub struct TransportPair {
  pub source:      CellBox,
  pub target:      CellBox,
  pub legs:        Vec<TubeEmbedding>,
  pub rho:         DifferentialForm,
  pub nu:          DifferentialForm,
  pub source_mass: f64,
  pub target_mass: f64,
  /// `‖dν − ρ‖∞` of the primitives on the tube charts (largest over legs).
  pub residual:    f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportSummary {
  pub source:      CellBox,
  pub target:      CellBox,
  pub legs:        usize,
  pub source_mass: f64,
  pub target_mass: f64,
  pub residual:    f64,
}

impl TransportPair {
  pub fn summary(&self) -> TransportSummary {
    TransportSummary {
      source:      self.source.clone(),
      target:      self.target.clone(),
      legs:        self.legs.len(),
      source_mass: self.source_mass,
      target_mass: self.target_mass,
      residual:    self.residual,
    }
  }

  /// The pair translated by a lattice index shift.
  pub fn translated(&self, shift: &[i64]) -> (DifferentialForm, DifferentialForm) {
    (self.rho.translated(shift), self.nu.translated(shift))
  }
}

/// Bump on `support` along a unit interval with `intervals` intervals, scaled
/// so that its plain sample sum times the spacing is 1. Lattice masses then
/// come out exact; source and target bumps are mirror images, so their
/// composite-rule masses agree as well.
fn normalized_bump(support: (f64, f64), intervals: usize) -> Result<ScalarField> {
  let line = Grid::unit_box(1, intervals)?;
  let sampled = Mollifier::new(support.0, support.1)?.sample(&line)?.without_generator();
  let mass: f64 = sampled.data().iter().sum::<f64>() / intervals as f64;
  Ok(sampled.scaled(1.0 / mass))
}

fn to_index(x: f64, resolution: usize) -> Result<i64> {
  let s = x * resolution as f64;
  if (s - s.round()).abs() > 1e-9 {
    return Err(Error::Geometry(format!("tube corner {x} is not on the model lattice")));
  }
  Ok(s.round() as i64)
}

/// Straight tube from `source` to `target` along `axis` in the positive
/// direction; both cells share their extents on every other axis.
fn positive_leg(
  dims: usize,
  resolution: usize,
  source: &[(f64, f64)],
  target: &[(f64, f64)],
  axis: usize,
) -> Result<(TubeEmbedding, DifferentialForm, DifferentialForm, f64)> {
  let side = source[axis].1 - source[axis].0;
  let length = target[axis].1 - source[axis].0;
  let mut matrix = vec![vec![0.0; dims]; dims];
  let mut offset = vec![0.0; dims];
  let mut intervals = Vec::with_capacity(dims);
  for a in 0..dims {
    let extent = if a == axis { length } else { source[a].1 - source[a].0 };
    matrix[a][a] = extent;
    offset[a] = source[a].0;
    let count = to_index(extent, resolution)?;
    if count < 8 {
      return Err(Error::Geometry(format!("tube is only {count} samples wide along axis {a}")));
    }
    intervals.push(count as usize);
  }
  let theta = TubeEmbedding::new(matrix, offset.clone())?;
  let c = side / (2.0 * length);
  let r = BUMP_FILL * c;
  let mut rho = ScalarField::constant(Grid::point(), Extension::ZeroExtend, 1.0);
  for (a, &count) in intervals.iter().enumerate() {
    let factor = if a == axis {
      normalized_bump((1.0 - c - r, 1.0 - c + r), count)?.axpy(-1.0, &normalized_bump((c - r, c + r), count)?)?
    } else {
      normalized_bump((0.1, 0.9), count)?
    };
    rho = rho.outer(&factor);
  }
  let rho_q = DifferentialForm::top(ScalarField::new(
    Grid::unit_box_per_axis(&intervals)?,
    rho.into_data(),
    Extension::ZeroExtend,
  )?);
  let margin = 0.5 * (c - r).min(0.1);
  let primitive = primitive_box(&rho_q, margin)?;
  let lo: Vec<i64> = offset.iter().map(|&o| to_index(o, resolution)).collect::<Result<_>>()?;
  let target_grid = Grid::lattice(lo, intervals.iter().map(|c| c + 1).collect(), resolution)?;
  let rho_m = pushforward_tube(&rho_q, &theta, &target_grid)?;
  let nu_m = pushforward_tube(&primitive.eta, &theta, &target_grid)?;
  Ok((theta, rho_m, nu_m, primitive.residual))
}

/// Mass of a top form inside a closed box with uniform lattice weights.
fn box_mass(rho: &DifferentialForm, cell: &[(f64, f64)], resolution: usize) -> f64 {
  let c = &rho.components()[0];
  let grid = c.grid();
  let h = 1.0 / resolution as f64;
  let inside = |idx: &[i64]| {
    idx.iter().zip(cell).all(|(&i, &(lo, hi))| {
      let x = i as f64 * h;
      x >= lo - 1e-12 && x <= hi + 1e-12
    })
  };
  grid.global_indices().zip(c.data()).filter(|(idx, _)| inside(idx)).map(|(_, v)| v).sum::<f64>()
    * h.powi(grid.dims() as i32)
}

fn accumulate(acc: Option<DifferentialForm>, piece: DifferentialForm, sign: f64) -> Result<DifferentialForm> {
  let piece = piece.scaled(sign);
  match acc {
    None => Ok(piece),
    Some(a) => {
      let grid = a.grid().union(piece.grid())?;
      a.resampled(&grid, Extension::ZeroExtend)?.axpy(1.0, &piece.resampled(&grid, Extension::ZeroExtend)?)
    },
  }
}

/// Build a transport pair between two equally sized cells of the model
/// lattice. Cells differing along several axes are joined by straight legs
/// through intermediate cells, one axis at a time; every tube must stay inside
/// `window` and, on the strip, off the boundary.
pub fn make_transport(
  model: Model,
  resolution: usize,
  source: &[(f64, f64)],
  target: &[(f64, f64)],
  window: &[(f64, f64)],
) -> Result<TransportPair> {
  let dims = model.dims();
  if source.len() != dims || target.len() != dims || window.len() != dims {
    return Err(Error::Incompatible("cell boxes must match the model dimension".into()));
  }
  if source == target {
    return Err(Error::Geometry("source and target cells coincide".into()));
  }
  for a in 0..dims {
    let (s, t) = (source[a].1 - source[a].0, target[a].1 - target[a].0);
    if (s - t).abs() > 1e-12 || s <= 0.0 {
      return Err(Error::Geometry(format!("cells differ in size along axis {a}")));
    }
    if source[a] != target[a] && (source[a].0 - target[a].0).abs() < s {
      return Err(Error::Geometry(format!("cells overlap along axis {a}")));
    }
  }
  let mut legs = Vec::new();
  let mut rho = None;
  let mut nu = None;
  let mut residual = 0.0f64;
  let mut here: CellBox = source.to_vec();
  for a in 0..dims {
    if here[a] == target[a] {
      continue;
    }
    let mut next = here.clone();
    next[a] = target[a];
    let (theta, r, n, res, sign) = if next[a].0 > here[a].0 {
      let (t, r, n, res) = positive_leg(dims, resolution, &here, &next, a)?;
      (t, r, n, res, 1.0)
    } else {
      let (t, r, n, res) = positive_leg(dims, resolution, &next, &here, a)?;
      (t, r, n, res, -1.0)
    };
    for (b, (lo, hi)) in theta.image_bounds().into_iter().enumerate() {
      if lo < window[b].0 - 1e-12 || hi > window[b].1 + 1e-12 {
        return Err(Error::Geometry(format!("tube leaves the window along axis {b}")));
      }
      if b >= model.lattice_axes() && model.has_boundary() && (lo <= 0.0 || hi >= 1.0) {
        return Err(Error::Geometry("tube touches the strip boundary".into()));
      }
    }
    residual = residual.max(res);
    legs.push(theta);
    rho = Some(accumulate(rho, r, sign)?);
    nu = Some(accumulate(nu, n, sign)?);
    here = next;
  }
  let rho = rho.expect("at least one leg");
  let nu = nu.expect("at least one leg");
  let source_mass = box_mass(&rho, source, resolution);
  let target_mass = box_mass(&rho, target, resolution);
  if (source_mass + 1.0).abs() > 1e-10 || (target_mass - 1.0).abs() > 1e-10 {
    return Err(Error::Geometry(format!("transport masses {source_mass} → {target_mass} are not −1 → +1")));
  }
  Ok(TransportPair { source: source.to_vec(), target: target.to_vec(), legs, rho, nu, source_mass, target_mass, residual })
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::forms::exterior_derivative;

  fn window(dims: usize) -> CellBox { vec![(-3.0, 3.0); dims] }

  #[test]
  fn adjacent_cells_on_the_line() {
    let pair = make_transport(Model::Line, 128, &[(-0.75, -0.5)], &[(0.25, 0.5)], &window(1)).unwrap();
    assert!((pair.source_mass + 1.0).abs() < 1e-12 && (pair.target_mass - 1.0).abs() < 1e-12);
    let total: f64 = pair.rho.components()[0].data().iter().sum::<f64>() / 128.0;
    assert!(total.abs() < 1e-12);
    let d = exterior_derivative(&pair.nu).unwrap();
    let err = d.components()[0].axpy(-1.0, &pair.rho.components()[0]).unwrap().sup_norm();
    assert!(err < 2e-3 * pair.rho.components()[0].sup_norm(), "{err}");
  }

  #[test]
  fn diagonal_and_reversed() {
    let src = vec![(0.25, 0.5), (0.25, 0.5)];
    let tgt = vec![(-0.75, -0.5), (1.25, 1.5)];
    let pair = make_transport(Model::Plane, 32, &src, &tgt, &window(2)).unwrap();
    assert_eq!(pair.legs.len(), 2);
    assert!(pair.legs.iter().all(|l| l.det() > 0.0));
    assert!((pair.target_mass - 1.0).abs() < 1e-12);
    let middle = vec![(-0.75, -0.5), (0.25, 0.5)];
    assert!(box_mass(&pair.rho, &middle, 32).abs() < 1e-12);
  }

  #[test]
  fn guards() {
    let c = vec![(0.25, 0.5)];
    assert!(matches!(make_transport(Model::Line, 32, &c, &c, &window(1)), Err(Error::Geometry(_))));
    let far = vec![(5.25, 5.5)];
    assert!(matches!(make_transport(Model::Line, 32, &c, &far, &window(1)), Err(Error::Geometry(_))));
    let low = vec![(0.25, 0.5), (0.0, 0.25)];
    let high = vec![(0.25, 0.5), (0.5, 0.75)];
    assert!(matches!(make_transport(Model::Strip, 32, &low, &high, &window(2)), Err(Error::Geometry(_))));
  }
}
