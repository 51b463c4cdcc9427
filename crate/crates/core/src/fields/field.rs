use serde::{Deserialize, Serialize};

use crate::{
  error::{Error, Result},
  fields::{AnalyticFn, Grid},
};

/// How a field is read outside its stored samples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extension {
  /// Zero outside the window.
  ZeroExtend,
  /// Periodic along the flagged axes with period equal to the stored shape;
  /// unflagged axes are zero outside the window.
  Periodic(Vec<bool>),
}

impl Extension {
  pub fn is_periodic(&self, axis: usize) -> bool {
    matches!(self, Extension::Periodic(p) if p[axis])
  }
}

/// Real samples on a [`Grid`], with an optional analytic generator used for
/// exact resampling and exact derivatives.
#[derive(Clone, Debug)]
pub struct ScalarField {
  grid:      Grid,
  data:      Vec<f64>,
  extension: Extension,
  generator: Option<AnalyticFn>,
}

/// `data[i] += coeff · Π_a lines[a][i_a]` over a row-major grid.
fn accumulate_separable(data: &mut [f64], coeff: f64, lines: &[Vec<f64>]) {
  match lines.split_last() {
    None => data[0] += coeff,
    Some((last, outer)) => {
      let mut prefix = vec![1.0; outer.len() + 1];
      let mut idx = vec![0usize; outer.len()];
      for row in data.chunks_mut(last.len()) {
        for (a, line) in outer.iter().enumerate() {
          prefix[a + 1] = prefix[a] * line[idx[a]];
        }
        let p = prefix[outer.len()];
        for (d, v) in row.iter_mut().zip(last) {
          *d += coeff * (p * v);
        }
        for a in (0..outer.len()).rev() {
          idx[a] += 1;
          if idx[a] < outer[a].len() {
            break;
          }
          idx[a] = 0;
        }
      }
    },
  }
}

impl ScalarField {
  pub fn new(grid: Grid, data: Vec<f64>, extension: Extension) -> Result<Self> {
    if data.len() != grid.len() {
      return Err(Error::Incompatible(format!("{} samples for a grid of {}", data.len(), grid.len())));
    }
    if let Some(v) = data.iter().find(|v| !v.is_finite()) {
      return Err(Error::Incompatible(format!("non-finite sample {v}")));
    }
    if let Extension::Periodic(flags) = &extension {
      if flags.len() != grid.dims() {
        return Err(Error::Incompatible("periodicity flags do not match grid dimension".into()));
      }
    }
    Ok(Self { grid, data, extension, generator: None })
  }

  pub fn zeros(grid: Grid, extension: Extension) -> Self {
    let n = grid.len();
    Self { grid, data: vec![0.0; n], extension, generator: None }
  }

  pub fn constant(grid: Grid, extension: Extension, c: f64) -> Self {
    let n = grid.len();
    Self { grid, data: vec![c; n], extension, generator: None }
  }

  /// Sample a closure at every grid point.
  pub fn from_fn(grid: Grid, extension: Extension, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
    let data = (0..grid.len()).map(|i| f(&grid.point_at(i))).collect();
    Self::new(grid, data, extension)
  }

  /// Sample an analytic function and keep it as the generator.
  pub fn from_analytic(grid: Grid, extension: Extension, generator: AnalyticFn) -> Result<Self> {
    let mut data = vec![0.0; grid.len()];
    let dims = grid.dims();
    for term in generator.terms() {
      let lines: Vec<Vec<f64>> = (0..dims)
        .map(|a| (0..grid.shape()[a]).map(|i| term.factors[a].value(grid.coord(a, i) + term.shift[a])).collect())
        .collect();
      accumulate_separable(&mut data, term.coeff, &lines);
    }
    let mut field = Self::new(grid, data, extension)?;
    field.generator = Some(generator);
    Ok(field)
  }

  pub fn grid(&self) -> &Grid { &self.grid }

  pub fn data(&self) -> &[f64] { &self.data }

  pub fn data_mut(&mut self) -> &mut [f64] {
    self.generator = None;
    &mut self.data
  }

  pub fn into_data(self) -> Vec<f64> { self.data }

  pub fn extension(&self) -> &Extension { &self.extension }

  pub fn generator(&self) -> Option<&AnalyticFn> { self.generator.as_ref() }

  pub fn dims(&self) -> usize { self.grid.dims() }

  /// Drop the generator, e.g. after the samples were altered.
  pub fn without_generator(mut self) -> Self {
    self.generator = None;
    self
  }

  pub fn with_extension(mut self, extension: Extension) -> Self {
    self.extension = extension;
    self
  }

  /// Value at a global grid index, honouring the extension mode.
  pub fn value_global(&self, global: &[i64]) -> f64 {
    let mut flat = 0usize;
    for a in 0..self.dims() {
      let len = self.grid.shape()[a] as i64;
      let mut i = global[a] - self.grid.lo()[a];
      if self.extension.is_periodic(a) {
        i = i.rem_euclid(len);
      } else if i < 0 || i >= len {
        return 0.0;
      }
      flat = flat * len as usize + i as usize;
    }
    self.data[flat]
  }

  /// Value at an arbitrary point: the generator when present, otherwise
  /// tensor cubic interpolation of the samples.
  pub fn value_at(&self, x: &[f64]) -> f64 {
    if let Some(g) = &self.generator {
      let mut y = x.to_vec();
      for a in 0..self.dims() {
        if self.extension.is_periodic(a) {
          let h = self.grid.spacing()[a];
          let lo = self.grid.lo()[a] as f64 * h;
          let period = self.grid.shape()[a] as f64 * h;
          y[a] = lo + (x[a] - lo).rem_euclid(period);
        } else if x[a] < self.grid.coord(a, 0) - 1e-12 || x[a] > self.grid.coord(a, self.grid.shape()[a] - 1) + 1e-12 {
          return 0.0;
        }
      }
      return g.value(&y);
    }
    self.interpolate(x)
  }

  fn interpolate(&self, x: &[f64]) -> f64 {
    let d = self.dims();
    let mut base = vec![0i64; d];
    let mut weights = vec![[0.0; 4]; d];
    for a in 0..d {
      let h = self.grid.spacing()[a];
      let s = x[a] / h;
      let mut i0 = s.floor() as i64;
      let mut t = s - i0 as f64;
      if t < 1e-9 {
        t = 0.0;
      } else if t > 1.0 - 1e-9 {
        i0 += 1;
        t = 0.0;
      }
      base[a] = i0 - 1;
      // cubic Lagrange weights at nodes -1, 0, 1, 2
      weights[a] = [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
      ];
    }
    let mut total = 0.0;
    let mut idx = vec![0i64; d];
    for corner in 0..4usize.pow(d as u32) {
      let mut c = corner;
      let mut w = 1.0;
      for a in (0..d).rev() {
        let o = c % 4;
        c /= 4;
        idx[a] = base[a] + o as i64;
        w *= weights[a][o];
      }
      if w != 0.0 {
        total += w * self.value_global(&idx);
      }
    }
    total
  }

  pub fn sup_norm(&self) -> f64 { sup_norm(self) }

  pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
    Self {
      grid:      self.grid.clone(),
      data:      self.data.iter().map(|&v| f(v)).collect(),
      extension: self.extension.clone(),
      generator: None,
    }
  }

  pub fn scaled(&self, c: f64) -> Self {
    Self {
      grid:      self.grid.clone(),
      data:      self.data.iter().map(|v| v * c).collect(),
      extension: self.extension.clone(),
      generator: self.generator.as_ref().map(|g| g.scaled(c)),
    }
  }

  fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
    if self.grid != other.grid {
      return Err(Error::Incompatible("fields live on different grids".into()));
    }
    Ok(())
  }

  /// `self + c·other` on a shared grid.
  pub fn axpy(&self, c: f64, other: &ScalarField) -> Result<Self> {
    self.check_same_grid(other)?;
    let generator = match (&self.generator, &other.generator) {
      (Some(a), Some(b)) => Some(a.sum(&b.scaled(c))),
      _ => None,
    };
    Ok(Self {
      grid: self.grid.clone(),
      data: self.data.iter().zip(&other.data).map(|(a, b)| a + c * b).collect(),
      extension: self.extension.clone(),
      generator,
    })
  }

  /// Pointwise product on a shared grid.
  pub fn product(&self, other: &ScalarField) -> Result<Self> {
    self.check_same_grid(other)?;
    Ok(Self {
      grid:      self.grid.clone(),
      data:      self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
      extension: self.extension.clone(),
      generator: None,
    })
  }

  /// Tensor product `(x, y) ↦ self(x)·other(y)` with `self`'s axes first.
  pub fn outer(&self, other: &ScalarField) -> Self {
    let mut data = Vec::with_capacity(self.data.len() * other.data.len());
    for a in &self.data {
      data.extend(other.data.iter().map(|b| a * b));
    }
    Self {
      grid: self.grid.product(&other.grid),
      data,
      extension: Extension::ZeroExtend,
      generator: None,
    }
  }

  /// The same samples placed on a translated grid (global index shift).
  pub fn translated(&self, shift: &[i64]) -> Self {
    let offset: Vec<f64> =
      shift.iter().zip(self.grid.spacing()).map(|(&s, &h)| -(s as f64) * h).collect();
    Self {
      grid:      self.grid.translated(shift),
      data:      self.data.clone(),
      extension: self.extension.clone(),
      generator: self.generator.as_ref().map(|g| g.shifted(&offset)),
    }
  }

  /// Resample onto another grid of the same lattice by global index.
  pub fn resampled(&self, grid: &Grid, extension: Extension) -> Result<Self> {
    if !self.grid.same_lattice(grid) {
      return Err(Error::Incompatible("resampling across lattices".into()));
    }
    let mut data = vec![0.0; grid.len()];
    grid.for_each_global(|f, idx| data[f] = self.value_global(idx));
    let mut out = Self::new(grid.clone(), data, extension)?;
    out.generator = self.generator.clone();
    Ok(out)
  }

  /// Whether every sample within `margin` (in coordinate units) of a window
  /// face is exactly zero. Faces flagged in `skip` are not checked.
  pub fn vanishes_near_edge(&self, margin: f64, skip: &[bool]) -> bool {
    (0..self.grid.len()).all(|f| {
      let idx = self.grid.unravel(f);
      let near = (0..self.dims()).any(|a| {
        if skip.get(a).copied().unwrap_or(false) {
          let far = (self.grid.shape()[a] - 1 - idx[a]) as f64 * self.grid.spacing()[a];
          return far < margin - 1e-12;
        }
        let lo = idx[a] as f64 * self.grid.spacing()[a];
        let hi = (self.grid.shape()[a] - 1 - idx[a]) as f64 * self.grid.spacing()[a];
        lo < margin - 1e-12 || hi < margin - 1e-12
      });
      !near || self.data[f] == 0.0
    })
  }
}

/// Grid approximation of the sup norm: the largest absolute sample.
pub fn sup_norm(field: &ScalarField) -> f64 { field.data.iter().fold(0.0, |m, v| m.max(v.abs())) }

#[cfg(test)]
mod tests {
  use super::*;
  use crate::fields::Factor;

  #[test]
  fn sup_norms() {
    let g = Grid::unit_box(1, 256).unwrap();
    assert_eq!(ScalarField::zeros(g.clone(), Extension::ZeroExtend).sup_norm(), 0.0);
    assert_eq!(ScalarField::constant(g.clone(), Extension::ZeroExtend, -2.5).sup_norm(), 2.5);
    let s = ScalarField::from_fn(g, Extension::ZeroExtend, |x| (2.0 * std::f64::consts::PI * x[0]).sin()).unwrap();
    let n = s.sup_norm();
    assert!((1.0 - 1e-3..=1.0).contains(&n));
  }

  #[test]
  fn periodic_lookup_wraps() {
    let g = Grid::lattice(vec![0], vec![16], 16).unwrap();
    let f = ScalarField::from_fn(g, Extension::Periodic(vec![true]), |x| x[0]).unwrap();
    assert_eq!(f.value_global(&[17]), f.value_global(&[1]));
    assert_eq!(f.value_global(&[-1]), f.value_global(&[15]));
  }

  #[test]
  fn zero_extension_outside_window() {
    let g = Grid::lattice(vec![4], vec![8], 8).unwrap();
    let f = ScalarField::constant(g, Extension::ZeroExtend, 1.0);
    assert_eq!(f.value_global(&[3]), 0.0);
    assert_eq!(f.value_global(&[4]), 1.0);
    assert_eq!(f.value_global(&[12]), 0.0);
  }

  #[test]
  fn interpolation_is_cubic_exact() {
    let g = Grid::lattice(vec![-8], vec![40], 8).unwrap();
    let f = ScalarField::from_fn(g, Extension::ZeroExtend, |x| x[0].powi(3) - x[0]).unwrap();
    let x = 0.3217;
    assert!((f.value_at(&[x]) - (x.powi(3) - x)).abs() < 1e-12);
  }

  #[test]
  fn translated_generator_follows_samples() {
    let g = Grid::lattice(vec![0], vec![17], 16).unwrap();
    let f = ScalarField::from_analytic(g, Extension::ZeroExtend, AnalyticFn::single(vec![Factor::Bump {
      a: 0.2,
      b: 0.8,
    }]))
    .unwrap();
    let t = f.translated(&[16]);
    assert_eq!(t.value_global(&[24]), f.value_global(&[8]));
    assert!((t.value_at(&[1.5]) - f.value_at(&[0.5])).abs() < 1e-14);
  }

  #[test]
  fn edge_margin_check() {
    let g = Grid::unit_box(1, 16).unwrap();
    let f = ScalarField::from_fn(g, Extension::ZeroExtend, |x| if (0.25..=0.75).contains(&x[0]) { 1.0 } else { 0.0 })
      .unwrap();
    assert!(f.vanishes_near_edge(0.2, &[false]));
    assert!(!f.vanishes_near_edge(0.3, &[false]));
  }
}
