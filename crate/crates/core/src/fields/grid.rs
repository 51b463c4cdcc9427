use crate::error::{Error, Result};

/// Smallest number of intervals allowed per unit length.
pub const MIN_INTERVALS: usize = 8;

/// A vertex-centered uniform grid on an axis-aligned box.
///
/// Sample `i` along axis `a` sits at coordinate `(lo[a] + i) * spacing[a]`, so
/// grids that share a spacing also share a global integer index space. Model
/// windows use spacing `1/N` on every axis, which makes every lattice
/// translation an exact index shift.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
  lo:      Vec<i64>,
  shape:   Vec<usize>,
  spacing: Vec<f64>,
}

impl Grid {
  pub fn new(lo: Vec<i64>, shape: Vec<usize>, spacing: Vec<f64>) -> Result<Self> {
    if lo.len() != shape.len() || lo.len() != spacing.len() {
      return Err(Error::InvalidGrid("lo, shape and spacing lengths differ".into()));
    }
    if shape.contains(&0) {
      return Err(Error::InvalidGrid(format!("empty axis in shape {shape:?}")));
    }
    if spacing.iter().any(|&h| !(h.is_finite() && h > 0.0)) {
      return Err(Error::InvalidGrid(format!("bad spacing {spacing:?}")));
    }
    Ok(Self { lo, shape, spacing })
  }

  /// The closed unit box `[0,1]^dims` with `intervals` intervals per axis.
  pub fn unit_box(dims: usize, intervals: usize) -> Result<Self> {
    Self::unit_box_per_axis(&vec![intervals; dims])
  }

  /// The closed unit box with a possibly different number of intervals per axis.
  pub fn unit_box_per_axis(intervals: &[usize]) -> Result<Self> {
    if let Some(&m) = intervals.iter().find(|&&m| m < MIN_INTERVALS) {
      return Err(Error::InvalidGrid(format!("{m} intervals per axis, need at least {MIN_INTERVALS}")));
    }
    Self::new(
      vec![0; intervals.len()],
      intervals.iter().map(|m| m + 1).collect(),
      intervals.iter().map(|&m| 1.0 / m as f64).collect(),
    )
  }

  /// A window of the global lattice grid with `per_unit` samples per unit length.
  pub fn lattice(lo: Vec<i64>, shape: Vec<usize>, per_unit: usize) -> Result<Self> {
    if per_unit < MIN_INTERVALS {
      return Err(Error::InvalidGrid(format!("{per_unit} samples per unit, need at least {MIN_INTERVALS}")));
    }
    let dims = lo.len();
    Self::new(lo, shape, vec![1.0 / per_unit as f64; dims])
  }

  /// A zero-dimensional grid holding a single sample.
  pub fn point() -> Self { Self { lo: vec![], shape: vec![], spacing: vec![] } }

  pub fn dims(&self) -> usize { self.shape.len() }

  pub fn lo(&self) -> &[i64] { &self.lo }

  pub fn shape(&self) -> &[usize] { &self.shape }

  pub fn spacing(&self) -> &[f64] { &self.spacing }

  pub fn len(&self) -> usize { self.shape.iter().product() }

  pub fn is_empty(&self) -> bool { self.len() == 0 }

  /// Last global index (inclusive) along `axis`.
  pub fn hi(&self, axis: usize) -> i64 { self.lo[axis] + self.shape[axis] as i64 - 1 }

  pub fn strides(&self) -> Vec<usize> {
    let mut strides = vec![1; self.dims()];
    for a in (0..self.dims().saturating_sub(1)).rev() {
      strides[a] = strides[a + 1] * self.shape[a + 1];
    }
    strides
  }

  pub fn coord(&self, axis: usize, local: usize) -> f64 {
    (self.lo[axis] + local as i64) as f64 * self.spacing[axis]
  }

  pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; self.dims()];
    for a in (0..self.dims()).rev() {
      idx[a] = flat % self.shape[a];
      flat /= self.shape[a];
    }
    idx
  }

  pub fn ravel(&self, idx: &[usize]) -> usize {
    idx.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| acc * s + i)
  }

  pub fn point_at(&self, flat: usize) -> Vec<f64> {
    self.unravel(flat).iter().enumerate().map(|(a, &i)| self.coord(a, i)).collect()
  }

  /// Local multi-index of a global index, if it lies inside the grid.
  pub fn local(&self, global: &[i64]) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(self.dims());
    for a in 0..self.dims() {
      let i = global[a] - self.lo[a];
      if i < 0 || i >= self.shape[a] as i64 {
        return None;
      }
      out.push(i as usize);
    }
    Some(out)
  }

  pub fn translated(&self, shift: &[i64]) -> Self {
    Self {
      lo:      self.lo.iter().zip(shift).map(|(l, s)| l + s).collect(),
      shape:   self.shape.clone(),
      spacing: self.spacing.clone(),
    }
  }

  /// The grid formed by the first `keep` axes.
  pub fn leading(&self, keep: usize) -> Self {
    Self {
      lo:      self.lo[..keep].to_vec(),
      shape:   self.shape[..keep].to_vec(),
      spacing: self.spacing[..keep].to_vec(),
    }
  }

  /// The grid formed by the axes from `from` on.
  pub fn trailing(&self, from: usize) -> Self {
    Self {
      lo:      self.lo[from..].to_vec(),
      shape:   self.shape[from..].to_vec(),
      spacing: self.spacing[from..].to_vec(),
    }
  }

  /// Concatenation of two grids' axes.
  pub fn product(&self, other: &Grid) -> Self {
    Self {
      lo:      [self.lo.as_slice(), other.lo.as_slice()].concat(),
      shape:   [self.shape.as_slice(), other.shape.as_slice()].concat(),
      spacing: [self.spacing.as_slice(), other.spacing.as_slice()].concat(),
    }
  }

  pub fn same_lattice(&self, other: &Grid) -> bool {
    self.dims() == other.dims() && self.spacing.iter().zip(&other.spacing).all(|(a, b)| a == b)
  }

  /// Smallest grid on the same lattice covering both.
  pub fn union(&self, other: &Grid) -> Result<Self> {
    if !self.same_lattice(other) {
      return Err(Error::Incompatible("union of grids with different spacing".into()));
    }
    let lo: Vec<i64> = (0..self.dims()).map(|a| self.lo[a].min(other.lo[a])).collect();
    let shape = (0..self.dims()).map(|a| (self.hi(a).max(other.hi(a)) - lo[a] + 1) as usize).collect();
    Self::new(lo, shape, self.spacing.clone())
  }

  /// Intersection of two grids on the same lattice, `None` when disjoint.
  pub fn intersection(&self, other: &Grid) -> Option<Self> {
    if !self.same_lattice(other) {
      return None;
    }
    let mut lo = Vec::with_capacity(self.dims());
    let mut shape = Vec::with_capacity(self.dims());
    for a in 0..self.dims() {
      let l = self.lo[a].max(other.lo[a]);
      let h = self.hi(a).min(other.hi(a));
      if h < l {
        return None;
      }
      lo.push(l);
      shape.push((h - l + 1) as usize);
    }
    Some(Self { lo, shape, spacing: self.spacing.clone() })
  }

  pub fn contains_grid(&self, other: &Grid) -> bool {
    self.same_lattice(other)
      && (0..self.dims()).all(|a| other.lo[a] >= self.lo[a] && other.hi(a) <= self.hi(a))
  }

  /// Iterate global multi-indices in row-major order.
  pub fn global_indices(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
    (0..self.len()).map(move |f| {
      self.unravel(f).iter().zip(&self.lo).map(|(&i, &l)| l + i as i64).collect()
    })
  }

  /// Visit every sample in row-major order with its flat offset and global
  /// multi-index, without allocating per sample.
  pub fn for_each_global(&self, mut f: impl FnMut(usize, &[i64])) {
    let n = self.dims();
    if self.is_empty() {
      return;
    }
    let mut idx = self.lo.clone();
    for flat in 0..self.len() {
      f(flat, &idx);
      for a in (0..n).rev() {
        idx[a] += 1;
        if idx[a] < self.lo[a] + self.shape[a] as i64 {
          break;
        }
        idx[a] = self.lo[a];
      }
    }
  }
}

/// Visit every 1D line of a row-major array along `axis`: the callback
/// receives the flat offset of the line's first element and the stride.
pub(crate) fn for_each_line(shape: &[usize], axis: usize, mut f: impl FnMut(usize, usize)) {
  let stride: usize = shape[axis + 1..].iter().product();
  let outer: usize = shape[..axis].iter().product();
  let len = shape[axis];
  for o in 0..outer {
    for inner in 0..stride {
      f(o * len * stride + inner, stride);
    }
  }
}
