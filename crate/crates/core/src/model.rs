//! Model geometries and bounded forms on them.

use serde::{Deserialize, Serialize};

use crate::{
  error::{Error, Result},
  fields::{Extension, Grid, ScalarField},
  forms::{exterior_derivative, exterior_derivative_exact, multi_indices, sup_norm_form, DifferentialForm},
  group::{Group, GroupElement},
};

/// A model space `M` with its free cocompact deck group `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
  /// `ℝ` with `ℤ` acting by integer translation.
  Line,
  /// `ℝ²` with `ℤ²`.
  Plane,
  /// `ℝ × [0,1]` with `ℤ` acting on the first factor.
  Strip,
  /// `ℝ/mℤ` with `ℤ/m` acting by unit rotation.
  Circle { m: u64 },
}

impl Model {
  pub fn name(&self) -> &'static str {
    match self {
      Model::Line => "line",
      Model::Plane => "plane",
      Model::Strip => "strip",
      Model::Circle { .. } => "circle",
    }
  }

  pub fn dims(&self) -> usize {
    match self {
      Model::Plane | Model::Strip => 2,
      Model::Line | Model::Circle { .. } => 1,
    }
  }

  pub fn group(&self) -> Group {
    match self {
      Model::Line | Model::Strip => Group::Lattice(1),
      Model::Plane => Group::Lattice(2),
      Model::Circle { m } => Group::Cyclic(*m),
    }
  }

  /// Number of leading axes along which `G` translates.
  pub fn lattice_axes(&self) -> usize { self.group().rank() }

  pub fn has_boundary(&self) -> bool { matches!(self, Model::Strip) }

  /// Samples along the bounded strip axis.
  fn bounded_len(resolution: usize) -> usize { resolution + 1 }

  /// One period of a lattice-periodic field (the whole circle for ℤ/m).
  pub fn periodic_grid(&self, resolution: usize) -> Result<Grid> {
    match self {
      Model::Line => Grid::lattice(vec![0], vec![resolution], resolution),
      Model::Plane => Grid::lattice(vec![0, 0], vec![resolution; 2], resolution),
      Model::Strip => Grid::lattice(vec![0, 0], vec![resolution, Self::bounded_len(resolution)], resolution),
      Model::Circle { m } => Grid::lattice(vec![0], vec![*m as usize * resolution], resolution),
    }
  }

  pub fn periodic_extension(&self) -> Extension {
    match self {
      Model::Strip => Extension::Periodic(vec![true, false]),
      _ => Extension::Periodic(vec![true; self.dims()]),
    }
  }

  /// Window grid spanning lattice cells `lo..=hi` (in cell units along the
  /// lattice axes, both ends included as sample rows) and the full bounded axis.
  pub fn window_grid(&self, resolution: usize, lo: &[i64], hi: &[i64]) -> Result<Grid> {
    if let Model::Circle { .. } = self {
      return self.periodic_grid(resolution);
    }
    let r = resolution as i64;
    let mut glo: Vec<i64> = lo.iter().map(|c| c * r).collect();
    let mut shape: Vec<usize> = lo.iter().zip(hi).map(|(a, b)| ((b - a) * r + 1) as usize).collect();
    if let Model::Strip = self {
      glo.push(0);
      shape.push(Self::bounded_len(resolution));
    }
    Grid::lattice(glo, shape, resolution)
  }

  /// Index shift of the translation by `g`.
  pub fn index_shift(&self, g: &GroupElement, resolution: usize) -> Vec<i64> {
    let r = resolution as i64;
    let mut s: Vec<i64> = g.0.iter().map(|v| v * r).collect();
    if let Model::Strip = self {
      s.push(0);
    }
    s
  }

  /// Integration weights along each axis for a global index: uniform along
  /// lattice axes, composite-rule weights along the bounded strip axis.
  pub fn axis_weight(&self, axis: usize, index: i64, resolution: usize) -> f64 {
    let h = 1.0 / resolution as f64;
    if axis < self.lattice_axes() || !self.has_boundary() {
      return h;
    }
    if index < 0 {
      return 0.0;
    }
    crate::fields::stencil::line_weight(resolution + 1, index as usize) * h
  }
}


/// A bounded form on a model: a lattice-periodic part (one period stored)
/// plus a part supported in a finite window, zero outside it. On the circle
/// everything lives in the periodic part.
#[derive(Clone, Debug)]
pub struct ModelForm {
  model:      Model,
  resolution: usize,
  degree:     usize,
  periodic:   Option<DifferentialForm>,
  local:      Option<DifferentialForm>,
}

impl ModelForm {
  pub fn zero(model: Model, resolution: usize, degree: usize) -> Result<Self> {
    if !resolution.is_multiple_of(16) || resolution < 16 {
      return Err(Error::InvalidGrid(format!("resolution {resolution} must be a positive multiple of 16")));
    }
    if degree > model.dims() {
      return Err(Error::Degree(format!("degree {degree} on a {}-dimensional model", model.dims())));
    }
    Ok(Self { model, resolution, degree, periodic: None, local: None })
  }

  /// Assemble from parts; the periodic part must sit on [`Model::periodic_grid`].
  pub fn new(
    model: Model,
    resolution: usize,
    degree: usize,
    periodic: Option<DifferentialForm>,
    local: Option<DifferentialForm>,
  ) -> Result<Self> {
    let mut out = Self::zero(model, resolution, degree)?;
    if let Some(p) = periodic {
      out.check_piece(&p)?;
      if p.grid() != &model.periodic_grid(resolution)? {
        return Err(Error::Incompatible("periodic part must cover exactly one period".into()));
      }
      out.periodic = Some(p.resampled(&model.periodic_grid(resolution)?, model.periodic_extension())?);
    }
    if let Some(l) = local {
      out.accumulate(&l, 1.0)?;
    }
    Ok(out)
  }

  fn check_piece(&self, piece: &DifferentialForm) -> Result<()> {
    if piece.degree() != self.degree || piece.dims() != self.model.dims() {
      return Err(Error::Degree("piece does not match the form's degree".into()));
    }
    let h = 1.0 / self.resolution as f64;
    if piece.grid().spacing().iter().any(|&s| (s - h).abs() > 1e-15) {
      return Err(Error::Incompatible("piece is not on the model lattice".into()));
    }
    Ok(())
  }

  pub fn model(&self) -> Model { self.model }

  pub fn resolution(&self) -> usize { self.resolution }

  pub fn degree(&self) -> usize { self.degree }

  pub fn periodic(&self) -> Option<&DifferentialForm> { self.periodic.as_ref() }

  pub fn local(&self) -> Option<&DifferentialForm> { self.local.as_ref() }

  pub fn components(&self) -> usize { multi_indices(self.model.dims(), self.degree).len() }

  pub fn is_zero(&self) -> bool {
    self.periodic.as_ref().is_none_or(|p| p.is_zero()) && self.local.as_ref().is_none_or(|l| l.is_zero())
  }

  /// Coefficient vector at a global grid index.
  pub fn coefficients_global(&self, idx: &[i64]) -> Vec<f64> {
    let mut v = vec![0.0; self.components()];
    for part in [&self.periodic, &self.local].into_iter().flatten() {
      for (c, x) in v.iter_mut().zip(part.coefficients_global(idx)) {
        *c += x;
      }
    }
    v
  }

  /// Coefficient `c` at a global grid index, without allocating.
  pub fn component_global(&self, c: usize, idx: &[i64]) -> f64 {
    [&self.periodic, &self.local].into_iter().flatten().map(|p| p.components()[c].value_global(idx)).sum()
  }

  /// Make sure the local part is stored on a window containing `grid`.
  pub fn reserve(&mut self, grid: &Grid) -> Result<()> {
    if let Model::Circle { .. } = self.model {
      return Ok(());
    }
    if self.local.as_ref().is_some_and(|l| l.grid().contains_grid(grid)) {
      return Ok(());
    }
    let zeros = DifferentialForm::zeros(grid.clone(), Extension::ZeroExtend, self.degree)?;
    self.accumulate(&zeros, 0.0)
  }

  /// Add `coeff · piece` (a zero-extended form on the model lattice).
  pub fn accumulate(&mut self, piece: &DifferentialForm, coeff: f64) -> Result<()> {
    self.check_piece(piece)?;
    if let Model::Circle { .. } = self.model {
      let grid = self.model.periodic_grid(self.resolution)?;
      let ext = self.model.periodic_extension();
      let periodic = match self.periodic.take() {
        Some(p) => p,
        None => DifferentialForm::zeros(grid.clone(), ext, self.degree)?,
      };
      let len = grid.shape()[0] as i64;
      let mut comps = periodic.into_components();
      for (c, src) in comps.iter_mut().zip(piece.components()) {
        let data = c.data_mut();
        for (f, v) in src.data().iter().enumerate() {
          if *v != 0.0 {
            let i = (src.grid().lo()[0] + f as i64).rem_euclid(len) as usize;
            data[i] += coeff * v;
          }
        }
      }
      self.periodic = Some(DifferentialForm::new(1, self.degree, comps)?);
      return Ok(());
    }
    let target = match &self.local {
      Some(l) if l.grid().contains_grid(piece.grid()) => l.grid().clone(),
      Some(l) => l.grid().union(piece.grid())?,
      None => piece.grid().clone(),
    };
    let mut local = match self.local.take() {
      Some(l) if l.grid() == &target => l,
      Some(l) => l.resampled(&target, Extension::ZeroExtend)?,
      None => DifferentialForm::zeros(target.clone(), Extension::ZeroExtend, self.degree)?,
    };
    let pg = piece.grid();
    let offset: Vec<usize> = (0..pg.dims()).map(|a| (pg.lo()[a] - target.lo()[a]) as usize).collect();
    let strides = target.strides();
    let inner = pg.shape()[pg.dims() - 1];
    let rows = pg.len() / inner;
    for (dst, src) in local.components_mut().iter_mut().zip(piece.components()) {
      let data = dst.data_mut();
      for row in 0..rows {
        let idx = pg.unravel(row * inner);
        let base: usize = (0..pg.dims()).map(|a| (idx[a] + offset[a]) * strides[a]).sum();
        for (k, v) in src.data()[row * inner..(row + 1) * inner].iter().enumerate() {
          data[base + k] += coeff * v;
        }
      }
    }
    self.local = Some(local);
    Ok(())
  }

  /// The form sampled on a window grid, zero-extended.
  pub fn materialize(&self, grid: &Grid) -> Result<DifferentialForm> {
    let n = self.components();
    let mut data = vec![vec![0.0; grid.len()]; n];
    for part in [&self.periodic, &self.local].into_iter().flatten() {
      for (d, c) in data.iter_mut().zip(part.components()) {
        grid.for_each_global(|f, idx| d[f] += c.value_global(idx));
      }
    }
    let comps = data
      .into_iter()
      .map(|d| ScalarField::new(grid.clone(), d, Extension::ZeroExtend))
      .collect::<Result<_>>()?;
    DifferentialForm::new(self.model.dims(), self.degree, comps)
  }

  /// Fold everything into a single zero-extended form on `grid`.
  pub fn localized(&self, grid: &Grid) -> Result<Self> {
    let mut out = Self::zero(self.model, self.resolution, self.degree)?;
    out.accumulate(&self.materialize(grid)?, 1.0)?;
    Ok(out)
  }

  /// Pullback `g*ω`, i.e. `x ↦ ω(x + g)`.
  pub fn pullback(&self, g: &GroupElement) -> Result<Self> {
    let shift: Vec<i64> = self.model.index_shift(g, self.resolution).iter().map(|s| -s).collect();
    let mut out = self.clone();
    out.local = self.local.as_ref().map(|l| l.translated(&shift));
    if let (Model::Circle { .. }, Some(p)) = (self.model, &self.periodic) {
      let len = p.grid().shape()[0];
      let k = (-shift[0]).rem_euclid(len as i64) as usize;
      let comps = p
        .components()
        .iter()
        .map(|c| {
          let mut d = c.data().to_vec();
          d.rotate_left(k);
          ScalarField::new(c.grid().clone(), d, c.extension().clone())
        })
        .collect::<Result<_>>()?;
      out.periodic = Some(DifferentialForm::new(1, self.degree, comps)?);
    }
    Ok(out)
  }

  pub fn scaled(&self, c: f64) -> Self {
    Self {
      periodic: self.periodic.as_ref().map(|p| p.scaled(c)),
      local: self.local.as_ref().map(|l| l.scaled(c)),
      ..self.clone()
    }
  }

  /// `self + c·other`.
  pub fn axpy(&self, c: f64, other: &ModelForm) -> Result<Self> {
    if self.model != other.model || self.resolution != other.resolution || self.degree != other.degree {
      return Err(Error::Incompatible("forms on different models".into()));
    }
    let mut out = self.clone();
    out.periodic = match (&self.periodic, &other.periodic) {
      (Some(a), Some(b)) => Some(a.axpy(c, b)?),
      (None, Some(b)) => Some(b.scaled(c)),
      (a, None) => a.clone(),
    };
    if let Some(l) = &other.local {
      out.accumulate(l, c)?;
    }
    Ok(out)
  }

  /// Sup norm over `M`. Outside the local window only the periodic part
  /// remains, and it takes all its values there.
  pub fn sup_norm(&self) -> Result<f64> {
    let periodic = self.periodic.as_ref().map_or(0.0, sup_norm_form);
    let Some(local) = &self.local else {
      return Ok(periodic);
    };
    let Some(p) = &self.periodic else {
      return Ok(periodic.max(sup_norm_form(local)));
    };
    let mut squares = vec![0.0; local.grid().len()];
    for (l, c) in local.components().iter().zip(p.components()) {
      local.grid().for_each_global(|f, idx| {
        let v = l.data()[f] + c.value_global(idx);
        squares[f] += v * v;
      });
    }
    Ok(squares.into_iter().fold(0.0, f64::max).sqrt().max(periodic))
  }

  /// A window containing the local part and at least one period.
  pub fn support_grid(&self) -> Result<Grid> {
    let period = self.model.periodic_grid(self.resolution)?;
    if let Model::Circle { .. } = self.model {
      return Ok(period);
    }
    let period = if let Model::Strip = self.model {
      Grid::lattice(period.lo().to_vec(), vec![period.shape()[0] + 1, period.shape()[1]], self.resolution)?
    } else {
      Grid::lattice(period.lo().to_vec(), period.shape().iter().map(|s| s + 1).collect(), self.resolution)?
    };
    match &self.local {
      Some(l) => l.grid().union(&period),
      None => Ok(period),
    }
  }

  fn map_parts(&self, degree: usize, f: impl Fn(&DifferentialForm) -> Result<DifferentialForm>) -> Result<Self> {
    Ok(Self {
      degree,
      periodic: self.periodic.as_ref().map(&f).transpose()?,
      local: self.local.as_ref().map(&f).transpose()?,
      ..self.clone()
    })
  }

  /// Exterior derivative with finite differences on each part.
  pub fn exterior_derivative(&self) -> Result<Self> { self.map_parts(self.degree + 1, exterior_derivative) }

  /// Exterior derivative from analytic generators.
  pub fn exterior_derivative_exact(&self) -> Result<Self> {
    self.map_parts(self.degree + 1, exterior_derivative_exact)
  }
}

/// Pullback of a strip `1`-form to the two boundary lines `x₂ = 0` and
/// `x₂ = 1`, each oriented as the boundary of `M` (the top line runs against
/// `e₁`). Returns `(bottom, top)` as `1`-forms on the line model.
pub fn boundary_restriction(form: &ModelForm) -> Result<(ModelForm, ModelForm)> {
  if !form.model().has_boundary() {
    return Err(Error::NoBoundary);
  }
  if form.degree() != 1 {
    return Err(Error::Degree("boundary restriction is implemented for strip 1-forms".into()));
  }
  let n = form.resolution();
  let restrict = |part: &DifferentialForm, row: i64, sign: f64, periodic: bool| -> Result<DifferentialForm> {
    let grid = part.grid();
    let line = Grid::lattice(vec![grid.lo()[0]], vec![grid.shape()[0]], n)?;
    let tangential = &part.components()[0];
    let data = (0..grid.shape()[0] as i64).map(|i| sign * tangential.value_global(&[grid.lo()[0] + i, row])).collect();
    let ext = if periodic { Extension::Periodic(vec![true]) } else { Extension::ZeroExtend };
    Ok(DifferentialForm::top(ScalarField::new(line, data, ext)?))
  };
  let side = |row: i64, sign: f64| -> Result<ModelForm> {
    let periodic = form.periodic().map(|p| restrict(p, row, sign, true)).transpose()?;
    let local = form.local().map(|l| restrict(l, row, sign, false)).transpose()?;
    ModelForm::new(Model::Line, n, 1, periodic, local)
  };
  Ok((side(0, 1.0)?, side(n as i64, -1.0)?))
}

#[cfg(test)]
mod tests {
  use super::*;

  fn bump_piece(model: Model, n: usize, lo: Vec<i64>, shape: Vec<usize>) -> DifferentialForm {
    let grid = Grid::lattice(lo, shape, n).unwrap();
    let f = ScalarField::from_fn(grid, Extension::ZeroExtend, |x| x.iter().map(|t| (3.0 * t).sin()).product())
      .unwrap();
    let _ = model;
    DifferentialForm::top(f)
  }

  #[test]
  fn accumulate_grows_window() {
    let mut w = ModelForm::zero(Model::Line, 16, 1).unwrap();
    let a = bump_piece(Model::Line, 16, vec![0], vec![17]);
    let b = bump_piece(Model::Line, 16, vec![40], vec![10]);
    w.accumulate(&a, 1.0).unwrap();
    w.accumulate(&b, 2.0).unwrap();
    assert_eq!(w.local().unwrap().grid().lo(), &[0]);
    assert_eq!(w.local().unwrap().grid().shape(), &[50]);
    assert_eq!(w.coefficients_global(&[42])[0], 2.0 * b.coefficients_global(&[42])[0]);
    assert_eq!(w.coefficients_global(&[3])[0], a.coefficients_global(&[3])[0]);
  }

  #[test]
  fn circle_wraps() {
    let mut w = ModelForm::zero(Model::Circle { m: 3 }, 16, 1).unwrap();
    let a = bump_piece(Model::Line, 16, vec![40], vec![16]);
    w.accumulate(&a, 1.0).unwrap();
    assert_eq!(w.coefficients_global(&[2])[0], a.coefficients_global(&[50])[0]);
    let p = w.pullback(&GroupElement(vec![1])).unwrap();
    assert_eq!(p.coefficients_global(&[2])[0], w.coefficients_global(&[18])[0]);
  }

  #[test]
  fn pullback_shifts_local_part() {
    let mut w = ModelForm::zero(Model::Plane, 16, 2).unwrap();
    w.accumulate(&bump_piece(Model::Plane, 16, vec![0, 0], vec![17, 17]), 1.0).unwrap();
    let p = w.pullback(&GroupElement(vec![1, -2])).unwrap();
    assert_eq!(p.coefficients_global(&[-16 + 3, 32 + 5]), w.coefficients_global(&[3, 5]));
  }

  #[test]
  fn boundary_of_normal_component_vanishes() {
    let n = 16;
    let grid = Model::Strip.periodic_grid(n).unwrap();
    let f = ScalarField::from_fn(grid.clone(), Model::Strip.periodic_extension(), |x| 1.0 + x[1]).unwrap();
    let zero = ScalarField::zeros(grid, Model::Strip.periodic_extension());
    let normal = DifferentialForm::new(2, 1, vec![zero.clone(), f.clone()]).unwrap();
    let w = ModelForm::new(Model::Strip, n, 1, Some(normal), None).unwrap();
    let (b, t) = boundary_restriction(&w).unwrap();
    assert!(b.is_zero() && t.is_zero());
    let tangential = DifferentialForm::new(2, 1, vec![f, zero]).unwrap();
    let w = ModelForm::new(Model::Strip, n, 1, Some(tangential), None).unwrap();
    let (b, t) = boundary_restriction(&w).unwrap();
    assert_eq!(b.coefficients_global(&[5])[0], 1.0);
    assert_eq!(t.coefficients_global(&[5])[0], -2.0);
    assert!(boundary_restriction(&ModelForm::zero(Model::Line, 16, 0).unwrap()).is_err());
  }
}
