use itertools::Itertools;

use crate::{
  error::{Error, Result},
  fields::{Extension, Grid, ScalarField},
};

/// Increasing multi-indices of size `k` in `0..n`, in lexicographic order.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> { (0..n).combinations(k).collect() }

/// Position of the multi-index omitting `axis` among the `(n-1)`-indices.
pub fn omitting(n: usize, axis: usize) -> usize { n - 1 - axis }

/// A differential `k`-form on a box window: one coefficient field per
/// increasing multi-index, all on a shared grid.
#[derive(Clone, Debug)]
pub struct DifferentialForm {
  dims:       usize,
  degree:     usize,
  components: Vec<ScalarField>,
}

impl DifferentialForm {
  pub fn new(dims: usize, degree: usize, components: Vec<ScalarField>) -> Result<Self> {
    if degree > dims {
      return Err(Error::Degree(format!("degree {degree} exceeds dimension {dims}")));
    }
    let expected = multi_indices(dims, degree).len();
    if components.len() != expected {
      return Err(Error::Degree(format!("{} components for a {degree}-form in dimension {dims}", components.len())));
    }
    let first = components[0].grid();
    if first.dims() != dims {
      return Err(Error::Incompatible(format!("{}-dimensional grid for a form in dimension {dims}", first.dims())));
    }
    if components.iter().any(|c| c.grid() != first || c.extension() != components[0].extension()) {
      return Err(Error::Incompatible("form components on different grids".into()));
    }
    Ok(Self { dims, degree, components })
  }

  pub fn zeros(grid: Grid, extension: Extension, degree: usize) -> Result<Self> {
    let dims = grid.dims();
    let count = multi_indices(dims, degree).len();
    Self::new(dims, degree, vec![ScalarField::zeros(grid, extension); count])
  }

  /// The top form `f dx₁∧…∧dxₙ`.
  pub fn top(f: ScalarField) -> Self {
    let dims = f.dims();
    Self { dims, degree: dims, components: vec![f] }
  }

  pub fn dims(&self) -> usize { self.dims }

  pub fn degree(&self) -> usize { self.degree }

  pub fn grid(&self) -> &Grid { self.components[0].grid() }

  pub fn extension(&self) -> &Extension { self.components[0].extension() }

  pub fn components(&self) -> &[ScalarField] { &self.components }

  pub fn components_mut(&mut self) -> &mut [ScalarField] { &mut self.components }

  pub fn into_components(self) -> Vec<ScalarField> { self.components }

  pub fn component(&self, index: &[usize]) -> Option<&ScalarField> {
    multi_indices(self.dims, self.degree).iter().position(|i| i == index).map(|p| &self.components[p])
  }

  /// Coefficient of a top form.
  pub fn top_coefficient(&self) -> Result<&ScalarField> {
    if self.degree != self.dims {
      return Err(Error::Degree(format!("expected a top form, got degree {}", self.degree)));
    }
    Ok(&self.components[0])
  }

  /// Coefficient vector at a global grid index.
  pub fn coefficients_global(&self, global: &[i64]) -> Vec<f64> {
    self.components.iter().map(|c| c.value_global(global)).collect()
  }

  /// Coefficient vector at an arbitrary point.
  pub fn coefficients_at(&self, x: &[f64]) -> Vec<f64> { self.components.iter().map(|c| c.value_at(x)).collect() }

  fn check_compatible(&self, other: &DifferentialForm) -> Result<()> {
    if self.dims != other.dims || self.degree != other.degree {
      return Err(Error::Degree("forms of different degree or dimension".into()));
    }
    Ok(())
  }

  /// `self + c·other` on a shared grid.
  pub fn axpy(&self, c: f64, other: &DifferentialForm) -> Result<Self> {
    self.check_compatible(other)?;
    let components =
      self.components.iter().zip(&other.components).map(|(a, b)| a.axpy(c, b)).collect::<Result<_>>()?;
    Ok(Self { components, ..*self })
  }

  pub fn scaled(&self, c: f64) -> Self {
    Self { components: self.components.iter().map(|f| f.scaled(c)).collect(), ..*self }
  }

  /// Multiply every coefficient by a scalar field on the same grid.
  pub fn multiplied(&self, f: &ScalarField) -> Result<Self> {
    let components = self.components.iter().map(|c| c.product(f)).collect::<Result<_>>()?;
    Ok(Self { components, ..*self })
  }

  /// Samples placed on a grid translated by `shift` (global index units).
  pub fn translated(&self, shift: &[i64]) -> Self {
    Self { components: self.components.iter().map(|c| c.translated(shift)).collect(), ..*self }
  }

  /// Resample onto another window of the same lattice.
  pub fn resampled(&self, grid: &Grid, extension: Extension) -> Result<Self> {
    let components =
      self.components.iter().map(|c| c.resampled(grid, extension.clone())).collect::<Result<_>>()?;
    Ok(Self { components, ..*self })
  }

  pub fn is_zero(&self) -> bool { self.components.iter().all(|c| c.data().iter().all(|&v| v == 0.0)) }
}

/// Sup norm of a form: the largest Euclidean norm of the coefficient vector
/// over the samples. This is the operator norm in degrees `n` and `n-1`.
pub fn sup_norm_form(form: &DifferentialForm) -> f64 {
  let len = form.grid().len();
  (0..len)
    .map(|i| form.components.iter().map(|c| c.data()[i] * c.data()[i]).sum::<f64>())
    .fold(0.0, f64::max)
    .sqrt()
}

/// Pullback along the translation `x ↦ x + g` (with `g` in coordinate units):
/// coefficients become `c_I(x + g)`.
///
/// Lattice shifts are exact index shifts; other shifts need analytic generators.
pub fn pullback_translation(form: &DifferentialForm, g: &[i64]) -> Result<DifferentialForm> {
  if g.len() != form.dims {
    return Err(Error::Incompatible("group element dimension does not match the form".into()));
  }
  let spacing = form.grid().spacing();
  let per_unit: Vec<f64> = spacing.iter().map(|h| 1.0 / h).collect();
  if per_unit.iter().all(|p| (p - p.round()).abs() < 1e-9) {
    let shift: Vec<i64> = g.iter().zip(&per_unit).map(|(&gi, p)| -gi * p.round() as i64).collect();
    return Ok(form.translated(&shift));
  }
  let offset: Vec<f64> = g.iter().map(|&v| v as f64).collect();
  let components = form
    .components
    .iter()
    .map(|c| {
      let gen = c.generator().ok_or(Error::MisalignedShift)?.shifted(&offset);
      ScalarField::from_analytic(c.grid().clone(), c.extension().clone(), gen)
    })
    .collect::<Result<_>>()?;
  Ok(DifferentialForm { components, ..*form })
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::fields::{AnalyticFn, Factor};

  #[test]
  fn index_layout() {
    assert_eq!(multi_indices(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    for axis in 0..3 {
      assert!(!multi_indices(3, 2)[omitting(3, axis)].contains(&axis));
    }
  }

  #[test]
  fn norm_of_volume_and_diagonal() {
    let g = Grid::unit_box(2, 16).unwrap();
    let one = ScalarField::constant(g.clone(), Extension::ZeroExtend, 1.0);
    assert_eq!(sup_norm_form(&DifferentialForm::top(one)), 1.0);
    let f = ScalarField::from_fn(g.clone(), Extension::ZeroExtend, |x| x[0] - 2.0 * x[1]).unwrap();
    let w = DifferentialForm::new(2, 1, vec![f.clone(), f.clone()]).unwrap();
    assert!((sup_norm_form(&w) - 2f64.sqrt() * f.sup_norm()).abs() < 1e-14);
    assert_eq!(sup_norm_form(&DifferentialForm::zeros(g, Extension::ZeroExtend, 1).unwrap()), 0.0);
  }

  #[test]
  fn translation_moves_bump_back_a_cell() {
    let g = Grid::lattice(vec![-16], vec![48], 16).unwrap();
    let bump = ScalarField::from_analytic(g, Extension::ZeroExtend, AnalyticFn::single(vec![Factor::Bump {
      a: 0.2,
      b: 0.8,
    }]))
    .unwrap();
    let w = DifferentialForm::top(bump);
    let p = pullback_translation(&w, &[1]).unwrap();
    for i in -16..16 {
      assert_eq!(p.coefficients_global(&[i - 16]), w.coefficients_global(&[i]));
    }
    assert_eq!(pullback_translation(&w, &[0]).unwrap().components()[0].data(), w.components()[0].data());
  }

  #[test]
  fn translation_is_an_action() {
    let g = Grid::lattice(vec![0, 0], vec![16, 16], 16).unwrap();
    let f = ScalarField::from_fn(g, Extension::ZeroExtend, |x| x[0] * x[1] + x[0]).unwrap();
    let w = DifferentialForm::top(f);
    let a = pullback_translation(&pullback_translation(&w, &[1, 0]).unwrap(), &[2, -1]).unwrap();
    let b = pullback_translation(&w, &[3, -1]).unwrap();
    assert_eq!(a.grid(), b.grid());
    assert_eq!(a.components()[0].data(), b.components()[0].data());
  }
}
