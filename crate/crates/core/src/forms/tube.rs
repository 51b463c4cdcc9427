use crate::{
  error::{Error, Result},
  fields::{Extension, Grid, ScalarField},
  forms::{multi_indices, DifferentialForm},
};

pub(crate) fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
  let n = m.len();
  let mut det = 1.0;
  for col in 0..n {
    let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
    if m[pivot][col] == 0.0 {
      return 0.0;
    }
    if pivot != col {
      m.swap(col, pivot);
      det = -det;
    }
    det *= m[col][col];
    for row in col + 1..n {
      let factor = m[row][col] / m[col][col];
      for k in col..n {
        m[row][k] -= factor * m[col][k];
      }
    }
  }
  det
}

/// Determinant of the submatrix with the given rows and columns.
pub(crate) fn minor(m: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
  determinant(rows.iter().map(|&r| cols.iter().map(|&c| m[r][c]).collect()).collect())
}

fn inverse(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
  let n = m.len();
  let mut cols = Vec::with_capacity(n);
  for j in 0..n {
    let e = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
    cols.push(crate::fields::stencil::solve_dense(m.to_vec(), e));
  }
  (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

/// Orientation-preserving affine embedding `x ↦ A x + c` of a unit box.
#[derive(Clone, Debug, PartialEq)]
pub struct TubeEmbedding {
  matrix:  Vec<Vec<f64>>,
  offset:  Vec<f64>,
  inverse: Vec<Vec<f64>>,
  det:     f64,
}

impl TubeEmbedding {
  pub fn new(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
    let n = offset.len();
    if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
      return Err(Error::Incompatible("embedding matrix shape does not match offset".into()));
    }
    let det = determinant(matrix.clone());
    if det.abs() < 1e-14 {
      return Err(Error::Singular);
    }
    if det < 0.0 {
      return Err(Error::Geometry(format!("embedding reverses orientation (det {det})")));
    }
    let inverse = inverse(&matrix);
    Ok(Self { matrix, offset, inverse, det })
  }

  pub fn identity(n: usize) -> Self {
    let matrix: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    Self { inverse: matrix.clone(), matrix, offset: vec![0.0; n], det: 1.0 }
  }

  pub fn dims(&self) -> usize { self.offset.len() }

  pub fn matrix(&self) -> &[Vec<f64>] { &self.matrix }

  pub fn offset(&self) -> &[f64] { &self.offset }

  pub fn det(&self) -> f64 { self.det }

  pub fn inverse_matrix(&self) -> &[Vec<f64>] { &self.inverse }

  pub fn apply(&self, x: &[f64]) -> Vec<f64> {
    self.matrix.iter().zip(&self.offset).map(|(row, c)| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + c).collect()
  }

  pub fn invert(&self, y: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = y.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
    self.inverse.iter().map(|row| row.iter().zip(&d).map(|(a, b)| a * b).sum()).collect()
  }

  /// Axis-aligned bounding box of the image of `[0,1]^n`.
  pub fn image_bounds(&self) -> Vec<(f64, f64)> {
    (0..self.dims())
      .map(|r| {
        let lo: f64 = self.offset[r] + self.matrix[r].iter().map(|a| a.min(0.0)).sum::<f64>();
        let hi: f64 = self.offset[r] + self.matrix[r].iter().map(|a| a.max(0.0)).sum::<f64>();
        (lo, hi)
      })
      .collect()
  }

  /// Coefficient transform of the pullback: `(θ*ω)_I = Σ_J ω_J · det A[J, I]`.
  pub(crate) fn pullback_coefficients(&self, degree: usize, at_image: &[f64]) -> Vec<f64> {
    let idx = multi_indices(self.dims(), degree);
    idx.iter().map(|i| idx.iter().zip(at_image).map(|(j, w)| w * minor(&self.matrix, j, i)).sum()).collect()
  }

  /// Coefficient transform of the pushforward: `Σ_I ν_I · det A⁻¹[I, J]`.
  pub(crate) fn pushforward_coefficients(&self, degree: usize, at_source: &[f64]) -> Vec<f64> {
    let idx = multi_indices(self.dims(), degree);
    idx.iter().map(|j| idx.iter().zip(at_source).map(|(i, v)| v * minor(&self.inverse, i, j)).sum()).collect()
  }
}

fn inside_unit_box(x: &[f64]) -> bool { x.iter().all(|&t| (-1e-9..=1.0 + 1e-9).contains(&t)) }

/// The form on `target` whose pullback along `θ` is `ν`, extended by zero
/// outside `θ(Q)`. `ν` lives on a grid over the unit box.
pub fn pushforward_tube(nu: &DifferentialForm, theta: &TubeEmbedding, target: &Grid) -> Result<DifferentialForm> {
  if nu.dims() != theta.dims() || target.dims() != theta.dims() {
    return Err(Error::Incompatible("tube, form and target dimensions differ".into()));
  }
  let count = nu.components().len();
  let mut data = vec![vec![0.0; target.len()]; count];
  for f in 0..target.len() {
    let x = theta.invert(&target.point_at(f));
    if !inside_unit_box(&x) {
      continue;
    }
    let x: Vec<f64> = x.iter().map(|t| t.clamp(0.0, 1.0)).collect();
    let values = theta.pushforward_coefficients(nu.degree(), &nu.coefficients_at(&x));
    for (c, v) in values.into_iter().enumerate() {
      data[c][f] = v;
    }
  }
  let components = data
    .into_iter()
    .map(|d| ScalarField::new(target.clone(), d, Extension::ZeroExtend))
    .collect::<Result<_>>()?;
  DifferentialForm::new(nu.dims(), nu.degree(), components)
}

/// Pullback of a form along `θ`, sampled on `grid` over the unit box, with
/// the form given by a coefficient-vector sampler on the ambient space.
pub fn pullback_affine(
  degree: usize,
  theta: &TubeEmbedding,
  grid: &Grid,
  sample: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<DifferentialForm> {
  let count = multi_indices(theta.dims(), degree).len();
  let mut data = vec![vec![0.0; grid.len()]; count];
  for f in 0..grid.len() {
    let y = theta.apply(&grid.point_at(f));
    let values = theta.pullback_coefficients(degree, &sample(&y)?);
    for (c, v) in values.into_iter().enumerate() {
      data[c][f] = v;
    }
  }
  let components =
    data.into_iter().map(|d| ScalarField::new(grid.clone(), d, Extension::ZeroExtend)).collect::<Result<_>>()?;
  DifferentialForm::new(theta.dims(), degree, components)
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::fields::{integrate_window, AnalyticFn, Factor};

  fn bump_top(n: usize) -> DifferentialForm {
    let g = Grid::unit_box(2, n).unwrap();
    DifferentialForm::top(
      ScalarField::from_analytic(g, Extension::ZeroExtend, AnalyticFn::single(vec![
        Factor::Bump { a: 0.1, b: 0.9 },
        Factor::Bump { a: 0.2, b: 0.8 },
      ]))
      .unwrap(),
    )
  }

  #[test]
  fn identity_extends_by_zero() {
    let nu = bump_top(32);
    let target = Grid::lattice(vec![-8, -8], vec![48, 48], 32).unwrap();
    let p = pushforward_tube(&nu, &TubeEmbedding::identity(2), &target).unwrap();
    for g in target.global_indices() {
      assert!((p.coefficients_global(&g)[0] - nu.coefficients_global(&g)[0]).abs() < 1e-14);
    }
  }

  #[test]
  fn affine_pushforward_preserves_integral() {
    let nu = bump_top(64);
    let theta = TubeEmbedding::new(vec![vec![0.5, 0.3], vec![-0.2, 1.5]], vec![0.25, 0.1]).unwrap();
    let target = Grid::lattice(vec![-64, -64], vec![256, 256], 128).unwrap();
    let p = pushforward_tube(&nu, &theta, &target).unwrap();
    let total = integrate_window(p.top_coefficient().unwrap());
    assert!((total - 1.0).abs() < 1e-4, "{total}");
  }

  #[test]
  fn orientation_and_singularity_guards() {
    assert!(matches!(TubeEmbedding::new(vec![vec![1.0, 0.0], vec![0.0, 0.0]], vec![0.0; 2]), Err(Error::Singular)));
    assert!(matches!(
      TubeEmbedding::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.0; 2]),
      Err(Error::Geometry(_))
    ));
  }

  #[test]
  fn pull_then_push_is_identity_on_one_forms() {
    let theta = TubeEmbedding::new(vec![vec![0.0, -2.0], vec![1.0, 0.0]], vec![1.0, 0.0]).unwrap();
    let w = [0.7, -1.3];
    let pulled = theta.pullback_coefficients(1, &w);
    let back = theta.pushforward_coefficients(1, &pulled);
    assert!((back[0] - w[0]).abs() < 1e-14 && (back[1] - w[1]).abs() < 1e-14);
  }
}
