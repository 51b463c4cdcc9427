use serde::Serialize;

use crate::{
  constants::{BUMP_SUP, STEP_MOLLIFIER_SUPPORT},
  error::{Error, Result},
  fields::{
    cumulative_integral, integrate_window, stencil::line_weights, trailing_integral, Extension, Grid, Mollifier,
    ScalarField,
  },
  forms::{exterior_derivative, omitting, sup_norm_form, DifferentialForm},
};

/// Relative tolerance on `|∫_Q ω| / ‖ω‖∞` for accepting an input.
pub const ZERO_INTEGRAL_TOLERANCE: f64 = 1e-8;

/// Certified constant with the standard step mollifier on (0.1, 0.9).
pub fn kn_constant(n: usize) -> f64 {
  let (a, b) = STEP_MOLLIFIER_SUPPORT;
  kn_constant_with(n, BUMP_SUP / (b - a))
}

/// `Kₙ = Σ_k r_k Π_{j<k} (1 + r_j)` where `r_k = r^{n-k}` is the sup of the
/// `(n-k)`-fold tensor mollifier (`k = 1..n-1`) and `r_n = 1`.
pub fn kn_constant_with(n: usize, r: f64) -> f64 {
  let mut total = 0.0;
  let mut growth = 1.0;
  for k in 0..n {
    let rk = if k + 1 < n { r.powi((n - 1 - k) as i32) } else { 1.0 };
    total += rk * growth;
    growth *= 1.0 + rk;
  }
  total
}

/// One step of the construction: `ν_k = (−1)^k h(x_0..x_k) ρ(x_{k+1}..) dx_0∧…d̂x_k…`.
#[derive(Clone, Debug)]
pub struct PrimitiveStep {
  pub axis: usize,
  /// Running integral on the leading `axis + 1` axes.
  pub h:    ScalarField,
  /// Tensor mollifier on the remaining axes (a single-sample field for the last step).
  pub rho:  ScalarField,
}

impl PrimitiveStep {
  pub fn sign(&self) -> f64 { if self.axis.is_multiple_of(2) { 1.0 } else { -1.0 } }

  /// The coefficient of `ν_k` on the full grid.
  pub fn coefficient(&self) -> ScalarField {
    let c = if self.rho.dims() == 0 { self.h.clone() } else { self.h.outer(&self.rho) };
    c.scaled(self.sign())
  }

  /// `ν_k` as an `(n−1)`-form.
  pub fn form(&self) -> DifferentialForm {
    let coeff = self.coefficient();
    let n = coeff.dims();
    let mut comps = vec![ScalarField::zeros(coeff.grid().clone(), Extension::ZeroExtend); n];
    comps[omitting(n, self.axis)] = coeff;
    DifferentialForm::new(n, n - 1, comps).expect("consistent components")
  }
}

/// Output of the Poincaré construction with its measured certificates.
#[derive(Clone, Debug)]
pub struct PrimitiveResult {
  pub eta:                 DifferentialForm,
  pub steps:               Vec<PrimitiveStep>,
  /// `‖dη − ω‖∞` with finite-difference `d`.
  pub residual:            f64,
  /// `‖η‖∞ / ‖ω‖∞` (0 for `ω = 0`).
  pub ratio:               f64,
  pub kn:                  f64,
  pub integral:            f64,
  /// Largest trailing integral left after each step, relative to `‖ω‖∞`.
  pub condition_residuals: Vec<f64>,
}

/// Summary record of a [`PrimitiveResult`].
#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveReport {
  pub dims:                usize,
  pub intervals:           Vec<usize>,
  pub residual:            f64,
  pub ratio:               f64,
  pub kn:                  f64,
  pub integral:            f64,
  pub condition_residuals: Vec<f64>,
}

impl PrimitiveResult {
  pub fn report(&self) -> PrimitiveReport {
    PrimitiveReport {
      dims:                self.eta.dims(),
      intervals:           self.eta.grid().shape().iter().map(|s| s - 1).collect(),
      residual:            self.residual,
      ratio:               self.ratio,
      kn:                  self.kn,
      integral:            self.integral,
      condition_residuals: self.condition_residuals.clone(),
    }
  }

  /// Tangential part of `η` on the face `x_{n−1} = 0`, in row-major order.
  pub fn boundary_trace(&self) -> Vec<f64> {
    let n = self.eta.dims();
    let c = &self.eta.components()[omitting(n, n - 1)];
    let grid = c.grid();
    (0..grid.len()).filter(|&f| grid.unravel(f)[n - 1] == 0).map(|f| c.data()[f]).collect()
  }
}

/// Normalized tensor mollifier on the given axes of the unit-box grid: each 1D
/// factor sums to exactly 1 under the composite rule of its axis.
fn step_mollifier(grid: &Grid) -> Result<ScalarField> {
  let (a, b) = STEP_MOLLIFIER_SUPPORT;
  let mollifier = Mollifier::new(a, b)?;
  let mut out = ScalarField::constant(Grid::point(), Extension::ZeroExtend, 1.0);
  for axis in 0..grid.dims() {
    let line = Grid::new(vec![0], vec![grid.shape()[axis]], vec![grid.spacing()[axis]])?;
    let sampled = mollifier.sample(&line)?;
    let mass: f64 =
      line_weights(line.shape()[0]).iter().zip(sampled.data()).map(|(w, v)| w * v).sum::<f64>() * line.spacing()[0];
    out = out.outer(&sampled.scaled(1.0 / mass));
  }
  Ok(out)
}

/// Zero `h` along each line of `axis` past the last nonzero sample of `g`,
/// where the running integral equals the vanishing total. Returns the largest
/// value removed.
fn clip_tail(h: &mut ScalarField, g: &ScalarField, axis: usize) -> f64 {
  let shape = g.grid().shape().to_vec();
  let len = shape[axis];
  let gd = g.data().to_vec();
  let hd = h.data_mut();
  let mut removed = 0.0f64;
  crate::fields::grid::for_each_line(&shape, axis, |start, stride| {
    let last = (0..len).rev().find(|&i| gd[start + i * stride] != 0.0);
    let from = last.map_or(0, |i| i + 1);
    for i in from..len {
      let v = &mut hd[start + i * stride];
      removed = removed.max(v.abs());
      *v = 0.0;
    }
  });
  removed
}

fn check_margin(coeff: &ScalarField, margin: f64, boundary: bool) -> Result<()> {
  let n = coeff.dims();
  let mut skip = vec![false; n];
  if boundary {
    skip[n - 1] = true;
  }
  if !coeff.vanishes_near_edge(margin, &skip) {
    return Err(Error::SupportTouchesMargin { margin });
  }
  Ok(())
}

fn construct(omega: &DifferentialForm, margin: f64, boundary: bool) -> Result<PrimitiveResult> {
  let coeff = omega.top_coefficient()?;
  let grid = coeff.grid().clone();
  let n = grid.dims();
  if n == 0 {
    return Err(Error::Degree("zero-dimensional box".into()));
  }
  if grid.lo().iter().any(|&l| l != 0)
    || (0..n).any(|a| ((grid.shape()[a] - 1) as f64 * grid.spacing()[a] - 1.0).abs() > 1e-12)
  {
    return Err(Error::InvalidGrid("primitive input must live on the closed unit box".into()));
  }
  check_margin(coeff, margin, boundary)?;
  let norm = coeff.sup_norm();
  let integral = integrate_window(coeff);
  let tolerance = ZERO_INTEGRAL_TOLERANCE * norm;
  if integral.abs() > tolerance {
    return Err(Error::NonzeroIntegral { integral, tolerance });
  }

  let mut f = coeff.clone().without_generator().with_extension(Extension::ZeroExtend);
  let mut steps = Vec::with_capacity(n);
  let mut condition_residuals = Vec::with_capacity(n);
  for k in 0..n {
    let g = trailing_integral(&f, k + 1)?;
    let mut h = cumulative_integral(&g, k)?;
    let clipped = clip_tail(&mut h, &g, k);
    let rho = if k + 1 < n {
      let rho = step_mollifier(&grid.trailing(k + 1))?;
      f = f.axpy(-1.0, &g.outer(&rho))?;
      rho
    } else {
      f = f.axpy(-1.0, &g)?;
      ScalarField::constant(Grid::point(), Extension::ZeroExtend, 1.0)
    };
    let left = trailing_integral(&f, (k + 1).min(n))?.sup_norm();
    let scale = if norm > 0.0 { norm } else { 1.0 };
    condition_residuals.push(left.max(clipped) / scale);
    steps.push(PrimitiveStep { axis: k, h, rho });
  }

  let mut comps = vec![ScalarField::zeros(grid.clone(), Extension::ZeroExtend); n];
  for s in &steps {
    comps[omitting(n, s.axis)] = s.coefficient();
  }
  let eta = DifferentialForm::new(n, n - 1, comps)?;
  let d_eta = exterior_derivative(&eta)?;
  let residual = d_eta.components()[0].axpy(-1.0, &f_reference(coeff))?.sup_norm();
  let eta_norm = sup_norm_form(&eta);
  let ratio = if norm > 0.0 { eta_norm / norm } else { 0.0 };
  let kn = kn_constant(n);
  if ratio > kn {
    return Err(Error::NormBound { ratio, bound: kn });
  }
  Ok(PrimitiveResult { eta, steps, residual, ratio, kn, integral, condition_residuals })
}

fn f_reference(coeff: &ScalarField) -> ScalarField { coeff.clone().without_generator().with_extension(Extension::ZeroExtend) }

/// Compactly supported primitive of a zero-integral top form on `Q`, with
/// `‖η‖∞ ≤ Kₙ ‖ω‖∞` asserted. `ω` must vanish within `margin` of every face.
pub fn primitive_box(omega: &DifferentialForm, margin: f64) -> Result<PrimitiveResult> { construct(omega, margin, false) }

/// As [`primitive_box`] on `Q′`: the support may reach the face `x_{n−1} = 0`
/// and the tangential part of `η` vanishes exactly there.
pub fn primitive_halfbox(omega: &DifferentialForm, margin: f64) -> Result<PrimitiveResult> {
  construct(omega, margin, true)
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::{
    builders::{balanced_top, bump_product},
    fields::{AnalyticFn, Factor},
  };

  fn top(n: usize, intervals: usize, f: AnalyticFn) -> DifferentialForm {
    DifferentialForm::top(ScalarField::from_analytic(Grid::unit_box(n, intervals).unwrap(), Extension::ZeroExtend, f).unwrap())
  }

  fn balanced(n: usize, intervals: usize, f: &AnalyticFn) -> DifferentialForm {
    balanced_top(&Grid::unit_box(n, intervals).unwrap(), f, &bump_product(n, 0.3, 0.7)).unwrap()
  }

  #[test]
  fn constants() {
    assert_eq!(kn_constant(1), 1.0);
    let r = BUMP_SUP / 0.8;
    assert!((kn_constant(2) - (2.0 * r + 1.0)).abs() < 1e-12);
    assert!(kn_constant(3) > kn_constant(2));
  }

  #[test]
  fn zero_form() {
    let p = primitive_box(&top(2, 16, AnalyticFn::zero()), 0.05).unwrap();
    assert_eq!(p.ratio, 0.0);
    assert!(p.eta.is_zero());
  }

  #[test]
  fn derivative_of_bump_on_the_line() {
    // ω = b′ dx has primitive b
    let m = Mollifier::new(0.2, 0.8).unwrap();
    let errs: Vec<f64> = [64usize, 128]
      .iter()
      .map(|&n| {
        let w = DifferentialForm::top(
          ScalarField::from_fn(Grid::unit_box(1, n).unwrap(), Extension::ZeroExtend, |x| m.derivative(x[0])).unwrap(),
        );
        let p = primitive_box(&w, 0.1).unwrap();
        assert!(p.ratio <= 1.0);
        (0..=n).map(|i| (p.eta.components()[0].data()[i] - m.value(i as f64 / n as f64)).abs()).fold(0.0, f64::max)
      })
      .collect();
    assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
  }

  #[test]
  fn difference_of_bumps_in_the_plane() {
    let mut f = AnalyticFn::zero();
    f.push(1.0, vec![Factor::Bump { a: 0.2, b: 0.5 }, Factor::Bump { a: 0.3, b: 0.6 }]);
    f.push(-1.0, vec![Factor::Bump { a: 0.45, b: 0.85 }, Factor::Bump { a: 0.4, b: 0.8 }]);
    let res: Vec<f64> = [64, 128]
      .iter()
      .map(|&n| {
        let p = primitive_box(&balanced(2, n, &f), 0.1).unwrap();
        assert!(p.ratio <= p.kn);
        assert!(p.condition_residuals.iter().all(|&c| c < 1e-12), "{:?}", p.condition_residuals);
        p.residual
      })
      .collect();
    assert!(res[0] / res[1] > 3.5, "{res:?}");
  }

  #[test]
  fn rejects_nonzero_integral_and_margin() {
    let f = AnalyticFn::single(vec![Factor::Bump { a: 0.2, b: 0.8 }, Factor::Bump { a: 0.2, b: 0.8 }]);
    assert!(matches!(primitive_box(&top(2, 32, f), 0.1), Err(Error::NonzeroIntegral { .. })));
    let mut g = AnalyticFn::zero();
    g.push(1.0, vec![Factor::Bump { a: 0.0, b: 0.5 }, Factor::Bump { a: 0.3, b: 0.6 }]);
    g.push(-1.0, vec![Factor::Bump { a: 0.5, b: 0.9 }, Factor::Bump { a: 0.3, b: 0.6 }]);
    assert!(matches!(primitive_box(&top(2, 32, g), 0.1), Err(Error::SupportTouchesMargin { .. })));
  }

  #[test]
  fn halfbox_boundary_trace_is_exactly_zero() {
    let mut f = AnalyticFn::zero();
    f.push(1.0, vec![Factor::Bump { a: 0.2, b: 0.5 }, Factor::Bump { a: -0.2, b: 0.4 }]);
    f.push(-1.0, vec![Factor::Bump { a: 0.5, b: 0.8 }, Factor::Bump { a: -0.1, b: 0.3 }]);
    let w = balanced(2, 64, &f);
    assert!(primitive_box(&w, 0.05).is_err());
    let p = primitive_halfbox(&w, 0.05).unwrap();
    assert!(p.boundary_trace().iter().all(|&v| v == 0.0));
  }
}
