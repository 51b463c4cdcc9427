use crate::{
  constants::{BUMP_DERIVATIVE_SUP, BUMP_RAW_INTEGRAL, BUMP_SUP},
  error::{Error, Result},
  fields::{AnalyticFn, Extension, Factor, Grid, ScalarField},
};

/// Unit-integral mollifier `c·exp(-1/((t-a)(b-t)))` supported on `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
  a: f64,
  b: f64,
}

impl Mollifier {
  pub fn new(a: f64, b: f64) -> Result<Self> {
    if !(a.is_finite() && b.is_finite() && a < b) {
      return Err(Error::DegenerateInterval { a, b });
    }
    Ok(Self { a, b })
  }

  pub fn support(&self) -> (f64, f64) { (self.a, self.b) }

  fn width(&self) -> f64 { self.b - self.a }

  pub fn value(&self, t: f64) -> f64 {
    if t <= self.a || t >= self.b {
      return 0.0;
    }
    let s = (t - self.a) / self.width();
    (-1.0 / (s * (1.0 - s))).exp() / (BUMP_RAW_INTEGRAL * self.width())
  }

  pub fn derivative(&self, t: f64) -> f64 {
    if t <= self.a || t >= self.b {
      return 0.0;
    }
    let w = self.width();
    let s = (t - self.a) / w;
    let u = s * (1.0 - s);
    self.value(t) * (1.0 - 2.0 * s) / (u * u) / w
  }

  pub fn sup_norm(&self) -> f64 { BUMP_SUP / self.width() }

  pub fn derivative_sup_norm(&self) -> f64 { BUMP_DERIVATIVE_SUP / (self.width() * self.width()) }

  /// Sampled on a one-dimensional grid, keeping the analytic generator.
  pub fn sample(&self, grid: &Grid) -> Result<ScalarField> {
    if grid.dims() != 1 {
      return Err(Error::Incompatible("mollifier grid must be one-dimensional".into()));
    }
    ScalarField::from_analytic(grid.clone(), Extension::ZeroExtend, AnalyticFn::single(vec![Factor::Bump {
      a: self.a,
      b: self.b,
    }]))
  }
}

/// The mollifier on `support` sampled on the unit interval with `intervals` intervals.
pub fn mollifier_1d(support: (f64, f64), intervals: usize) -> Result<ScalarField> {
  Mollifier::new(support.0, support.1)?.sample(&Grid::unit_box(1, intervals)?)
}

/// Smooth monotone step: 0 for `u ≤ 0`, 1 for `u ≥ 1`, and `S(u) + S(1-u) = 1`.
pub fn smooth_step(u: f64) -> f64 {
  if u <= 0.0 {
    return 0.0;
  }
  if u >= 1.0 {
    return 1.0;
  }
  let e = |v: f64| (-1.0 / v).exp();
  let (p, q) = (e(u), e(1.0 - u));
  p / (p + q)
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::fields::{integrate, partial_derivative};

  #[test]
  fn mollifier_constants_match_dense_scan() {
    // dense scan oracle at 10^5 samples
    let m = Mollifier::new(0.0, 1.0).unwrap();
    let n = 100_000;
    let (mut sup, mut dsup, mut sum) = (0.0f64, 0.0f64, 0.0);
    for i in 1..n {
      let t = i as f64 / n as f64;
      sup = sup.max(m.value(t));
      dsup = dsup.max(m.derivative(t).abs());
      sum += m.value(t) / n as f64;
    }
    assert!((sum - 1.0).abs() < 1e-12, "{sum}");
    assert!((sup - BUMP_SUP).abs() < 1e-9, "{sup}");
    assert!((dsup - BUMP_DERIVATIVE_SUP).abs() < 1e-6, "{dsup}");
  }

  #[test]
  fn unit_integral_by_refinement() {
    let support = (0.1, 0.9);
    let vals: Vec<f64> = [64, 128, 256]
      .iter()
      .map(|&n| {
        let f = mollifier_1d(support, n).unwrap();
        integrate(&f, &[(0.0, 1.0)]).unwrap()
      })
      .collect();
    // Richardson oracle: successive differences collapse, extrapolated value is 1
    let extrapolated = vals[2] + (vals[2] - vals[1]) / 15.0;
    assert!((extrapolated - 1.0).abs() < 1e-8);
    assert!((vals[2] - 1.0).abs() < 1e-8);
  }

  #[test]
  fn endpoints_vanish() {
    let m = Mollifier::new(0.2, 0.7).unwrap();
    assert_eq!(m.value(0.2), 0.0);
    assert_eq!(m.value(0.7), 0.0);
    assert!(m.value(0.45) > 0.0);
    assert!(Mollifier::new(0.5, 0.5).is_err());
  }

  #[test]
  fn derivative_matches_closed_form() {
    let m = Mollifier::new(0.1, 0.9).unwrap();
    let mut errs = vec![];
    for n in [64usize, 128] {
      let f = m.sample(&Grid::unit_box(1, n).unwrap()).unwrap();
      let d = partial_derivative(&f, 0).unwrap();
      let err = (0..=n).map(|i| (d.data()[i] - m.derivative(i as f64 / n as f64)).abs()).fold(0.0, f64::max);
      errs.push(err);
    }
    assert!(errs[1] < errs[0] / 3.5, "{errs:?}");
  }

  #[test]
  fn smooth_step_partition() {
    for i in 0..=100 {
      let u = i as f64 / 100.0;
      assert!((smooth_step(u) + smooth_step(1.0 - u) - 1.0).abs() < 1e-15);
    }
    assert_eq!(smooth_step(-0.3), 0.0);
    assert_eq!(smooth_step(1.2), 1.0);
  }
}
