//! Quadrature, running integrals and finite differences on sampled fields.

use crate::{
  error::{Error, Result},
  fields::{
    grid::for_each_line,
    stencil::{derivative_stencils, interval_stencils, line_weights},
    Extension, Grid, ScalarField,
  },
};

fn check_axis(field: &ScalarField, axis: usize) -> Result<()> {
  if axis >= field.dims() {
    return Err(Error::AxisOutOfRange { axis, dims: field.dims() });
  }
  Ok(())
}

/// Per-axis (local index, weight) lists for the samples of `field` inside `[a, b]`.
fn axis_weights(field: &ScalarField, axis: usize, (a, b): (f64, f64)) -> Vec<(usize, f64)> {
  let grid = field.grid();
  let h = grid.spacing()[axis];
  let mut first = (a / h - 1e-9).ceil() as i64;
  let mut last = (b / h + 1e-9).floor() as i64;
  let periodic = field.extension().is_periodic(axis);
  if !periodic {
    first = first.max(grid.lo()[axis]);
    last = last.min(grid.hi(axis));
  }
  if last < first {
    return vec![];
  }
  let len = grid.shape()[axis] as i64;
  let weights = line_weights((last - first + 1) as usize);
  (first..=last)
    .zip(weights)
    .map(|(g, w)| (((g - grid.lo()[axis]).rem_euclid(len)) as usize, w * h))
    .collect()
}

/// Contract row-major `data` of `shape` against per-axis weight lists.
pub(crate) fn contract(data: &[f64], shape: &[usize], weights: &[Vec<(usize, f64)>]) -> f64 {
  fn go(data: &[f64], shape: &[usize], weights: &[Vec<(usize, f64)>], axis: usize, offset: usize) -> f64 {
    if axis == shape.len() {
      return data[offset];
    }
    let stride: usize = shape[axis + 1..].iter().product();
    weights[axis].iter().map(|&(i, w)| w * go(data, shape, weights, axis + 1, offset + i * stride)).sum()
  }
  go(data, shape, weights, 0, 0)
}

/// Fourth-order composite quadrature of `field` over the box `region`.
///
/// Region bounds are snapped to the sample lattice. Parts of the region
/// outside a zero-extended window contribute nothing.
pub fn integrate(field: &ScalarField, region: &[(f64, f64)]) -> Result<f64> {
  if region.len() != field.dims() {
    return Err(Error::Incompatible(format!(
      "{}-dimensional region for a {}-dimensional field",
      region.len(),
      field.dims()
    )));
  }
  if region.iter().any(|(a, b)| !(a < b)) {
    return Err(Error::EmptyRegion);
  }
  let weights: Vec<_> = (0..field.dims()).map(|a| axis_weights(field, a, region[a])).collect();
  if weights.iter().any(Vec::is_empty) {
    return Ok(0.0);
  }
  Ok(contract(field.data(), field.grid().shape(), &weights))
}

/// Integral over the whole window with the composite rule.
pub fn integrate_window(field: &ScalarField) -> f64 {
  let grid = field.grid();
  let weights: Vec<Vec<(usize, f64)>> = (0..grid.dims())
    .map(|a| line_weights(grid.shape()[a]).into_iter().enumerate().map(|(i, w)| (i, w * grid.spacing()[a])).collect())
    .collect();
  contract(field.data(), grid.shape(), &weights)
}

/// Running integral `H(x) = ∫ field ds` along `axis`, starting from the first
/// sample of the window, so `H` vanishes on that face exactly.
///
/// Each interval uses a four-point stencil; the increments telescope to the
/// composite rule, so `H` at the far face equals the definite integral.
pub fn cumulative_integral(field: &ScalarField, axis: usize) -> Result<ScalarField> {
  check_axis(field, axis)?;
  let grid = field.grid();
  let len = grid.shape()[axis];
  let h = grid.spacing()[axis];
  let stencils = interval_stencils(len);
  let src = field.data();
  let mut out = vec![0.0; src.len()];
  for_each_line(grid.shape(), axis, |start, stride| {
    let mut acc = 0.0;
    for (i, s) in stencils.iter().enumerate() {
      let inc: f64 =
        s.weights.iter().enumerate().map(|(j, w)| w * src[start + (s.start as usize + j) * stride]).sum();
      acc += h * inc;
      out[start + (i + 1) * stride] = acc;
    }
  });
  ScalarField::new(grid.clone(), out, Extension::ZeroExtend)
}

/// Integrate out every axis from `first_axis` on, leaving a field on the
/// leading axes (a single-sample field when `first_axis == 0`).
pub fn trailing_integral(field: &ScalarField, first_axis: usize) -> Result<ScalarField> {
  if first_axis > field.dims() {
    return Err(Error::AxisOutOfRange { axis: first_axis, dims: field.dims() });
  }
  let grid = field.grid();
  let outer = grid.leading(first_axis);
  let inner = grid.trailing(first_axis);
  let inner_len = inner.len();
  let weights: Vec<f64> = {
    let per_axis: Vec<Vec<f64>> = (0..inner.dims())
      .map(|a| line_weights(inner.shape()[a]).into_iter().map(|w| w * inner.spacing()[a]).collect())
      .collect();
    (0..inner_len).map(|f| inner.unravel(f).iter().enumerate().map(|(a, &i)| per_axis[a][i]).product()).collect()
  };
  let data = field
    .data()
    .chunks(inner_len)
    .map(|chunk| chunk.iter().zip(&weights).map(|(v, w)| v * w).sum())
    .collect();
  ScalarField::new(outer, data, Extension::ZeroExtend)
}

/// Finite-difference partial derivative: fourth-order centered stencils,
/// one-sided near window edges, wrapped on periodic axes.
pub fn partial_derivative(field: &ScalarField, axis: usize) -> Result<ScalarField> {
  check_axis(field, axis)?;
  let grid = field.grid();
  let len = grid.shape()[axis];
  let periodic = field.extension().is_periodic(axis);
  if len < 2 {
    return Ok(ScalarField::zeros(grid.clone(), field.extension().clone()));
  }
  let stencils = derivative_stencils(len, periodic);
  let inv_h = 1.0 / grid.spacing()[axis];
  let src = field.data();
  let mut out = vec![0.0; src.len()];
  for_each_line(grid.shape(), axis, |start, stride| {
    for (i, s) in stencils.iter().enumerate() {
      let d: f64 = s
        .weights
        .iter()
        .enumerate()
        .map(|(j, w)| w * src[start + ((s.start + j as isize).rem_euclid(len as isize) as usize) * stride])
        .sum();
      out[start + i * stride] = d * inv_h;
    }
  });
  ScalarField::new(grid.clone(), out, field.extension().clone())
}

/// Exact partial derivative sampled from the analytic generator.
pub fn partial_derivative_exact(field: &ScalarField, axis: usize) -> Result<ScalarField> {
  check_axis(field, axis)?;
  let g = field
    .generator()
    .ok_or_else(|| Error::Incompatible("exact derivative needs an analytic generator".into()))?;
  let grid: &Grid = field.grid();
  let data = (0..grid.len()).map(|f| g.partial(&grid.point_at(f), axis)).collect();
  ScalarField::new(grid.clone(), data, field.extension().clone())
}

#[cfg(test)]
mod tests {
  use std::f64::consts::PI;

  use super::*;
  use crate::fields::{mollifier_1d, AnalyticFn, Factor, Mollifier};

  fn unit(n: usize, f: impl Fn(f64) -> f64) -> ScalarField {
    ScalarField::from_fn(Grid::unit_box(1, n).unwrap(), Extension::ZeroExtend, |x| f(x[0])).unwrap()
  }

  #[test]
  fn constant_and_sine() {
    assert_eq!(integrate(&unit(64, |_| 1.0), &[(0.0, 1.0)]).unwrap(), 1.0);
    let s = unit(256, |x| (2.0 * PI * x).sin());
    assert!(integrate(&s, &[(0.0, 1.0)]).unwrap().abs() < 1e-10);
    assert!(matches!(integrate(&s, &[(0.5, 0.5)]), Err(Error::EmptyRegion)));
    assert_eq!(integrate(&s, &[(2.0, 3.0)]).unwrap(), 0.0);
  }

  #[test]
  fn quadrature_order() {
    let f = |x: f64| (3.0 * x).exp() * (5.0 * x).cos();
    let exact = {
      let (a, b) = (3.0f64, 5.0f64);
      let anti = |x: f64| (a * x).exp() * (a * (b * x).cos() + b * (b * x).sin()) / (a * a + b * b);
      anti(1.0) - anti(0.0)
    };
    let errs: Vec<f64> =
      [32, 64, 128].iter().map(|&n| (integrate(&unit(n, f), &[(0.0, 1.0)]).unwrap() - exact).abs()).collect();
    assert!(errs[0] / errs[1] > 8.0 && errs[1] / errs[2] > 8.0, "{errs:?}");
  }

  #[test]
  fn running_integral_of_derivative() {
    let m = Mollifier::new(0.1, 0.9).unwrap();
    let errs: Vec<f64> = [64, 128]
      .iter()
      .map(|&n| {
        let d = unit(n, |x| m.derivative(x));
        let h = cumulative_integral(&d, 0).unwrap();
        (0..=n).map(|i| (h.data()[i] - m.value(i as f64 / n as f64)).abs()).fold(0.0, f64::max)
      })
      .collect();
    assert!(errs[1] < 1e-4 && errs[0] / errs[1] > 3.5, "{errs:?}");
    let ramp = cumulative_integral(&unit(32, |_| 1.0), 0).unwrap();
    for (i, v) in ramp.data().iter().enumerate() {
      assert!((v - i as f64 / 32.0).abs() < 1e-14);
    }
  }

  #[test]
  fn running_total_equals_definite_rule() {
    let f = unit(50, |x| (7.0 * x).sin() + x * x);
    let h = cumulative_integral(&f, 0).unwrap();
    assert_eq!(h.data()[0], 0.0);
    assert!((h.data()[50] - integrate_window(&f)).abs() < 1e-14);
  }

  #[test]
  fn trailing_integral_of_product() {
    let n = 128;
    let grid = Grid::unit_box(2, n).unwrap();
    let f = ScalarField::from_analytic(grid, Extension::ZeroExtend, AnalyticFn::single(vec![
      Factor::Bump { a: 0.2, b: 0.7 },
      Factor::Bump { a: 0.1, b: 0.9 },
    ]))
    .unwrap();
    let g = trailing_integral(&f, 1).unwrap();
    let b = mollifier_1d((0.2, 0.7), n).unwrap();
    for i in 0..=n {
      assert!((g.data()[i] - b.data()[i]).abs() < 1e-8 * b.sup_norm());
    }
    let total = trailing_integral(&f, 0).unwrap();
    assert_eq!(total.data().len(), 1);
    assert!((total.data()[0] - 1.0).abs() < 1e-8);
  }

  #[test]
  fn derivative_of_square() {
    let f = unit(64, |x| x * x);
    let d = partial_derivative(&f, 0).unwrap();
    for (i, v) in d.data().iter().enumerate() {
      assert!((v - 2.0 * i as f64 / 64.0).abs() < 1e-10);
    }
    assert!(partial_derivative(&unit(16, |_| 3.0), 0).unwrap().sup_norm() < 1e-12);
  }

  #[test]
  fn periodic_derivative_wraps() {
    let grid = Grid::lattice(vec![0], vec![64], 64).unwrap();
    let f = ScalarField::from_fn(grid, Extension::Periodic(vec![true]), |x| (2.0 * PI * x[0]).sin()).unwrap();
    let d = partial_derivative(&f, 0).unwrap();
    for (i, v) in d.data().iter().enumerate() {
      assert!((v - 2.0 * PI * (2.0 * PI * i as f64 / 64.0).cos()).abs() < 1e-4);
    }
  }
}
