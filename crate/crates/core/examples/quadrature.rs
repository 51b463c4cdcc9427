//! Composite quadrature and finite differences on the unit box: error on a
//! smooth test function as the grid is refined.

use bounded_derham::fields::{integrate_window, partial_derivative, AnalyticFn, Extension, Factor, Grid, ScalarField};

fn main() -> bounded_derham::Result<()> {
  let f = AnalyticFn::single(vec![Factor::Sine { freq: 3.0, phase: 0.4 }, Factor::Sine { freq: 2.0, phase: 1.0 }]);
  let exact = ((0.4f64).cos() - (3.4f64).cos()) / 3.0 * ((1.0f64).cos() - (3.0f64).cos()) / 2.0;
  println!("{:>5} {:>14} {:>14}", "N", "integral err", "d/dx err");
  for n in [16, 32, 64, 128] {
    let s = ScalarField::from_analytic(Grid::unit_box(2, n)?, Extension::ZeroExtend, f.clone())?;
    let d = partial_derivative(&s, 0)?;
    let grid = d.grid().clone();
    let d_err = d
      .data()
      .iter()
      .enumerate()
      .map(|(i, v)| (v - f.partial(&grid.point_at(i), 0)).abs())
      .fold(0.0, f64::max);
    println!("{n:>5} {:>14.3e} {:>14.3e}", (integrate_window(&s) - exact).abs(), d_err);
  }
  Ok(())
}
