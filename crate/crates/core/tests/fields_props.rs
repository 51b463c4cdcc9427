use bounded_derham::fields::{
  cumulative_integral, integrate_window, partial_derivative, AnalyticFn, Extension, Factor, Grid, Mollifier, ScalarField,
};
use proptest::prelude::*;

fn cubic(coeffs: &[f64]) -> AnalyticFn { AnalyticFn::single(vec![Factor::Poly(coeffs.to_vec())]) }

fn exact_integral(c: &[f64]) -> f64 { c.iter().enumerate().map(|(k, v)| v / (k + 1) as f64).sum() }

proptest! {
  #![proptest_config(ProptestConfig::with_cases(48))]

  #[test]
  fn quadrature_is_exact_on_cubics(c in prop::collection::vec(-2.0..2.0f64, 4), n in 8usize..80) {
    let f = ScalarField::from_analytic(Grid::unit_box(1, n).unwrap(), Extension::ZeroExtend, cubic(&c)).unwrap();
    prop_assert!((integrate_window(&f) - exact_integral(&c)).abs() < 1e-12);
  }

  #[test]
  fn tensor_cubics_integrate_exactly(a in prop::collection::vec(-1.0..1.0f64, 4), b in prop::collection::vec(-1.0..1.0f64, 4), n in 8usize..40) {
    let f = AnalyticFn::single(vec![Factor::Poly(a.clone()), Factor::Poly(b.clone())]);
    let s = ScalarField::from_analytic(Grid::unit_box(2, n).unwrap(), Extension::ZeroExtend, f).unwrap();
    prop_assert!((integrate_window(&s) - exact_integral(&a) * exact_integral(&b)).abs() < 1e-12);
  }

  #[test]
  fn running_integral_ends_at_the_total(c in prop::collection::vec(-2.0..2.0f64, 4), n in 8usize..80) {
    let f = ScalarField::from_analytic(Grid::unit_box(1, n).unwrap(), Extension::ZeroExtend, cubic(&c)).unwrap();
    let running = cumulative_integral(&f, 0).unwrap();
    prop_assert_eq!(running.data()[0], 0.0);
    prop_assert!((running.data()[n] - integrate_window(&f)).abs() < 1e-12);
  }

  #[test]
  fn derivative_is_exact_on_cubics(c in prop::collection::vec(-2.0..2.0f64, 4), n in 8usize..64) {
    let f = ScalarField::from_analytic(Grid::unit_box(1, n).unwrap(), Extension::ZeroExtend, cubic(&c)).unwrap();
    let d = partial_derivative(&f, 0).unwrap();
    let grid = d.grid().clone();
    for (i, v) in d.data().iter().enumerate() {
      let x = grid.point_at(i)[0];
      let exact = c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x;
      prop_assert!((v - exact).abs() < 1e-8 * (1.0 + exact.abs()), "{} vs {}", v, exact);
    }
  }

  #[test]
  fn mollifiers_have_unit_mass(a in 0.05..0.4f64, w in 0.3..0.55f64) {
    let m = Mollifier::new(a, a + w).unwrap();
    let s = m.sample(&Grid::unit_box(1, 512).unwrap()).unwrap();
    prop_assert!((integrate_window(&s) - 1.0).abs() < 1e-7);
    prop_assert!(s.data().iter().all(|&v| v >= 0.0));
  }
}
