use bounded_derham::{
  fields::{integrate_window, AnalyticFn, Extension, Factor, Grid, ScalarField},
  forms::{exterior_derivative, pullback_translation, pushforward_tube, sup_norm_form, DifferentialForm, TubeEmbedding},
};
use proptest::prelude::*;

fn smooth(dims: usize, phases: &[f64]) -> AnalyticFn {
  AnalyticFn::single(phases.iter().take(dims).map(|&p| Factor::Sine { freq: 3.0, phase: p }).collect())
}

fn zero_form(dims: usize, n: usize, phases: &[f64]) -> DifferentialForm {
  let grid = Grid::unit_box(dims, n).unwrap();
  let f = ScalarField::from_analytic(grid, Extension::ZeroExtend, smooth(dims, phases)).unwrap();
  DifferentialForm::new(dims, 0, vec![f]).unwrap()
}

fn bump_top(n: usize, lo: f64, hi: f64) -> DifferentialForm {
  let f = AnalyticFn::single(vec![Factor::Bump { a: lo, b: hi }; 2]);
  DifferentialForm::top(ScalarField::from_analytic(Grid::unit_box(2, n).unwrap(), Extension::ZeroExtend, f).unwrap())
}

proptest! {
  #![proptest_config(ProptestConfig::with_cases(24))]

  #[test]
  fn d_squared_vanishes(dims in 2usize..=3, phases in prop::collection::vec(0.0..6.0f64, 3)) {
    let w = zero_form(dims, 24, &phases);
    let dw = exterior_derivative(&w).unwrap();
    let ddw = exterior_derivative(&dw).unwrap();
    prop_assert!(sup_norm_form(&ddw) <= 1e-9 * sup_norm_form(&dw).max(1.0), "{}", sup_norm_form(&ddw));
  }

  #[test]
  fn translations_compose(a in -5i64..5, b in -5i64..5, c in -5i64..5, d in -5i64..5) {
    let w = zero_form(2, 16, &[0.3, 1.1]);
    let twice = pullback_translation(&pullback_translation(&w, &[a, b]).unwrap(), &[c, d]).unwrap();
    let once = pullback_translation(&w, &[a + c, b + d]).unwrap();
    prop_assert_eq!(twice.grid(), once.grid());
    prop_assert_eq!(twice.components()[0].data(), once.components()[0].data());
  }

  #[test]
  fn tube_pushforward_keeps_mass(sx in 0.4..1.6f64, sy in 0.4..1.6f64, shear in -0.3..0.3f64, ox in -0.5..0.5f64) {
    let nu = bump_top(64, 0.2, 0.8);
    let theta = TubeEmbedding::new(vec![vec![sx, shear], vec![0.0, sy]], vec![ox, 0.0]).unwrap();
    let target = Grid::lattice(vec![-128, -128], vec![385, 385], 128).unwrap();
    let p = pushforward_tube(&nu, &theta, &target).unwrap();
    let mass = integrate_window(p.top_coefficient().unwrap());
    prop_assert!((mass - integrate_window(nu.top_coefficient().unwrap())).abs() < 2e-3, "{}", mass);
  }
}
