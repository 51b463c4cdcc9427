use bounded_derham::{
  forms::exterior_derivative,
  group::{EllInftyFn, Group, GroupElement},
  integration::build_phi_smooth,
  model::Model,
  transport::{build_cover, check_surjectivity, make_transport, SURJECTIVITY_TOLERANCE},
};
use proptest::prelude::*;

proptest! {
  #![proptest_config(ProptestConfig::with_cases(12))]

  #[test]
  fn transports_move_unit_mass(from in -3i64..3, to in -3i64..3) {
    prop_assume!(from != to);
    let cell = |g: i64| vec![(g as f64 + 0.25, g as f64 + 0.5)];
    let pair = make_transport(Model::Line, 128, &cell(from), &cell(to), &[(-4.0, 4.0)]).unwrap();
    prop_assert!((pair.source_mass + 1.0).abs() < 1e-10 && (pair.target_mass - 1.0).abs() < 1e-10);
    let d = exterior_derivative(&pair.nu).unwrap();
    let err = d.components()[0].axpy(-1.0, &pair.rho.components()[0]).unwrap().sup_norm();
    prop_assert!(err < 5e-3 * pair.rho.components()[0].sup_norm(), "{}", err / pair.rho.components()[0].sup_norm());
  }

  #[test]
  fn bounded_functions_are_represented(background in -1.0..1.0f64, devs in prop::collection::vec((-3i64..=3, -1.0..1.0f64), 0..4)) {
    let cover = build_cover(Model::Line, 96).unwrap();
    let phi = build_phi_smooth(&cover).unwrap();
    let mut f = EllInftyFn::constant(Group::Lattice(1), background);
    for (g, w) in devs {
      f.add_at(GroupElement(vec![g]), w);
    }
    let rep = check_surjectivity(&f, &cover, &phi, 5).unwrap();
    prop_assert!(rep.fingerprint_error() <= SURJECTIVITY_TOLERANCE);
    prop_assert!(rep.difference.validated);
  }
}
