use bounded_derham::group::{
  act, certify_trivial, check_certificate, coboundary, coboundary_mean_bound, fingerprint, folner_mean, EllInftyFn, Group,
  GroupElement,
};
use proptest::prelude::*;

fn group_strategy() -> impl Strategy<Value = Group> {
  prop_oneof![Just(Group::Lattice(1)), Just(Group::Lattice(2)), (2u64..8).prop_map(Group::Cyclic)]
}

fn element(group: Group, raw: &[i64]) -> GroupElement {
  match group {
    Group::Cyclic(m) => GroupElement(vec![raw[0].rem_euclid(m as i64)]),
    Group::Lattice(d) => GroupElement(raw[..d].to_vec()),
  }
}

/// Finite-support function with dyadic weights; on ℤ/m every weight is
/// paired with its negative so the total vanishes exactly.
fn finite_support(group: Group, points: &[(i64, i64, i64)]) -> EllInftyFn {
  let mut f = EllInftyFn::zero(group);
  for &(x, y, w) in points {
    let w = w as f64 / 32.0;
    f.add_at(element(group, &[x, y]), w);
    if group.is_finite() {
      f.add_at(element(group, &[y, x]), -w);
    }
  }
  f
}

fn points() -> impl Strategy<Value = Vec<(i64, i64, i64)>> { prop::collection::vec((-6i64..6, -6i64..6, -64i64..64), 1..8) }

proptest! {
  #![proptest_config(ProptestConfig::with_cases(64))]

  #[test]
  fn act_is_a_left_action(group in group_strategy(), pts in points(), g in prop::collection::vec(-4i64..4, 2), h in prop::collection::vec(-4i64..4, 2), bg in -1.0..1.0f64) {
    let f = finite_support(group, &pts).with_background(bg);
    let (g, h) = (element(group, &g), element(group, &h));
    let lhs = act(&g, &act(&h, &f));
    let rhs = act(&group.add(&g, &h), &f);
    for x in group.window(9) {
      prop_assert_eq!(lhs.eval(&x), rhs.eval(&x));
    }
    let id = act(&group.identity(), &f);
    for x in group.window(9) {
      prop_assert_eq!(id.eval(&x), f.eval(&x));
    }
  }

  #[test]
  fn certificates_round_trip(group in group_strategy(), pts in points()) {
    let f = finite_support(group, &pts);
    let cert = certify_trivial(&f).unwrap();
    prop_assert!(check_certificate(&f, &cert, 12));
  }

  #[test]
  fn coboundary_means_are_bounded(pts in points(), bg in -1.0..1.0f64, g in prop::collection::vec(-3i64..3, 2), r in 5i64..40) {
    let group = Group::Lattice(2);
    let f = finite_support(group, &pts).with_background(bg);
    let g = element(group, &g);
    let mean = folner_mean(&coboundary(&f, &g), r);
    prop_assert!(mean.abs() <= coboundary_mean_bound(f.sup_bound(), &g, r) + 1e-15);
  }

  #[test]
  fn fingerprint_is_invariant(group in group_strategy(), pts in points(), bg in -1.0..1.0f64, g in prop::collection::vec(-4i64..4, 2)) {
    let f = finite_support(group, &pts).with_background(bg);
    let moved = act(&element(group, &g), &f);
    prop_assert!((fingerprint(&moved) - fingerprint(&f)).abs() < 1e-12);
  }
}
