use bounded_derham::{
  builders::random_box_form,
  poincare::{kn_constant, primitive_box, primitive_halfbox},
  Error,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
  #![proptest_config(ProptestConfig::with_cases(24))]

  #[test]
  fn box_primitives_respect_the_constant(seed in any::<u64>(), dims in 1usize..=2, boundary in any::<bool>()) {
    let omega = random_box_form(&mut ChaCha8Rng::seed_from_u64(seed), dims, 64, boundary).unwrap();
    let p = if boundary { primitive_halfbox(&omega, 0.05) } else { primitive_box(&omega, 0.05) }.unwrap();
    prop_assert!(p.ratio <= kn_constant(dims));
    prop_assert!(p.residual < 0.5 * p.ratio.max(1.0));
    prop_assert!(p.condition_residuals.iter().all(|&c| c < 1e-10));
    if boundary {
      prop_assert!(p.boundary_trace().iter().all(|&v| v == 0.0));
    }
  }

  #[test]
  fn nonzero_integrals_are_rejected(seed in any::<u64>(), shift in 0.1..1.0f64) {
    let omega = random_box_form(&mut ChaCha8Rng::seed_from_u64(seed), 1, 64, false).unwrap();
    let mut c = omega.top_coefficient().unwrap().clone();
    for v in c.data_mut()[16..48].iter_mut() {
      *v += shift;
    }
    let shifted = bounded_derham::forms::DifferentialForm::top(c);
    let rejected = matches!(primitive_box(&shifted, 0.05), Err(Error::NonzeroIntegral { .. }));
    prop_assert!(rejected);
  }
}

#[test]
fn constants_grow_with_dimension() {
  assert_eq!(kn_constant(1), 1.0);
  assert!(kn_constant(2) < kn_constant(3));
}
