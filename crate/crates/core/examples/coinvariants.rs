//! Coinvariant machinery on ℤ and ℤ²: the translation action, Følner means of
//! a coboundary and a certificate for a finitely supported function.

use bounded_derham::group::{
  act, certify_trivial, check_certificate, coboundary, folner_mean, EllInftyFn, Group, GroupElement, Ray,
};

fn main() -> bounded_derham::Result<()> {
  let z = Group::Lattice(1);
  let mut f = EllInftyFn::constant(z, 0.25);
  f.add_at(GroupElement(vec![2]), 1.0);
  f.push_ray(Ray { base: GroupElement(vec![0]), axis: 0, weight: 1.0 })?;
  let shifted = act(&GroupElement(vec![3]), &f);
  println!("f(5) = {}, (3·f)(2) = {}", f.eval(&GroupElement(vec![5])), shifted.eval(&GroupElement(vec![2])));

  let c = coboundary(&f, &z.generator(0));
  for r in [10, 20, 40, 80] {
    println!("R = {r:>3}: mean of f − e·f = {:+.5}", folner_mean(&c, r));
  }

  let z2 = Group::Lattice(2);
  let mut g = EllInftyFn::zero(z2);
  g.add_at(GroupElement(vec![1, -1]), 0.5);
  g.add_at(GroupElement(vec![-2, 3]), -1.5);
  let cert = certify_trivial(&g)?;
  println!("{} pairs, check on R = 6: {}", cert.len(), check_certificate(&g, &cert, 6));
  Ok(())
}
