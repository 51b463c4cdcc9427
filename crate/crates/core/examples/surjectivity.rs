//! Surjectivity: a bounded function on the group is realized by a top form
//! whose integral reproduces it in the coinvariants.

use bounded_derham::{
  group::{fingerprint, EllInftyFn, GroupElement},
  integration::{build_phi_smooth, integrate_phi},
  model::Model,
  transport::{build_cover, check_surjectivity, surjectivity_witness},
};

fn main() -> bounded_derham::Result<()> {
  let model = Model::Plane;
  let cover = build_cover(model, 128)?;
  let phi = build_phi_smooth(&cover)?;
  let mut f = EllInftyFn::constant(model.group(), -0.5);
  f.add_at(GroupElement(vec![1, 0]), 2.0);
  f.add_at(GroupElement(vec![-1, 2]), 0.75);

  let witness = surjectivity_witness(&f, &cover, 4)?;
  let back = integrate_phi(&phi, &witness.omega, 4)?;
  for g in [vec![0, 0], vec![1, 0], vec![-1, 2]] {
    let g = GroupElement(g);
    println!("g = {:?}: target {:+.3}, represented {:+.6}", g.0, f.eval(&g), back.eval(&g));
  }
  let rep = check_surjectivity(&f, &cover, &phi, 4)?;
  println!("fingerprints {:+.9} vs {:+.9}, difference certified {}", fingerprint(&f), rep.witness_fingerprint, rep.difference.validated);
  Ok(())
}
