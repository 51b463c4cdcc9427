//! The integration map on each model: a random top form, its values on the
//! group window and the coinvariant fingerprint.

use bounded_derham::{
  builders::random_top_form,
  group::fingerprint,
  integration::{build_phi_smooth, integrate_phi},
  model::Model,
  transport::build_cover,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bounded_derham::Result<()> {
  for model in [Model::Line, Model::Plane, Model::Strip, Model::Circle { m: 5 }] {
    let cover = build_cover(model, 128)?;
    let phi = build_phi_smooth(&cover)?;
    let omega = random_top_form(&mut ChaCha8Rng::seed_from_u64(7), &cover, 1, true, false)?;
    let f = integrate_phi(&phi, &omega, 3)?;
    println!("{}: fingerprint {:+.6}", model.name(), fingerprint(&f));
    for g in model.group().window(2).iter().take(5) {
      println!("  g = {:?}: {:+.6}", g.0, f.eval(g));
    }
  }
  Ok(())
}
