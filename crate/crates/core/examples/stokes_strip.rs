//! Stokes on the strip: the integral of dω over translates of the partition
//! against the boundary integral, for relative and absolute 1-forms.

use bounded_derham::{
  builders::random_strip_one_form,
  integration::{build_phi_smooth, stokes_check},
  model::Model,
  transport::build_cover,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bounded_derham::Result<()> {
  let n = 128;
  let phi = build_phi_smooth(&build_cover(Model::Strip, n)?)?;
  for relative in [false, true] {
    let omega = random_strip_one_form(&mut ChaCha8Rng::seed_from_u64(11), n, 2, true, relative)?;
    let rep = stokes_check(&omega, &phi, 8)?;
    for g in Model::Strip.group().window(2) {
      println!("  g = {:+}: ∫dω {:+.6e}, ∫∂ω {:+.6e}", g.0[0], rep.interior.eval(&g), rep.boundary.eval(&g));
    }
    println!(
      "relative {relative}: fingerprints {:+.3e} and {:+.3e}, certificate residual {:.1e} ({})",
      rep.interior_fingerprint,
      rep.boundary_fingerprint,
      rep.certificate_residual,
      if rep.certificate_validated { "valid" } else { "invalid" }
    );
  }
  Ok(())
}
