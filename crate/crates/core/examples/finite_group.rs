//! The circle with ℤ/m: the class of a form is its total integral, and a form
//! has a primitive exactly when that total vanishes.

use bounded_derham::{
  builders::{random_top_form, total_integral},
  group::{certify_trivial_within, finite_group_class},
  integration::{build_phi_smooth, integrate_phi},
  model::Model,
  transport::{build_cover, solve_primitive, MASS_TOLERANCE},
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bounded_derham::Result<()> {
  let model = Model::Circle { m: 5 };
  let cover = build_cover(model, 128)?;
  let phi = build_phi_smooth(&cover)?;
  for (seed, zero_class) in [(1, false), (2, true), (3, false), (4, true)] {
    let omega = random_top_form(&mut ChaCha8Rng::seed_from_u64(seed), &cover, 1, true, zero_class)?;
    let f = integrate_phi(&phi, &omega, 2)?;
    let total = total_integral(&omega)?;
    print!("seed {seed}: class {:+.3e}, total {:+.3e}", finite_group_class(&f), total);
    match certify_trivial_within(&f, MASS_TOLERANCE * omega.sup_norm()?.max(1.0)) {
      Ok(cert) => {
        let (_, rep) = solve_primitive(&omega, &cert, &phi, &cover, 2)?;
        println!(" -> primitive, residual {:.2e} ≤ {:.2e}", rep.residual, rep.tolerance);
      },
      Err(e) => println!(" -> no primitive ({e})"),
    }
  }
  Ok(())
}
