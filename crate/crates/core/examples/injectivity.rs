//! Injectivity: a class-zero top form is certified trivial and a bounded
//! primitive is built in three stages; the residual is compared with 10h²‖ω‖.

use bounded_derham::{
  builders::random_top_form,
  group::certify_trivial,
  integration::{build_phi_smooth, integrate_phi},
  model::Model,
  transport::{build_cover, solve_primitive},
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bounded_derham::Result<()> {
  for (model, radius) in [(Model::Line, 4), (Model::Strip, 4), (Model::Circle { m: 4 }, 4)] {
    for n in [128, 256] {
      let cover = build_cover(model, n)?;
      let phi = build_phi_smooth(&cover)?;
      let omega = random_top_form(&mut ChaCha8Rng::seed_from_u64(3), &cover, 1, true, true)?;
      let f = integrate_phi(&phi, &omega, radius)?;
      let f = if f.group().is_finite() { f } else { f.with_background(0.0) };
      let cert = certify_trivial(&f)?;
      let (_, rep) = solve_primitive(&omega, &cert, &phi, &cover, radius)?;
      println!(
        "{:6} N={n}: residual {:.2e} / {:.2e}, ‖η‖/‖ω‖ {:.3} ≤ {:.1}, boundary {:e}, {} tubes, {} transports",
        model.name(),
        rep.residual,
        rep.tolerance,
        rep.ratio,
        rep.k_total,
        rep.boundary_trace,
        rep.tubes,
        rep.transports
      );
    }
  }
  Ok(())
}
