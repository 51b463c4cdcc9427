use serde::{Deserialize, Serialize};

use crate::{
  error::{Error, Result},
  group::{act, EllInftyFn, Group, GroupElement, Ray},
};

/// Pairs `(f_j, g_j)` witnessing `target = Σ_j (f_j − g_j·f_j)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoinvariantCertificate {
  pub pairs: Vec<(EllInftyFn, GroupElement)>,
}

impl CoinvariantCertificate {
  pub fn len(&self) -> usize { self.pairs.len() }

  pub fn is_empty(&self) -> bool { self.pairs.is_empty() }

  /// `Σ_j (f_j(h) − f_j(h + g_j))`.
  pub fn eval(&self, h: &GroupElement) -> f64 {
    self
      .pairs
      .iter()
      .map(|(f, g)| {
        let shifted = f.group().add(h, g);
        f.eval(h) - f.eval(&shifted)
      })
      .sum()
  }

  /// Rewrite every pair as unit-step coboundaries `s·(u − e_a·u)` with
  /// `s = ±1`, by telescoping `g_j` along a lattice path.
  pub fn unit_steps(&self) -> Vec<(f64, usize, EllInftyFn)> {
    let mut out = Vec::new();
    for (f, g) in &self.pairs {
      let group = f.group();
      let mut u = f.clone();
      for (axis, dir) in group.unit_steps(g) {
        let step = group.generator(axis);
        if dir > 0 {
          out.push((1.0, axis, u.clone()));
          u = act(&step, &u);
        } else {
          // u − (−e)·u = −(w − e·w) with w = (−e)·u
          let w = act(&group.neg(&step), &u);
          out.push((-1.0, axis, w.clone()));
          u = w;
        }
      }
    }
    out
  }
}

/// Express a background-free, ray-free function as a sum of coboundaries.
///
/// On ℤᵈ each deviation `w·δ_a` equals `f − e₁·f` for the ray
/// `f = −w·[a + e₁ + ℕe₁]`. On ℤ/m the deviation is moved to `m−1` by
/// interval indicators, so the total sum must vanish.
pub fn certify_trivial(f: &EllInftyFn) -> Result<CoinvariantCertificate> { certify(f, None) }

/// As [`certify_trivial`], accepting a total up to `tolerance` on ℤ/m; the
/// leftover then sits at `m−1` and shows up in the certificate residual.
pub fn certify_trivial_within(f: &EllInftyFn, tolerance: f64) -> Result<CoinvariantCertificate> {
  certify(f, Some(tolerance))
}

fn certify(f: &EllInftyFn, tolerance: Option<f64>) -> Result<CoinvariantCertificate> {
  if f.has_rays() {
    return Err(Error::NotCertifiable("function carries rays".into()));
  }
  let group = f.group();
  match group {
    Group::Lattice(d) => {
      if f.background() != 0.0 {
        return Err(Error::NotCertifiable(format!("nonzero background {}", f.background())));
      }
      let e = group.generator(0);
      let mut pairs = Vec::new();
      for (a, &w) in f.deviation() {
        if w == 0.0 {
          continue;
        }
        let mut base = a.0.clone();
        base[0] += 1;
        let mut fj = EllInftyFn::zero(Group::Lattice(d));
        fj.push_ray(Ray { base: GroupElement(base), axis: 0, weight: -w })?;
        pairs.push((fj, e.clone()));
      }
      Ok(CoinvariantCertificate { pairs })
    },
    Group::Cyclic(m) => {
      let values: Vec<f64> = (0..m as i64).map(|k| f.eval(&GroupElement(vec![k]))).collect();
      let total: f64 = values.iter().sum();
      let scale = values.iter().fold(0.0, |s: f64, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
      if total.abs() > tolerance.unwrap_or(1e-12 * scale * m as f64) {
        return Err(Error::NotCertifiable(format!("total {total:e} does not vanish")));
      }
      let e = group.generator(0);
      let mut pairs = Vec::new();
      for (a, &w) in values.iter().enumerate().take(m as usize - 1) {
        if w == 0.0 {
          continue;
        }
        let mut fj = EllInftyFn::zero(group);
        for x in a as i64 + 1..m as i64 {
          fj.add_at(GroupElement(vec![x]), -w);
        }
        pairs.push((fj, e.clone()));
      }
      Ok(CoinvariantCertificate { pairs })
    },
  }
}

/// Largest `|f − Σ_j (f_j − g_j·f_j)|` over the window `[-R, R]^d`.
pub fn certificate_residual(f: &EllInftyFn, cert: &CoinvariantCertificate, radius: i64) -> f64 {
  f.group().window(radius).iter().map(|h| (f.eval(h) - cert.eval(h)).abs()).fold(0.0, f64::max)
}

/// Exact check: `f − Σ_j (f_j − g_j·f_j)` vanishes at every window point.
pub fn check_certificate(f: &EllInftyFn, cert: &CoinvariantCertificate, radius: i64) -> bool {
  f.group().window(radius).iter().all(|h| f.eval(h) - cert.eval(h) == 0.0)
}
