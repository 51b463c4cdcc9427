use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{
  error::{Error, Result},
  group::{Group, GroupElement},
};

/// Weighted indicator of the half-line `{base + k·e_axis : k ≥ 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ray {
  pub base:   GroupElement,
  pub axis:   usize,
  pub weight: f64,
}

impl Ray {
  pub fn contains(&self, g: &GroupElement) -> bool {
    g.0.iter().zip(&self.base.0).enumerate().all(|(a, (x, b))| if a == self.axis { x >= b } else { x == b })
  }

  /// Number of ray points inside `[-R, R]^d`.
  fn count_in_window(&self, radius: i64) -> i64 {
    let off_axis_inside = self.base.0.iter().enumerate().all(|(a, b)| a == self.axis || b.abs() <= radius);
    if !off_axis_inside {
      return 0;
    }
    (radius - self.base.0[self.axis].max(-radius) + 1).max(0)
  }
}

/// A bounded function on a model group: constant background, finitely
/// supported deviation and finitely many weighted rays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllInftyFn {
  group:      Group,
  background: f64,
  deviation:  BTreeMap<GroupElement, f64>,
  rays:       Vec<Ray>,
}

impl EllInftyFn {
  pub fn zero(group: Group) -> Self { Self::constant(group, 0.0) }

  pub fn constant(group: Group, c: f64) -> Self { Self { group, background: c, deviation: BTreeMap::new(), rays: vec![] } }

  /// `weight · δ_g`.
  pub fn delta(group: Group, g: GroupElement, weight: f64) -> Self {
    let mut f = Self::zero(group);
    f.add_at(g, weight);
    f
  }

  pub fn new(group: Group, background: f64, deviation: BTreeMap<GroupElement, f64>, rays: Vec<Ray>) -> Result<Self> {
    if group.is_finite() && !rays.is_empty() {
      return Err(Error::Incompatible("rays on a finite group".into()));
    }
    if deviation.keys().chain(rays.iter().map(|r| &r.base)).any(|g| g.0.len() != group.rank()) {
      return Err(Error::Incompatible("element of the wrong rank".into()));
    }
    let deviation = deviation.into_iter().map(|(g, v)| (group.reduce(g.0), v)).collect();
    Ok(Self { group, background, deviation, rays })
  }

  pub fn group(&self) -> Group { self.group }

  pub fn background(&self) -> f64 { self.background }

  pub fn deviation(&self) -> &BTreeMap<GroupElement, f64> { &self.deviation }

  pub fn rays(&self) -> &[Ray] { &self.rays }

  pub fn has_rays(&self) -> bool { !self.rays.is_empty() }

  /// Add `weight` to the deviation at `g`.
  pub fn add_at(&mut self, g: GroupElement, weight: f64) {
    *self.deviation.entry(self.group.reduce(g.0)).or_insert(0.0) += weight;
  }

  pub fn push_ray(&mut self, ray: Ray) -> Result<()> {
    if self.group.is_finite() {
      return Err(Error::Incompatible("rays on a finite group".into()));
    }
    self.rays.push(ray);
    Ok(())
  }

  pub fn with_background(mut self, c: f64) -> Self {
    self.background = c;
    self
  }

  pub fn eval(&self, g: &GroupElement) -> f64 {
    let mut v = self.background;
    if let Some(d) = self.deviation.get(g) {
      v += d;
    }
    for r in &self.rays {
      if r.contains(g) {
        v += r.weight;
      }
    }
    v
  }

  /// Upper bound `|background| + Σ|ray weights| + max|deviation|`.
  pub fn sup_bound(&self) -> f64 {
    self.background.abs()
      + self.rays.iter().map(|r| r.weight.abs()).sum::<f64>()
      + self.deviation.values().fold(0.0f64, |m, v| m.max(v.abs()))
  }

  pub fn scaled(&self, c: f64) -> Self {
    Self {
      group:      self.group,
      background: self.background * c,
      deviation:  self.deviation.iter().map(|(g, v)| (g.clone(), v * c)).collect(),
      rays:       self.rays.iter().map(|r| Ray { weight: r.weight * c, ..r.clone() }).collect(),
    }
  }

  /// `self + c·other`.
  pub fn axpy(&self, c: f64, other: &EllInftyFn) -> Result<Self> {
    if self.group != other.group {
      return Err(Error::Incompatible("functions on different groups".into()));
    }
    let mut out = self.clone();
    out.background += c * other.background;
    for (g, v) in &other.deviation {
      *out.deviation.entry(g.clone()).or_insert(0.0) += c * v;
    }
    out.rays.extend(other.rays.iter().map(|r| Ray { weight: c * r.weight, ..r.clone() }));
    Ok(out)
  }

  pub fn sub(&self, other: &EllInftyFn) -> Result<Self> { self.axpy(-1.0, other) }

  /// Drop deviation entries that are exactly zero.
  pub fn pruned(mut self) -> Self {
    self.deviation.retain(|_, v| *v != 0.0);
    self
  }
}

/// `(g·f)(h) = f(h + g)`: deviation support and ray bases move by `-g`.
pub fn act(g: &GroupElement, f: &EllInftyFn) -> EllInftyFn {
  let group = f.group;
  let neg = group.neg(g);
  EllInftyFn {
    group,
    background: f.background,
    deviation: f.deviation.iter().map(|(h, v)| (group.add(h, &neg), *v)).collect(),
    rays: f.rays.iter().map(|r| Ray { base: group.add(&r.base, &neg), ..r.clone() }).collect(),
  }
}

/// `f − g·f`.
pub fn coboundary(f: &EllInftyFn, g: &GroupElement) -> EllInftyFn {
  let shifted = act(g, f);
  let mut out = f.sub(&shifted).expect("same group");
  out.background = 0.0;
  out
}

/// Average of `f` over the window `[-R, R]^d` (all of ℤ/m for finite groups).
pub fn folner_mean(f: &EllInftyFn, radius: i64) -> f64 {
  let group = f.group;
  let size = group.window_size(radius) as f64;
  if let Group::Cyclic(m) = group {
    return (0..m as i64).map(|k| f.eval(&GroupElement(vec![k]))).sum::<f64>() / size;
  }
  let dev: f64 = f.deviation.iter().filter(|(g, _)| group.in_window(g, radius)).map(|(_, v)| v).sum();
  let rays: f64 = f.rays.iter().map(|r| r.weight * r.count_in_window(radius) as f64).sum();
  f.background + (dev + rays) / size
}

/// Bound on `|folner_mean(h − g·h, R)|` for `‖h‖∞ ≤ sup`: the window and its
/// translate differ in at most `2(|W| − Π(2R+1−|g_a|))` points.
pub fn coboundary_mean_bound(sup: f64, g: &GroupElement, radius: i64) -> f64 {
  let side = 2 * radius + 1;
  let size = side.pow(g.0.len() as u32) as f64;
  let overlap: f64 = g.0.iter().map(|v| (side - v.abs()).max(0) as f64).product();
  2.0 * sup * (size - overlap) / size
}

/// Coinvariant fingerprint: the Følner limit. Deviations do not contribute;
/// a ray contributes half its weight on ℤ and nothing on ℤᵈ for `d ≥ 2`.
/// On ℤ/m the class is the total sum.
pub fn fingerprint(f: &EllInftyFn) -> f64 {
  match f.group {
    Group::Cyclic(_) => finite_group_class(f),
    Group::Lattice(d) => {
      let density = if d == 1 { 0.5 } else { 0.0 };
      f.background + density * f.rays.iter().map(|r| r.weight).sum::<f64>()
    },
  }
}

/// `Σ_{g ∈ ℤ/m} f(g)`: the complete coinvariant for a finite cyclic group.
pub fn finite_group_class(f: &EllInftyFn) -> f64 {
  match f.group {
    Group::Cyclic(m) => (0..m as i64).map(|k| f.eval(&GroupElement(vec![k]))).sum(),
    Group::Lattice(_) => f64::NAN,
  }
}
