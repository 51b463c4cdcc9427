use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The deck groups of the model geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
  /// ℤ^rank acting by integer translations.
  Lattice(usize),
  /// ℤ/m acting by unit rotation.
  Cyclic(u64),
}

/// An element of a model group: an integer vector for ℤᵈ, a single reduced
/// residue for ℤ/m.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
  pub fn coords(&self) -> &[i64] { &self.0 }

  /// ℓ¹ length of a lattice element.
  pub fn word_length(&self) -> i64 { self.0.iter().map(|v| v.abs()).sum() }
}

impl Group {
  pub fn rank(&self) -> usize {
    match self {
      Group::Lattice(d) => *d,
      Group::Cyclic(_) => 1,
    }
  }

  pub fn is_finite(&self) -> bool { matches!(self, Group::Cyclic(_)) }

  pub fn identity(&self) -> GroupElement { GroupElement(vec![0; self.rank()]) }

  /// Bring coordinates into canonical form (residues for ℤ/m).
  pub fn element(&self, coords: Vec<i64>) -> Result<GroupElement> {
    if coords.len() != self.rank() {
      return Err(Error::Incompatible(format!("{}-coordinate element in a rank-{} group", coords.len(), self.rank())));
    }
    Ok(self.reduce(coords))
  }

  pub(crate) fn reduce(&self, mut coords: Vec<i64>) -> GroupElement {
    if let Group::Cyclic(m) = self {
      coords[0] = coords[0].rem_euclid(*m as i64);
    }
    GroupElement(coords)
  }

  pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
    self.reduce(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
  }

  pub fn neg(&self, a: &GroupElement) -> GroupElement { self.reduce(a.0.iter().map(|x| -x).collect()) }

  pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement { self.add(a, &self.neg(b)) }

  /// Unit generator along `axis`.
  pub fn generator(&self, axis: usize) -> GroupElement {
    let mut c = vec![0; self.rank()];
    c[axis] = 1;
    self.reduce(c)
  }

  /// The box window `[-R, R]^d` in row-major order, or all of ℤ/m.
  pub fn window(&self, radius: i64) -> Vec<GroupElement> {
    match self {
      Group::Cyclic(m) => (0..*m as i64).map(|k| GroupElement(vec![k])).collect(),
      Group::Lattice(d) => {
        let side = (2 * radius + 1).max(0) as usize;
        (0..side.pow(*d as u32))
          .map(|mut f| {
            let mut c = vec![0; *d];
            for a in (0..*d).rev() {
              c[a] = (f % side) as i64 - radius;
              f /= side;
            }
            GroupElement(c)
          })
          .collect()
      },
    }
  }

  pub fn window_size(&self, radius: i64) -> usize {
    match self {
      Group::Cyclic(m) => *m as usize,
      Group::Lattice(d) => ((2 * radius + 1).max(0) as usize).pow(*d as u32),
    }
  }

  pub fn in_window(&self, g: &GroupElement, radius: i64) -> bool {
    self.is_finite() || g.0.iter().all(|v| v.abs() <= radius)
  }

  /// Split `g` into unit generator steps `±e_a`, axis by axis.
  pub fn unit_steps(&self, g: &GroupElement) -> Vec<(usize, i64)> {
    match self {
      Group::Cyclic(_) => (0..g.0[0]).map(|_| (0, 1)).collect(),
      Group::Lattice(_) => g
        .0
        .iter()
        .enumerate()
        .flat_map(|(a, &v)| std::iter::repeat_n((a, v.signum()), v.unsigned_abs() as usize))
        .collect(),
    }
  }
}
