use serde::{Deserialize, Serialize};

use crate::fields::Mollifier;

/// One-dimensional factor of a separable analytic function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Factor {
  One,
  /// Unit-integral mollifier on `(a, b)`.
  Bump { a: f64, b: f64 },
  /// `sin(freq·t + phase)`.
  Sine { freq: f64, phase: f64 },
  /// Polynomial with coefficients in increasing degree.
  Poly(Vec<f64>),
}

impl Factor {
  pub fn value(&self, t: f64) -> f64 {
    match self {
      Factor::One => 1.0,
      Factor::Bump { a, b } => Mollifier::new(*a, *b).map(|m| m.value(t)).unwrap_or(0.0),
      Factor::Sine { freq, phase } => (freq * t + phase).sin(),
      Factor::Poly(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci),
    }
  }

  pub fn derivative(&self, t: f64) -> f64 {
    match self {
      Factor::One => 0.0,
      Factor::Bump { a, b } => Mollifier::new(*a, *b).map(|m| m.derivative(t)).unwrap_or(0.0),
      Factor::Sine { freq, phase } => freq * (freq * t + phase).cos(),
      Factor::Poly(c) => {
        c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &ci)| acc * t + k as f64 * ci)
      },
    }
  }
}

/// `coeff · Π_a factor_a(x_a + shift_a)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
  pub coeff:   f64,
  pub factors: Vec<Factor>,
  pub shift:   Vec<f64>,
}

/// A finite sum of separable terms with closed-form partial derivatives.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFn {
  terms: Vec<Term>,
}

impl AnalyticFn {
  pub fn zero() -> Self { Self::default() }

  pub fn single(factors: Vec<Factor>) -> Self {
    let dims = factors.len();
    Self { terms: vec![Term { coeff: 1.0, factors, shift: vec![0.0; dims] }] }
  }

  pub fn terms(&self) -> &[Term] { &self.terms }

  pub fn push(&mut self, coeff: f64, factors: Vec<Factor>) {
    let dims = factors.len();
    self.terms.push(Term { coeff, factors, shift: vec![0.0; dims] });
  }

  pub fn scaled(&self, c: f64) -> Self {
    Self { terms: self.terms.iter().map(|t| Term { coeff: t.coeff * c, ..t.clone() }).collect() }
  }

  pub fn sum(&self, other: &AnalyticFn) -> Self {
    Self { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
  }

  /// `x ↦ self(x + shift)`.
  pub fn shifted(&self, shift: &[f64]) -> Self {
    Self {
      terms: self
        .terms
        .iter()
        .map(|t| Term {
          shift: t.shift.iter().zip(shift).map(|(a, b)| a + b).collect(),
          ..t.clone()
        })
        .collect(),
    }
  }

  pub fn value(&self, x: &[f64]) -> f64 {
    self
      .terms
      .iter()
      .map(|t| {
        t.coeff * t.factors.iter().enumerate().map(|(a, f)| f.value(x[a] + t.shift[a])).product::<f64>()
      })
      .sum()
  }

  pub fn partial(&self, x: &[f64], axis: usize) -> f64 {
    self
      .terms
      .iter()
      .map(|t| {
        t.coeff
          * t.factors
            .iter()
            .enumerate()
            .map(|(a, f)| {
              let s = x[a] + t.shift[a];
              if a == axis { f.derivative(s) } else { f.value(s) }
            })
            .product::<f64>()
      })
      .sum()
  }

  pub fn is_empty(&self) -> bool { self.terms.is_empty() }
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn partials_match_differences() {
    let mut f = AnalyticFn::zero();
    f.push(1.5, vec![Factor::Sine { freq: 2.0, phase: 0.3 }, Factor::Poly(vec![1.0, -2.0, 0.5])]);
    f.push(-0.7, vec![Factor::Bump { a: 0.1, b: 0.9 }, Factor::One]);
    let f = f.shifted(&[0.05, -0.1]);
    let x = [0.4, 0.6];
    let eps = 1e-6;
    for axis in 0..2 {
      let mut xp = x;
      let mut xm = x;
      xp[axis] += eps;
      xm[axis] -= eps;
      let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * eps);
      assert!((fd - f.partial(&x, axis)).abs() < 1e-6);
    }
  }
}
