//! Polynomial stencils on uniform 1D node sets.
//!
//! Every weight set is obtained by matching moments against the nodes of the
//! stencil, so the same code yields interior and edge stencils of any order.

/// Nodes per interval stencil of the running integral (order of accuracy).
pub const QUADRATURE_ORDER: usize = 4;

/// Order of accuracy of the finite-difference first derivative.
pub const DIFFERENCE_ORDER: usize = 4;

/// Solve a small dense system by Gaussian elimination with partial pivoting.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
  let n = b.len();
  for col in 0..n {
    let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
    a.swap(col, pivot);
    b.swap(col, pivot);
    for row in col + 1..n {
      let factor = a[row][col] / a[col][col];
      for k in col..n {
        a[row][k] -= factor * a[col][k];
      }
      b[row] -= factor * b[col];
    }
  }
  let mut x = vec![0.0; n];
  for row in (0..n).rev() {
    let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
    x[row] = (b[row] - s) / a[row][row];
  }
  x
}

/// Weights `w` with `Σ w_j t_j^q = moments[q]` for `q < nodes.len()`.
fn moment_weights(nodes: &[f64], moments: impl Fn(usize) -> f64) -> Vec<f64> {
  let p = nodes.len();
  let a = (0..p).map(|q| nodes.iter().map(|t| t.powi(q as i32)).collect()).collect();
  let b = (0..p).map(moments).collect();
  solve_dense(a, b)
}

/// A stencil: first node index and weights.
#[derive(Clone, Debug)]
pub(crate) struct Stencil {
  pub start:   isize,
  pub weights: Vec<f64>,
}

/// Stencils integrating each interval `[i, i+1]` of a line of `len` nodes,
/// in units of the spacing.
pub(crate) fn interval_stencils(len: usize) -> Vec<Stencil> {
  let p = QUADRATURE_ORDER.min(len);
  (0..len.saturating_sub(1))
    .map(|i| {
      let start = (i as isize - (p as isize / 2 - 1)).clamp(0, (len - p) as isize);
      let nodes: Vec<f64> = (0..p).map(|j| (start + j as isize - i as isize) as f64).collect();
      let weights = moment_weights(&nodes, |q| 1.0 / (q as f64 + 1.0));
      Stencil { start, weights }
    })
    .collect()
}

/// Definite-integral weights over the whole line (units of the spacing); equal
/// to 1 away from the two ends, so they agree with the plain lattice sum on
/// integrands vanishing near the ends.
pub(crate) fn line_weights(len: usize) -> Vec<f64> {
  if len == 1 {
    return vec![0.0];
  }
  let mut w = vec![0.0; len];
  for s in interval_stencils(len) {
    for (j, wj) in s.weights.iter().enumerate() {
      w[s.start as usize + j] += wj;
    }
  }
  w
}

/// End weights of [`line_weights`] on lines of at least eight nodes.
const END_WEIGHTS: [f64; 4] = [1.0 / 3.0, 31.0 / 24.0, 5.0 / 6.0, 25.0 / 24.0];

/// Entry `index` of [`line_weights`]`(len)` without building the vector.
pub(crate) fn line_weight(len: usize, index: usize) -> f64 {
  if index >= len {
    return 0.0;
  }
  if len < 8 {
    return line_weights(len)[index];
  }
  let edge = index.min(len - 1 - index);
  END_WEIGHTS.get(edge).copied().unwrap_or(1.0)
}

/// First-derivative stencils for every node of a line (units of 1/spacing).
/// Periodic lines use the centered stencil everywhere with wrapped indices.
pub(crate) fn derivative_stencils(len: usize, periodic: bool) -> Vec<Stencil> {
  let p = DIFFERENCE_ORDER + 1;
  let half = (DIFFERENCE_ORDER / 2) as isize;
  if periodic {
    let nodes: Vec<f64> = (-half..=half).map(|t| t as f64).collect();
    let weights = moment_weights(&nodes, |q| if q == 1 { 1.0 } else { 0.0 });
    return (0..len).map(|i| Stencil { start: i as isize - half, weights: weights.clone() }).collect();
  }
  let p = p.min(len);
  (0..len)
    .map(|i| {
      let start = (i as isize - half).clamp(0, (len - p) as isize);
      let nodes: Vec<f64> = (0..p).map(|j| (start + j as isize - i as isize) as f64).collect();
      Stencil { start, weights: moment_weights(&nodes, |q| if q == 1 { 1.0 } else { 0.0 }) }
    })
    .collect()
}
