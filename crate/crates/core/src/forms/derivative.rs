use crate::{
  error::{Error, Result},
  fields::{partial_derivative, partial_derivative_exact, ScalarField},
  forms::{multi_indices, DifferentialForm},
};

fn exterior(
  form: &DifferentialForm,
  partial: impl Fn(&ScalarField, usize) -> Result<ScalarField>,
) -> Result<DifferentialForm> {
  let (n, k) = (form.dims(), form.degree());
  if k >= n {
    return Err(Error::Degree(format!("no exterior derivative of a {k}-form in dimension {n}")));
  }
  let lower = multi_indices(n, k);
  let mut components = Vec::new();
  for j in multi_indices(n, k + 1) {
    let mut acc = ScalarField::zeros(form.grid().clone(), form.extension().clone());
    for (p, &axis) in j.iter().enumerate() {
      let rest: Vec<usize> = j.iter().copied().filter(|&b| b != axis).collect();
      let idx = lower.iter().position(|i| *i == rest).expect("multi-index present");
      let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
      acc = acc.axpy(sign, &partial(&form.components()[idx], axis)?)?;
    }
    components.push(acc);
  }
  DifferentialForm::new(n, k + 1, components)
}

/// Exterior derivative with finite-difference partials.
pub fn exterior_derivative(form: &DifferentialForm) -> Result<DifferentialForm> { exterior(form, partial_derivative) }

/// Exterior derivative from the analytic generators of every coefficient.
pub fn exterior_derivative_exact(form: &DifferentialForm) -> Result<DifferentialForm> {
  exterior(form, partial_derivative_exact)
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::{
    fields::{AnalyticFn, Extension, Factor, Grid},
    forms::sup_norm_form,
  };

  #[test]
  fn sign_of_mixed_term() {
    // d(x₂ dx₁) = -dx₁∧dx₂
    let g = Grid::unit_box(2, 16).unwrap();
    let h = ScalarField::from_fn(g.clone(), Extension::ZeroExtend, |x| x[1]).unwrap();
    let w = DifferentialForm::new(2, 1, vec![h, ScalarField::zeros(g, Extension::ZeroExtend)]).unwrap();
    let d = exterior_derivative(&w).unwrap();
    assert!(d.components()[0].data().iter().all(|v| (v + 1.0).abs() < 1e-12));
    assert!(exterior_derivative(&d).is_err());
  }

  #[test]
  fn d_of_constant_vanishes() {
    let g = Grid::unit_box(3, 8).unwrap();
    let c = DifferentialForm::new(3, 0, vec![ScalarField::constant(g, Extension::ZeroExtend, 2.0)]).unwrap();
    assert!(sup_norm_form(&exterior_derivative(&c).unwrap()) < 1e-12);
  }

  #[test]
  fn dd_vanishes() {
    let res: Vec<f64> = [32usize, 64]
      .iter()
      .map(|&n| {
        let g = Grid::unit_box(3, n).unwrap();
        let mut f = AnalyticFn::zero();
        f.push(1.0, vec![Factor::Bump { a: 0.1, b: 0.8 }, Factor::Sine { freq: 3.0, phase: 0.2 }, Factor::Bump {
          a: 0.2,
          b: 0.9,
        }]);
        let c = ScalarField::from_analytic(g, Extension::ZeroExtend, f).unwrap();
        let w = DifferentialForm::new(3, 1, vec![c.clone(), c.scaled(-0.5), c.scaled(2.0)]).unwrap();
        sup_norm_form(&exterior_derivative(&exterior_derivative(&w).unwrap()).unwrap())
      })
      .collect();
    // tensor-product stencils commute, so d∘d vanishes up to rounding
    assert!(res.iter().all(|&r| r < 1e-8), "{res:?}");
    let exact = {
      let g = Grid::unit_box(2, 16).unwrap();
      let f = AnalyticFn::single(vec![Factor::Sine { freq: 2.0, phase: 0.0 }, Factor::Poly(vec![0.0, 1.0, 1.0])]);
      let w = DifferentialForm::new(2, 0, vec![ScalarField::from_analytic(g, Extension::ZeroExtend, f).unwrap()])
        .unwrap();
      let dw = exterior_derivative_exact(&w).unwrap();
      sup_norm_form(&exterior_derivative(&dw).unwrap())
    };
    assert!(exact < 1e-3, "{exact}");
  }
}
