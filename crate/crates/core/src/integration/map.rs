use serde::Serialize;

use crate::{
  error::{Error, Result},
  group::{
    act, certificate_residual, certify_trivial_within, check_certificate, fingerprint, CoinvariantCertificate, EllInftyFn,
    Group, GroupElement,
  },
  integration::PartitionFunction,
  model::{Model, ModelForm},
};

/// Background tolerance for identifying two classes by their fingerprints.
pub const PHI_INDEPENDENCE_TOLERANCE: f64 = 1e-9;

fn shifted(idx: &[i64], shift: &[i64]) -> Vec<i64> { idx.iter().zip(shift).map(|(a, b)| a + b).collect() }

/// `(∫ᵠω)(g) = ∫_M φ · g*ω` for a top form `ω`, packaged as a bounded
/// function: the periodic part gives the background, the local part a finite
/// deviation. Every `g` at which the local part is felt must lie in `[-R, R]^d`.
pub fn integrate_phi(phi: &PartitionFunction, omega: &ModelForm, radius: i64) -> Result<EllInftyFn> {
  let model = omega.model();
  if phi.model != model || phi.resolution != omega.resolution() {
    return Err(Error::Incompatible("partition function and form live on different models".into()));
  }
  if omega.degree() != model.dims() {
    return Err(Error::Degree(format!("integration needs a top form, got degree {}", omega.degree())));
  }
  let group = model.group();
  let n = omega.resolution();
  let nodes = phi.nodes();
  let value = |part: &crate::forms::DifferentialForm, shift: &[i64]| -> f64 {
    let c = &part.components()[0];
    nodes.iter().map(|(idx, w)| w * c.value_global(&shifted(idx, shift))).sum()
  };
  if let Group::Cyclic(_) = group {
    let mut f = EllInftyFn::zero(group);
    for g in group.window(0) {
      let v = omega.periodic().map_or(0.0, |p| value(p, &model.index_shift(&g, n)));
      f.add_at(g, v);
    }
    return Ok(f);
  }
  let background = omega.periodic().map_or(0.0, |p| value(p, &vec![0; model.dims()]));
  let mut f = EllInftyFn::constant(group, background);
  let Some(local) = omega.local() else {
    return Ok(f);
  };
  let rank = group.rank();
  let grid = local.grid();
  let mut ranges = Vec::with_capacity(rank);
  for a in 0..rank {
    let (plo, phi_hi) = nodes.iter().fold((i64::MAX, i64::MIN), |(l, h), (idx, _)| (l.min(idx[a]), h.max(idx[a])));
    if plo > phi_hi {
      return Ok(f);
    }
    let lo = (grid.lo()[a] - phi_hi).div_euclid(n as i64) + i64::from((grid.lo()[a] - phi_hi).rem_euclid(n as i64) != 0);
    let hi = (grid.hi(a) - plo).div_euclid(n as i64);
    let required = lo.abs().max(hi.abs());
    if required > radius {
      return Err(Error::WindowTooSmall { given: radius, required });
    }
    ranges.push((lo, hi));
  }
  let sides: Vec<usize> = ranges.iter().map(|(l, h)| (h - l + 1).max(0) as usize).collect();
  for flat in 0..sides.iter().product::<usize>() {
    let mut rest = flat;
    let mut coords = vec![0; rank];
    for a in (0..rank).rev() {
      coords[a] = ranges[a].0 + (rest % sides[a]) as i64;
      rest /= sides[a];
    }
    let g = GroupElement(coords);
    let v = value(local, &model.index_shift(&g, n));
    if v != 0.0 {
      f.add_at(g, v);
    }
  }
  Ok(f)
}

/// Coinvariant fingerprint and representative of `ω`.
pub fn class_of(omega: &ModelForm, phi: &PartitionFunction, radius: i64) -> Result<(f64, EllInftyFn)> {
  let f = integrate_phi(phi, omega, radius)?;
  Ok((fingerprint(&f), f))
}

/// Outcome of comparing two partition functions on one form.
#[derive(Clone, Debug, Serialize)]
pub struct PhiIndependence {
  pub background_difference: f64,
  pub certificate:           CoinvariantCertificate,
  pub residual:              f64,
  pub validated:             bool,
}

/// Certify that `∫^{φ₁}ω − ∫^{φ₂}ω` is trivial in the coinvariants.
pub fn check_phi_independence(
  phi1: &PartitionFunction,
  phi2: &PartitionFunction,
  omega: &ModelForm,
  radius: i64,
) -> Result<PhiIndependence> {
  let d = integrate_phi(phi1, omega, radius)?.sub(&integrate_phi(phi2, omega, radius)?)?.pruned();
  certify_difference(&d, radius, PHI_INDEPENDENCE_TOLERANCE * omega.sup_norm()?.max(1.0))
}

/// Certify a difference of representatives whose fingerprint vanishes up to
/// `tolerance`; the background (or, on ℤ/m, the total) is checked against
/// the tolerance and the rest is certified exactly.
pub(crate) fn certify_difference(d: &EllInftyFn, radius: i64, tolerance: f64) -> Result<PhiIndependence> {
  let background_difference = fingerprint(d);
  if background_difference.abs() > tolerance {
    return Err(Error::NotCertifiable(format!(
      "fingerprint difference {background_difference:e} exceeds {tolerance:e}"
    )));
  }
  let target = if d.group().is_finite() { d.clone() } else { d.clone().with_background(0.0) };
  let certificate = certify_trivial_within(&target, tolerance)?;
  let residual = certificate_residual(&target, &certificate, radius);
  let validated = check_certificate(&target, &certificate, radius) || (d.group().is_finite() && residual <= tolerance);
  Ok(PhiIndependence { background_difference, certificate, residual, validated })
}

/// `∫^{g·φ}ω = g·∫^φω`, compared exactly on the window `[-R, R]^d`.
pub fn check_equivariance(phi: &PartitionFunction, omega: &ModelForm, g: &GroupElement, radius: i64) -> Result<bool> {
  let reach = g.0.iter().map(|v| v.abs()).max().unwrap_or(0);
  let lhs = integrate_phi(&phi.translated(g), omega, radius + reach)?;
  let rhs = act(g, &integrate_phi(phi, omega, radius + reach)?);
  let group = omega.model().group();
  Ok(group.window(radius).iter().all(|h| lhs.eval(h) == rhs.eval(h)))
}

/// The model a partition function restricted to a boundary line lives on.
pub(crate) fn boundary_model(model: Model) -> Result<Model> {
  match model {
    Model::Strip => Ok(Model::Line),
    _ => Err(Error::NoBoundary),
  }
}
