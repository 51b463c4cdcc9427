use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{
  builders::{bump_comb, cell_bumps, random_bounded_function, random_box_form, random_strip_one_form, random_top_form},
  cli::{
    config::{ExperimentConfig, FormSpec, Pipeline},
    output::{label, num, Check, Table},
  },
  error::{Error, Result},
  group::{certify_trivial, certify_trivial_within, CoinvariantCertificate, EllInftyFn, GroupElement},
  integration::{
    build_phi_indicator, build_phi_smooth, check_equivariance, check_phi_independence, integrate_phi, stokes_check,
    PartitionFunction, PartitionMode, STOKES_TOLERANCE,
  },
  model::ModelForm,
  poincare::{primitive_box, primitive_halfbox},
  transport::{
    build_cover, check_surjectivity, solve_primitive, surjectivity_witness, CoverData, MASS_TOLERANCE, SURJECTIVITY_TOLERANCE,
  },
};

/// Smallest residual improvement accepted under grid doubling.
pub const CONVERGENCE_RATIO: f64 = 3.5;
/// Margin handed to the box Poincaré step in the `primitive` pipeline.
const BOX_MARGIN: f64 = 0.05;

/// Everything a pipeline produces before it is written out.
#[derive(Clone, Debug)]
pub struct Outcome {
  pub values:      Table,
  pub report:      Value,
  pub convergence: Vec<(usize, f64)>,
  pub checks:      Vec<Check>,
}

impl Outcome {
  pub fn passed(&self) -> bool { self.checks.iter().all(|c| c.passed) }

  pub fn first_failure(&self) -> Option<&Check> { self.checks.iter().find(|c| !c.passed) }
}

/// Name of the invariant an error reports as violated, if it is an
/// assertion failure rather than an input problem.
pub fn assertion_name(err: &Error) -> Option<&'static str> {
  match err {
    Error::CertificateCheck { .. } => Some("check_certificate"),
    Error::NormBound { .. } => Some("norm_bound"),
    Error::NonzeroIntegral { .. } => Some("zero_integral"),
    Error::NotCertifiable(_) => Some("certify_trivial"),
    Error::SupportTouchesMargin { .. } => Some("support_margin"),
    Error::Stage { source, .. } => assertion_name(source),
    _ => None,
  }
}

/// Turn an assertion-type error into a failing check; pass others on.
fn absorb<T>(res: Result<T>, checks: &mut Vec<Check>, form: usize) -> Result<Option<T>> {
  match res {
    Ok(v) => Ok(Some(v)),
    Err(e) => match assertion_name(&e) {
      Some(name) => {
        checks.push(Check::flag(name, false, format!("form {form}: {e}")));
        Ok(None)
      },
      None => Err(e),
    },
  }
}

fn rng(seed: u64, k: usize) -> ChaCha8Rng { ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64)) }

fn cells_of(config: &ExperimentConfig, cells: &[crate::cli::config::CellWeight]) -> Vec<(GroupElement, f64)> {
  let group = config.model().group();
  cells.iter().map(|c| (group.element(c.cell.clone()).unwrap_or_else(|_| GroupElement(c.cell.clone())), c.weight)).collect()
}

/// The top forms named by the form specification.
pub fn top_forms(config: &ExperimentConfig, cover: &CoverData) -> Result<Vec<ModelForm>> {
  match &config.form {
    FormSpec::Comb { weight } => Ok(vec![bump_comb(cover, *weight)?]),
    FormSpec::CellBumps { bumps } => Ok(vec![cell_bumps(cover, &cells_of(config, bumps))?]),
    FormSpec::Random { seed, cells, periodic, zero_class, count, .. } => {
      (0..*count).map(|k| random_top_form(&mut rng(*seed, k), cover, *cells, *periodic, *zero_class)).collect()
    },
  }
}

/// The bounded functions named by the form specification (for `surject`).
pub fn target_functions(config: &ExperimentConfig) -> Vec<EllInftyFn> {
  let group = config.model().group();
  match &config.form {
    FormSpec::Comb { weight } => vec![EllInftyFn::constant(group, *weight)],
    FormSpec::CellBumps { bumps } => {
      let mut f = EllInftyFn::zero(group);
      for (g, w) in cells_of(config, bumps) {
        f.add_at(g, w);
      }
      vec![f]
    },
    FormSpec::Random { seed, count, .. } => {
      (0..*count).map(|k| random_bounded_function(&mut rng(*seed, k), group, config.radius - 1)).collect()
    },
  }
}

fn partition(config: &ExperimentConfig, cover: &CoverData) -> Result<PartitionFunction> {
  match config.partition {
    PartitionMode::SmoothPartition => build_phi_smooth(cover),
    PartitionMode::FundamentalDomainIndicator => build_phi_indicator(cover.model, cover.resolution),
  }
}

fn base_report(config: &ExperimentConfig) -> serde_json::Map<String, Value> {
  let mut m = serde_json::Map::new();
  m.insert("pipeline".into(), json!(config.pipeline.name()));
  m.insert("model".into(), json!(config.model().name()));
  m.insert("resolution".into(), json!(config.resolution));
  m.insert("radius".into(), json!(config.radius));
  m
}

fn integrate(config: &ExperimentConfig) -> Result<Outcome> {
  let model = config.model();
  let group = model.group();
  let radius = config.radius;
  let cover = build_cover(model, config.resolution)?;
  let phi = partition(config, &cover)?;
  let smooth = build_phi_smooth(&cover)?;
  let indicator = build_phi_indicator(model, config.resolution)?;
  let mut values = Table::new(&["form", "g", "value"]);
  let mut checks = Vec::new();
  let mut forms = Vec::new();
  for (k, omega) in top_forms(config, &cover)?.iter().enumerate() {
    let f = integrate_phi(&phi, omega, radius)?;
    for g in group.window(radius) {
      values.push(vec![k.to_string(), label(&g), num(f.eval(&g))]);
    }
    if let Some(p) = absorb(check_phi_independence(&smooth, &indicator, omega, radius), &mut checks, k)? {
      checks.push(Check::flag("phi_independence", p.validated, format!("form {k}: background difference {:e}", p.background_difference)));
    }
    let step = group.generator(0);
    checks.push(Check::flag("equivariance", check_equivariance(&phi, omega, &step, radius - 1)?, format!("form {k}")));
    forms.push(json!({
      "form": k,
      "fingerprint": crate::group::fingerprint(&f),
      "background": f.background(),
      "deviation_cells": f.deviation().len(),
      "sup_bound": f.sup_bound(),
      "omega_norm": omega.sup_norm()?,
    }));
  }
  let mut report = base_report(config);
  report.insert("partition".into(), json!(config.partition));
  report.insert("forms".into(), Value::Array(forms));
  Ok(Outcome { values, report: Value::Object(report), convergence: vec![], checks })
}

fn stokes_forms(config: &ExperimentConfig, resolution: usize) -> Result<Vec<ModelForm>> {
  let FormSpec::Random { seed, cells, periodic, relative, count, .. } = &config.form else {
    return Err(Error::Config("the stokes pipeline needs a random 1-form".into()));
  };
  (0..*count).map(|k| random_strip_one_form(&mut rng(*seed, k), resolution, *cells, *periodic, *relative)).collect()
}

fn stokes(config: &ExperimentConfig) -> Result<Outcome> {
  let model = config.model();
  let group = model.group();
  let radius = config.radius;
  let mut values = Table::new(&["form", "g", "interior", "boundary", "difference"]);
  let mut checks = Vec::new();
  let mut forms = Vec::new();
  let mut convergence = Vec::new();
  for n in [config.resolution, 2 * config.resolution] {
    let cover = build_cover(model, n)?;
    let phi = partition(config, &cover)?;
    for (k, omega) in stokes_forms(config, n)?.iter().enumerate() {
      let Some(r) = absorb(stokes_check(omega, &phi, radius), &mut checks, k)? else { continue };
      let gap = (r.interior_fingerprint - r.boundary_fingerprint).abs();
      if k == 0 {
        convergence.push((n, gap));
      }
      if n != config.resolution {
        continue;
      }
      for g in group.window(radius) {
        let (a, b) = (r.interior.eval(&g), r.boundary.eval(&g));
        values.push(vec![k.to_string(), label(&g), num(a), num(b), num(a - b)]);
      }
      checks.push(Check::bound("stokes_fingerprint", gap, STOKES_TOLERANCE, format!("form {k}")));
      checks.push(Check::flag("check_certificate", r.certificate_validated, format!("form {k}: residual {:e}", r.certificate_residual)));
      forms.push(json!({
        "form": k,
        "interior_fingerprint": r.interior_fingerprint,
        "boundary_fingerprint": r.boundary_fingerprint,
        "certificate_pairs": r.certificate_pairs,
        "certificate_residual": r.certificate_residual,
      }));
    }
  }
  let mut report = base_report(config);
  report.insert("forms".into(), Value::Array(forms));
  Ok(Outcome { values, report: Value::Object(report), convergence, checks })
}

fn primitive(config: &ExperimentConfig) -> Result<Outcome> {
  let FormSpec::Random { seed, count, .. } = &config.form else {
    return Err(Error::Config("the primitive pipeline needs a random form".into()));
  };
  let model = config.model();
  let dims = model.dims();
  let boundary = model.has_boundary();
  let mut values = Table::new(&["form", "N", "ratio", "kn", "residual", "integral"]);
  let mut checks = Vec::new();
  let mut worst = [0.0f64; 2];
  let mut forms = Vec::new();
  for k in 0..*count {
    let mut residuals = [0.0; 2];
    for (j, n) in [config.resolution, 2 * config.resolution].into_iter().enumerate() {
      let omega = random_box_form(&mut rng(*seed, k), dims, n, boundary)?;
      let res = if boundary { primitive_halfbox(&omega, BOX_MARGIN) } else { primitive_box(&omega, BOX_MARGIN) };
      let Some(p) = absorb(res, &mut checks, k)? else { continue };
      values.push(vec![k.to_string(), n.to_string(), num(p.ratio), num(p.kn), num(p.residual), num(p.integral)]);
      residuals[j] = p.residual;
      worst[j] = worst[j].max(p.residual);
      if j == 0 {
        checks.push(Check::bound("kn_bound", p.ratio, p.kn, format!("form {k}")));
        if boundary {
          let trace = p.boundary_trace().iter().fold(0.0f64, |m, v| m.max(v.abs()));
          checks.push(Check::bound("boundary_trace", trace, 0.0, format!("form {k}")));
        }
      }
    }
    let rate = residuals[0] / residuals[1];
    checks.push(Check::at_least("convergence_ratio", rate, CONVERGENCE_RATIO, format!("form {k}")));
    forms.push(json!({ "form": k, "residual": residuals[0], "residual_doubled": residuals[1], "rate": rate }));
  }
  let mut report = base_report(config);
  report.insert("domain".into(), json!(if boundary { "half_box" } else { "box" }));
  report.insert("forms".into(), Value::Array(forms));
  let convergence = vec![(config.resolution, worst[0]), (2 * config.resolution, worst[1])];
  Ok(Outcome { values, report: Value::Object(report), convergence, checks })
}

/// A certificate for `∫ᵠω` with the background treated as zero.
fn certify_class(f: &EllInftyFn, omega: &ModelForm) -> Result<CoinvariantCertificate> {
  let tolerance = MASS_TOLERANCE * omega.sup_norm()?.max(1.0);
  if f.group().is_finite() {
    return certify_trivial_within(f, tolerance);
  }
  if f.background().abs() > tolerance {
    return Err(Error::NotCertifiable(format!("class background {:e} is not zero", f.background())));
  }
  certify_trivial(&f.clone().with_background(0.0))
}

fn corrupt(cert: &mut CoinvariantCertificate, f: &EllInftyFn) {
  let group = f.group();
  match cert.pairs.first_mut() {
    Some((u, _)) => *u = u.scaled(2.0),
    None => cert.pairs.push((EllInftyFn::delta(group, group.identity(), 1.0), group.generator(0))),
  }
}

fn solve(config: &ExperimentConfig) -> Result<Outcome> {
  let model = config.model();
  let radius = config.radius;
  let mut values = Table::new(&[
    "form", "N", "residual", "tolerance", "ratio", "k_total", "boundary_trace", "tubes", "transports", "pieces",
  ]);
  let mut checks = Vec::new();
  let mut forms = Vec::new();
  let mut convergence = Vec::new();
  for n in [config.resolution, 2 * config.resolution] {
    let cover = build_cover(model, n)?;
    let phi = build_phi_smooth(&cover)?;
    let omegas = top_forms(config, &cover)?;
    let take = if n == config.resolution { omegas.len() } else { 1 };
    for (k, omega) in omegas.iter().take(take).enumerate() {
      let f = integrate_phi(&phi, omega, radius)?;
      let Some(mut cert) = absorb(certify_class(&f, omega), &mut checks, k)? else { continue };
      if config.corrupt_certificate {
        corrupt(&mut cert, &f);
      }
      let Some((_, r)) = absorb(solve_primitive(omega, &cert, &phi, &cover, radius), &mut checks, k)? else { continue };
      if k == 0 {
        convergence.push((n, r.residual));
      }
      if n != config.resolution {
        continue;
      }
      values.push(vec![
        k.to_string(),
        n.to_string(),
        num(r.residual),
        num(r.tolerance),
        num(r.ratio),
        num(r.k_total),
        num(r.boundary_trace),
        r.tubes.to_string(),
        r.transports.to_string(),
        r.pieces.to_string(),
      ]);
      checks.push(Check::bound("residual_bound", r.residual, r.tolerance, format!("form {k}")));
      checks.push(Check::bound("norm_bound", r.ratio, r.k_total, format!("form {k}")));
      if model.has_boundary() {
        checks.push(Check::bound("boundary_trace", r.boundary_trace, 0.0, format!("form {k}")));
      }
      forms.push(serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?);
    }
  }
  let mut report = base_report(config);
  report.insert("forms".into(), Value::Array(forms));
  Ok(Outcome { values, report: Value::Object(report), convergence, checks })
}

fn surject(config: &ExperimentConfig) -> Result<Outcome> {
  let model = config.model();
  let group = model.group();
  let radius = config.radius;
  let cover = build_cover(model, config.resolution)?;
  let phi = partition(config, &cover)?;
  let mut values = Table::new(&["form", "g", "target", "represented"]);
  let mut checks = Vec::new();
  let mut forms = Vec::new();
  for (k, f) in target_functions(config).iter().enumerate() {
    let witness = surjectivity_witness(f, &cover, radius)?;
    let back = integrate_phi(&phi, &witness.omega, radius)?;
    for g in group.window(radius) {
      values.push(vec![k.to_string(), label(&g), num(f.eval(&g)), num(back.eval(&g))]);
    }
    let Some(r) = absorb(check_surjectivity(f, &cover, &phi, radius), &mut checks, k)? else { continue };
    checks.push(Check::bound("surjectivity_fingerprint", r.fingerprint_error(), SURJECTIVITY_TOLERANCE, format!("form {k}")));
    checks.push(Check::flag("check_certificate", r.difference.validated, format!("form {k}")));
    forms.push(serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?);
  }
  let mut report = base_report(config);
  report.insert("forms".into(), Value::Array(forms));
  Ok(Outcome { values, report: Value::Object(report), convergence: vec![], checks })
}

/// Seeded variants of the configuration covering every pipeline that applies
/// to its model.
fn selftest_plan(config: &ExperimentConfig) -> Vec<ExperimentConfig> {
  let with = |pipeline: Pipeline, form: FormSpec, resolution: usize| ExperimentConfig {
    pipeline,
    form,
    resolution,
    partition: PartitionMode::SmoothPartition,
    corrupt_certificate: false,
    ..config.clone()
  };
  let random = |seed: u64, zero_class: bool, count: usize| FormSpec::Random {
    seed,
    cells: 1,
    periodic: true,
    zero_class,
    relative: false,
    count,
  };
  let n = config.resolution;
  let mut plan = vec![
    with(Pipeline::Integrate, random(11, false, 2), n),
    with(Pipeline::Surject, random(12, false, 3), n),
    with(Pipeline::Primitive, random(13, false, 2), 32),
    with(Pipeline::Solve, random(14, true, 1), n),
  ];
  if config.model().has_boundary() {
    plan.push(with(Pipeline::Stokes, random(15, false, 2), n));
  }
  plan
}

fn selftest(config: &ExperimentConfig) -> Result<Outcome> {
  let mut values = Table::new(&["pipeline", "check", "passed", "value", "tolerance", "detail"]);
  let mut checks = Vec::new();
  let mut convergence = Vec::new();
  let mut parts = Vec::new();
  for sub in selftest_plan(config) {
    sub.validate()?;
    let out = run(&sub)?;
    let name = sub.pipeline.name();
    for c in out.checks {
      values.push(vec![
        name.into(),
        c.name.clone(),
        c.passed.to_string(),
        c.value.map(num).unwrap_or_default(),
        c.tolerance.map(num).unwrap_or_default(),
        c.detail.clone(),
      ]);
      checks.push(Check { name: format!("{name}/{}", c.name), ..c });
    }
    if sub.pipeline == Pipeline::Solve {
      convergence = out.convergence;
    }
    parts.push(out.report);
  }
  let mut report = base_report(config);
  report.insert("runs".into(), Value::Array(parts));
  Ok(Outcome { values, report: Value::Object(report), convergence, checks })
}

/// Execute the configured pipeline.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
  match config.pipeline {
    Pipeline::Integrate => integrate(config),
    Pipeline::Stokes => stokes(config),
    Pipeline::Primitive => primitive(config),
    Pipeline::Solve => solve(config),
    Pipeline::Surject => surject(config),
    Pipeline::Selftest => selftest(config),
  }
}
