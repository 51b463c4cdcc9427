use rayon::prelude::*;
use serde::Serialize;

use crate::{
  error::{Error, Result},
  fields::{integrate_window, AnalyticFn, Extension, Factor, Grid, ScalarField},
  forms::{minor, multi_indices, pushforward_tube, DifferentialForm},
  group::{certificate_residual, check_certificate, CoinvariantCertificate, GroupElement},
  integration::{integrate_phi, PartitionFunction, PartitionMode},
  model::{Model, ModelForm},
  poincare::{kn_constant, primitive_box, primitive_halfbox},
  transport::{make_transport, CellBox, CoverData, Patch, TransportPair},
};

/// Relative tolerance on class backgrounds and routed masses.
pub const MASS_TOLERANCE: f64 = 1e-8;
/// `‖dη − ω‖∞ ≤ RESIDUAL_FACTOR · h² · ‖ω‖∞` on the interior window.
pub const RESIDUAL_FACTOR: f64 = 10.0;
/// Smallest window radius the lattice pipeline accepts.
pub const MIN_RADIUS: i64 = 3;

/// Chart margin handed to the Poincaré step; every `φᵢ` vanishes on a wider
/// band in chart coordinates.
const CHART_MARGIN: f64 = 1.0 / 48.0;

fn group_range(model: Model, radius: i64) -> Vec<GroupElement> { model.group().window(radius.max(0)) }

/// Working window: lattice cells `[-R-2, R+3]` and the full bounded axis.
fn working_grid(model: Model, resolution: usize, radius: i64) -> Result<Grid> {
  let rank = model.lattice_axes();
  model.window_grid(resolution, &vec![-radius - 2; rank], &vec![radius + 3; rank])
}

fn working_box(model: Model, radius: i64) -> CellBox {
  (0..model.dims())
    .map(|a| if a < model.lattice_axes() { ((-radius - 2) as f64, (radius + 3) as f64) } else { (0.0, 1.0) })
    .collect()
}

fn check_inputs(omega: &ModelForm, cover: &CoverData, radius: i64) -> Result<()> {
  let model = omega.model();
  if cover.model != model || cover.resolution != omega.resolution() {
    return Err(Error::Incompatible("cover and form live on different models".into()));
  }
  if omega.degree() != model.dims() {
    return Err(Error::Degree(format!("the pipeline needs a top form, got degree {}", omega.degree())));
  }
  let min = CoverData::min_resolution(model);
  if omega.resolution() < min {
    return Err(Error::InvalidGrid(format!("resolution {} is below {min} for this cover", omega.resolution())));
  }
  if !model.group().is_finite() && radius < MIN_RADIUS {
    return Err(Error::WindowTooSmall { given: radius, required: MIN_RADIUS });
  }
  Ok(())
}

fn patch_nodes(cover: &CoverData) -> Vec<Vec<(Vec<i64>, f64)>> {
  cover
    .patches
    .iter()
    .map(|p| crate::integration::weighted_nodes(cover.model, cover.resolution, &p.phi))
    .collect()
}

fn mass(omega: &ModelForm, nodes: &[(Vec<i64>, f64)], shift: &[i64]) -> f64 {
  let mut idx = vec![0; shift.len()];
  nodes
    .iter()
    .map(|(node, w)| {
      for (k, (a, b)) in node.iter().zip(shift).enumerate() {
        idx[k] = a + b;
      }
      w * omega.component_global(0, &idx)
    })
    .sum()
}

/// Result of moving the class representative to zero with tube forms.
#[derive(Clone, Debug)]
pub struct GlobalNormalization {
  /// `ω′ = ω − dη₁`.
  pub omega:     ModelForm,
  pub eta:       ModelForm,
  pub tubes:     usize,
  pub steps:     usize,
  /// Background of `∫ᵠω` that was treated as zero.
  pub background: f64,
  /// `max |∫ᵠω′(g)|` over the stage window.
  pub residual:  f64,
  pub certificate_residual: f64,
}

/// Subtract tube forms so that `∫ᵠω′` vanishes on the window `[-(R-1), R-1]ᵈ`.
///
/// The certificate `∫ᵠω = Σⱼ (fⱼ − gⱼ·fⱼ)` (background removed) is expanded
/// into unit steps `s·(u − eₐ·u)`; each `u(g)` places the tube between the
/// transport cells at `g − eₐ` and `g`, truncated to `[-R, R]ᵈ`.
pub fn normalize_global(
  omega: &ModelForm,
  cert: &CoinvariantCertificate,
  phi: &PartitionFunction,
  cover: &CoverData,
  radius: i64,
) -> Result<GlobalNormalization> {
  check_inputs(omega, cover, radius)?;
  let model = omega.model();
  let group = model.group();
  let n = omega.resolution();
  let f = integrate_phi(phi, omega, radius)?;
  let tolerance = MASS_TOLERANCE * omega.sup_norm()?.max(1.0);
  let background = f.background();
  let target = if group.is_finite() {
    f
  } else {
    if background.abs() > tolerance {
      return Err(Error::NotCertifiable(format!("class background {background:e} is not zero")));
    }
    f.with_background(0.0)
  };
  let cert_residual = certificate_residual(&target, cert, radius);
  let valid = if group.is_finite() { cert_residual <= tolerance } else { check_certificate(&target, cert, radius) };
  if !valid {
    return Err(Error::CertificateCheck { residual: cert_residual });
  }

  let window = working_box(model, radius);
  let rank = model.lattice_axes();
  let pairs: Vec<TransportPair> = (0..rank)
    .map(|a| {
      let mut back = vec![0; rank];
      back[a] = -1;
      make_transport(model, n, &cover.transport_cell(&back), &cover.transport_cell(&vec![0; rank]), &window)
    })
    .collect::<Result<_>>()?;

  let grid = working_grid(model, n, radius)?;
  let mut out = omega.clone();
  out.reserve(&grid)?;
  let mut eta = ModelForm::zero(model, n, model.dims() - 1)?;
  eta.reserve(&grid)?;
  let steps = cert.unit_steps();
  let mut tubes = 0;
  for (s, axis, u) in &steps {
    for g in group_range(model, radius) {
      let c = s * u.eval(&g);
      if c == 0.0 {
        continue;
      }
      let (rho, nu) = pairs[*axis].translated(&model.index_shift(&g, n));
      out.accumulate(&rho, -c)?;
      eta.accumulate(&nu, c)?;
      tubes += 1;
    }
  }
  let after = integrate_phi(phi, &out, radius + 4)?;
  let residual = group_range(model, radius - 1).iter().map(|g| after.eval(g).abs()).fold(0.0, f64::max);
  Ok(GlobalNormalization {
    omega: out,
    eta,
    tubes,
    steps: steps.len(),
    background,
    residual,
    certificate_residual: cert_residual,
  })
}

/// Result of routing the per-patch masses to zero.
#[derive(Clone, Debug)]
pub struct LocalNormalization {
  pub omega:       ModelForm,
  pub eta:         ModelForm,
  pub transports:  usize,
  /// Largest `|mᵢ(g)|` before routing.
  pub mass_before: f64,
  /// Largest `|mᵢ(g)|` after routing.
  pub residual:    f64,
}

/// Per-patch masses `mᵢ(g) = ∫ φᵢ · g*ω` for every `g` of the stage window.
pub fn patch_masses(omega: &ModelForm, cover: &CoverData, radius: i64) -> Vec<(GroupElement, Vec<f64>)> {
  let model = cover.model;
  let nodes = patch_nodes(cover);
  group_range(model, radius)
    .into_par_iter()
    .map(|g| {
      let shift = model.index_shift(&g, cover.resolution);
      let m = nodes.iter().map(|nd| mass(omega, nd, &shift)).collect();
      (g, m)
    })
    .collect()
}

/// Zero every patch mass on `[-(R-1), R-1]ᵈ` by transports along the patch
/// tree, children before parents.
pub fn normalize_local(omega: &ModelForm, cover: &CoverData, radius: i64) -> Result<LocalNormalization> {
  check_inputs(omega, cover, radius)?;
  let model = omega.model();
  let n = omega.resolution();
  let k = cover.patches.len();
  let window = working_box(model, radius);
  let origin = vec![0; model.lattice_axes()];
  let pairs: Vec<Option<TransportPair>> = (0..k)
    .map(|i| {
      cover
        .parent(i)
        .map(|p| make_transport(model, n, &cover.core_at(p, &origin), &cover.core_at(i, &origin), &window))
        .transpose()
    })
    .collect::<Result<_>>()?;
  let tolerance = MASS_TOLERANCE * omega.sup_norm()?.max(1.0);
  let mut out = omega.clone();
  out.reserve(&working_grid(model, n, radius)?)?;
  let mut eta = ModelForm::zero(model, n, model.dims() - 1)?;
  eta.reserve(&working_grid(model, n, radius)?)?;
  let mut transports = 0;
  let mut mass_before = 0.0f64;
  for (g, masses) in patch_masses(omega, cover, radius - 1) {
    mass_before = masses.iter().fold(mass_before, |m, v| m.max(v.abs()));
    let shift = model.index_shift(&g, n);
    let mut acc = masses;
    for i in (1..k).rev() {
      let a = acc[i];
      let p = cover.parent(i).expect("non-root patch");
      if a != 0.0 {
        let (rho, nu) = pairs[i].as_ref().expect("non-root patch").translated(&shift);
        out.accumulate(&rho, -a)?;
        eta.accumulate(&nu, a)?;
        transports += 1;
      }
      acc[p] += a;
    }
    if acc[0].abs() > tolerance {
      return Err(Error::NonzeroIntegral { integral: acc[0], tolerance });
    }
  }
  let residual = patch_masses(&out, cover, radius - 1)
    .iter()
    .flat_map(|(_, m)| m.iter().map(|v| v.abs()))
    .fold(0.0, f64::max);
  Ok(LocalNormalization { omega: out, eta, transports, mass_before, residual })
}

/// Result of the per-cell Poincaré assembly.
#[derive(Clone, Debug)]
pub struct GlobalPrimitive {
  pub eta:                ModelForm,
  pub pieces:             usize,
  /// Largest `‖ηᵢᵍ‖ / ‖φᵢ·g*ω″‖` over the pieces, on chart coordinates.
  pub max_ratio:          f64,
  pub max_piece_residual: f64,
  /// Largest chart integral removed before the Poincaré step.
  pub max_correction:     f64,
  /// `2ᵈ · Kₙ · distortion · ‖ω″‖∞`, a bound on `‖η₃‖∞`.
  pub bound:              f64,
}

/// `|det A| · ‖Λⁿ⁻¹ A⁻¹‖_F`: how far pulling a top form back and pushing an
/// `(n−1)`-form forward along the chart can stretch sup norms.
fn distortion(patch: &Patch) -> f64 {
  let n = patch.chart.dims();
  let inv = patch.chart.inverse_matrix();
  let idx = multi_indices(n, n - 1);
  let frob: f64 = idx.iter().flat_map(|i| idx.iter().map(move |j| (i, j))).map(|(i, j)| minor(inv, i, j).powi(2)).sum();
  patch.chart.det().abs() * frob.sqrt()
}

/// Unit-mass bump on the middle third of the chart domain.
fn chart_bump(patch: &Patch) -> Result<ScalarField> {
  let grid = Grid::unit_box_per_axis(&patch.intervals)?;
  let f = AnalyticFn::single(vec![Factor::Bump { a: 1.0 / 3.0, b: 2.0 / 3.0 }; grid.dims()]);
  let sampled = ScalarField::from_analytic(grid, Extension::ZeroExtend, f)?.without_generator();
  let mass = integrate_window(&sampled);
  Ok(sampled.scaled(1.0 / mass))
}

struct Piece {
  eta:        DifferentialForm,
  ratio:      f64,
  residual:   f64,
  correction: f64,
}

/// Primitive of `φᵢ · g*ω″` on the chart domain. Routing leaves a chart
/// integral at rounding level; it is removed with the chart bump before the
/// Poincaré step and reported as the correction.
fn piece(omega: &ModelForm, patch: &Patch, bump: &ScalarField, g: &GroupElement, floor: f64) -> Result<Option<Piece>> {
  let model = omega.model();
  let n = omega.resolution();
  let shift = model.index_shift(g, n);
  let qgrid = Grid::unit_box_per_axis(&patch.intervals)?;
  let det = patch.chart.det();
  let mut idx = vec![0i64; model.dims()];
  let mut any = false;
  let data: Vec<f64> = (0..qgrid.len())
    .map(|f| {
      let y = patch.chart.apply(&qgrid.point_at(f));
      for (k, v) in y.iter().enumerate() {
        idx[k] = (v * n as f64).round() as i64;
      }
      let weight = patch.phi.value_global(&idx);
      if weight == 0.0 {
        return 0.0;
      }
      for (k, s) in shift.iter().enumerate() {
        idx[k] += s;
      }
      let v = det * weight * omega.component_global(0, &idx);
      any |= v != 0.0;
      v
    })
    .collect();
  if !any {
    return Ok(None);
  }
  let sampled = ScalarField::new(qgrid, data, Extension::ZeroExtend)?;
  let integral = integrate_window(&sampled);
  if integral.abs() > floor {
    return Err(Error::NonzeroIntegral { integral, tolerance: floor });
  }
  let top = DifferentialForm::top(sampled.axpy(-integral, bump)?);
  let prim = if patch.boundary { primitive_halfbox(&top, CHART_MARGIN)? } else { primitive_box(&top, CHART_MARGIN)? };
  let eta = pushforward_tube(&prim.eta, &patch.chart, patch.phi.grid())?.translated(&shift);
  Ok(Some(Piece { eta, ratio: prim.ratio, residual: prim.residual, correction: integral.abs() }))
}

/// Per-cell primitives of `φᵢ · g*ω″` on the chart domains, pushed back and
/// summed over `[-(R-1), R-1]ᵈ` and all patches.
pub fn global_primitive(omega: &ModelForm, cover: &CoverData, radius: i64) -> Result<GlobalPrimitive> {
  check_inputs(omega, cover, radius)?;
  let model = omega.model();
  let items: Vec<(GroupElement, usize)> = group_range(model, radius - 1)
    .into_iter()
    .flat_map(|g| (0..cover.patches.len()).map(move |i| (g.clone(), i)))
    .collect();
  let bumps: Vec<ScalarField> = cover.patches.iter().map(chart_bump).collect::<Result<_>>()?;
  let norm = omega.sup_norm()?;
  let floor = MASS_TOLERANCE * norm.max(1.0);
  let results: Vec<Option<Piece>> = items
    .par_iter()
    .map(|(g, i)| piece(omega, &cover.patches[*i], &bumps[*i], g, floor))
    .collect::<Result<_>>()?;
  let mut eta = ModelForm::zero(model, omega.resolution(), model.dims() - 1)?;
  eta.reserve(&working_grid(model, omega.resolution(), radius)?)?;
  let (mut pieces, mut max_ratio, mut max_piece_residual, mut max_correction) = (0, 0.0f64, 0.0f64, 0.0f64);
  for p in results.into_iter().flatten() {
    eta.accumulate(&p.eta, 1.0)?;
    pieces += 1;
    max_ratio = max_ratio.max(p.ratio);
    max_piece_residual = max_piece_residual.max(p.residual);
    max_correction = max_correction.max(p.correction);
  }
  let worst = cover.patches.iter().map(distortion).fold(0.0, f64::max);
  let bound = (1usize << model.dims()) as f64 * kn_constant(model.dims()) * worst * norm;
  Ok(GlobalPrimitive { eta, pieces, max_ratio, max_piece_residual, max_correction, bound })
}

/// Stage-by-stage record of a [`solve_primitive`] run.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
  pub model:                String,
  pub resolution:           usize,
  pub radius:               i64,
  pub interior_radius:      i64,
  pub omega_norm:           f64,
  pub background:           f64,
  pub certificate_pairs:    usize,
  pub certificate_residual: f64,
  pub unit_steps:           usize,
  pub tubes:                usize,
  pub global_residual:      f64,
  pub transports:           usize,
  pub mass_before:          f64,
  pub local_residual:       f64,
  pub pieces:               usize,
  pub max_piece_ratio:      f64,
  pub max_piece_residual:   f64,
  pub max_correction:       f64,
  pub kn:                   f64,
  pub eta_norm:             f64,
  pub k_total:              f64,
  pub ratio:                f64,
  pub residual:             f64,
  pub tolerance:            f64,
  /// Largest tangential sample of `η` on `∂M` (strip only, else 0).
  pub boundary_trace:       f64,
}

impl SolveReport {
  pub fn residual_ok(&self) -> bool { self.residual <= self.tolerance }

  pub fn norm_ok(&self) -> bool { self.ratio <= self.k_total }

  pub fn boundary_ok(&self) -> bool { self.boundary_trace == 0.0 }
}

/// Window on which `dη = ω` is asserted: lattice cells `[-(R-2), R-2]`
/// (the whole circle on ℤ/m).
pub fn interior_grid(model: Model, resolution: usize, radius: i64) -> Result<Grid> {
  if model.group().is_finite() {
    return model.periodic_grid(resolution);
  }
  let rank = model.lattice_axes();
  model.window_grid(resolution, &vec![-(radius - 2); rank], &vec![radius - 1; rank])
}

fn boundary_trace(eta: &ModelForm) -> f64 {
  if !eta.model().has_boundary() {
    return 0.0;
  }
  let rows = [0, eta.resolution() as i64];
  [eta.periodic(), eta.local()]
    .into_iter()
    .flatten()
    .map(|part| {
      let c = &part.components()[0];
      let grid = c.grid();
      (0..grid.shape()[0] as i64)
        .flat_map(|i| rows.iter().map(move |&r| [grid.lo()[0] + i, r]))
        .map(|idx| c.value_global(&idx).abs())
        .fold(0.0, f64::max)
    })
    .fold(0.0, f64::max)
}

/// The injectivity pipeline: a primitive `η` of a class-zero top form,
/// exact on the interior window, relative on the strip.
pub fn solve_primitive(
  omega: &ModelForm,
  cert: &CoinvariantCertificate,
  phi: &PartitionFunction,
  cover: &CoverData,
  radius: i64,
) -> Result<(ModelForm, SolveReport)> {
  check_inputs(omega, cover, radius)?;
  if phi.mode != PartitionMode::SmoothPartition || phi.model != omega.model() || phi.resolution != omega.resolution()
  {
    return Err(Error::Incompatible("the pipeline needs the cover's smooth partition function".into()));
  }
  let model = omega.model();
  let n = omega.resolution();
  let stage1 = normalize_global(omega, cert, phi, cover, radius).map_err(Error::at_stage("normalize_global"))?;
  let stage2 = normalize_local(&stage1.omega, cover, radius).map_err(Error::at_stage("normalize_local"))?;
  let stage3 = global_primitive(&stage2.omega, cover, radius).map_err(Error::at_stage("global_primitive"))?;
  let eta = stage1.eta.axpy(1.0, &stage2.eta)?.axpy(1.0, &stage3.eta)?;

  let interior = interior_grid(model, n, radius)?;
  let d_eta = eta.exterior_derivative()?;
  let mut residual = 0.0f64;
  interior.for_each_global(|_, idx| {
    residual = residual.max((d_eta.component_global(0, idx) - omega.component_global(0, idx)).abs());
  });
  let omega_norm = omega.sup_norm()?;
  let eta_norm = eta.sup_norm()?;
  let scale = if omega_norm > 0.0 { omega_norm } else { 1.0 };
  let k_total = (stage1.eta.sup_norm()? + stage2.eta.sup_norm()? + stage3.bound) / scale;
  let h = 1.0 / n as f64;
  let report = SolveReport {
    model: model.name().into(),
    resolution: n,
    radius,
    interior_radius: if model.group().is_finite() { 0 } else { radius - 2 },
    omega_norm,
    background: stage1.background,
    certificate_pairs: cert.len(),
    certificate_residual: stage1.certificate_residual,
    unit_steps: stage1.steps,
    tubes: stage1.tubes,
    global_residual: stage1.residual,
    transports: stage2.transports,
    mass_before: stage2.mass_before,
    local_residual: stage2.residual,
    pieces: stage3.pieces,
    max_piece_ratio: stage3.max_ratio,
    max_piece_residual: stage3.max_piece_residual,
    max_correction: stage3.max_correction,
    kn: kn_constant(model.dims()),
    eta_norm,
    k_total,
    ratio: eta_norm / scale,
    residual,
    tolerance: RESIDUAL_FACTOR * h * h * omega_norm,
    boundary_trace: boundary_trace(&eta),
  };
  if !report.norm_ok() {
    return Err(Error::NormBound { ratio: report.ratio, bound: report.k_total });
  }
  Ok((eta, report))
}
