//! Seeded generators of test forms on boxes and model geometries.

use rand::Rng;

use crate::{
  error::Result,
  fields::{integrate_window, AnalyticFn, Extension, Factor, Grid, ScalarField},
  forms::DifferentialForm,
  group::{EllInftyFn, Group, GroupElement},
  model::{Model, ModelForm},
  transport::CoverData,
};

/// Product of unit bumps on `(lo, hi)` along every axis.
pub fn bump_product(dims: usize, lo: f64, hi: f64) -> AnalyticFn {
  AnalyticFn::single(vec![Factor::Bump { a: lo, b: hi }; dims])
}

/// Top form sampled from `f` after subtracting a multiple of a reference bump
/// so that its discrete integral over the window vanishes.
pub fn balanced_top(grid: &Grid, f: &AnalyticFn, reference: &AnalyticFn) -> Result<DifferentialForm> {
  let sample = |g: &AnalyticFn| ScalarField::from_analytic(grid.clone(), Extension::ZeroExtend, g.clone());
  let total = integrate_window(&sample(f)?);
  let mass = integrate_window(&sample(reference)?);
  let balanced = f.sum(&reference.scaled(-total / mass));
  Ok(DifferentialForm::top(sample(&balanced)?))
}

/// A random mixture of bump products on the unit box. With `touch_boundary`
/// the last axis factors may straddle the face `x_{n−1} = 0`.
pub fn random_box_mixture<R: Rng>(rng: &mut R, dims: usize, touch_boundary: bool) -> AnalyticFn {
  let terms = rng.gen_range(2..=4);
  let mut f = AnalyticFn::zero();
  for _ in 0..terms {
    let factors = (0..dims)
      .map(|axis| {
        let width = rng.gen_range(0.25..0.45);
        let a = if touch_boundary && axis + 1 == dims && rng.gen_bool(0.7) {
          rng.gen_range(-0.2..0.05)
        } else {
          rng.gen_range(0.12..0.88 - width)
        };
        Factor::Bump { a, b: a + width }
      })
      .collect();
    f.push(rng.gen_range(-1.0..1.0), factors);
  }
  f
}

/// A random zero-integral top form on the unit box with `intervals` per axis.
pub fn random_box_form<R: Rng>(rng: &mut R, dims: usize, intervals: usize, touch_boundary: bool) -> Result<DifferentialForm> {
  let f = random_box_mixture(rng, dims, touch_boundary);
  balanced_top(&Grid::unit_box(dims, intervals)?, &f, &bump_product(dims, 0.3, 0.7))
}

/// Unit-mass bump top form inside the coordinate box `cell`, sampled on the
/// model lattice and normalized with the integration weights of the model.
pub fn cell_bump(model: Model, resolution: usize, cell: &[(f64, f64)]) -> Result<DifferentialForm> {
  let n = resolution as f64;
  let lo: Vec<i64> = cell.iter().map(|(a, _)| (a * n).floor() as i64).collect();
  let shape: Vec<usize> = cell.iter().zip(&lo).map(|((_, b), l)| ((b * n).ceil() as i64 - l + 1) as usize).collect();
  let grid = Grid::lattice(lo, shape, resolution)?;
  let f = AnalyticFn::single(cell.iter().map(|&(a, b)| Factor::Bump { a, b }).collect());
  let sampled = ScalarField::from_analytic(grid.clone(), Extension::ZeroExtend, f)?;
  let mass: f64 = grid
    .global_indices()
    .zip(sampled.data())
    .map(|(idx, v)| v * idx.iter().enumerate().map(|(a, &i)| model.axis_weight(a, i, resolution)).product::<f64>())
    .sum();
  Ok(DifferentialForm::top(sampled.scaled(1.0 / mass)))
}

/// `Σ_g weight · β(x − g)`: the unit bump in the core of patch 0 repeated in
/// every cell, stored as a periodic form.
pub fn bump_comb(cover: &CoverData, weight: f64) -> Result<ModelForm> {
  let model = cover.model;
  let n = cover.resolution;
  if let Model::Circle { m } = model {
    let mut out = ModelForm::zero(model, n, 1)?;
    for k in 0..m as i64 {
      out.accumulate(&cell_bump(model, n, &cover.core_at(0, &[k]))?, weight)?;
    }
    return Ok(out);
  }
  let beta = cell_bump(model, n, &cover.core_at(0, &vec![0; model.lattice_axes()]))?.scaled(weight);
  let periodic = beta.resampled(&model.periodic_grid(n)?, model.periodic_extension())?;
  ModelForm::new(model, n, model.dims(), Some(periodic), None)
}

/// `Σ w · β(x − g)` over the listed cells.
pub fn cell_bumps(cover: &CoverData, cells: &[(GroupElement, f64)]) -> Result<ModelForm> {
  let model = cover.model;
  let mut out = ModelForm::zero(model, cover.resolution, model.dims())?;
  for (g, w) in cells {
    out.accumulate(&cell_bump(model, cover.resolution, &cover.core_at(0, &g.0))?, *w)?;
  }
  Ok(out)
}

/// Random analytic bump mixture centred in lattice cells `[-cells, cells]`.
/// With `touch_boundary` the bounded strip-axis factors may reach `∂M`.
pub fn random_local_mixture<R: Rng>(rng: &mut R, model: Model, cells: i64, touch_boundary: bool) -> AnalyticFn {
  let terms = rng.gen_range(2..=4);
  let mut f = AnalyticFn::zero();
  for _ in 0..terms {
    let factors = (0..model.dims())
      .map(|axis| {
        if axis < model.lattice_axes() {
          let a = rng.gen_range(-cells..=cells) as f64 + rng.gen_range(0.0..0.6);
          Factor::Bump { a, b: a + rng.gen_range(0.35..0.7) }
        } else if touch_boundary {
          let a = rng.gen_range(-0.25..0.45);
          Factor::Bump { a, b: a + rng.gen_range(0.3..0.55) }
        } else {
          let a = rng.gen_range(0.05..0.45);
          Factor::Bump { a, b: a + rng.gen_range(0.3..0.5) }
        }
      })
      .collect();
    f.push(rng.gen_range(-1.0..1.0), factors);
  }
  f
}

/// Window of lattice cells `[-cells-1, cells+2]` (full bounded axis); on the
/// circle an unwrapped window that accumulation folds onto `ℝ/mℤ`.
fn local_grid(model: Model, resolution: usize, cells: i64) -> Result<Grid> {
  let rank = model.lattice_axes();
  if let Model::Circle { .. } = model {
    let r = resolution as i64;
    return Grid::lattice(vec![(-cells - 1) * r], vec![((2 * cells + 3) * r) as usize], resolution);
  }
  model.window_grid(resolution, &vec![-cells - 1; rank], &vec![cells + 2; rank])
}

/// Random periodic analytic function: sines along lattice axes, a polynomial
/// profile along the bounded strip axis. With `zero_mean` every term has a
/// nonconstant lattice factor, so the cell average vanishes; with `relative`
/// the strip profile vanishes on `∂M`.
pub fn random_periodic_mixture<R: Rng>(rng: &mut R, model: Model, zero_mean: bool, relative: bool) -> AnalyticFn {
  let period = match model {
    Model::Circle { m } => m as f64,
    _ => 1.0,
  };
  let mut f = AnalyticFn::zero();
  for _ in 0..rng.gen_range(1..=2) {
    let factors = (0..model.dims())
      .map(|axis| {
        if axis < model.lattice_axes() {
          let k = rng.gen_range(1..=2) as f64;
          Factor::Sine { freq: 2.0 * std::f64::consts::PI * k / period, phase: rng.gen_range(0.0..6.3) }
        } else if relative {
          let c = rng.gen_range(-2.0..2.0);
          Factor::Poly(vec![0.0, c, -c])
        } else {
          Factor::Poly(vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        }
      })
      .collect();
    f.push(rng.gen_range(-0.5..0.5), factors);
  }
  if !zero_mean {
    let mut factors = vec![Factor::One; model.dims()];
    if relative && model.has_boundary() {
      factors[model.dims() - 1] = Factor::Poly(vec![0.0, 1.0, -1.0]);
    }
    f.push(rng.gen_range(0.2..0.6), factors);
  }
  f
}

/// Sample an analytic function as one period of a periodic field.
pub fn periodic_field(model: Model, resolution: usize, f: AnalyticFn) -> Result<ScalarField> {
  ScalarField::from_analytic(model.periodic_grid(resolution)?, model.periodic_extension(), f)
}

/// Random top form: a local bump mixture plus, with `periodic`, a periodic
/// part. With `zero_class` the class vanishes: zero-mean periodic part on
/// lattice models, total integral removed with a core bump on the circle.
pub fn random_top_form<R: Rng>(
  rng: &mut R,
  cover: &CoverData,
  cells: i64,
  periodic: bool,
  zero_class: bool,
) -> Result<ModelForm> {
  let model = cover.model;
  let n = cover.resolution;
  let dims = model.dims();
  let local = ScalarField::from_analytic(
    local_grid(model, n, cells)?,
    Extension::ZeroExtend,
    random_local_mixture(rng, model, cells, true),
  )?;
  let mut out = ModelForm::zero(model, n, dims)?;
  out.accumulate(&DifferentialForm::top(local), 1.0)?;
  if periodic {
    let p = periodic_field(model, n, random_periodic_mixture(rng, model, zero_class, false))?;
    out = out.axpy(1.0, &ModelForm::new(model, n, dims, Some(DifferentialForm::top(p)), None)?)?;
  }
  if zero_class && model.group().is_finite() {
    let total = total_integral(&out)?;
    out.accumulate(&cell_bump(model, n, &cover.core_at(0, &[0]))?, -total)?;
  }
  Ok(out)
}

/// `∫_M ω` of a top form on the circle (the whole quotient-periodic window).
pub fn total_integral(omega: &ModelForm) -> Result<f64> {
  let grid = omega.model().periodic_grid(omega.resolution())?;
  let h = 1.0 / omega.resolution() as f64;
  Ok(grid.global_indices().map(|idx| omega.component_global(0, &idx)).sum::<f64>() * h)
}

/// Random strip `1`-form `a dx₁ + b dx₂` with analytic generators: local
/// mixtures in both components plus, with `periodic`, a periodic part. With
/// `relative` the tangential coefficient `a` vanishes on `∂M`.
pub fn random_strip_one_form<R: Rng>(
  rng: &mut R,
  resolution: usize,
  cells: i64,
  periodic: bool,
  relative: bool,
) -> Result<ModelForm> {
  let model = Model::Strip;
  let grid = local_grid(model, resolution, cells)?;
  let comps = (0..2)
    .map(|c| {
      let f = random_local_mixture(rng, model, cells, !(relative && c == 0));
      ScalarField::from_analytic(grid.clone(), Extension::ZeroExtend, f)
    })
    .collect::<Result<Vec<_>>>()?;
  let mut out = ModelForm::zero(model, resolution, 1)?;
  out.accumulate(&DifferentialForm::new(2, 1, comps)?, 1.0)?;
  if periodic {
    let comps = (0..2)
      .map(|c| periodic_field(model, resolution, random_periodic_mixture(rng, model, false, relative && c == 0)))
      .collect::<Result<Vec<_>>>()?;
    out = out.axpy(1.0, &ModelForm::new(model, resolution, 1, Some(DifferentialForm::new(2, 1, comps)?), None)?)?;
  }
  Ok(out)
}

/// Random bounded function with finite support on `[-R, R]^d` plus a
/// background on ℤᵈ; on ℤ/m a random value at every element.
pub fn random_bounded_function<R: Rng>(rng: &mut R, group: Group, radius: i64) -> EllInftyFn {
  if group.is_finite() {
    let mut f = EllInftyFn::zero(group);
    for g in group.window(0) {
      f.add_at(g, rng.gen_range(-1.0..1.0));
    }
    return f;
  }
  let mut f = EllInftyFn::constant(group, rng.gen_range(-1.0..1.0));
  for _ in 0..rng.gen_range(1..=4) {
    let g = GroupElement((0..group.rank()).map(|_| rng.gen_range(-radius..=radius)).collect());
    f.add_at(g, rng.gen_range(-1.0..1.0));
  }
  f
}
