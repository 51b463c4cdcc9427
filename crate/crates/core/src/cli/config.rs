use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{
  error::{Error, Result},
  integration::PartitionMode,
  model::Model,
  transport::{CoverData, MIN_RADIUS},
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
  Line,
  Plane,
  Strip,
  Circle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
  Integrate,
  Stokes,
  Primitive,
  Solve,
  Surject,
  Selftest,
}

impl Pipeline {
  pub fn name(&self) -> &'static str {
    match self {
      Pipeline::Integrate => "integrate",
      Pipeline::Stokes => "stokes",
      Pipeline::Primitive => "primitive",
      Pipeline::Solve => "solve",
      Pipeline::Surject => "surject",
      Pipeline::Selftest => "selftest",
    }
  }
}

/// One weighted cell of a `cell_bumps` form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellWeight {
  pub cell:   Vec<i64>,
  pub weight: f64,
}

fn one() -> i64 { 1 }

fn one_count() -> usize { 1 }

/// Form (or, for `surject`, bounded function) builder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormSpec {
  /// `weight` times the unit bump in every cell.
  Comb { weight: f64 },
  /// Unit bumps in the listed cells.
  CellBumps { bumps: Vec<CellWeight> },
  /// Seeded mollifier mixtures; `count` instances with seeds `seed, seed+1, …`.
  Random {
    seed:       u64,
    #[serde(default = "one")]
    cells:      i64,
    #[serde(default)]
    periodic:   bool,
    #[serde(default)]
    zero_class: bool,
    #[serde(default)]
    relative:   bool,
    #[serde(default = "one_count")]
    count:      usize,
  },
}

fn smooth() -> PartitionMode { PartitionMode::SmoothPartition }

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
  pub model:               ModelKind,
  /// Order of the cyclic group (circle only).
  #[serde(default)]
  pub m:                   Option<u64>,
  pub resolution:          usize,
  pub radius:              i64,
  pub pipeline:            Pipeline,
  pub form:                FormSpec,
  #[serde(default = "smooth")]
  pub partition:           PartitionMode,
  #[serde(default)]
  pub out:                 Option<PathBuf>,
  /// Perturb the certificate handed to `solve` (negative test).
  #[serde(default)]
  pub corrupt_certificate: bool,
}

fn parse_value(raw: &str) -> toml::Value {
  format!("v = {raw}")
    .parse::<toml::Table>()
    .ok()
    .and_then(|mut t| t.remove("v"))
    .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Apply `key=value` overrides with dotted keys; values are parsed as TOML
/// and fall back to plain strings.
pub fn apply_overrides(table: &mut toml::Table, overrides: &[String]) -> Result<()> {
  for item in overrides {
    let (key, raw) = item
      .split_once('=')
      .ok_or_else(|| Error::Config(format!("override `{item}` is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
      return Err(Error::Config(format!("override key `{key}` is malformed")));
    }
    let mut node = &mut *table;
    for part in &path[..path.len() - 1] {
      let entry = node.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
      node = entry.as_table_mut().ok_or_else(|| Error::Config(format!("override key `{key}` crosses a non-table")))?;
    }
    node.insert(path[path.len() - 1].to_string(), parse_value(raw.trim()));
  }
  Ok(())
}

impl ExperimentConfig {
  pub fn from_table(table: toml::Table) -> Result<Self> {
    let config: Self = toml::Value::Table(table).try_into().map_err(|e| Error::Config(format!("{e}")))?;
    config.validate()?;
    Ok(config)
  }

  pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
    let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
    apply_overrides(&mut table, overrides)?;
    Self::from_table(table)
  }

  pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Self::parse(&text, overrides)
  }

  pub fn model(&self) -> Model {
    match self.model {
      ModelKind::Line => Model::Line,
      ModelKind::Plane => Model::Plane,
      ModelKind::Strip => Model::Strip,
      ModelKind::Circle => Model::Circle { m: self.m.unwrap_or(0) },
    }
  }

  /// Smallest resolution the pipeline accepts.
  fn min_resolution(&self) -> usize {
    match self.pipeline {
      Pipeline::Primitive => 16,
      _ => CoverData::min_resolution(self.model()),
    }
  }

  pub fn validate(&self) -> Result<()> {
    let bad = |msg: String| Err(Error::Config(msg));
    match (self.model, self.m) {
      (ModelKind::Circle, None) => return bad("the circle model needs `m`".into()),
      (ModelKind::Circle, Some(0)) => return bad("`m` must be positive".into()),
      (ModelKind::Circle, Some(_)) | (_, None) => {},
      (_, Some(_)) => return bad("`m` only applies to the circle model".into()),
    }
    let n = self.resolution;
    if !n.is_power_of_two() {
      return bad(format!("resolution {n} is not a power of two"));
    }
    if n < self.min_resolution() {
      return bad(format!("resolution {n} is below {} for this pipeline", self.min_resolution()));
    }
    let model = self.model();
    let rank = model.lattice_axes() as i64;
    let finite = model.group().is_finite();
    if !finite && self.radius < MIN_RADIUS {
      return bad(format!("radius {} is below {MIN_RADIUS}", self.radius));
    }
    if self.pipeline == Pipeline::Stokes && self.model != ModelKind::Strip {
      return bad("the stokes pipeline runs on the strip".into());
    }
    match &self.form {
      FormSpec::Comb { weight } if !weight.is_finite() => return bad("comb weight must be finite".into()),
      FormSpec::CellBumps { bumps } => {
        for b in bumps {
          if b.cell.len() as i64 != rank {
            return bad(format!("cell {:?} needs {rank} coordinates", b.cell));
          }
          if !finite && b.cell.iter().any(|c| c.abs() > self.radius) {
            return bad(format!("cell {:?} lies outside the window of radius {}", b.cell, self.radius));
          }
          if !b.weight.is_finite() {
            return bad("cell weights must be finite".into());
          }
        }
      },
      FormSpec::Random { cells, count, .. } => {
        if *cells < 0 || *count == 0 {
          return bad("random forms need cells ≥ 0 and count ≥ 1".into());
        }
        if !finite && self.pipeline != Pipeline::Primitive && cells + 2 > self.radius {
          return bad(format!("random forms on cells ±{cells} need radius ≥ {}", cells + 2));
        }
      },
      _ => {},
    }
    if self.pipeline == Pipeline::Stokes && !matches!(self.form, FormSpec::Random { .. }) {
      return bad("the stokes pipeline needs a random 1-form".into());
    }
    if self.pipeline == Pipeline::Primitive && !matches!(self.form, FormSpec::Random { .. }) {
      return bad("the primitive pipeline needs a random form".into());
    }
    Ok(())
  }
}
