use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
  #[error("invalid grid: {0}")]
  InvalidGrid(String),

  #[error("empty integration region")]
  EmptyRegion,

  #[error("axis {axis} out of range for a {dims}-dimensional field")]
  AxisOutOfRange { axis: usize, dims: usize },

  #[error("degenerate interval ({a}, {b})")]
  DegenerateInterval { a: f64, b: f64 },

  #[error("incompatible operands: {0}")]
  Incompatible(String),

  #[error("degree error: {0}")]
  Degree(String),

  #[error("shift is not aligned with the sample grid and no generator is available")]
  MisalignedShift,

  #[error("embedding is not invertible")]
  Singular,

  #[error("model has no boundary")]
  NoBoundary,

  #[error("window radius {given} is too small, need at least {required}")]
  WindowTooSmall { given: i64, required: i64 },

  #[error("not certifiable: {0}")]
  NotCertifiable(String),

  #[error("integral {integral:e} exceeds the zero-integral tolerance {tolerance:e}")]
  NonzeroIntegral { integral: f64, tolerance: f64 },

  #[error("support reaches into the {margin} margin")]
  SupportTouchesMargin { margin: f64 },

  #[error("norm bound violated: measured ratio {ratio} exceeds certified constant {bound}")]
  NormBound { ratio: f64, bound: f64 },

  #[error("check_certificate failed: residual {residual:e}")]
  CertificateCheck { residual: f64 },

  #[error("geometry: {0}")]
  Geometry(String),

  #[error("{stage}: {source}")]
  Stage { stage: &'static str, source: Box<Error> },

  #[error("config: {0}")]
  Config(String),

  #[error("parse error: {0}")]
  Parse(String),

  #[error(transparent)]
  Io(#[from] std::io::Error),
}

impl Error {
  pub(crate) fn at_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
    move |source| Error::Stage { stage, source: Box::new(source) }
  }
}
