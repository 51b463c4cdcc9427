use std::{fmt::Write as _, path::Path};

use serde::Serialize;

use crate::{error::Result, group::GroupElement};

/// Shortest round-trip formatting, so identical runs give identical bytes.
pub fn num(v: f64) -> String { format!("{v:e}") }

/// `i` on rank 1, `i;j` on rank 2.
pub fn label(g: &GroupElement) -> String { g.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";") }

/// A CSV table with a fixed header.
#[derive(Clone, Debug, Default)]
pub struct Table {
  pub header: Vec<&'static str>,
  pub rows:   Vec<Vec<String>>,
}

impl Table {
  pub fn new(header: &[&'static str]) -> Self { Self { header: header.to_vec(), rows: vec![] } }

  pub fn push(&mut self, row: Vec<String>) { self.rows.push(row) }

  pub fn to_csv(&self) -> String {
    let mut s = self.header.join(",");
    s.push('\n');
    for r in &self.rows {
      s.push_str(&r.iter().map(|f| field(f)).collect::<Vec<_>>().join(","));
      s.push('\n');
    }
    s
  }
}

/// RFC 4180 quoting for fields holding separators or quotes.
fn field(f: &str) -> std::borrow::Cow<'_, str> {
  if f.contains([',', '"', '\n']) {
    format!("\"{}\"", f.replace('"', "\"\"")).into()
  } else {
    f.into()
  }
}

/// Columns `N,residual,ratio`; the ratio is the previous residual over this
/// one, left empty on the first row and wherever it is undefined.
pub fn emit_convergence(table: &[(usize, f64)]) -> String {
  let mut s = String::from("N,residual,ratio\n");
  let mut prev: Option<f64> = None;
  for &(n, r) in table {
    let ratio = prev.map(|p| p / r).filter(|q| q.is_finite()).map(num).unwrap_or_default();
    let _ = writeln!(s, "{n},{},{ratio}", num(r));
    prev = Some(r);
  }
  s
}

/// One named assertion.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
  pub name:      String,
  pub passed:    bool,
  pub value:     Option<f64>,
  pub tolerance: Option<f64>,
  pub detail:    String,
}

impl Check {
  /// `value ≤ tolerance`.
  pub fn bound(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
    Self { name: name.into(), passed: value <= tolerance, value: Some(value), tolerance: Some(tolerance), detail: detail.into() }
  }

  /// `value ≥ floor`.
  pub fn at_least(name: &str, value: f64, floor: f64, detail: impl Into<String>) -> Self {
    Self { name: name.into(), passed: value >= floor, value: Some(value), tolerance: Some(floor), detail: detail.into() }
  }

  pub fn flag(name: &str, passed: bool, detail: impl Into<String>) -> Self {
    Self { name: name.into(), passed, value: None, tolerance: None, detail: detail.into() }
  }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary<'a> {
  pub pipeline:   &'a str,
  pub model:      &'a str,
  pub resolution: usize,
  pub radius:     i64,
  pub passed:     bool,
  pub checks:     &'a [Check],
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
  std::fs::create_dir_all(dir)?;
  std::fs::write(dir.join(name), contents)?;
  Ok(())
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn convergence_rows() {
    assert_eq!(emit_convergence(&[]), "N,residual,ratio\n");
    let mut t = Table::new(&["a", "b"]);
    t.push(vec!["x,y".into(), "say \"hi\"".into()]);
    assert_eq!(t.to_csv(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
    assert_eq!(emit_convergence(&[(128, 1e-3)]), "N,residual,ratio\n128,1e-3,\n");
    assert_eq!(emit_convergence(&[(128, 1.6e-3), (256, 1e-4)]), "N,residual,ratio\n128,1.6e-3,\n256,1e-4,1.6e1\n");
    assert_eq!(emit_convergence(&[(128, 0.0), (256, 0.0)]), "N,residual,ratio\n128,0e0,\n256,0e0,\n");
  }
}
