//! Plain-text layout for sampled fields: `#` header lines followed by one
//! sample per line in row-major order.

use std::io::{BufRead, Write};

use crate::{
  error::{Error, Result},
  fields::{Extension, Grid, ScalarField},
};

fn join<T: ToString>(v: &[T]) -> String { v.iter().map(T::to_string).collect::<Vec<_>>().join(" ") }

fn extension_tag(ext: &Extension) -> String {
  match ext {
    Extension::ZeroExtend => "zero".into(),
    Extension::Periodic(flags) => format!("periodic {}", join(&flags.iter().map(|&f| f as u8).collect::<Vec<_>>())),
  }
}

pub fn write_field<W: Write>(field: &ScalarField, mut out: W) -> Result<()> {
  let g = field.grid();
  writeln!(out, "# lo {}", join(g.lo()))?;
  writeln!(out, "# shape {}", join(g.shape()))?;
  writeln!(out, "# spacing {}", join(g.spacing()))?;
  writeln!(out, "# extension {}", extension_tag(field.extension()))?;
  for v in field.data() {
    writeln!(out, "{v:e}")?;
  }
  Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
  s.split_whitespace().map(|t| t.parse().map_err(|_| Error::Parse(format!("bad value `{t}`")))).collect()
}

pub fn read_field<R: BufRead>(input: R) -> Result<ScalarField> {
  let (mut lo, mut shape, mut spacing, mut ext) = (None, None, None, Extension::ZeroExtend);
  let mut data = Vec::new();
  for line in input.lines() {
    let line = line?;
    let line = line.trim();
    if line.is_empty() {
      continue;
    }
    if let Some(header) = line.strip_prefix('#') {
      let (key, rest) = header.trim().split_once(' ').unwrap_or((header.trim(), ""));
      match key {
        "lo" => lo = Some(parse_list(rest)?),
        "shape" => shape = Some(parse_list(rest)?),
        "spacing" => spacing = Some(parse_list(rest)?),
        "extension" => {
          ext = match rest.split_once(' ') {
            Some(("periodic", flags)) => Extension::Periodic(parse_list::<u8>(flags)?.iter().map(|&f| f != 0).collect()),
            None if rest == "zero" => Extension::ZeroExtend,
            _ => return Err(Error::Parse(format!("unknown extension `{rest}`"))),
          }
        },
        _ => {},
      }
      continue;
    }
    data.push(line.parse::<f64>().map_err(|_| Error::Parse(format!("bad sample `{line}`")))?);
  }
  let missing = |k: &str| Error::Parse(format!("missing `{k}` header"));
  let grid = Grid::new(lo.ok_or_else(|| missing("lo"))?, shape.ok_or_else(|| missing("shape"))?, spacing.ok_or_else(|| missing("spacing"))?)?;
  ScalarField::new(grid, data, ext)
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn roundtrip() {
    let g = Grid::lattice(vec![-2, 3], vec![5, 4], 8).unwrap();
    let f = ScalarField::from_fn(g, Extension::Periodic(vec![true, false]), |x| x[0].sin() * x[1]).unwrap();
    let mut buf = Vec::new();
    write_field(&f, &mut buf).unwrap();
    let back = read_field(buf.as_slice()).unwrap();
    assert_eq!(back.grid(), f.grid());
    assert_eq!(back.extension(), f.extension());
    assert_eq!(back.data(), f.data());
  }
}
