//! Text layout for forms: a `# form n k` line, then one field block per
//! multi-index in lexicographic order, each introduced by `# component ...`.

use std::io::{BufRead, Write};

use crate::{
  error::{Error, Result},
  fields::io::{read_field, write_field},
  forms::{multi_indices, DifferentialForm},
};

pub fn write_form<W: Write>(form: &DifferentialForm, mut out: W) -> Result<()> {
  writeln!(out, "# form {} {}", form.dims(), form.degree())?;
  for (index, c) in multi_indices(form.dims(), form.degree()).iter().zip(form.components()) {
    writeln!(out, "# component {}", index.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "))?;
    write_field(c, &mut out)?;
  }
  Ok(())
}

pub fn read_form<R: BufRead>(input: R) -> Result<DifferentialForm> {
  let mut header = None;
  let mut blocks: Vec<Vec<u8>> = Vec::new();
  for line in input.lines() {
    let line = line?;
    if let Some(rest) = line.trim().strip_prefix("# form ") {
      let v: Vec<usize> =
        rest.split_whitespace().map(|t| t.parse().map_err(|_| Error::Parse(format!("bad form header `{rest}`")))).collect::<Result<_>>()?;
      header = Some((v[0], v[1]));
    } else if line.trim().starts_with("# component") {
      blocks.push(Vec::new());
    } else if let Some(b) = blocks.last_mut() {
      b.extend_from_slice(line.as_bytes());
      b.push(b'\n');
    }
  }
  let (n, k) = header.ok_or_else(|| Error::Parse("missing form header".into()))?;
  let components = blocks.iter().map(|b| read_field(b.as_slice())).collect::<Result<_>>()?;
  DifferentialForm::new(n, k, components)
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::fields::{Extension, Grid, ScalarField};

  #[test]
  fn roundtrip() {
    let g = Grid::unit_box(2, 8).unwrap();
    let a = ScalarField::from_fn(g.clone(), Extension::ZeroExtend, |x| x[0] * x[1]).unwrap();
    let b = ScalarField::from_fn(g, Extension::ZeroExtend, |x| x[0] - 0.25).unwrap();
    let w = DifferentialForm::new(2, 1, vec![a, b]).unwrap();
    let mut buf = Vec::new();
    write_form(&w, &mut buf).unwrap();
    let back = read_form(buf.as_slice()).unwrap();
    assert_eq!(back.degree(), 1);
    assert_eq!(back.components()[1].data(), w.components()[1].data());
  }
}
