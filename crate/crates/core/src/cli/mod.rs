//! Batch experiment harness: a TOML configuration selects a model, a form
//! builder and a pipeline; results go to CSV and JSON files in an output
//! directory.
//!
//! Files written to the output directory:
//! - `values.csv`: per-pipeline values (see the README for the columns),
//! - `class_report.json`: classes, certificates and stage metrics,
//! - `convergence.csv`: `N,residual,ratio` across `N` and `2N`,
//! - `summary.json`: every named check with its pass/fail state.
//!
//! Exit codes: 0 when every check passes, 1 when one fails (its name is
//! printed), 2 for configuration errors.

mod config;
mod output;
mod run;

use std::{ffi::OsString, path::PathBuf};

use clap::Parser;

pub use config::{apply_overrides, CellWeight, ExperimentConfig, FormSpec, ModelKind, Pipeline};
pub use output::{emit_convergence, Check, Table};
pub use run::{assertion_name, run, target_functions, top_forms, Outcome, CONVERGENCE_RATIO};

use crate::error::{Error, Result};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "BDR_THREADS";
/// Output directory when neither `--out` nor `out` is given.
pub const DEFAULT_OUT: &str = "bdr-out";

#[derive(Debug, Parser)]
#[command(name = "bdr", about = "Bounded de Rham experiments: integration map, Stokes, primitives, isomorphism pipelines")]
struct Args {
  /// TOML experiment configuration.
  #[arg(long)]
  config:    PathBuf,
  /// Output directory (overrides `out` in the configuration).
  #[arg(long)]
  out:       Option<PathBuf>,
  /// `key=value` overrides with dotted keys, e.g. `form.seed=4`.
  #[arg(long = "override", value_name = "KEY=VALUE")]
  overrides: Vec<String>,
}

fn thread_pool() -> Result<rayon::ThreadPool> {
  let mut builder = rayon::ThreadPoolBuilder::new();
  if let Ok(raw) = std::env::var(THREADS_ENV) {
    let n: usize = raw
      .trim()
      .parse()
      .ok()
      .filter(|&n| n > 0)
      .ok_or_else(|| Error::Config(format!("{THREADS_ENV}={raw} is not a positive integer")))?;
    builder = builder.num_threads(n);
  }
  builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Run a configuration and write its artifacts to `out`.
pub fn execute(config: &ExperimentConfig, out: &std::path::Path) -> Result<Outcome> {
  let outcome = run(config)?;
  output::write(out, "values.csv", &outcome.values.to_csv())?;
  output::write(out, "convergence.csv", &emit_convergence(&outcome.convergence))?;
  let report = serde_json::to_string_pretty(&outcome.report).map_err(|e| Error::Parse(e.to_string()))?;
  output::write(out, "class_report.json", &(report + "\n"))?;
  let summary = output::Summary {
    pipeline:   config.pipeline.name(),
    model:      config.model().name(),
    resolution: config.resolution,
    radius:     config.radius,
    passed:     outcome.passed(),
    checks:     &outcome.checks,
  };
  let summary = serde_json::to_string_pretty(&summary).map_err(|e| Error::Parse(e.to_string()))?;
  output::write(out, "summary.json", &(summary + "\n"))?;
  Ok(outcome)
}

/// Command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
  I: IntoIterator<Item = T>,
  T: Into<OsString> + Clone,
{
  let args = match Args::try_parse_from(args) {
    Ok(a) => a,
    Err(e) => {
      let _ = e.print();
      return if e.use_stderr() { 2 } else { 0 };
    },
  };
  let prepared = ExperimentConfig::load(&args.config, &args.overrides).and_then(|c| Ok((c, thread_pool()?)));
  let (config, pool) = match prepared {
    Ok(p) => p,
    Err(e) => {
      eprintln!("error: {e}");
      return 2;
    },
  };
  let out = args.out.or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
  match pool.install(|| execute(&config, &out)) {
    Ok(outcome) => {
      for c in &outcome.checks {
        println!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
      }
      match outcome.first_failure() {
        None => 0,
        Some(c) => {
          eprintln!("assertion failed: {} ({})", c.name, c.detail);
          1
        },
      }
    },
    Err(e) => match assertion_name(&e) {
      Some(name) => {
        eprintln!("assertion failed: {name}: {e}");
        1
      },
      None => {
        eprintln!("error: {e}");
        2
      },
    },
  }
}
