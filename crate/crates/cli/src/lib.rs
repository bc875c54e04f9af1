//! Reproducible batch experiments over `idinfo-core`.
//!
//! A run is fully determined by its JSON config and seed. Configs are checked
//! against the bundled schema and then parsed into typed parameters before
//! anything is computed.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod table;
pub mod verify;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

pub use config::{load_config, schema_text, Config, Format, Kind, Pair, Target};
pub use error::CliError;
pub use experiments::{Experiment, Outcome};
pub use table::{format_g17, Cell, Table};
pub use verify::{run_pair, Check, Report};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything a run writes in JSON form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub version: &'static str,
    pub name: String,
    pub seed: u64,
    pub config: Value,
    pub result: Value,
    pub duration_ms: u64,
}

/// A finished run: the record plus its CSV table, and for verifications
/// whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub record: ResultRecord,
    pub table: Table,
    pub passed: Option<bool>,
}

impl Run {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.record)
                .map(|s| s + "\n")
                .map_err(|e| CliError::Failed(e.to_string())),
            Format::Csv => self.table.to_csv(),
        }
    }
}

fn finish(cfg: &Config, started: Instant, outcome: Outcome, passed: Option<bool>) -> Run {
    Run {
        record: ResultRecord {
            version: VERSION,
            name: cfg.name(),
            seed: cfg.seed,
            config: cfg.raw.clone(),
            result: outcome.result,
            duration_ms: started.elapsed().as_millis() as u64,
        },
        table: outcome.table,
        passed,
    }
}

/// Runs an experiment config.
pub fn run(cfg: &Config) -> Result<Run, CliError> {
    let Target::Experiment(kind) = cfg.target else {
        return Err(CliError::invalid(
            "pair",
            "this is a verification config; use `verify`",
        ));
    };
    let started = Instant::now();
    let experiment = Experiment::prepare(kind, &cfg.params)?;
    let outcome = experiment.run(cfg.seed)?;
    Ok(finish(cfg, started, outcome, None))
}

/// Runs a verification config. A failed check is reported through
/// [`Run::passed`], not as an error.
pub fn verify(cfg: &Config) -> Result<Run, CliError> {
    let Target::Verify(pair) = cfg.target else {
        return Err(CliError::invalid(
            "kind",
            "config names no analytic/oracle pair",
        ));
    };
    let started = Instant::now();
    let report = run_pair(pair, &cfg.params, cfg.seed)?;
    Ok(finish(cfg, started, report.outcome(), Some(report.pass)))
}

/// Where output goes: an explicit path, else `<dir>/<name>-<seed>.<ext>`
/// under the default directory, else stdout (`None`).
pub fn destination(
    cli_out: Option<&Path>,
    cfg: &Config,
    default_dir: Option<&Path>,
    format: Format,
) -> Option<PathBuf> {
    cli_out
        .map(Path::to_path_buf)
        .or_else(|| cfg.out.clone())
        .or_else(|| {
            default_dir.map(|d| {
                d.join(format!(
                    "{}-{}.{}",
                    cfg.name(),
                    cfg.seed,
                    format.extension()
                ))
            })
        })
}
