//! `meta.json` and `failure.json`.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ConfigError, ExperimentConfig};
use crate::experiments::Outcome;

/// Environment variable overriding `quad.tol`.
pub const QUAD_TOL_ENV: &str = "MICROPOLAR_QUAD_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    CheckFailed,
    Error,
    ConfigError,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::ConfigError => 2,
            Status::Error => 3,
        }
    }
}

pub struct RunInfo<'a> {
    pub experiment: &'a str,
    pub config: Option<&'a ExperimentConfig>,
    pub wall_time_s: f64,
    pub threads: usize,
    pub quad_tol_override: Option<f64>,
}

fn write_json(path: &Path, v: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(v).expect("json values serialise");
    fs::write(path, text + "\n")
}

/// Writes `meta.json`, plus `failure.json` unless the status is `Ok`.
pub fn write_reports(
    dir: &Path,
    info: &RunInfo,
    status: Status,
    outcome: Option<&Outcome>,
    error: Option<&str>,
    config_errors: &[ConfigError],
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let meta = json!({
        "tool": "micropolar",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": info.experiment,
        "status": status,
        "seed": info.config.map(|c| c.seed),
        "data_seed": info.config.map(|c| c.data.seed),
        "threads": info.threads,
        "wall_time_s": info.wall_time_s,
        "quad_tol_override": info.quad_tol_override,
        "config": info.config,
        "effective_config": info.config.map(|c| c.to_config_string()),
        "checks": outcome.map(|o| &o.checks),
        "summary": outcome.map(|o| &o.summary),
        "outputs": outcome.map(|o| &o.outputs),
        "error": error,
        "config_errors": config_errors,
    });
    write_json(&dir.join("meta.json"), &meta)?;
    if status != Status::Ok {
        let failed: Vec<_> = outcome
            .map(|o| o.checks.iter().filter(|c| !c.passed).collect())
            .unwrap_or_default();
        let failure = json!({
            "experiment": info.experiment,
            "status": status,
            "exit_code": status.exit_code(),
            "failed_checks": failed,
            "error": error,
            "config_errors": config_errors,
        });
        write_json(&dir.join("failure.json"), &failure)?;
    }
    Ok(())
}
