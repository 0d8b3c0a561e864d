//! Flag / config-file / default precedence.
//!
//! A config file is flat TOML: one `key = value` per line using the long
//! flag names with dashes replaced by underscores. Flags win over the file,
//! the file wins over built-in defaults. `TOTNET_THREADS` caps the worker
//! count whatever the other sources say.

use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const THREADS_ENV: &str = "TOTNET_THREADS";

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub reference: Option<String>,
    pub diagonal: Option<String>,
    pub tie_policy: Option<String>,
    pub cue: Option<String>,
    pub nd: Option<usize>,
    pub trials: Option<u64>,
    pub series: Option<u32>,
    pub seed: Option<u64>,
    pub target: Option<String>,
    pub threads: Option<usize>,
    pub nk: Option<usize>,
    pub neuron_loss_pct: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Flag value, else file value, else default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Requested worker count capped by the environment.
pub fn worker_count(requested: Option<usize>) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let requested = requested.unwrap_or(available).max(1);
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(cap) if cap >= 1 => requested.min(cap),
        _ => requested,
    }
}
