use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use totnet::Conventions;

use crate::error::{CliError, CliResult};

/// Ties an output file to the configuration that produced it.
///
/// Only `config` feeds `config_hash`; timestamps, wall clock and worker
/// count are informational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub conventions: Conventions,
    pub config_hash: String,
    pub payload_hash: Option<String>,
    pub total_trials: Option<u64>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub wall_clock_secs: f64,
    pub workers: Option<usize>,
}

pub fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new<C: Serialize>(
        command: &str,
        config: &C,
        seed: Option<u64>,
        conventions: Conventions,
    ) -> CliResult<Self> {
        let config = serde_json::to_value(config).map_err(|e| CliError::Data(e.to_string()))?;
        let config_hash = sha256_hex(config.to_string().as_bytes());
        let now = now_ms();
        Ok(Self {
            tool: "totnet".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            seed,
            conventions,
            config_hash,
            payload_hash: None,
            total_trials: None,
            started_unix_ms: now,
            finished_unix_ms: now,
            wall_clock_secs: 0.0,
            workers: None,
        })
    }

    pub fn finish(&mut self, payload: &[u8]) {
        self.payload_hash = Some(sha256_hex(payload));
        self.finished_unix_ms = now_ms();
        self.wall_clock_secs = (self.finished_unix_ms - self.started_unix_ms) as f64 / 1000.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_only_on_config() {
        let a = RunManifest::new("x", &[1, 2, 3], Some(1), Conventions::default()).unwrap();
        std::thread::sleep(std::time::Duration::from_millis(2));
        let b = RunManifest::new("x", &[1, 2, 3], Some(1), Conventions::default()).unwrap();
        let c = RunManifest::new("x", &[1, 2, 4], Some(1), Conventions::default()).unwrap();
        assert_eq!(a.config_hash, b.config_hash);
        assert_ne!(a.config_hash, c.config_hash);
        assert_eq!(a.config_hash.len(), 64);
    }
}
