use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance block attached to every report under the `"manifest"` key.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command_line: Vec<String>,
    pub seeds: Vec<u64>,
    pub inputs: Vec<InputDigest>,
    pub started_unix_ms: u128,
    pub wall_time_seconds: f64,
}

pub struct ManifestBuilder {
    command_line: Vec<String>,
    seeds: Vec<u64>,
    inputs: Vec<InputDigest>,
    started_unix_ms: u128,
    clock: Instant,
}

impl ManifestBuilder {
    pub fn start(command_line: Vec<String>) -> Self {
        let started_unix_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        Self {
            command_line,
            seeds: Vec::new(),
            inputs: Vec::new(),
            started_unix_ms,
            clock: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) {
        self.seeds.push(seed);
    }

    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push(InputDigest {
            path: path.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
    }

    pub fn finish(&self) -> RunManifest {
        RunManifest {
            tool: env!("CARGO_BIN_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command_line: self.command_line.clone(),
            seeds: self.seeds.clone(),
            inputs: self
                .inputs
                .iter()
                .map(|i| InputDigest {
                    path: i.path.clone(),
                    sha256: i.sha256.clone(),
                })
                .collect(),
            started_unix_ms: self.started_unix_ms,
            wall_time_seconds: self.clock.elapsed().as_secs_f64(),
        }
    }
}
