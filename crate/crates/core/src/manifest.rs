//! Provenance record embedded in every artifact the CLI writes.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub version: &'static str,
    /// SHA-256 of the input game document, hex encoded.
    pub input_sha256: Option<String>,
    pub started_ms: u128,
    pub finished_ms: Option<u128>,
}

pub fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(subcommand: &str, argv: Vec<String>) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            argv,
            version: env!("CARGO_PKG_VERSION"),
            input_sha256: None,
            started_ms: now_ms(),
            finished_ms: None,
        }
    }

    pub fn with_input(mut self, bytes: &[u8]) -> Self {
        self.input_sha256 = Some(sha256_hex(bytes));
        self
    }

    pub fn finish(&mut self) {
        self.finished_ms = Some(now_ms());
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("manifest serializes")
    }

    /// Single-line form for CSV comment headers.
    pub fn to_line(&self) -> String {
        format!("manifest {}", serde_json::to_string(self).expect("manifest serializes"))
    }
}
