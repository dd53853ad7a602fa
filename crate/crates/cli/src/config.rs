//! Resolved experiment configuration and its content hash.
//!
//! Every artifact embeds a short hash of the configuration that produced
//! it, computed over the *resolved* inputs (canonical kernel text rather
//! than a file path), so that identical experiments hash identically no
//! matter where their inputs live. The output directory is deliberately
//! excluded: moving the artifacts must not change their bytes.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct ExperimentConfig {
    pub subcommand: &'static str,
    /// Canonical kernel text, when the experiment takes a kernel.
    pub kernel_text: Option<String>,
    /// Initial configuration literal, when the experiment takes one.
    pub u0: Option<String>,
    pub master_seed: u64,
    /// Remaining scalar parameters, keyed by flag name.
    pub params: BTreeMap<&'static str, String>,
}

impl ExperimentConfig {
    pub fn new(subcommand: &'static str, master_seed: u64) -> Self {
        ExperimentConfig {
            subcommand,
            kernel_text: None,
            u0: None,
            master_seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with_kernel(mut self, text: impl Into<String>) -> Self {
        self.kernel_text = Some(text.into());
        self
    }

    pub fn with_u0(mut self, u0: impl Into<String>) -> Self {
        self.u0 = Some(u0.into());
        self
    }

    pub fn with_param(mut self, key: &'static str, value: impl ToString) -> Self {
        self.params.insert(key, value.to_string());
        self
    }

    /// First 16 hex characters of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}
