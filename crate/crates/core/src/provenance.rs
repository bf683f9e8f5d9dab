//! Content hashes that tie output artifacts to their inputs.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Effective settings of one run. The hash covers sorted `key=value` lines,
/// with input files represented by their content digests, so it is stable
/// across machines, paths and clocks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        let mut c = Self::default();
        c.set("command", command);
        c.set("tool_version", TOOL_VERSION);
        c
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.insert(key.to_string(), value.to_string());
        self
    }

    /// Records an input file by the SHA-256 of its bytes.
    pub fn input(&mut self, key: &str, bytes: &[u8]) -> &mut Self {
        self.set(&format!("input.{key}"), sha256_hex(bytes))
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    pub fn hash(&self) -> String {
        let mut canonical = String::new();
        for (k, v) in &self.entries {
            canonical.push_str(k);
            canonical.push('=');
            canonical.push_str(v);
            canonical.push('\n');
        }
        sha256_hex(canonical.as_bytes())
    }

    /// Entries plus `config_hash`, ready to embed in an artifact.
    pub fn provenance(&self) -> BTreeMap<String, String> {
        let mut p = self.entries.clone();
        p.insert("config_hash".into(), self.hash());
        p
    }
}
