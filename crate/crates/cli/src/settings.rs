use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

/// Keys a `--config` file may set. Command-line flags win over the file.
pub const KNOWN_KEYS: &[&str] = &[
    "seed",
    "out-dir",
    "backend",
    "lexicon",
    "templates",
    "dataset",
    "external",
    "attribute",
    "group",
    "corpus",
    "k",
    "pooling",
    "projection-site",
    "cap",
    "subspace",
    "predictions",
    "pairings",
    "threshold",
    "model",
    "rows",
    "cols",
    "sos-slice",
];

/// `key = value` lines; `#` starts a comment.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        ConfigFile::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected key = value", i + 1);
            };
            let (k, v) = (k.trim().replace('_', "-"), v.trim());
            if !KNOWN_KEYS.contains(&k.as_str()) {
                bail!("line {}: unknown key {k:?}", i + 1);
            }
            if values.insert(k.clone(), v.to_string()).is_some() {
                bail!("line {}: key {k:?} set twice", i + 1);
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(KNOWN_KEYS.contains(&key), "unregistered key {key}");
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if given, else the config value, else `None`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key {key}: {e}")),
        }
    }

    pub fn require<T>(&self, flag: Option<T>, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.pick(flag, key)?
            .with_context(|| format!("missing --{key} (flag or config key)"))
    }
}
