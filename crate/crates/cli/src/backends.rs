use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use sosbias::provenance::sha256_hex;
use sosbias::scoring::process::ProcessBackend;
use sosbias::scoring::toy::{LinearMlm, TableBackend, UniformBackend};
use sosbias::scoring::MaskedLm;

/// Environment variable overriding the location of the transformer bridge.
pub const HF_SCRIPT_ENV: &str = "SOSBIAS_HF_SCRIPT";

pub struct Resolved {
    pub backend: Box<dyn MaskedLm>,
    /// Spec with file paths replaced by content digests.
    pub canonical: String,
}

fn hf_script() -> PathBuf {
    std::env::var_os(HF_SCRIPT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scripts/hf_mlm_backend.py")))
}

/// Backend specs:
///
/// * `toy-uniform:V`: every token has probability `1/V`
/// * `toy-table:PATH`: lookup table file
/// * `toy-linear:DIM:BUCKETS[:SEED]`: seeded linear model with hidden states
/// * `hf:MODEL`: a Hugging Face masked LM through `scripts/hf_mlm_backend.py`
/// * `process:PROGRAM ARGS...`: any program speaking the JSON-lines protocol
pub fn resolve(spec: &str, default_seed: u64) -> Result<Resolved> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let number = |s: &str, what: &str| -> Result<u64> {
        s.parse().with_context(|| format!("backend {spec:?}: bad {what} {s:?}"))
    };
    match kind {
        "toy-uniform" => {
            let v = number(rest, "vocabulary size")?;
            if v < 1 {
                bail!("backend {spec:?}: vocabulary size must be positive");
            }
            Ok(Resolved {
                backend: Box::new(UniformBackend::new(v as usize)),
                canonical: spec.to_string(),
            })
        }
        "toy-table" => {
            let bytes = std::fs::read(rest).with_context(|| format!("reading table backend {rest}"))?;
            let text = String::from_utf8(bytes.clone()).context("table backend is not UTF-8")?;
            let table = TableBackend::parse(&text).with_context(|| format!("parsing table backend {rest}"))?;
            Ok(Resolved {
                backend: Box::new(table),
                canonical: format!("toy-table:sha256={}", sha256_hex(&bytes)),
            })
        }
        "toy-linear" => {
            let parts: Vec<&str> = rest.split(':').collect();
            let (dim, buckets, seed) = match parts.as_slice() {
                [d, b] => (number(d, "dimension")?, number(b, "bucket count")?, default_seed),
                [d, b, s] => (number(d, "dimension")?, number(b, "bucket count")?, number(s, "seed")?),
                _ => bail!("backend {spec:?}: expected toy-linear:DIM:BUCKETS[:SEED]"),
            };
            if dim == 0 || buckets < 2 {
                bail!("backend {spec:?}: need DIM >= 1 and BUCKETS >= 2");
            }
            Ok(Resolved {
                backend: Box::new(LinearMlm::hashed(dim as usize, buckets as usize, seed)),
                canonical: format!("toy-linear:{dim}:{buckets}:{seed}"),
            })
        }
        "hf" if !rest.is_empty() => {
            let script = hf_script();
            let args = vec![script.display().to_string(), "--model".to_string(), rest.to_string()];
            let backend = ProcessBackend::spawn("python3", &args)
                .with_context(|| format!("starting transformer bridge for {rest}"))?;
            Ok(Resolved {
                backend: Box::new(backend),
                canonical: spec.to_string(),
            })
        }
        "process" if !rest.trim().is_empty() => {
            let mut words = rest.split_whitespace().map(str::to_string);
            let program = words.next().expect("non-empty command");
            let args: Vec<String> = words.collect();
            let backend = ProcessBackend::spawn(&program, &args)?;
            let id = backend.model_id();
            Ok(Resolved {
                backend: Box::new(backend),
                canonical: format!("process:{id}"),
            })
        }
        _ => bail!(
            "unknown backend {spec:?}; expected toy-uniform:V, toy-table:PATH, toy-linear:DIM:BUCKETS[:SEED], hf:MODEL or process:COMMAND"
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_specs() {
        let r = resolve("toy-uniform:10", 0).unwrap();
        assert_eq!(r.backend.model_id(), "toy-uniform:10");
        let r = resolve("toy-linear:4:16", 9).unwrap();
        assert_eq!(r.canonical, "toy-linear:4:16:9");
        assert!(r.backend.hidden_states().is_some());
        for bad in [
            "toy-uniform:0",
            "toy-uniform:x",
            "toy-linear:4",
            "toy-linear:0:5",
            "nope",
            "hf:",
            "toy-table:/no/such/file",
        ] {
            assert!(resolve(bad, 0).is_err(), "{bad} should fail");
        }
    }
}
