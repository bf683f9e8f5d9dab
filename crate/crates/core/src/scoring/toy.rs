//! Small deterministic backends for tests, fixtures and dry runs.

use std::collections::HashMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::backend::{log_prob_via_head, whitespace_tokens, BackendError, HiddenStates, MaskedLm};

fn check_position(tokens: &[String], position: usize) -> Result<(), BackendError> {
    if position >= tokens.len() {
        return Err(BackendError::Position {
            position,
            len: tokens.len(),
        });
    }
    Ok(())
}

/// Every query returns `ln(1 / vocab_size)`.
#[derive(Debug, Clone)]
pub struct UniformBackend {
    vocab_size: usize,
}

impl UniformBackend {
    pub fn new(vocab_size: usize) -> Self {
        assert!(vocab_size >= 1, "vocabulary must be non-empty");
        Self { vocab_size }
    }
}

impl MaskedLm for UniformBackend {
    fn model_id(&self) -> String {
        format!("toy-uniform:{}", self.vocab_size)
    }

    fn tokenize(&self, text: &str) -> Result<Vec<String>, BackendError> {
        Ok(whitespace_tokens(text))
    }

    fn masked_log_prob(&self, tokens: &[String], position: usize) -> Result<f64, BackendError> {
        check_position(tokens, position)?;
        Ok((1.0 / self.vocab_size as f64).ln())
    }

    fn concurrent_queries(&self) -> bool {
        true
    }
}

const TABLE_MAGIC: &str = "# sosbias toy table v1";

/// Lookup-table backend keyed by (masked-context hash, position).
///
/// File layout:
///
/// ```text
/// # sosbias toy table v1
/// model_id<TAB>toy-table/fixture
/// default<TAB>-9.0          (optional)
/// 3fa1c0d2e4b5a697<TAB>2<TAB>-1.25
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct TableBackend {
    id: String,
    entries: HashMap<(String, usize), f64>,
    default: Option<f64>,
}

impl TableBackend {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            entries: HashMap::new(),
            default: None,
        }
    }

    pub fn with_default(mut self, log_prob: f64) -> Self {
        self.default = Some(log_prob);
        self
    }

    /// Hash of the token sequence with `position` masked. The masked token
    /// itself does not enter the key.
    pub fn context_key(tokens: &[String], position: usize) -> String {
        let mut hasher = Sha256::new();
        for (i, tok) in tokens.iter().enumerate() {
            if i > 0 {
                hasher.update([0x1f]);
            }
            if i == position {
                hasher.update([0x00]);
                hasher.update(b"MASK");
            } else {
                hasher.update(tok.as_bytes());
            }
        }
        hex::encode(&hasher.finalize()[..8])
    }

    pub fn insert(&mut self, tokens: &[String], position: usize, log_prob: f64) {
        self.entries
            .insert((Self::context_key(tokens, position), position), log_prob);
    }

    /// Inserts an entry for a whitespace-tokenized sentence.
    pub fn insert_sentence(&mut self, sentence: &str, position: usize, log_prob: f64) {
        self.insert(&whitespace_tokens(sentence), position, log_prob);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{TABLE_MAGIC}\nmodel_id\t{}\n", self.id);
        if let Some(d) = self.default {
            out.push_str(&format!("default\t{d:?}\n"));
        }
        let mut rows: Vec<_> = self.entries.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        for ((key, pos), lp) in rows {
            out.push_str(&format!("{key}\t{pos}\t{lp:?}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<TableBackend, BackendError> {
        let bad = |line: usize, msg: &str| BackendError::Other(format!("toy table line {line}: {msg}"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        if lines.next().map(|(_, l)| l) != Some(TABLE_MAGIC) {
            return Err(bad(1, "missing table header"));
        }
        let mut table = TableBackend::new("toy-table");
        for (line, raw) in lines {
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = raw.split('\t').collect();
            match f.as_slice() {
                ["model_id", id] => table.id = id.to_string(),
                ["default", v] => {
                    let v: f64 = v.parse().map_err(|_| bad(line, "bad default"))?;
                    if !(v.is_finite() && v <= 0.0) {
                        return Err(bad(line, "default log-probability must be finite and <= 0"));
                    }
                    table.default = Some(v);
                }
                [key, pos, lp] => {
                    let pos: usize = pos.parse().map_err(|_| bad(line, "bad position"))?;
                    let lp: f64 = lp.parse().map_err(|_| bad(line, "bad log-probability"))?;
                    if !(lp.is_finite() && lp <= 0.0) {
                        return Err(bad(line, "log-probability must be finite and <= 0"));
                    }
                    table.entries.insert((key.to_string(), pos), lp);
                }
                _ => return Err(bad(line, "expected `key<TAB>position<TAB>log_prob`")),
            }
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TableBackend, BackendError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Other(format!("reading {}: {e}", path.display())))?;
        TableBackend::parse(&text)
    }
}

impl MaskedLm for TableBackend {
    fn model_id(&self) -> String {
        self.id.clone()
    }

    fn tokenize(&self, text: &str) -> Result<Vec<String>, BackendError> {
        Ok(whitespace_tokens(text))
    }

    fn masked_log_prob(&self, tokens: &[String], position: usize) -> Result<f64, BackendError> {
        check_position(tokens, position)?;
        let key = Self::context_key(tokens, position);
        match self.entries.get(&(key.clone(), position)) {
            Some(lp) => Ok(*lp),
            None => self
                .default
                .ok_or(BackendError::MissingEntry { context: key, position }),
        }
    }

    fn concurrent_queries(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
enum Vocab {
    Words { index: HashMap<String, usize> },
    Hashed { buckets: usize },
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// A one-layer linear "transformer": the hidden state at position `i` is
/// `e_i + w * mean(e)` where `e` are the (possibly masked) input embeddings,
/// and the head is `log_softmax(W h + b)`.
///
/// It exposes hidden states, so it works with the debiasing wrapper.
#[derive(Debug, Clone)]
pub struct LinearMlm {
    id: String,
    vocab: Vocab,
    embeddings: Vec<Vec<f64>>,
    head: Vec<Vec<f64>>,
    bias: Vec<f64>,
    mask: Vec<f64>,
    context_weight: f64,
}

impl LinearMlm {
    /// Explicit vocabulary with hand-set weights. `embeddings`, `head` and
    /// `bias` are indexed by vocabulary position.
    pub fn with_vocabulary(
        id: impl Into<String>,
        vocab: &[&str],
        embeddings: Vec<Vec<f64>>,
        head: Vec<Vec<f64>>,
        bias: Vec<f64>,
        mask: Vec<f64>,
        context_weight: f64,
    ) -> Self {
        let d = mask.len();
        assert!(d > 0);
        assert_eq!(embeddings.len(), vocab.len());
        assert_eq!(head.len(), vocab.len());
        assert_eq!(bias.len(), vocab.len());
        assert!(embeddings.iter().chain(head.iter()).all(|row| row.len() == d));
        let index = vocab.iter().enumerate().map(|(i, w)| (w.to_string(), i)).collect();
        Self {
            id: id.into(),
            vocab: Vocab::Words { index },
            embeddings,
            head,
            bias,
            mask,
            context_weight,
        }
    }

    /// Tokens hash into `buckets` slots with seeded random embeddings and
    /// a tied output head, so no vocabulary file is needed.
    pub fn hashed(dim: usize, buckets: usize, seed: u64) -> Self {
        assert!(dim > 0 && buckets > 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let embeddings: Vec<Vec<f64>> = (0..buckets)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let mask = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self {
            id: format!("toy-linear:{dim}:{buckets}:{seed}"),
            vocab: Vocab::Hashed { buckets },
            head: embeddings.clone(),
            embeddings,
            bias: vec![0.0; buckets],
            mask,
            context_weight: 0.5,
        }
    }

    fn token_id(&self, token: &str) -> Result<usize, BackendError> {
        match &self.vocab {
            Vocab::Words { index } => index.get(token).copied().ok_or_else(|| BackendError::UnknownToken {
                token: token.to_string(),
            }),
            Vocab::Hashed { buckets } => Ok((fnv1a(token.as_bytes()) % *buckets as u64) as usize),
        }
    }
}

impl MaskedLm for LinearMlm {
    fn model_id(&self) -> String {
        self.id.clone()
    }

    fn tokenize(&self, text: &str) -> Result<Vec<String>, BackendError> {
        Ok(whitespace_tokens(text))
    }

    fn masked_log_prob(&self, tokens: &[String], position: usize) -> Result<f64, BackendError> {
        log_prob_via_head(self, tokens, position)
    }

    fn concurrent_queries(&self) -> bool {
        true
    }

    fn hidden_states(&self) -> Option<&dyn HiddenStates> {
        Some(self)
    }
}

impl HiddenStates for LinearMlm {
    fn hidden_size(&self) -> usize {
        self.mask.len()
    }

    fn encode(&self, tokens: &[String], mask: Option<usize>) -> Result<Vec<Vec<f64>>, BackendError> {
        if let Some(p) = mask {
            check_position(tokens, p)?;
        }
        let d = self.hidden_size();
        let inputs = tokens
            .iter()
            .enumerate()
            .map(|(i, tok)| {
                if Some(i) == mask {
                    Ok(self.mask.clone())
                } else {
                    self.token_id(tok).map(|id| self.embeddings[id].clone())
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut context = vec![0.0; d];
        for e in &inputs {
            for (c, x) in context.iter_mut().zip(e) {
                *c += x;
            }
        }
        let n = inputs.len().max(1) as f64;
        Ok(inputs
            .into_iter()
            .map(|e| {
                e.iter()
                    .zip(&context)
                    .map(|(x, c)| x + self.context_weight * c / n)
                    .collect()
            })
            .collect())
    }

    fn head_log_prob(&self, hidden: &[f64], target: &str) -> Result<f64, BackendError> {
        if hidden.len() != self.hidden_size() {
            return Err(BackendError::Dimension {
                expected: self.hidden_size(),
                found: hidden.len(),
            });
        }
        let target = self.token_id(target)?;
        let logits: Vec<f64> = self
            .head
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| w.iter().zip(hidden).map(|(a, h)| a * h).sum::<f64>() + b)
            .collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
        Ok((logits[target] - log_z).min(0.0))
    }
}
