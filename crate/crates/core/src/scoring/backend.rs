use thiserror::Error;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("position {position} is out of range for a {len}-token sequence")]
    Position { position: usize, len: usize },
    #[error("token {token:?} is outside the model vocabulary")]
    UnknownToken { token: String },
    #[error("no table entry for context {context} at position {position}")]
    MissingEntry { context: String, position: usize },
    #[error("backend returned invalid log-probability {value} at position {position}")]
    InvalidLogProb { value: f64, position: usize },
    #[error("hidden-state dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("backend process: {0}")]
    Process(String),
    #[error("{0}")]
    Other(String),
}

/// A masked language model queried one masked position at a time.
///
/// Implementations must be deterministic and return finite log-probabilities
/// (natural log) that are `<= 0`.
pub trait MaskedLm: Send + Sync {
    fn model_id(&self) -> String;

    fn tokenize(&self, text: &str) -> Result<Vec<String>, BackendError>;

    /// Log-probability of `tokens[position]` with that single position
    /// masked and every other token visible.
    fn masked_log_prob(&self, tokens: &[String], position: usize) -> Result<f64, BackendError>;

    /// Whether `masked_log_prob` may be called from several threads at once.
    fn concurrent_queries(&self) -> bool {
        false
    }

    /// Access to pre-head hidden states, when the model exposes them.
    fn hidden_states(&self) -> Option<&dyn HiddenStates> {
        None
    }
}

/// Final-layer hidden states plus the output head that maps them to
/// token log-probabilities.
pub trait HiddenStates: Send + Sync {
    fn hidden_size(&self) -> usize;

    /// One hidden vector per token. When `mask` is set, that position is
    /// replaced by the model's mask token before encoding.
    fn encode(&self, tokens: &[String], mask: Option<usize>) -> Result<Vec<Vec<f64>>, BackendError>;

    /// Log-probability the output head assigns to `target` from `hidden`.
    fn head_log_prob(&self, hidden: &[f64], target: &str) -> Result<f64, BackendError>;
}

impl<T: MaskedLm + ?Sized> MaskedLm for &T {
    fn model_id(&self) -> String {
        (**self).model_id()
    }
    fn tokenize(&self, text: &str) -> Result<Vec<String>, BackendError> {
        (**self).tokenize(text)
    }
    fn masked_log_prob(&self, tokens: &[String], position: usize) -> Result<f64, BackendError> {
        (**self).masked_log_prob(tokens, position)
    }
    fn concurrent_queries(&self) -> bool {
        (**self).concurrent_queries()
    }
    fn hidden_states(&self) -> Option<&dyn HiddenStates> {
        (**self).hidden_states()
    }
}

impl<T: MaskedLm + ?Sized> MaskedLm for Box<T> {
    fn model_id(&self) -> String {
        (**self).model_id()
    }
    fn tokenize(&self, text: &str) -> Result<Vec<String>, BackendError> {
        (**self).tokenize(text)
    }
    fn masked_log_prob(&self, tokens: &[String], position: usize) -> Result<f64, BackendError> {
        (**self).masked_log_prob(tokens, position)
    }
    fn concurrent_queries(&self) -> bool {
        (**self).concurrent_queries()
    }
    fn hidden_states(&self) -> Option<&dyn HiddenStates> {
        (**self).hidden_states()
    }
}

impl<T: MaskedLm + ?Sized> MaskedLm for std::sync::Arc<T> {
    fn model_id(&self) -> String {
        (**self).model_id()
    }
    fn tokenize(&self, text: &str) -> Result<Vec<String>, BackendError> {
        (**self).tokenize(text)
    }
    fn masked_log_prob(&self, tokens: &[String], position: usize) -> Result<f64, BackendError> {
        (**self).masked_log_prob(tokens, position)
    }
    fn concurrent_queries(&self) -> bool {
        (**self).concurrent_queries()
    }
    fn hidden_states(&self) -> Option<&dyn HiddenStates> {
        (**self).hidden_states()
    }
}

/// Masked-token log-probability computed through the hidden-state path.
pub fn log_prob_via_head(model: &dyn HiddenStates, tokens: &[String], position: usize) -> Result<f64, BackendError> {
    if position >= tokens.len() {
        return Err(BackendError::Position {
            position,
            len: tokens.len(),
        });
    }
    let hidden = model.encode(tokens, Some(position))?;
    model.head_log_prob(&hidden[position], &tokens[position])
}

/// Lowercased whitespace tokenization used by the toy backends.
pub fn whitespace_tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}
