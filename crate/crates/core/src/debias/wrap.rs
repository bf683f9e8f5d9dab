use std::fmt;
use std::str::FromStr;

use super::{BiasSubspace, DebiasError, PROJECTION_SITE};
use crate::scoring::backend::{log_prob_via_head, BackendError, HiddenStates, MaskedLm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pooling {
    #[default]
    Mean,
    FirstToken,
}

impl Pooling {
    pub fn as_str(self) -> &'static str {
        match self {
            Pooling::Mean => "mean",
            Pooling::FirstToken => "first_token",
        }
    }
}

impl fmt::Display for Pooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pooling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(Pooling::Mean),
            "first_token" | "first" | "cls" => Ok(Pooling::FirstToken),
            other => Err(format!("unknown pooling mode {other:?}")),
        }
    }
}

/// Where a [`DebiasedBackend`] removes the subspace.
///
/// Both sites project every final hidden state, so pooled sentence
/// representations are debiased either way. Only `HiddenStates` also feeds
/// the projected states to the output head; with `SentenceRepresentation`
/// masked-token log-probs are those of the wrapped model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionSite {
    #[default]
    HiddenStates,
    SentenceRepresentation,
}

impl ProjectionSite {
    pub fn as_str(self) -> &'static str {
        match self {
            ProjectionSite::HiddenStates => PROJECTION_SITE,
            ProjectionSite::SentenceRepresentation => "sentence_representation_only",
        }
    }
}

impl fmt::Display for ProjectionSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProjectionSite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            PROJECTION_SITE | "hidden_states" => Ok(ProjectionSite::HiddenStates),
            "sentence_representation_only" | "sentence_representation" => Ok(ProjectionSite::SentenceRepresentation),
            other => Err(format!("unknown projection site {other:?}")),
        }
    }
}

/// Maps a sentence to a fixed-size representation.
pub trait SentenceEncoder: Sync {
    fn dim(&self) -> usize;

    fn encode(&self, text: &str) -> Result<Vec<f64>, BackendError>;

    fn encode_batch(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, BackendError> {
        texts.iter().map(|t| self.encode(t)).collect()
    }
}

/// Pools the final hidden states of an unmasked sentence.
pub struct PooledEncoder<'a> {
    backend: &'a dyn MaskedLm,
    hidden: &'a dyn HiddenStates,
    pooling: Pooling,
}

impl<'a> PooledEncoder<'a> {
    pub fn new(backend: &'a dyn MaskedLm, pooling: Pooling) -> Result<Self, DebiasError> {
        let hidden = backend
            .hidden_states()
            .ok_or_else(|| DebiasError::NoHiddenStates(backend.model_id()))?;
        Ok(Self {
            backend,
            hidden,
            pooling,
        })
    }

    pub fn pooling(&self) -> Pooling {
        self.pooling
    }
}

impl SentenceEncoder for PooledEncoder<'_> {
    fn dim(&self) -> usize {
        self.hidden.hidden_size()
    }

    fn encode(&self, text: &str) -> Result<Vec<f64>, BackendError> {
        let tokens = self.backend.tokenize(text)?;
        if tokens.is_empty() {
            return Err(BackendError::Other(format!("{text:?} has no tokens")));
        }
        let states = self.hidden.encode(&tokens, None)?;
        let d = self.dim();
        match self.pooling {
            Pooling::FirstToken => Ok(states[0].clone()),
            Pooling::Mean => {
                let mut out = vec![0.0; d];
                for row in &states {
                    for (o, x) in out.iter_mut().zip(row) {
                        *o += x;
                    }
                }
                let n = states.len() as f64;
                Ok(out.into_iter().map(|x| x / n).collect())
            }
        }
    }
}

/// One representation per text, in input order.
pub fn embed(texts: &[&str], encoder: &dyn SentenceEncoder) -> Result<Vec<Vec<f64>>, DebiasError> {
    let reps = encoder.encode_batch(texts)?;
    let d = encoder.dim();
    if d == 0 {
        return Err(DebiasError::Dimension { expected: 1, found: 0 });
    }
    for r in &reps {
        if r.len() != d {
            return Err(DebiasError::Dimension {
                expected: d,
                found: r.len(),
            });
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(DebiasError::NonFinite);
        }
    }
    Ok(reps)
}

/// A backend whose final hidden states have the bias subspace removed at
/// every position; by default before the output head.
pub struct DebiasedBackend<B> {
    inner: B,
    subspace: BiasSubspace,
    site: ProjectionSite,
}

/// Wraps `inner`; fails when it has no hidden states or the dimensions differ.
pub fn debiased_backend<B: MaskedLm>(inner: B, subspace: BiasSubspace) -> Result<DebiasedBackend<B>, DebiasError> {
    let d = inner
        .hidden_states()
        .ok_or_else(|| DebiasError::NoHiddenStates(inner.model_id()))?
        .hidden_size();
    if d != subspace.dim {
        return Err(DebiasError::Dimension {
            expected: d,
            found: subspace.dim,
        });
    }
    Ok(DebiasedBackend {
        inner,
        subspace,
        site: ProjectionSite::default(),
    })
}

impl<B: MaskedLm> DebiasedBackend<B> {
    pub fn with_site(mut self, site: ProjectionSite) -> Self {
        self.site = site;
        self
    }

    pub fn site(&self) -> ProjectionSite {
        self.site
    }

    pub fn subspace(&self) -> &BiasSubspace {
        &self.subspace
    }

    pub fn inner(&self) -> &B {
        &self.inner
    }

    fn inner_states(&self) -> &dyn HiddenStates {
        self.inner.hidden_states().expect("checked at construction")
    }
}

impl<B: MaskedLm> MaskedLm for DebiasedBackend<B> {
    fn model_id(&self) -> String {
        match self.site {
            ProjectionSite::HiddenStates => format!("{}+debiased(k={})", self.inner.model_id(), self.subspace.k()),
            site => format!(
                "{}+debiased(k={},site={site})",
                self.inner.model_id(),
                self.subspace.k()
            ),
        }
    }

    fn tokenize(&self, text: &str) -> Result<Vec<String>, BackendError> {
        self.inner.tokenize(text)
    }

    fn masked_log_prob(&self, tokens: &[String], position: usize) -> Result<f64, BackendError> {
        match self.site {
            ProjectionSite::HiddenStates => log_prob_via_head(self, tokens, position),
            ProjectionSite::SentenceRepresentation => self.inner.masked_log_prob(tokens, position),
        }
    }

    fn concurrent_queries(&self) -> bool {
        self.inner.concurrent_queries()
    }

    fn hidden_states(&self) -> Option<&dyn HiddenStates> {
        Some(self)
    }
}

impl<B: MaskedLm> HiddenStates for DebiasedBackend<B> {
    fn hidden_size(&self) -> usize {
        self.subspace.dim
    }

    fn encode(&self, tokens: &[String], mask: Option<usize>) -> Result<Vec<Vec<f64>>, BackendError> {
        self.inner_states()
            .encode(tokens, mask)?
            .iter()
            .map(|h| {
                self.subspace.remove(h).map_err(|_| BackendError::Dimension {
                    expected: self.subspace.dim,
                    found: h.len(),
                })
            })
            .collect()
    }

    fn head_log_prob(&self, hidden: &[f64], target: &str) -> Result<f64, BackendError> {
        self.inner_states().head_log_prob(hidden, target)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::scoring::backend::whitespace_tokens;
    use crate::scoring::toy::{LinearMlm, UniformBackend};

    struct LengthEncoder;

    impl SentenceEncoder for LengthEncoder {
        fn dim(&self) -> usize {
            3
        }
        fn encode(&self, text: &str) -> Result<Vec<f64>, BackendError> {
            Ok(vec![text.len() as f64, 0.0, 0.0])
        }
    }

    fn axis_subspace() -> BiasSubspace {
        BiasSubspace {
            dim: 2,
            basis: vec![vec![1.0, 0.0]],
            mean: vec![0.0, 0.0],
            explained_variance: 1.0,
            provenance: BTreeMap::new(),
        }
    }

    /// Vocabulary {a, b}; embeddings e_a = (1, 2), e_b = (3, -1); mask (0, 0);
    /// head rows w_a = (1, 1), w_b = (2, -1); no context mixing.
    fn hand_model() -> LinearMlm {
        LinearMlm::with_vocabulary(
            "hand",
            &["a", "b"],
            vec![vec![1.0, 2.0], vec![3.0, -1.0]],
            vec![vec![1.0, 1.0], vec![2.0, -1.0]],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            0.0,
        )
    }

    #[test]
    fn embed_known_vectors() {
        let reps = embed(&["ab", "abcd"], &LengthEncoder).unwrap();
        assert_eq!(reps, vec![vec![2.0, 0.0, 0.0], vec![4.0, 0.0, 0.0]]);
        assert!(embed(&[], &LengthEncoder).unwrap().is_empty());
    }

    #[test]
    fn batch_and_single_embedding_agree() {
        let model = LinearMlm::hashed(6, 50, 3);
        let enc = PooledEncoder::new(&model, Pooling::Mean).unwrap();
        let texts = ["you are a dumb friend", "what a nice day"];
        let batch = embed(&texts, &enc).unwrap();
        for (t, b) in texts.iter().zip(&batch) {
            assert_eq!(&enc.encode(t).unwrap(), b);
        }
    }

    #[test]
    fn pooled_encoder_requires_hidden_states() {
        let u = UniformBackend::new(10);
        assert!(matches!(
            PooledEncoder::new(&u, Pooling::Mean),
            Err(DebiasError::NoHiddenStates(_))
        ));
        assert!(matches!(
            debiased_backend(u, BiasSubspace::empty(2)),
            Err(DebiasError::NoHiddenStates(_))
        ));
    }

    #[test]
    fn first_token_pooling() {
        let model = hand_model();
        let enc = PooledEncoder::new(&model, Pooling::FirstToken).unwrap();
        assert_eq!(enc.encode("b a").unwrap(), vec![3.0, -1.0]);
        let enc = PooledEncoder::new(&model, Pooling::Mean).unwrap();
        assert_eq!(enc.encode("b a").unwrap(), vec![2.0, 0.5]);
    }

    #[test]
    fn empty_subspace_is_identity() {
        let model = LinearMlm::hashed(5, 40, 9);
        let wrapped = debiased_backend(&model, BiasSubspace::empty(5)).unwrap();
        let toks = whitespace_tokens("you are a vile neighbour");
        for p in 0..toks.len() {
            assert_eq!(
                wrapped.masked_log_prob(&toks, p).unwrap(),
                model.masked_log_prob(&toks, p).unwrap()
            );
        }
        assert!(wrapped.model_id().ends_with("+debiased(k=0)"));
    }

    #[test]
    fn wrapped_head_matches_hand_computation() {
        let wrapped = debiased_backend(hand_model(), axis_subspace()).unwrap();
        // Masking position 1 of "a b": h_1 = mask = (0, 0) -> uniform.
        let toks = whitespace_tokens("a b");
        assert!((wrapped.masked_log_prob(&toks, 1).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        // Head on h = (1, 2): removed -> (0, 2); logits a = 2, b = -2.
        let h = wrapped.encode(&toks, None).unwrap();
        assert_eq!(h[0], vec![0.0, 2.0]);
        let expected = 2.0 - (2f64.exp() + (-2f64).exp()).ln();
        assert!((wrapped.head_log_prob(&h[0], "a").unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn double_wrapping_is_idempotent() {
        let model = LinearMlm::hashed(4, 30, 1);
        let s = BiasSubspace {
            dim: 4,
            basis: vec![vec![0.5, 0.5, 0.5, 0.5]],
            mean: vec![0.0; 4],
            explained_variance: 1.0,
            provenance: BTreeMap::new(),
        };
        let once = debiased_backend(&model, s.clone()).unwrap();
        let twice = debiased_backend(debiased_backend(&model, s.clone()).unwrap(), s).unwrap();
        let toks = whitespace_tokens("a stupid muslim");
        for p in 0..3 {
            let a = once.masked_log_prob(&toks, p).unwrap();
            let b = twice.masked_log_prob(&toks, p).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sentence_site_leaves_log_probs_alone() {
        let model = hand_model();
        let wrapped = debiased_backend(&model, axis_subspace())
            .unwrap()
            .with_site(ProjectionSite::SentenceRepresentation);
        let toks = whitespace_tokens("b a b");
        for p in 0..3 {
            assert_eq!(
                wrapped.masked_log_prob(&toks, p).unwrap(),
                model.masked_log_prob(&toks, p).unwrap()
            );
        }
        let pooled = PooledEncoder::new(&wrapped, Pooling::Mean)
            .unwrap()
            .encode("a b")
            .unwrap();
        assert_eq!(pooled[0], 0.0);
        assert!(wrapped.model_id().ends_with("site=sentence_representation_only)"));
        for site in [ProjectionSite::HiddenStates, ProjectionSite::SentenceRepresentation] {
            assert_eq!(site.as_str().parse::<ProjectionSite>().unwrap(), site);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let model = LinearMlm::hashed(4, 30, 1);
        assert!(matches!(
            debiased_backend(&model, BiasSubspace::empty(3)),
            Err(DebiasError::Dimension { expected: 4, found: 3 })
        ));
    }
}
