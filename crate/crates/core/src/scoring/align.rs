use super::backend::MaskedLm;
use super::ScoringError;

/// Token-level split of a sentence pair into shared (U) and modified (M, M')
/// positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenPartition {
    pub s_tokens: Vec<String>,
    pub s_prime_tokens: Vec<String>,
    /// U positions in S, ascending.
    pub unmodified_s: Vec<usize>,
    /// U positions in S', ascending and aligned with `unmodified_s`.
    pub unmodified_s_prime: Vec<usize>,
    pub modified_s: Vec<usize>,
    pub modified_s_prime: Vec<usize>,
}

impl TokenPartition {
    /// |C|: number of shared tokens.
    pub fn n_unmodified(&self) -> usize {
        self.unmodified_s.len()
    }

    pub fn modified_tokens_s(&self) -> Vec<&str> {
        self.modified_s.iter().map(|&i| self.s_tokens[i].as_str()).collect()
    }

    pub fn modified_tokens_s_prime(&self) -> Vec<&str> {
        self.modified_s_prime
            .iter()
            .map(|&i| self.s_prime_tokens[i].as_str())
            .collect()
    }
}

/// Longest common subsequence of two token sequences, as aligned index
/// pairs. Ties are broken towards advancing in `a`, so the result is
/// deterministic.
pub fn lcs_alignment<T: PartialEq>(a: &[T], b: &[T]) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    // suffix[i][j] = LCS length of a[i..] and b[j..]
    let mut suffix = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            suffix[i][j] = if a[i] == b[j] {
                suffix[i + 1][j + 1] + 1
            } else {
                suffix[i + 1][j].max(suffix[i][j + 1])
            };
        }
    }
    let mut out = Vec::with_capacity(suffix[0][0] as usize);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            out.push((i, j));
            i += 1;
            j += 1;
        } else if suffix[i + 1][j] >= suffix[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

pub fn partition_from_tokens(
    s_tokens: Vec<String>,
    s_prime_tokens: Vec<String>,
) -> Result<TokenPartition, ScoringError> {
    if s_tokens.is_empty() || s_prime_tokens.is_empty() {
        return Err(ScoringError::Degenerate("a sentence tokenizes to nothing".into()));
    }
    let aligned = lcs_alignment(&s_tokens, &s_prime_tokens);
    if aligned.is_empty() {
        return Err(ScoringError::Degenerate("sentences share no unmodified tokens".into()));
    }
    let unmodified_s: Vec<usize> = aligned.iter().map(|p| p.0).collect();
    let unmodified_s_prime: Vec<usize> = aligned.iter().map(|p| p.1).collect();
    let modified_s = (0..s_tokens.len()).filter(|i| !unmodified_s.contains(i)).collect();
    let modified_s_prime = (0..s_prime_tokens.len())
        .filter(|i| !unmodified_s_prime.contains(i))
        .collect();
    Ok(TokenPartition {
        s_tokens,
        s_prime_tokens,
        unmodified_s,
        unmodified_s_prime,
        modified_s,
        modified_s_prime,
    })
}

/// Tokenizes both sentences with the backend and aligns them.
pub fn partition_tokens(s: &str, s_prime: &str, backend: &dyn MaskedLm) -> Result<TokenPartition, ScoringError> {
    let s_tokens = backend.tokenize(s).map_err(ScoringError::backend(None))?;
    let s_prime_tokens = backend.tokenize(s_prime).map_err(ScoringError::backend(None))?;
    partition_from_tokens(s_tokens, s_prime_tokens)
}
