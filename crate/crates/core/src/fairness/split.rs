use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FairnessError;

const FRACTION_TOL: f64 = 1e-9;

/// Train / validation / test fractions plus the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.40,
            validation: 0.30,
            test: 0.30,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<[f64; 3], FairnessError> {
        let f = [self.train, self.validation, self.test];
        if f.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(FairnessError::InvalidFractions(format!(
                "{f:?} must be finite and non-negative"
            )));
        }
        let sum: f64 = f.iter().sum();
        if (sum - 1.0).abs() > FRACTION_TOL {
            return Err(FairnessError::InvalidFractions(format!("{f:?} sum to {sum}, not 1")));
        }
        Ok(f)
    }

    /// Split sizes by largest-remainder rounding: each part gets the floor of
    /// its quota, and leftover records go to the largest fractional parts,
    /// earlier parts winning ties.
    pub fn sizes(&self, n: usize) -> Result<[usize; 3], FairnessError> {
        let f = self.validate()?;
        // Nudge quotas like 2.9999999999999996 back to their integer value.
        let quotas = f.map(|x| x * n as f64 + FRACTION_TOL);
        let mut sizes = quotas.map(|q| q.floor() as usize);
        let assigned: usize = sizes.iter().sum();
        let mut order = [0usize, 1, 2];
        let frac = |i: usize| quotas[i] - quotas[i].floor();
        order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
        debug_assert!(assigned <= n);
        for &i in order.iter().take(n.saturating_sub(assigned)) {
            sizes[i] += 1;
        }
        Ok(sizes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub test: Vec<T>,
}

/// Record indices per part, in shuffled order.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<Split<usize>, FairnessError> {
    if n == 0 {
        return Err(FairnessError::Empty("no records to split".into()));
    }
    let [a, b, _] = spec.sizes(n)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let test = idx.split_off(a + b);
    let validation = idx.split_off(a);
    Ok(Split {
        train: idx,
        validation,
        test,
    })
}

/// Seeded shuffle, then cut into the three parts.
pub fn split<T: Clone>(records: &[T], spec: &SplitSpec) -> Result<Split<T>, FairnessError> {
    let s = split_indices(records.len(), spec)?;
    let take = |ix: &[usize]| ix.iter().map(|&i| records[i].clone()).collect();
    Ok(Split {
        train: take(&s.train),
        validation: take(&s.validation),
        test: take(&s.test),
    })
}
