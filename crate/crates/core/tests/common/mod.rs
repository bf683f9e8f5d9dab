//! Random fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::seq::IndexedRandom;
use rand::Rng;
use sosbias::dataset::{PairDataset, SentencePair, Template};
use sosbias::lexicon::{IdentityTerm, Lexicon, WordPair};
use sosbias::scoring::toy::TableBackend;

const CONTEXT: &[&str] = &["you", "are", "a", "the", "very", "so", "and", "one"];
const PROFANE: &[&str] = &["dumb", "vile", "nasty", "awful"];
const CLEAN: &[&str] = &["kind", "nice", "smart", "brilliant"];

/// Masked context with `position` blanked; the oracle's own table key.
fn masked(tokens: &[String], position: usize) -> Vec<String> {
    let mut t = tokens.to_vec();
    t[position] = "\u{0}MASK".into();
    t
}

pub struct Fixture {
    pub dataset: PairDataset,
    pub backend: TableBackend,
    /// (masked context, position) -> log-prob, last insertion wins.
    pub table: HashMap<(Vec<String>, usize), f64>,
}

fn words<R: Rng>(rng: &mut R, pool: &[&str]) -> Vec<String> {
    let n = rng.random_range(1..=2);
    (0..n).map(|_| pool.choose(rng).unwrap().to_string()).collect()
}

/// Up to `max_pairs` pairs whose fill words never occur in the shared
/// context, so the shared-token alignment is unique. With `discrete`,
/// log-probs come from a small grid and ties are common.
pub fn random_fixture<R: Rng>(rng: &mut R, max_pairs: usize, discrete: bool) -> Fixture {
    let lexicon = Lexicon::reference();
    let n = rng.random_range(1..=max_pairs);
    let mut pairs = Vec::with_capacity(n);
    let mut backend = TableBackend::new("toy-table/random");
    let mut table = HashMap::new();
    for _ in 0..n {
        let identity: IdentityTerm = lexicon.identity_terms.choose(rng).unwrap().clone();
        let len = rng.random_range(2..=6);
        let context: Vec<String> = (0..len).map(|_| CONTEXT.choose(rng).unwrap().to_string()).collect();
        let slot = rng.random_range(0..=len);
        let p = words(rng, PROFANE);
        let q = words(rng, CLEAN);
        let build = |fill: &[String]| -> Vec<String> {
            let mut t = context[..slot].to_vec();
            t.extend_from_slice(fill);
            t.extend_from_slice(&context[slot..]);
            t
        };
        let (s, s_prime) = (build(&p), build(&q));
        for tokens in [&s, &s_prime] {
            for pos in 0..tokens.len() {
                let lp = if discrete {
                    -0.5 * rng.random_range(1..=4) as f64
                } else {
                    -rng.random_range(0.01..5.0)
                };
                backend.insert(tokens, pos, lp);
                table.insert((masked(tokens, pos), pos), lp);
            }
        }
        pairs.push(SentencePair {
            profane_sentence: s.join(" "),
            nonprofane_sentence: s_prime.join(" "),
            identity,
            word_pair: WordPair::new(p.join(" "), q.join(" ")),
            template_id: "random".into(),
        });
    }
    let dataset = PairDataset {
        pairs,
        lexicon_version: lexicon.version.clone(),
        templates: vec![Template::new("random", "{word} {identity}").unwrap()],
        provenance: BTreeMap::new(),
    };
    Fixture {
        dataset,
        backend,
        table,
    }
}

/// (greater, ties, less)
pub type Tally = (u64, u64, u64);

pub struct OracleResult {
    pub overall: Tally,
    pub per_attribute: BTreeMap<String, Tally>,
    pub per_group: BTreeMap<String, Tally>,
}

/// Scores by brute force: shared tokens are those outside the fill words,
/// located by direct comparison with the context.
pub fn oracle_sos(f: &Fixture) -> OracleResult {
    let mut out = OracleResult {
        overall: (0, 0, 0),
        per_attribute: BTreeMap::new(),
        per_group: BTreeMap::new(),
    };
    for pair in &f.dataset.pairs {
        let score = |sentence: &str, fill: &str| -> f64 {
            let tokens: Vec<String> = sentence.split(' ').map(String::from).collect();
            let fill_len = fill.split(' ').count();
            // The fill is the one run of tokens drawn from the fill pools.
            let start = tokens
                .iter()
                .position(|t| PROFANE.contains(&t.as_str()) || CLEAN.contains(&t.as_str()))
                .unwrap();
            (0..tokens.len())
                .filter(|&i| i < start || i >= start + fill_len)
                .map(|i| f.table[&(masked(&tokens, i), i)])
                .sum()
        };
        let a = score(&pair.profane_sentence, &pair.word_pair.profane);
        let b = score(&pair.nonprofane_sentence, &pair.word_pair.non_profane);
        let bump = |t: &mut Tally| {
            if a > b {
                t.0 += 1
            } else if a == b {
                t.1 += 1
            } else {
                t.2 += 1
            }
        };
        bump(&mut out.overall);
        let attr = pair.identity.attribute.as_str().to_string();
        bump(out.per_attribute.entry(attr.clone()).or_default());
        bump(
            out.per_group
                .entry(format!("{attr}/{}", pair.identity.group.as_str()))
                .or_default(),
        );
    }
    out
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns (eigenvalues, eigenvectors as columns) sorted by decreasing value.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (values, vectors)
}

/// Covariance (unnormalized scatter) of row vectors about their mean.
pub fn scatter(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut c = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    c
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
