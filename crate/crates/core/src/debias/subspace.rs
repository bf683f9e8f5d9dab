use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;

use super::DebiasError;

const MAGIC: &str = "# sosbias bias subspace v1";
const ORTHONORMAL_TOL: f64 = 1e-8;

/// Default projection site: final hidden states at every position, before
/// the output head.
pub const PROJECTION_SITE: &str = "final_hidden_states_all_positions";

/// Orthonormal basis of the estimated bias directions, plus the mean of the
/// differences it was estimated from.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasSubspace {
    pub dim: usize,
    pub basis: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    /// Share of total difference variance captured by the basis.
    pub explained_variance: f64,
    pub provenance: BTreeMap<String, String>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl BiasSubspace {
    /// A zero-dimensional subspace; removal is the identity.
    pub fn empty(dim: usize) -> BiasSubspace {
        BiasSubspace {
            dim,
            basis: Vec::new(),
            mean: vec![0.0; dim],
            explained_variance: 0.0,
            provenance: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn with_provenance(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.provenance.insert(key.into(), value.into());
        self
    }

    /// `x - sum_k <x, v_k> v_k`.
    pub fn remove(&self, x: &[f64]) -> Result<Vec<f64>, DebiasError> {
        if x.len() != self.dim {
            return Err(DebiasError::Dimension {
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut out = x.to_vec();
        for v in &self.basis {
            let c = dot(x, v);
            for (o, vi) in out.iter_mut().zip(v) {
                *o -= c * vi;
            }
        }
        Ok(out)
    }

    fn check(&self) -> Result<(), String> {
        if self.dim == 0 {
            return Err("dimension must be positive".into());
        }
        if self.mean.len() != self.dim {
            return Err("mean has the wrong dimension".into());
        }
        if self.basis.len() > self.dim {
            return Err("more basis vectors than dimensions".into());
        }
        for (i, v) in self.basis.iter().enumerate() {
            if v.len() != self.dim {
                return Err(format!("basis vector {i} has the wrong dimension"));
            }
            for (j, w) in self.basis.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot(v, w) - expected).abs() > ORTHONORMAL_TOL {
                    return Err(format!("basis vectors {i} and {j} are not orthonormal"));
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let row = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join("\t");
        let mut out = format!(
            "{MAGIC}\ndim\t{}\nk\t{}\nexplained_variance\t{:?}\n",
            self.dim,
            self.k(),
            self.explained_variance
        );
        for (key, value) in &self.provenance {
            out.push_str(&format!("meta\t{key}\t{value}\n"));
        }
        out.push_str(&format!("mean\t{}\n", row(&self.mean)));
        for v in &self.basis {
            out.push_str(&format!("basis\t{}\n", row(v)));
        }
        out
    }

    pub fn parse(text: &str) -> Result<BiasSubspace, DebiasError> {
        let fail = |line: usize, message: String| DebiasError::Format { line, message };
        let numbers = |line: usize, fields: &[&str]| -> Result<Vec<f64>, DebiasError> {
            fields
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| fail(line, format!("bad number {f:?}")))
                })
                .collect()
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        if lines.next().map(|(_, l)| l) != Some(MAGIC) {
            return Err(fail(1, "missing subspace header".into()));
        }
        let (mut dim, mut k, mut explained) = (None, None, 0.0);
        let mut mean = None;
        let mut basis = Vec::new();
        let mut provenance = BTreeMap::new();
        for (line, raw) in lines {
            if raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            match fields[0] {
                "dim" if fields.len() == 2 => {
                    dim = Some(fields[1].parse::<usize>().map_err(|_| fail(line, "bad dim".into()))?)
                }
                "k" if fields.len() == 2 => {
                    k = Some(fields[1].parse::<usize>().map_err(|_| fail(line, "bad k".into()))?)
                }
                "explained_variance" if fields.len() == 2 => {
                    explained = fields[1]
                        .parse()
                        .map_err(|_| fail(line, "bad explained_variance".into()))?
                }
                "meta" if fields.len() == 3 => {
                    provenance.insert(fields[1].to_string(), fields[2].to_string());
                }
                "mean" => mean = Some(numbers(line, &fields[1..])?),
                "basis" => basis.push(numbers(line, &fields[1..])?),
                _ => return Err(fail(line, format!("unrecognised line {raw:?}"))),
            }
        }
        let end = text.lines().count();
        let dim = dim.ok_or_else(|| fail(end, "missing dim".into()))?;
        let k = k.ok_or_else(|| fail(end, "missing k".into()))?;
        if basis.len() != k {
            return Err(fail(
                end,
                format!("header declares k = {k} but {} basis rows follow", basis.len()),
            ));
        }
        let subspace = BiasSubspace {
            dim,
            basis,
            mean: mean.ok_or_else(|| fail(end, "missing mean".into()))?,
            explained_variance: explained,
            provenance,
        };
        subspace.check().map_err(|m| fail(end, m))?;
        Ok(subspace)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DebiasError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| DebiasError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<BiasSubspace, DebiasError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DebiasError::Io {
            path: path.display().to_string(),
            source,
        })?;
        BiasSubspace::parse(&text)
    }
}

/// Free-function form of [`BiasSubspace::remove`].
pub fn remove(x: &[f64], subspace: &BiasSubspace) -> Result<Vec<f64>, DebiasError> {
    subspace.remove(x)
}

/// Estimates the subspace from (profane, non-profane) representation pairs.
pub fn estimate_subspace(pairs: &[(Vec<f64>, Vec<f64>)], k: usize) -> Result<BiasSubspace, DebiasError> {
    let diffs = pairs
        .iter()
        .map(|(a, b)| {
            if a.len() != b.len() {
                return Err(DebiasError::Dimension {
                    expected: a.len(),
                    found: b.len(),
                });
            }
            Ok(a.iter().zip(b).map(|(x, y)| x - y).collect())
        })
        .collect::<Result<Vec<Vec<f64>>, _>>()?;
    estimate_from_differences(&diffs, k)
}

/// PCA over mean-centered difference vectors. Components are sorted by
/// descending variance and signed so their first non-negligible coordinate
/// is positive.
pub fn estimate_from_differences(diffs: &[Vec<f64>], k: usize) -> Result<BiasSubspace, DebiasError> {
    let first = diffs.first().ok_or(DebiasError::Empty)?;
    let dim = first.len();
    if dim == 0 {
        return Err(DebiasError::Dimension { expected: 1, found: 0 });
    }
    if k == 0 || k > dim {
        return Err(DebiasError::InvalidK { k, dim });
    }
    for d in diffs {
        if d.len() != dim {
            return Err(DebiasError::Dimension {
                expected: dim,
                found: d.len(),
            });
        }
        if d.iter().any(|x| !x.is_finite()) {
            return Err(DebiasError::NonFinite);
        }
    }
    let n = diffs.len();
    let mut mean = vec![0.0; dim];
    for d in diffs {
        for (m, x) in mean.iter_mut().zip(d) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered = DMatrix::from_fn(n, dim, |i, j| diffs[i][j] - mean[j]);
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sigma = svd.singular_values;

    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let sigma_max = order.first().map_or(0.0, |&i| sigma[i]);
    let tol = sigma_max * (n.max(dim) as f64) * f64::EPSILON;
    let rank = order.iter().filter(|&&i| sigma[i] > tol && sigma[i] > 0.0).count();
    if rank < k {
        return Err(DebiasError::RankDeficient {
            requested: k,
            achieved: rank,
        });
    }

    let total: f64 = sigma.iter().map(|s| s * s).sum();
    let captured: f64 = order[..k].iter().map(|&i| sigma[i] * sigma[i]).sum();
    let basis = order[..k]
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = v_t.row(i).iter().copied().collect();
            let norm = dot(&v, &v).sqrt();
            for x in &mut v {
                *x /= norm;
            }
            if let Some(lead) = v.iter().copied().find(|x| x.abs() > 1e-12) {
                if lead < 0.0 {
                    for x in &mut v {
                        *x = -*x;
                    }
                }
            }
            v
        })
        .collect();
    Ok(BiasSubspace {
        dim,
        basis,
        mean,
        explained_variance: if total > 0.0 { captured / total } else { 0.0 },
        provenance: BTreeMap::new(),
    })
}
