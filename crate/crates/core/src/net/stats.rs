use std::collections::BTreeMap;
use std::io::BufRead;

use super::Network;
use crate::error::{Error, Result};

/// One degree class `k` with its probability `P(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeClass {
    pub degree: usize,
    pub probability: f64,
}

/// Degree distribution `P(k)` over its support, sorted by degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    classes: Vec<DegreeClass>,
}

const NORMALIZATION_TOL: f64 = 1e-12;
/// Slack accepted for hand-written or rounded distribution files before
/// renormalizing.
const FILE_NORMALIZATION_TOL: f64 = 1e-6;

impl DegreeDistribution {
    pub fn from_network(net: &Network) -> Result<Self> {
        let n = net.node_count();
        if n == 0 {
            return Err(Error::DegenerateDistribution("network has no nodes".into()));
        }
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for k in net.degrees() {
            *counts.entry(k).or_default() += 1;
        }
        let classes = counts
            .into_iter()
            .map(|(degree, c)| DegreeClass {
                degree,
                probability: c as f64 / n as f64,
            })
            .collect();
        Ok(DegreeDistribution { classes })
    }

    /// Builds a distribution from `(k, P(k))` pairs. Repeated degrees are
    /// merged and zero-probability entries dropped; the total must be 1.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        Self::from_pairs_with_tolerance(pairs, NORMALIZATION_TOL)
    }

    fn from_pairs_with_tolerance<I>(pairs: I, tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (k, p) in pairs {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidParameter(format!("P({k}) = {p} is not a probability")));
            }
            *merged.entry(k).or_default() += p;
        }
        let total: f64 = merged.values().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "degree probabilities sum to {total}, expected 1"
            )));
        }
        let classes = merged
            .into_iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|(degree, p)| DegreeClass {
                degree,
                probability: p / total,
            })
            .collect();
        Ok(DegreeDistribution { classes })
    }

    /// Reads a two-column `k P(k)` text file (`#` comments allowed).
    /// Totals within 1e-6 of one are renormalized.
    pub fn read<R: BufRead>(source: R) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let mut tokens = trimmed.split_whitespace();
            let (Some(k), Some(p), None) = (tokens.next(), tokens.next(), tokens.next()) else {
                return Err(parse_err("expected `k P(k)`".into()));
            };
            let k: usize = k.parse().map_err(|_| parse_err(format!("bad degree {k:?}")))?;
            let p: f64 = p.parse().map_err(|_| parse_err(format!("bad probability {p:?}")))?;
            pairs.push((k, p));
        }
        Self::from_pairs_with_tolerance(pairs, FILE_NORMALIZATION_TOL)
    }

    pub fn classes(&self) -> &[DegreeClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.classes.iter().map(|c| c.degree)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.classes.iter().map(|c| c.probability)
    }

    /// `⟨k⟩ = Σ k P(k)`
    pub fn mean(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| c.degree as f64 * c.probability)
            .sum()
    }

    /// `⟨k²⟩ = Σ k² P(k)`
    pub fn second_moment(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| (c.degree * c.degree) as f64 * c.probability)
            .sum()
    }

    pub fn max_degree(&self) -> usize {
        self.classes.last().map_or(0, |c| c.degree)
    }

    /// Probability that a random edge end lands on each class: `k P(k) / ⟨k⟩`.
    pub fn edge_end_weights(&self) -> Result<Vec<f64>> {
        let mean = self.mean();
        if mean <= 0.0 {
            return Err(Error::DegenerateDistribution("mean degree is zero".into()));
        }
        Ok(self
            .classes
            .iter()
            .map(|c| c.degree as f64 * c.probability / mean)
            .collect())
    }
}

/// Degree distribution, its first two moments and the mean local clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub distribution: DegreeDistribution,
    pub mean_degree: f64,
    pub mean_sq_degree: f64,
    pub clustering: f64,
}

pub fn degree_stats(net: &Network) -> Result<DegreeStats> {
    let distribution = DegreeDistribution::from_network(net)?;
    let n = net.node_count() as f64;
    let mean_degree = net.degrees().map(|k| k as f64).sum::<f64>() / n;
    let mean_sq_degree = net.degrees().map(|k| (k * k) as f64).sum::<f64>() / n;
    Ok(DegreeStats {
        distribution,
        mean_degree,
        mean_sq_degree,
        clustering: mean_local_clustering(net),
    })
}

/// Average of local clustering coefficients; nodes of degree < 2 count as 0.
fn mean_local_clustering(net: &Network) -> f64 {
    let n = net.node_count();
    let mut mark = vec![false; n];
    let mut total = 0.0;
    for u in 0..n {
        let nbrs = net.neighbors(u);
        let d = nbrs.len();
        if d < 2 {
            continue;
        }
        for &v in nbrs {
            mark[v] = true;
        }
        // each closed wedge at u is seen from both of its ends
        let mut links = 0usize;
        for &v in nbrs {
            links += net.neighbors(v).iter().filter(|&&w| mark[w]).count();
        }
        for &v in nbrs {
            mark[v] = false;
        }
        let triangles = links / 2;
        total += triangles as f64 / (d * (d - 1) / 2) as f64;
    }
    total / n as f64
}
