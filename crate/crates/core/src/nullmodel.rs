//! Degree-preserving null ensembles and empirical p-values.
//!
//! Replicates are produced by double-edge swaps on the observed graph, which
//! keeps every degree and keeps the graph simple. Replicate `r` uses ChaCha
//! stream `r` of the ensemble seed, so results do not depend on how
//! replicates are scheduled across threads.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::UndirectedGraph;
use crate::metrics::{
    distance_metrics, mean_clustering, CommunityConfig, DistanceMetrics, Metric, MetricsError,
};
use crate::report::sig6;

pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_SWAP_FACTOR: usize = 10;
/// Attempts allowed per requested swap before giving up on rigid graphs.
pub const MAX_ATTEMPTS_PER_SWAP: usize = 100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NullModelError {
    #[error("need at least two edges to swap, found {0}")]
    TooFewEdges(usize),
    #[error("n_samples and swap_factor must be at least 1")]
    InvalidSpec,
    #[error("metric failed on the observed graph: {0}")]
    Empirical(MetricsError),
    #[error("metric failed on replicate {replicate}: {source}")]
    Replicate {
        replicate: usize,
        source: MetricsError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullEnsembleSpec {
    pub n_samples: usize,
    pub seed: u64,
    pub swap_factor: usize,
}

impl Default for NullEnsembleSpec {
    fn default() -> Self {
        Self {
            n_samples: DEFAULT_SAMPLES,
            seed: 0,
            swap_factor: DEFAULT_SWAP_FACTOR,
        }
    }
}

impl NullEnsembleSpec {
    fn validate(&self) -> Result<(), NullModelError> {
        if self.n_samples == 0 || self.swap_factor == 0 {
            Err(NullModelError::InvalidSpec)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullTestReport {
    pub metric: String,
    pub empirical: f64,
    pub ensemble_mean: f64,
    pub ensemble_sd: f64,
    pub p_value: f64,
    pub n_samples: usize,
}

impl NullTestReport {
    pub fn rounded(&self) -> Self {
        Self {
            metric: self.metric.clone(),
            empirical: sig6(self.empirical),
            ensemble_mean: sig6(self.ensemble_mean),
            ensemble_sd: sig6(self.ensemble_sd),
            p_value: sig6(self.p_value),
            n_samples: self.n_samples,
        }
    }
}

/// Counts of a swap run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapStats {
    pub requested: usize,
    pub accepted: usize,
    pub attempts: usize,
}

/// RNG for replicate `replicate` of an ensemble seeded with `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Double-edge swaps until `swap_factor * |E|` are accepted or the attempt
/// budget runs out. A swap `{a,b},{c,d} -> {a,d},{c,b}` is rejected if it
/// would create a self-loop or a parallel edge.
pub fn swap_randomize<R: Rng>(
    g: &UndirectedGraph,
    rng: &mut R,
    swap_factor: usize,
) -> Result<(UndirectedGraph, SwapStats), NullModelError> {
    let m = g.edge_count();
    if m < 2 {
        return Err(NullModelError::TooFewEdges(m));
    }
    let n = g.node_count() as u64;
    let key = |u: usize, v: usize| {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        a as u64 * n + b as u64
    };
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    let mut present: HashSet<u64> = edges.iter().map(|&(u, v)| key(u, v)).collect();

    let requested = swap_factor * m;
    let budget = requested.saturating_mul(MAX_ATTEMPTS_PER_SWAP);
    let (mut accepted, mut attempts) = (0, 0);
    while accepted < requested && attempts < budget {
        attempts += 1;
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.random::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b || present.contains(&key(a, d)) || present.contains(&key(c, b)) {
            continue;
        }
        present.remove(&key(a, b));
        present.remove(&key(c, d));
        present.insert(key(a, d));
        present.insert(key(c, b));
        edges[i] = (a, d);
        edges[j] = (c, b);
        accepted += 1;
    }
    let out = g.with_edges(&edges).expect("swaps keep the graph simple");
    Ok((
        out,
        SwapStats {
            requested,
            accepted,
            attempts,
        },
    ))
}

/// One degree-preserving randomization, seeded.
pub fn randomize_degree_preserving(
    g: &UndirectedGraph,
    seed: u64,
    swap_factor: usize,
) -> Result<UndirectedGraph, NullModelError> {
    if swap_factor == 0 {
        return Err(NullModelError::InvalidSpec);
    }
    let mut rng = replicate_rng(seed, 0);
    Ok(swap_randomize(g, &mut rng, swap_factor)?.0)
}

/// The ensemble's replicate graphs in replicate order.
pub fn ensemble(
    g: &UndirectedGraph,
    spec: &NullEnsembleSpec,
) -> Result<Vec<UndirectedGraph>, NullModelError> {
    spec.validate()?;
    (0..spec.n_samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(spec.seed, r as u64);
            swap_randomize(g, &mut rng, spec.swap_factor).map(|(h, _)| h)
        })
        .collect()
}

/// Upper-tail empirical p-value with add-one smoothing. Replicates within
/// `1e-12` (relative) of the observed value count as ties, and ties count
/// toward the tail.
pub fn empirical_p_value(empirical: f64, replicates: &[f64]) -> f64 {
    let tol = 1e-12 * empirical.abs().max(1.0);
    let hits = replicates.iter().filter(|&&v| v >= empirical - tol).count();
    (1 + hits) as f64 / (replicates.len() + 1) as f64
}

fn summarize(metric: &str, empirical: f64, values: &[f64]) -> NullTestReport {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    NullTestReport {
        metric: metric.to_string(),
        empirical,
        ensemble_mean: mean,
        ensemble_sd: sd,
        p_value: empirical_p_value(empirical, values),
        n_samples: n,
    }
}

/// Metric values of every replicate, in replicate order.
fn replicate_values<F>(
    g: &UndirectedGraph,
    metric: &F,
    spec: &NullEnsembleSpec,
) -> Result<Vec<f64>, NullModelError>
where
    F: Fn(&UndirectedGraph) -> Result<f64, MetricsError> + Sync,
{
    spec.validate()?;
    let results: Vec<Result<f64, NullModelError>> = (0..spec.n_samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(spec.seed, r as u64);
            let (h, _) = swap_randomize(g, &mut rng, spec.swap_factor)?;
            metric(&h).map_err(|source| NullModelError::Replicate {
                replicate: r,
                source,
            })
        })
        .collect();
    results.into_iter().collect()
}

/// Compares `metric(g)` with its distribution over the null ensemble.
pub fn null_test<F>(
    g: &UndirectedGraph,
    metric_name: &str,
    metric: F,
    spec: &NullEnsembleSpec,
) -> Result<NullTestReport, NullModelError>
where
    F: Fn(&UndirectedGraph) -> Result<f64, MetricsError> + Sync,
{
    spec.validate()?;
    let empirical = metric(g).map_err(NullModelError::Empirical)?;
    let values = replicate_values(g, &metric, spec)?;
    Ok(summarize(metric_name, empirical, &values))
}

/// Evaluates `metrics` on `g`, running the all-pairs BFS at most once.
fn evaluate_all(
    g: &UndirectedGraph,
    metrics: &[Metric],
    community: &CommunityConfig,
) -> Result<Vec<f64>, MetricsError> {
    let mut distances: Option<DistanceMetrics> = None;
    let mut shared = || -> Result<DistanceMetrics, MetricsError> {
        if distances.is_none() {
            distances = Some(distance_metrics(g)?);
        }
        Ok(distances.expect("just computed"))
    };
    metrics
        .iter()
        .map(|m| match m {
            Metric::Aspl => Ok(shared()?.aspl),
            Metric::Diameter => Ok(shared()?.diameter as f64),
            other => other.evaluate(g, community),
        })
        .collect()
}

/// Several metrics over one shared ensemble; each replicate graph is built
/// once. Reports come back in the order of `metrics`.
pub fn null_test_suite(
    g: &UndirectedGraph,
    metrics: &[Metric],
    community: &CommunityConfig,
    spec: &NullEnsembleSpec,
) -> Result<Vec<NullTestReport>, NullModelError> {
    spec.validate()?;
    let empirical = evaluate_all(g, metrics, community).map_err(NullModelError::Empirical)?;
    let rows: Vec<Result<Vec<f64>, NullModelError>> = (0..spec.n_samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(spec.seed, r as u64);
            let (h, _) = swap_randomize(g, &mut rng, spec.swap_factor)?;
            evaluate_all(&h, metrics, community).map_err(|source| NullModelError::Replicate {
                replicate: r,
                source,
            })
        })
        .collect();
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_, _>>()?;
    Ok(metrics
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let column: Vec<f64> = rows.iter().map(|row| row[k]).collect();
            summarize(m.name(), empirical[k], &column)
        })
        .collect())
}

/// Mean clustering of each replicate, in replicate order.
pub fn clustering_distribution(
    g: &UndirectedGraph,
    spec: &NullEnsembleSpec,
) -> Result<Vec<f64>, NullModelError> {
    replicate_values(g, &mean_clustering, spec)
}
