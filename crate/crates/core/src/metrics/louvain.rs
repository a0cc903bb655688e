//! Multi-level greedy modularity maximisation.
//!
//! Local moving: each node, visited in a seeded random order, joins the
//! neighbouring community with the largest modularity gain. Aggregation:
//! communities collapse into weighted super-nodes and the process repeats
//! until no node moves. The best of several seeded restarts is kept.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::modularity::{modularity_of, Partition};
use super::MetricsError;
use crate::graph::UndirectedGraph;

const MAX_PASSES: usize = 1_000;
const MAX_LEVELS: usize = 64;
const MIN_GAIN: f64 = 1e-12;

struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_weight: Vec<f64>,
    strength: Vec<f64>,
    /// Total edge weight, self-loops counted once.
    m: f64,
}

impl Level {
    fn from_graph(g: &UndirectedGraph) -> Self {
        let n = g.node_count();
        Self {
            adj: (0..n)
                .map(|u| g.neighbors(u).iter().map(|&v| (v, 1.0)).collect())
                .collect(),
            self_weight: vec![0.0; n],
            strength: (0..n).map(|u| g.degree(u) as f64).collect(),
            m: g.edge_count() as f64,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// One round of local moving. Returns compact community ids and whether
    /// any node changed community.
    fn local_moving(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut total: Vec<f64> = self.strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let two_m_sq = 2.0 * self.m * self.m;
        let mut moved_any = false;

        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for &i in &order {
                let ki = self.strength[i];
                let old = comm[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                total[old] -= ki;
                let gain = |c: usize, link: &[f64], total: &[f64]| {
                    link[c] / self.m - total[c] * ki / two_m_sq
                };

                let mut best = old;
                let mut best_gain = gain(old, &link, &total);
                touched.sort_unstable();
                for &c in &touched {
                    let g = gain(c, &link, &total);
                    if g > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best] += ki;
                comm[i] = best;
                if best != old {
                    moved = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            moved_any = true;
        }

        let mut ids = vec![usize::MAX; n];
        let mut next = 0;
        let compact = comm
            .iter()
            .map(|&c| {
                if ids[c] == usize::MAX {
                    ids[c] = next;
                    next += 1;
                }
                ids[c]
            })
            .collect();
        (compact, moved_any)
    }

    fn aggregate(&self, comm: &[usize]) -> Self {
        let k = comm.iter().max().map_or(0, |&c| c + 1);
        let mut self_weight = vec![0.0; k];
        let mut strength = vec![0.0; k];
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for i in 0..self.len() {
            let ci = comm[i];
            self_weight[ci] += self.self_weight[i];
            strength[ci] += self.strength[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    // each internal edge is visited from both ends
                    self_weight[ci] += w / 2.0;
                } else {
                    *weights[ci].entry(cj).or_default() += w;
                }
            }
        }
        Self {
            adj: weights
                .into_iter()
                .map(|m| m.into_iter().collect())
                .collect(),
            self_weight,
            strength,
            m: self.m,
        }
    }
}

fn louvain_once(g: &UndirectedGraph, rng: &mut ChaCha8Rng) -> Partition {
    let mut assignment: Vec<usize> = (0..g.node_count()).collect();
    let mut level = Level::from_graph(g);
    for _ in 0..MAX_LEVELS {
        let (comm, moved) = level.local_moving(rng);
        if !moved {
            break;
        }
        for a in assignment.iter_mut() {
            *a = comm[*a];
        }
        level = level.aggregate(&comm);
    }
    Partition::new(assignment).canonical()
}

/// Best partition over `restarts` seeded runs and its modularity, as
/// recomputed by [`modularity_of`]. Restart `r` draws from ChaCha stream `r`
/// of `seed`, so the result depends only on `(graph, seed, restarts)`.
pub fn detect_communities(
    g: &UndirectedGraph,
    seed: u64,
    restarts: usize,
) -> Result<(Partition, f64), MetricsError> {
    if g.edge_count() == 0 {
        return Err(MetricsError::NoEdges);
    }
    let mut best: Option<(Partition, f64)> = None;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let p = louvain_once(g, &mut rng);
        let q = modularity_of(g, &p)?;
        if best.as_ref().is_none_or(|(_, bq)| q > *bq) {
            best = Some((p, q));
        }
    }
    Ok(best.expect("at least one restart"))
}
