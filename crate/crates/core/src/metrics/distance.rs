use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::graph::UndirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceMetrics {
    pub aspl: f64,
    pub diameter: u32,
    /// Share of nodes inside the component the distances were taken on.
    pub coverage: f64,
}

/// Largest connected component; ties go to the one with the smallest node.
pub fn largest_component(g: &UndirectedGraph) -> Vec<usize> {
    g.components().into_iter().fold(
        Vec::new(),
        |best, c| if c.len() > best.len() { c } else { best },
    )
}

/// Sum and maximum of BFS distances from `source` to every other node of
/// its component.
fn bfs_from(
    g: &UndirectedGraph,
    source: usize,
    dist: &mut [u32],
    queue: &mut Vec<usize>,
) -> (u64, u32) {
    dist.fill(u32::MAX);
    queue.clear();
    dist[source] = 0;
    queue.push(source);
    let (mut sum, mut max) = (0u64, 0u32);
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let du = dist[u];
        sum += du as u64;
        max = max.max(du);
        for &v in g.neighbors(u) {
            if dist[v] == u32::MAX {
                dist[v] = du + 1;
                queue.push(v);
            }
        }
    }
    (sum, max)
}

/// Unweighted ASPL and diameter over the largest connected component.
/// ASPL averages over ordered pairs of distinct nodes.
pub fn distance_metrics(g: &UndirectedGraph) -> Result<DistanceMetrics, MetricsError> {
    let n = g.node_count();
    if n < 2 {
        return Err(MetricsError::EmptyGraph);
    }
    let comp = largest_component(g);
    let k = comp.len();
    if k < 2 {
        return Err(MetricsError::NoPairs);
    }
    let (sum, diameter) = comp
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], Vec::with_capacity(k)),
            |(dist, queue), &s| bfs_from(g, s, dist, queue),
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    Ok(DistanceMetrics {
        aspl: sum as f64 / (k * (k - 1)) as f64,
        diameter,
        coverage: k as f64 / n as f64,
    })
}
