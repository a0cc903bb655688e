use super::MetricsError;
use crate::graph::UndirectedGraph;

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Edges among the neighbours of `i` over the number of neighbour pairs.
/// Nodes of degree below two score 0.
pub fn local_clustering(g: &UndirectedGraph, i: usize) -> Result<f64, MetricsError> {
    if i >= g.node_count() {
        return Err(MetricsError::NodeNotFound(i));
    }
    let ns = g.neighbors(i);
    let k = ns.len();
    if k < 2 {
        return Ok(0.0);
    }
    // each neighbour-neighbour edge is seen from both ends
    let links: usize = ns
        .iter()
        .map(|&u| sorted_intersection_len(g.neighbors(u), ns))
        .sum::<usize>()
        / 2;
    Ok(links as f64 / (k * (k - 1) / 2) as f64)
}

/// Mean of the local coefficients over every node, isolated and leaf nodes
/// included as 0.
pub fn mean_clustering(g: &UndirectedGraph) -> Result<f64, MetricsError> {
    let n = g.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let mut total = 0.0;
    for i in 0..n {
        total += local_clustering(g, i)?;
    }
    Ok(total / n as f64)
}
