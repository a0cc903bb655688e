use std::collections::{BTreeMap, HashMap};

use super::MetricsError;
use crate::graph::UndirectedGraph;

/// Community id for every node, indexed by node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(assignment: Vec<usize>) -> Self {
        Self(assignment)
    }

    /// Everything in community 0.
    pub fn single(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn singletons(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn assignment(&self) -> &[usize] {
        &self.0
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.0[node]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn community_count(&self) -> usize {
        let mut ids = self.0.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Relabels communities `0, 1, ...` in order of first appearance.
    pub fn canonical(&self) -> Self {
        let mut map: HashMap<usize, usize> = HashMap::new();
        Self(
            self.0
                .iter()
                .map(|c| {
                    let next = map.len();
                    *map.entry(*c).or_insert(next)
                })
                .collect(),
        )
    }
}

/// Newman modularity `Σ_c (e_c/m − (d_c/2m)²)` of an unweighted graph.
pub fn modularity_of(g: &UndirectedGraph, p: &Partition) -> Result<f64, MetricsError> {
    if p.len() != g.node_count() {
        return Err(MetricsError::PartialPartition {
            expected: g.node_count(),
            found: p.len(),
        });
    }
    let m = g.edge_count();
    if m == 0 {
        return Err(MetricsError::NoEdges);
    }
    let mut intra: BTreeMap<usize, usize> = BTreeMap::new();
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for u in 0..g.node_count() {
        *degree.entry(p.community_of(u)).or_default() += g.degree(u);
    }
    for (u, v) in g.edges() {
        if p.community_of(u) == p.community_of(v) {
            *intra.entry(p.community_of(u)).or_default() += 1;
        }
    }
    let m = m as f64;
    Ok(degree
        .iter()
        .map(|(c, &d)| {
            let e = intra.get(c).copied().unwrap_or(0) as f64;
            let share = d as f64 / (2.0 * m);
            e / m - share * share
        })
        .sum())
}
