//! Network measures on the undirected projection: average shortest path
//! length, diameter, mean local clustering and modularity.

mod clustering;
mod distance;
mod louvain;
mod modularity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use clustering::{local_clustering, mean_clustering};
pub use distance::{distance_metrics, largest_component, DistanceMetrics};
pub use louvain::detect_communities;
pub use modularity::{modularity_of, Partition};

use crate::graph::UndirectedGraph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("node {0} not in graph")]
    NodeNotFound(usize),
    #[error("graph is empty")]
    EmptyGraph,
    #[error("graph has no edges")]
    NoEdges,
    #[error("no connected pair of nodes")]
    NoPairs,
    #[error("partition covers {found} nodes, graph has {expected}")]
    PartialPartition { expected: usize, found: usize },
}

/// Seed and restart count for community detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityConfig {
    pub seed: u64,
    pub restarts: usize,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 10,
        }
    }
}

/// Field order is the report order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub aspl: f64,
    pub diameter: u32,
    pub mean_cc: f64,
    pub modularity: f64,
    pub component_coverage: f64,
    pub n_nodes: usize,
    pub n_edges: usize,
}

impl NetworkMetrics {
    /// Copy with floats rounded to six significant digits, for reports.
    pub fn rounded(&self) -> Self {
        use crate::report::sig6;
        Self {
            aspl: sig6(self.aspl),
            mean_cc: sig6(self.mean_cc),
            modularity: sig6(self.modularity),
            component_coverage: sig6(self.component_coverage),
            ..*self
        }
    }
}

pub fn compute_metrics(
    g: &UndirectedGraph,
    community: &CommunityConfig,
) -> Result<NetworkMetrics, MetricsError> {
    let distances = distance_metrics(g)?;
    let (_, modularity) = detect_communities(g, community.seed, community.restarts)?;
    Ok(NetworkMetrics {
        aspl: distances.aspl,
        diameter: distances.diameter,
        mean_cc: mean_clustering(g)?,
        modularity,
        component_coverage: distances.coverage,
        n_nodes: g.node_count(),
        n_edges: g.edge_count(),
    })
}

/// A scalar graph measure, as used by the null-model tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Aspl,
    Diameter,
    MeanCc,
    Modularity,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Aspl,
        Metric::Diameter,
        Metric::MeanCc,
        Metric::Modularity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Aspl => "aspl",
            Metric::Diameter => "diameter",
            Metric::MeanCc => "mean_cc",
            Metric::Modularity => "modularity",
        }
    }

    pub fn evaluate(
        self,
        g: &UndirectedGraph,
        community: &CommunityConfig,
    ) -> Result<f64, MetricsError> {
        match self {
            Metric::Aspl => Ok(distance_metrics(g)?.aspl),
            Metric::Diameter => Ok(distance_metrics(g)?.diameter as f64),
            Metric::MeanCc => mean_clustering(g),
            Metric::Modularity => Ok(detect_communities(g, community.seed, community.restarts)?.1),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}
