//! Group-level forma mentis networks and semantic frames.
//!
//! A network links every cue to the associations participants gave for it.
//! Parallel cue→word answers collapse into one edge whose weight is the
//! number of distinct participants; associations are never linked to each
//! other directly, they only meet through shared nodes.

mod export;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use export::{from_json, to_dot, to_graphml, to_json};

use crate::graph::UndirectedGraph;
use crate::model::{Group, Source};
use crate::normalize::NormalizedCohort;
use crate::valence::{Valence, ValenceLabel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetworkError {
    #[error("no label for word {0:?}")]
    MissingLabel(String),
    #[error("{0:?} is not a cue of this network")]
    NotACue(String),
    #[error("cohort is empty")]
    EmptyCohort,
    #[error("cohort mixes sources or groups")]
    MixedCohort,
    #[error("network file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeColor {
    Blue,
    Red,
    Grey,
    Purple,
}

impl EdgeColor {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeColor::Blue => "blue",
            EdgeColor::Red => "red",
            EdgeColor::Grey => "grey",
            EdgeColor::Purple => "purple",
        }
    }
}

impl fmt::Display for EdgeColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Node colour: blue positive, red negative, grey neutral.
pub fn node_color(v: Valence) -> &'static str {
    match v {
        Valence::Positive => "blue",
        Valence::Negative => "red",
        Valence::Neutral => "grey",
    }
}

/// Edge colour from the valence of its endpoints. Symmetric; any neutral
/// endpoint gives grey.
pub fn color_edge(a: Valence, b: Valence) -> EdgeColor {
    use Valence::*;
    match (a, b) {
        (Positive, Positive) => EdgeColor::Blue,
        (Negative, Negative) => EdgeColor::Red,
        (Positive, Negative) | (Negative, Positive) => EdgeColor::Purple,
        _ => EdgeColor::Grey,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub word: String,
    pub label: ValenceLabel,
    pub is_cue: bool,
}

/// Directed `source → target`, both indices into the node list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormaMentisNetwork {
    pub source: Source,
    pub group: Group,
    /// Sorted by word.
    nodes: Vec<Node>,
    /// Sorted by `(source, target)`.
    edges: Vec<Edge>,
}

/// A cue answered with itself; dropped from the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedSelfLoop {
    pub participant: String,
    pub cue: String,
}

impl FormaMentisNetwork {
    /// Assembles a network from parts, sorting nodes and edges. Edge
    /// endpoints refer to positions in `nodes` as given.
    pub fn from_parts(
        source: Source,
        group: Group,
        nodes: Vec<Node>,
        edges: Vec<Edge>,
    ) -> Result<Self, NetworkError> {
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].word.cmp(&nodes[b].word));
        let mut remap = vec![0; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        for w in order.windows(2) {
            if nodes[w[0]].word == nodes[w[1]].word {
                return Err(NetworkError::Parse(format!(
                    "duplicate node {:?}",
                    nodes[w[0]].word
                )));
            }
        }
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| {
                if e.source >= nodes.len() || e.target >= nodes.len() {
                    return Err(NetworkError::Parse("edge endpoint out of range".into()));
                }
                Ok(Edge {
                    source: remap[e.source],
                    target: remap[e.target],
                    weight: e.weight,
                })
            })
            .collect::<Result<_, _>>()?;
        edges.sort_by_key(|e| (e.source, e.target));
        let mut sorted_nodes: Vec<Option<Node>> = nodes.into_iter().map(Some).collect();
        let nodes = order
            .iter()
            .map(|&i| sorted_nodes[i].take().expect("each node once"))
            .collect();
        Ok(Self {
            source,
            group,
            nodes,
            edges,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_index(&self, word: &str) -> Option<usize> {
        self.nodes
            .binary_search_by(|n| n.word.as_str().cmp(word))
            .ok()
    }

    pub fn node(&self, word: &str) -> Option<&Node> {
        self.node_index(word).map(|i| &self.nodes[i])
    }

    pub fn cues(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_cue)
    }

    pub fn edge_color(&self, e: &Edge) -> EdgeColor {
        color_edge(
            self.nodes[e.source].label.label,
            self.nodes[e.target].label.label,
        )
    }

    /// Out-edges of the node at `idx`.
    pub fn out_edges(&self, idx: usize) -> &[Edge] {
        let start = self.edges.partition_point(|e| e.source < idx);
        let end = self.edges.partition_point(|e| e.source <= idx);
        &self.edges[start..end]
    }
}

/// Builds the directed cue→association network for one (source, group)
/// cohort. `labels` must cover every cue and surviving association.
pub fn build_network(
    cohort: &NormalizedCohort,
    labels: &BTreeMap<String, ValenceLabel>,
) -> Result<(FormaMentisNetwork, Vec<DroppedSelfLoop>), NetworkError> {
    let first = cohort.records.first().ok_or(NetworkError::EmptyCohort)?;
    let (source, group) = (first.source, first.group);
    if cohort
        .records
        .iter()
        .any(|r| r.source != source || r.group != group)
    {
        return Err(NetworkError::MixedCohort);
    }

    let mut cue_words: BTreeSet<&str> = BTreeSet::new();
    let mut words: BTreeSet<&str> = BTreeSet::new();
    let mut support: BTreeMap<(&str, &str), BTreeSet<&str>> = BTreeMap::new();
    let mut dropped = Vec::new();
    for record in &cohort.records {
        for response in &record.responses {
            cue_words.insert(&response.cue);
            words.insert(&response.cue);
            for a in &response.associations {
                words.insert(&a.text);
                if a.text == response.cue {
                    dropped.push(DroppedSelfLoop {
                        participant: record.participant_id.clone(),
                        cue: response.cue.clone(),
                    });
                    continue;
                }
                support
                    .entry((response.cue.as_str(), a.text.as_str()))
                    .or_default()
                    .insert(record.participant_id.as_str());
            }
        }
    }

    let nodes: Vec<Node> = words
        .iter()
        .map(|&w| {
            let label = labels
                .get(w)
                .ok_or_else(|| NetworkError::MissingLabel(w.to_string()))?;
            Ok(Node {
                word: w.to_string(),
                label: label.clone(),
                is_cue: cue_words.contains(w),
            })
        })
        .collect::<Result<_, NetworkError>>()?;
    let index: BTreeMap<&str, usize> = words.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let edges = support
        .iter()
        .map(|((cue, word), who)| Edge {
            source: index[cue],
            target: index[word],
            weight: who.len(),
        })
        .collect();
    Ok((
        FormaMentisNetwork::from_parts(source, group, nodes, edges)?,
        dropped,
    ))
}

/// The star subgraph of a cue and its direct associations.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticFrame {
    pub cue: String,
    pub network: FormaMentisNetwork,
}

impl SemanticFrame {
    pub fn neighbors(&self) -> impl Iterator<Item = &Node> {
        self.network
            .nodes()
            .iter()
            .filter(move |n| n.word != self.cue)
    }
}

/// Extracts the frame of `cue`: the cue, its out-neighbours and only the
/// cue→neighbour edges, with labels carried over.
pub fn semantic_frame(net: &FormaMentisNetwork, cue: &str) -> Result<SemanticFrame, NetworkError> {
    let idx = net
        .node_index(cue)
        .filter(|&i| net.nodes[i].is_cue)
        .ok_or_else(|| NetworkError::NotACue(cue.to_string()))?;
    let out = net.out_edges(idx);
    let mut nodes = vec![net.nodes[idx].clone()];
    let mut edges = Vec::with_capacity(out.len());
    for e in out {
        nodes.push(net.nodes[e.target].clone());
        edges.push(Edge {
            source: 0,
            target: nodes.len() - 1,
            weight: e.weight,
        });
    }
    Ok(SemanticFrame {
        cue: cue.to_string(),
        network: FormaMentisNetwork::from_parts(net.source, net.group, nodes, edges)?,
    })
}

/// Drops direction and weights: same node order, `{u, v}` iff either
/// direction exists.
pub fn undirected_projection(net: &FormaMentisNetwork) -> UndirectedGraph {
    let labels = net.nodes.iter().map(|n| n.word.clone()).collect();
    let mut g = UndirectedGraph::with_labels(labels);
    for e in &net.edges {
        g.add_edge(e.source, e.target)
            .expect("network has no self-loops");
    }
    g
}
