//! GraphML, DOT and canonical JSON writers for networks and frames.
//!
//! All three carry the same attributes: node `valence`, `is_cue` and
//! `color`; edge `color` and `weight`. Direction is kept.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Edge, FormaMentisNetwork, NetworkError, Node};
use crate::model::{Group, Source};
use crate::report::{canonical_json, sig6};
use crate::valence::{Valence, ValenceLabel};

#[derive(Serialize, Deserialize)]
struct NodeJson {
    word: String,
    valence: Valence,
    is_cue: u8,
    color: String,
    h_statistic: f64,
    p_value: f64,
    n_word: usize,
    n_rest: usize,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    source: String,
    target: String,
    weight: usize,
    color: String,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    source: Source,
    group: Group,
    nodes: Vec<NodeJson>,
    edges: Vec<EdgeJson>,
}

/// Canonical JSON: sorted keys, nodes sorted by word, edges by endpoints,
/// floats rounded to six significant digits.
pub fn to_json(net: &FormaMentisNetwork) -> String {
    let doc = NetworkJson {
        source: net.source,
        group: net.group,
        nodes: net
            .nodes()
            .iter()
            .map(|n| NodeJson {
                word: n.word.clone(),
                valence: n.label.label,
                is_cue: n.is_cue as u8,
                color: super::node_color(n.label.label).to_string(),
                h_statistic: sig6(n.label.h_statistic),
                p_value: sig6(n.label.p_value),
                n_word: n.label.n_word,
                n_rest: n.label.n_rest,
            })
            .collect(),
        edges: net
            .edges()
            .iter()
            .map(|e| EdgeJson {
                source: net.nodes()[e.source].word.clone(),
                target: net.nodes()[e.target].word.clone(),
                weight: e.weight,
                color: net.edge_color(e).to_string(),
            })
            .collect(),
    };
    canonical_json(&doc).expect("network document serializes")
}

/// Reads a network written by [`to_json`]. Colours are recomputed from the
/// labels rather than trusted.
pub fn from_json(text: &str) -> Result<FormaMentisNetwork, NetworkError> {
    let doc: NetworkJson =
        serde_json::from_str(text).map_err(|e| NetworkError::Parse(e.to_string()))?;
    let nodes: Vec<Node> = doc
        .nodes
        .into_iter()
        .map(|n| Node {
            label: ValenceLabel {
                word: n.word.clone(),
                label: n.valence,
                h_statistic: n.h_statistic,
                p_value: n.p_value,
                n_word: n.n_word,
                n_rest: n.n_rest,
            },
            word: n.word,
            is_cue: n.is_cue != 0,
        })
        .collect();
    let find = |w: &str| {
        nodes
            .iter()
            .position(|n| n.word == w)
            .ok_or_else(|| NetworkError::Parse(format!("edge endpoint {w:?} is not a node")))
    };
    let edges = doc
        .edges
        .iter()
        .map(|e| {
            let source = find(&e.source)?;
            if !nodes[source].is_cue {
                return Err(NetworkError::Parse(format!(
                    "edge source {:?} is not a cue",
                    e.source
                )));
            }
            let target = find(&e.target)?;
            if source == target {
                return Err(NetworkError::Parse(format!("self-loop on {:?}", e.source)));
            }
            Ok(Edge {
                source,
                target,
                weight: e.weight,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    FormaMentisNetwork::from_parts(doc.source, doc.group, nodes, edges)
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_graphml(net: &FormaMentisNetwork) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    s.push_str("  <key id=\"valence\" for=\"node\" attr.name=\"valence\" attr.type=\"string\"/>\n");
    s.push_str("  <key id=\"is_cue\" for=\"node\" attr.name=\"is_cue\" attr.type=\"int\"/>\n");
    s.push_str("  <key id=\"ncolor\" for=\"node\" attr.name=\"color\" attr.type=\"string\"/>\n");
    s.push_str("  <key id=\"ecolor\" for=\"edge\" attr.name=\"color\" attr.type=\"string\"/>\n");
    s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n");
    let _ = writeln!(
        s,
        "  <graph id=\"{}_{}\" edgedefault=\"directed\">",
        net.source, net.group
    );
    for n in net.nodes() {
        let _ = writeln!(s, "    <node id=\"{}\">", xml_escape(&n.word));
        let _ = writeln!(s, "      <data key=\"valence\">{}</data>", n.label.label);
        let _ = writeln!(s, "      <data key=\"is_cue\">{}</data>", n.is_cue as u8);
        let _ = writeln!(
            s,
            "      <data key=\"ncolor\">{}</data>",
            super::node_color(n.label.label)
        );
        s.push_str("    </node>\n");
    }
    for e in net.edges() {
        let _ = writeln!(
            s,
            "    <edge source=\"{}\" target=\"{}\">",
            xml_escape(&net.nodes()[e.source].word),
            xml_escape(&net.nodes()[e.target].word)
        );
        let _ = writeln!(s, "      <data key=\"ecolor\">{}</data>", net.edge_color(e));
        let _ = writeln!(s, "      <data key=\"weight\">{}</data>", e.weight);
        s.push_str("    </edge>\n");
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

pub fn to_dot(net: &FormaMentisNetwork) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"{}_{}\" {{", net.source, net.group);
    for n in net.nodes() {
        let _ = writeln!(
            s,
            "  \"{}\" [valence=\"{}\", is_cue={}, color=\"{}\"];",
            dot_escape(&n.word),
            n.label.label,
            n.is_cue as u8,
            super::node_color(n.label.label)
        );
    }
    for e in net.edges() {
        let _ = writeln!(
            s,
            "  \"{}\" -> \"{}\" [color=\"{}\", weight={}];",
            dot_escape(&net.nodes()[e.source].word),
            dot_escape(&net.nodes()[e.target].word),
            net.edge_color(e),
            e.weight
        );
    }
    s.push_str("}\n");
    s
}
