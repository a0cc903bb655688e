//! Python bindings: transcripts, valence tests, graphs and networks.

use std::collections::BTreeMap;
use std::str::FromStr;

use bfmn_core::ingest::{parse_transcript as core_parse, render_transcript};
use bfmn_core::metrics::{
    compute_metrics, detect_communities, distance_metrics, mean_clustering, modularity_of,
    CommunityConfig, Metric, Partition,
};
use bfmn_core::network::{self, FormaMentisNetwork};
use bfmn_core::nullmodel::{self, NullEnsembleSpec, NullTestReport};
use bfmn_core::valence::{self, RatingSample, Valence};
use bfmn_core::{CueList, Group, ParticipantRecord, Rating, Source, UndirectedGraph};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(
    bfmn,
    BfmnError,
    PyValueError,
    "Raised for any invalid input or failed computation."
);

fn err<E: std::fmt::Debug + std::fmt::Display>(e: E) -> PyErr {
    let debug = format!("{e:?}");
    let kind = debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error");
    BfmnError::new_err(format!("{kind}: {e}"))
}

fn cue_list(cues: Option<Vec<String>>) -> CueList {
    cues.map(CueList::new).unwrap_or_default()
}

/// One participant's answers.
#[pyclass(frozen, skip_from_py_object, eq, module = "bfmn")]
#[derive(Clone, PartialEq)]
struct Record(ParticipantRecord);

#[pymethods]
impl Record {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Record).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(err)
    }

    #[getter]
    fn participant_id(&self) -> &str {
        &self.0.participant_id
    }

    #[getter]
    fn source(&self) -> String {
        self.0.source.as_str().to_string()
    }

    #[getter]
    fn group(&self) -> String {
        self.0.group.as_str().to_string()
    }

    /// `[(cue, cue_rating, [(association, rating), ...]), ...]`; blanks are
    /// empty strings and missing ratings `None`.
    #[allow(clippy::type_complexity)]
    fn responses(&self) -> Vec<(String, Option<u8>, Vec<(String, Option<u8>)>)> {
        self.0
            .responses
            .iter()
            .map(|r| {
                let assoc = r
                    .associations
                    .iter()
                    .map(|a| (a.text.clone(), a.rating.map(Rating::value)))
                    .collect();
                (r.cue.clone(), r.cue_rating.map(Rating::value), assoc)
            })
            .collect()
    }

    fn blank_slots(&self) -> usize {
        self.0.blank_slots(self.0.responses.len())
    }

    fn render(&self) -> PyResult<String> {
        render_transcript(&self.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Record({:?}, {}, {})",
            self.0.participant_id,
            self.0.source.as_str(),
            self.0.group.as_str()
        )
    }
}

/// Parses one transcript. `cues` defaults to the ten study cues.
#[pyfunction]
#[pyo3(signature = (text, participant_id, source, group, cues=None))]
fn parse_transcript(
    text: &str,
    participant_id: &str,
    source: &str,
    group: &str,
    cues: Option<Vec<String>>,
) -> PyResult<Record> {
    let source = Source::from_str(source).map_err(err)?;
    let group = Group::from_str(group).map_err(err)?;
    core_parse(text, participant_id, source, group, &cue_list(cues))
        .map(Record)
        .map_err(err)
}

/// Two-group Kruskal-Wallis: `(h, p, mean_rank_a, mean_rank_b)`.
#[pyfunction]
fn kruskal_wallis(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64, f64, f64)> {
    let kw = valence::kruskal_wallis_two_group(&a, &b).map_err(err)?;
    Ok((kw.h, kw.p, kw.mean_rank_a, kw.mean_rank_b))
}

/// Labels a word's 1-5 ratings against the pooled rest:
/// `(label, h, p)`.
#[pyfunction]
#[pyo3(signature = (ratings, rest, alpha=valence::DEFAULT_ALPHA, min_n=valence::DEFAULT_MIN_N))]
fn label_word(
    ratings: Vec<u8>,
    rest: Vec<f64>,
    alpha: f64,
    min_n: usize,
) -> PyResult<(String, f64, f64)> {
    let ratings = ratings
        .into_iter()
        .map(|r| {
            Rating::new(r)
                .ok_or_else(|| BfmnError::new_err(format!("BadRating: {r} is not in 1..=5")))
        })
        .collect::<PyResult<_>>()?;
    let label = valence::label_word(
        &RatingSample {
            word: String::new(),
            ratings,
        },
        &rest,
        alpha,
        min_n,
    );
    Ok((
        label.label.as_str().to_string(),
        label.h_statistic,
        label.p_value,
    ))
}

#[pyfunction]
fn color_edge(a: &str, b: &str) -> PyResult<String> {
    let a = Valence::from_str(a).map_err(err)?;
    let b = Valence::from_str(b).map_err(err)?;
    Ok(network::color_edge(a, b).as_str().to_string())
}

fn spec(n_samples: usize, seed: u64, swap_factor: usize) -> NullEnsembleSpec {
    NullEnsembleSpec {
        n_samples,
        seed,
        swap_factor,
    }
}

fn report_dict<'py>(py: Python<'py>, r: &NullTestReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("metric", &r.metric)?;
    d.set_item("empirical", r.empirical)?;
    d.set_item("ensemble_mean", r.ensemble_mean)?;
    d.set_item("ensemble_sd", r.ensemble_sd)?;
    d.set_item("p_value", r.p_value)?;
    d.set_item("n_samples", r.n_samples)?;
    Ok(d)
}

/// Simple undirected graph on nodes `0..n`.
#[pyclass(frozen, skip_from_py_object, module = "bfmn")]
#[derive(Clone)]
struct Graph(UndirectedGraph);

#[pymethods]
impl Graph {
    #[new]
    #[pyo3(signature = (n, edges=Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        UndirectedGraph::from_edges(n, &edges)
            .map(Graph)
            .map_err(err)
    }

    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().collect()
    }

    fn degrees(&self) -> Vec<usize> {
        self.0.degrees()
    }

    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn mean_clustering(&self) -> PyResult<f64> {
        mean_clustering(&self.0).map_err(err)
    }

    /// `(aspl, diameter, coverage)` over the largest component.
    fn distances(&self) -> PyResult<(f64, u32, f64)> {
        let d = distance_metrics(&self.0).map_err(err)?;
        Ok((d.aspl, d.diameter, d.coverage))
    }

    fn modularity(&self, assignment: Vec<usize>) -> PyResult<f64> {
        modularity_of(&self.0, &Partition::new(assignment)).map_err(err)
    }

    #[pyo3(signature = (seed=0, restarts=10))]
    fn detect_communities(&self, seed: u64, restarts: usize) -> PyResult<(Vec<usize>, f64)> {
        let (p, q) = detect_communities(&self.0, seed, restarts).map_err(err)?;
        Ok((p.assignment().to_vec(), q))
    }

    #[pyo3(signature = (seed=0, restarts=10))]
    fn metrics<'py>(
        &self,
        py: Python<'py>,
        seed: u64,
        restarts: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let m = compute_metrics(&self.0, &CommunityConfig { seed, restarts }).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("aspl", m.aspl)?;
        d.set_item("diameter", m.diameter)?;
        d.set_item("mean_cc", m.mean_cc)?;
        d.set_item("modularity", m.modularity)?;
        d.set_item("component_coverage", m.component_coverage)?;
        d.set_item("n_nodes", m.n_nodes)?;
        d.set_item("n_edges", m.n_edges)?;
        Ok(d)
    }

    #[pyo3(signature = (seed, swap_factor=nullmodel::DEFAULT_SWAP_FACTOR))]
    fn randomize(&self, seed: u64, swap_factor: usize) -> PyResult<Graph> {
        nullmodel::randomize_degree_preserving(&self.0, seed, swap_factor)
            .map(Graph)
            .map_err(err)
    }

    /// Null-model test of each named metric (all four by default).
    #[pyo3(signature = (
        metrics=None,
        n_samples=nullmodel::DEFAULT_SAMPLES,
        seed=0,
        swap_factor=nullmodel::DEFAULT_SWAP_FACTOR,
        restarts=10,
    ))]
    fn null_test<'py>(
        &self,
        py: Python<'py>,
        metrics: Option<Vec<String>>,
        n_samples: usize,
        seed: u64,
        swap_factor: usize,
        restarts: usize,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let metrics: Vec<Metric> = match metrics {
            None => Metric::ALL.to_vec(),
            Some(names) => names
                .iter()
                .map(|n| Metric::from_str(n).map_err(err))
                .collect::<PyResult<_>>()?,
        };
        let community = CommunityConfig { seed, restarts };
        let spec = spec(n_samples, seed, swap_factor);
        let reports = py
            .detach(|| nullmodel::null_test_suite(&self.0, &metrics, &community, &spec))
            .map_err(err)?;
        reports.iter().map(|r| report_dict(py, r)).collect()
    }

    #[pyo3(signature = (n_samples=nullmodel::DEFAULT_SAMPLES, seed=0, swap_factor=nullmodel::DEFAULT_SWAP_FACTOR))]
    fn clustering_distribution(
        &self,
        py: Python<'_>,
        n_samples: usize,
        seed: u64,
        swap_factor: usize,
    ) -> PyResult<Vec<f64>> {
        let spec = spec(n_samples, seed, swap_factor);
        py.detach(|| nullmodel::clustering_distribution(&self.0, &spec))
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.0.node_count(),
            self.0.edge_count()
        )
    }
}

/// A directed, valence-labelled cue→association network.
#[pyclass(frozen, skip_from_py_object, module = "bfmn")]
#[derive(Clone)]
struct Network(FormaMentisNetwork);

#[pymethods]
impl Network {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        network::from_json(text).map(Network).map_err(err)
    }

    fn to_json(&self) -> String {
        network::to_json(&self.0)
    }

    fn to_graphml(&self) -> String {
        network::to_graphml(&self.0)
    }

    fn to_dot(&self) -> String {
        network::to_dot(&self.0)
    }

    #[getter]
    fn source(&self) -> String {
        self.0.source.as_str().to_string()
    }

    #[getter]
    fn group(&self) -> String {
        self.0.group.as_str().to_string()
    }

    fn cues(&self) -> Vec<String> {
        self.0.cues().map(|n| n.word.clone()).collect()
    }

    /// `{word: label}` for every node.
    fn labels(&self) -> BTreeMap<String, String> {
        self.0
            .nodes()
            .iter()
            .map(|n| (n.word.clone(), n.label.label.as_str().to_string()))
            .collect()
    }

    /// `[(cue, association, weight, colour), ...]`.
    fn edges(&self) -> Vec<(String, String, usize, String)> {
        let nodes = self.0.nodes();
        self.0
            .edges()
            .iter()
            .map(|e| {
                let color = self.0.edge_color(e).as_str().to_string();
                (
                    nodes[e.source].word.clone(),
                    nodes[e.target].word.clone(),
                    e.weight,
                    color,
                )
            })
            .collect()
    }

    fn frame(&self, cue: &str) -> PyResult<Network> {
        network::semantic_frame(&self.0, cue)
            .map(|f| Network(f.network))
            .map_err(err)
    }

    /// Undirected, unweighted view used for the metrics.
    fn projection(&self) -> Graph {
        Graph(network::undirected_projection(&self.0))
    }

    fn __repr__(&self) -> String {
        format!(
            "Network({}_{}, nodes={}, edges={})",
            self.0.source.as_str(),
            self.0.group.as_str(),
            self.0.nodes().len(),
            self.0.edges().len()
        )
    }
}

#[pymodule]
fn bfmn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BfmnError", m.py().get_type::<BfmnError>())?;
    m.add_class::<Record>()?;
    m.add_class::<Graph>()?;
    m.add_class::<Network>()?;
    m.add_function(wrap_pyfunction!(parse_transcript, m)?)?;
    m.add_function(wrap_pyfunction!(kruskal_wallis, m)?)?;
    m.add_function(wrap_pyfunction!(label_word, m)?)?;
    m.add_function(wrap_pyfunction!(color_edge, m)?)?;
    Ok(())
}
