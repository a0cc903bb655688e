//! Behavioural forma mentis networks.
//!
//! The crate follows the analysis from raw responses to tested network
//! measures:
//!
//! - [`ingest`]: tabular exports and answer transcripts into participant
//!   records, plus the blank-response exclusion rule;
//! - [`normalize`]: text normalization and the idiosyncrasy filter;
//! - [`valence`]: Kruskal-Wallis valence labels;
//! - [`network`]: directed cue→association networks, colours, semantic
//!   frames and exports;
//! - [`metrics`]: ASPL, diameter, clustering and modularity;
//! - [`nullmodel`]: degree-preserving null ensembles and empirical p-values.

pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod network;
pub mod normalize;
pub mod nullmodel;
pub mod report;
pub mod valence;

pub use graph::UndirectedGraph;
pub use model::{AssociationEntry, CueList, CueResponse, Group, ParticipantRecord, Rating, Source};
