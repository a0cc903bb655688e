//! The `bfmn` command line: the full pipeline plus one subcommand per stage.

pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

use std::path::{Path, PathBuf};

use bfmn_core::ingest::exclude_sparse_participants;
use bfmn_core::metrics::{compute_metrics, Metric};
use bfmn_core::network::{
    self, build_network, semantic_frame, undirected_projection, FormaMentisNetwork,
};
use bfmn_core::nullmodel::{clustering_distribution, null_test_suite};
use bfmn_core::report::canonical_json;
use bfmn_core::valence::{label_cohort, read_labels_report};
use bfmn_core::ParticipantRecord;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigArgs, RunConfig};
use crate::error::CliError;
use crate::output::{write_output, write_tree};
use crate::pipeline::*;

#[derive(Debug, Parser)]
#[command(
    name = "bfmn",
    version,
    about = "Behavioural forma mentis networks from free-association data"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Worker threads for the parallel stages. Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Json,
    Graphml,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every stage for every selected cohort, written to --output with a manifest.
    Pipeline {
        /// Add per-stage wall-clock times to the manifest (breaks byte-identical reruns).
        #[arg(long)]
        record_timings: bool,
    },
    /// Parse the inputs and apply the blank-response exclusion rule.
    Ingest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Valence labels of one cohort as CSV.
    Label {
        /// Records written by `ingest`; defaults to reading the configured inputs.
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The network of one cohort.
    Build {
        #[arg(long)]
        records: Option<PathBuf>,
        /// Labels written by `label`; computed when absent.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Network measures of a network JSON file.
    Metrics {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Null-model tests of a network JSON file.
    Nulltest {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the clustering distribution here (one value per line)
        /// with a `.json` sidecar next to it.
        #[arg(long)]
        distribution: Option<PathBuf>,
    },
    /// The semantic frame of one cue.
    Frames {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        cue: String,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Side-by-side table of two metrics or null-test reports.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Also write the comparison as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        label_a: Option<String>,
        #[arg(long)]
        label_b: Option<String>,
    },
}

/// Output of `ingest`.
#[derive(Debug, Serialize, Deserialize)]
pub struct IngestReport {
    pub kept: Vec<ParticipantRecord>,
    pub dropped: Vec<ParticipantRecord>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))
}

fn kept_records(
    config: &RunConfig,
    records: Option<&Path>,
) -> Result<Vec<ParticipantRecord>, CliError> {
    match records {
        Some(path) => {
            let report: IngestReport = serde_json::from_str(&read_text(path)?).map_err(|e| {
                CliError::validation("InvalidRecords", format!("{}: {e}", path.display()))
            })?;
            Ok(report
                .kept
                .into_iter()
                .filter(|r| config.selects(r.source, r.group))
                .collect())
        }
        None => {
            let (records, _) = load_records(config)?;
            Ok(
                exclude_sparse_participants(
                    records,
                    &config.cue_list(),
                    config.max_blank_fraction,
                )?
                .kept,
            )
        }
    }
}

fn load_network(path: &Path) -> Result<FormaMentisNetwork, CliError> {
    Ok(network::from_json(&read_text(path)?)?)
}

fn render(net: &FormaMentisNetwork, format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => network::to_json(net),
        ExportFormat::Graphml => network::to_graphml(net),
        ExportFormat::Dot => network::to_dot(net),
    }
}

fn network_name(net: &FormaMentisNetwork) -> String {
    cohort_name(net.source, net.group)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::load(&cli.config)?;
    match cli.workers {
        Some(0) => Err(CliError::validation(
            "InvalidConfig",
            "--workers must be at least 1",
        )),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(|| dispatch(&config, cli.command)),
        None => dispatch(&config, cli.command),
    }
}

fn dispatch(config: &RunConfig, command: Command) -> Result<(), CliError> {
    match command {
        Command::Pipeline { record_timings } => {
            let out = config
                .output
                .clone()
                .ok_or_else(|| CliError::validation("InvalidConfig", "pipeline needs --output"))?;
            let tree = run_pipeline(config, record_timings)?;
            write_tree(&out, &tree)
        }
        Command::Ingest { out } => {
            let (records, _) = load_records(config)?;
            let ex = exclude_sparse_participants(
                records,
                &config.cue_list(),
                config.max_blank_fraction,
            )?;
            let report = IngestReport {
                kept: ex.kept,
                dropped: ex.dropped,
            };
            write_output(out.as_deref(), canonical_json(&report)?.as_bytes())
        }
        Command::Label { records, out } => {
            let kept = single_cohort(kept_records(config, records.as_deref())?)?;
            let (lemma_map, _) = load_lemma_map(config)?;
            let (_, filtered) = prepare_cohort(&kept, &lemma_map, config)?;
            let labels = label_cohort(&filtered, &label_config(config))?;
            write_output(out.as_deref(), &labels_csv(&labels)?)
        }
        Command::Build {
            records,
            labels,
            format,
            out,
        } => {
            let kept = single_cohort(kept_records(config, records.as_deref())?)?;
            let (lemma_map, _) = load_lemma_map(config)?;
            let (_, filtered) = prepare_cohort(&kept, &lemma_map, config)?;
            let labels = match labels {
                Some(path) => {
                    let file = std::fs::File::open(&path).map_err(|e| CliError::read(&path, e))?;
                    read_labels_report(file, b',')?
                }
                None => label_cohort(&filtered, &label_config(config))?,
            };
            let (net, _) = build_network(&filtered, &labels)?;
            write_output(out.as_deref(), render(&net, format).as_bytes())
        }
        Command::Metrics { network, out } => {
            let net = load_network(&network)?;
            let m = compute_metrics(&undirected_projection(&net), &community_config(config))?;
            write_output(out.as_deref(), metrics_json(&m)?.as_bytes())
        }
        Command::Nulltest {
            network,
            out,
            distribution,
        } => {
            let net = load_network(&network)?;
            let name = network_name(&net);
            let g = undirected_projection(&net);
            let spec = null_spec(config);
            let community = community_config(config);
            let reports = null_test_suite(&g, &Metric::ALL, &community, &spec)?;
            if let Some(path) = distribution {
                let values = clustering_distribution(&g, &spec)?;
                let empirical = Metric::MeanCc.evaluate(&g, &community)?;
                let file_name = path
                    .file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let (txt, sidecar) =
                    distribution_files(&name, empirical, &values, &file_name, config)?;
                write_output(Some(&path), txt.as_bytes())?;
                write_output(Some(&path.with_extension("json")), sidecar.as_bytes())?;
            }
            write_output(
                out.as_deref(),
                nulltest_json(&name, &reports, config)?.as_bytes(),
            )
        }
        Command::Frames {
            network,
            cue,
            format,
            out,
        } => {
            let net = load_network(&network)?;
            let frame = semantic_frame(&net, &cue)?;
            write_output(out.as_deref(), render(&frame.network, format).as_bytes())
        }
        Command::Compare {
            a,
            b,
            json,
            label_a,
            label_b,
        } => {
            let mut ra = compare::parse_report(&read_text(&a)?, &compare::default_name(&a))?;
            let mut rb = compare::parse_report(&read_text(&b)?, &compare::default_name(&b))?;
            if let Some(l) = label_a {
                ra.name = l;
            }
            if let Some(l) = label_b {
                rb.name = l;
            }
            let table = compare::compare(&ra, &rb)?;
            if let Some(path) = json {
                write_output(Some(&path), table.to_json()?.as_bytes())?;
            }
            write_output(None, table.to_text().as_bytes())
        }
    }
}
