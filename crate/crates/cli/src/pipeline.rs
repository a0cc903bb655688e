//! Input loading and the per-cohort analysis shared by all subcommands.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use bfmn_core::ingest::{exclude_sparse_participants, parse_tabular, parse_transcript};
use bfmn_core::metrics::{compute_metrics, CommunityConfig, Metric, NetworkMetrics};
use bfmn_core::network::{
    self as network, build_network, semantic_frame, undirected_projection, FormaMentisNetwork,
};
use bfmn_core::normalize::{
    filter_idiosyncratic, normalize_cohort, LemmaMap, NormalizedCohort, Outcome,
};
use bfmn_core::nullmodel::{
    clustering_distribution, null_test_suite, NullEnsembleSpec, NullTestReport,
};
use bfmn_core::report::{canonical_json, sig6};
use bfmn_core::valence::{label_cohort, write_labels_report, LabelConfig, Valence, ValenceLabel};
use bfmn_core::{Group, ParticipantRecord, Source, UndirectedGraph};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{InputFormat, RunConfig};
use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub format: String,
    pub sha256: String,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::read(path, e))
}

/// Transcript files under `path`: the file itself, or every `.txt` in the
/// directory sorted by name.
fn transcript_files(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::read(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::validation(
            "FileNotFound",
            format!("{}: no .txt transcripts", path.display()),
        ));
    }
    Ok(files)
}

pub fn load_lemma_map(config: &RunConfig) -> Result<(LemmaMap, Option<InputDigest>), CliError> {
    match &config.lemma_map {
        None => Ok((LemmaMap::default(), None)),
        Some(path) => {
            let bytes = read_bytes(path)?;
            let text = String::from_utf8(bytes.clone()).map_err(|_| {
                CliError::validation("Unreadable", format!("{}: not UTF-8", path.display()))
            })?;
            let map = LemmaMap::parse(&text)?;
            let digest = InputDigest {
                path: path.display().to_string(),
                format: "lemma_map".into(),
                sha256: sha256_hex(&bytes),
            };
            Ok((map, Some(digest)))
        }
    }
}

/// Reads every configured input into records, checking that participant
/// ids are unique across inputs.
pub fn load_records(
    config: &RunConfig,
) -> Result<(Vec<ParticipantRecord>, Vec<InputDigest>), CliError> {
    if config.inputs.is_empty() {
        return Err(CliError::validation(
            "InvalidConfig",
            "no inputs configured",
        ));
    }
    let cues = config.cue_list();
    let mapping = config.schema.mapping()?;
    let mut records = Vec::new();
    let mut digests = Vec::new();
    for input in &config.inputs {
        match input.format {
            InputFormat::Tabular => {
                let bytes = read_bytes(&input.path)?;
                let mut parsed = parse_tabular(bytes.as_slice(), &mapping, &cues)?;
                if let Some(source) = input.source {
                    parsed.retain(|r| r.source == source);
                }
                if let Some(group) = input.group {
                    parsed.retain(|r| r.group == group);
                }
                records.extend(parsed);
                digests.push(InputDigest {
                    path: input.path.display().to_string(),
                    format: "tabular".into(),
                    sha256: sha256_hex(&bytes),
                });
            }
            InputFormat::Transcript => {
                let (Some(source), Some(group)) = (input.source, input.group) else {
                    return Err(CliError::validation(
                        "InvalidConfig",
                        format!(
                            "transcript input {} needs source and group",
                            input.path.display()
                        ),
                    ));
                };
                for file in transcript_files(&input.path)? {
                    let bytes = read_bytes(&file)?;
                    let text = String::from_utf8(bytes.clone()).map_err(|_| {
                        CliError::validation("Unreadable", format!("{}: not UTF-8", file.display()))
                    })?;
                    let id = file
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    let record =
                        parse_transcript(&text, &id, source, group, &cues).map_err(|e| {
                            let inner = CliError::from(e);
                            CliError::validation(
                                inner.kind(),
                                format!("{}: {inner}", file.display()),
                            )
                        })?;
                    records.push(record);
                    digests.push(InputDigest {
                        path: file.display().to_string(),
                        format: "transcript".into(),
                        sha256: sha256_hex(&bytes),
                    });
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    for r in &records {
        if !seen.insert(r.participant_id.as_str()) {
            return Err(CliError::validation(
                "DuplicateParticipant",
                format!(
                    "participant {:?} appears in more than one input",
                    r.participant_id
                ),
            ));
        }
    }
    records.retain(|r| config.selects(r.source, r.group));
    Ok((records, digests))
}

/// Records split by (source, group), in enum order.
pub fn split_cohorts(
    records: Vec<ParticipantRecord>,
) -> BTreeMap<(Source, Group), Vec<ParticipantRecord>> {
    let mut out: BTreeMap<(Source, Group), Vec<ParticipantRecord>> = BTreeMap::new();
    for r in records {
        out.entry((r.source, r.group)).or_default().push(r);
    }
    out
}

pub fn cohort_name(source: Source, group: Group) -> String {
    format!("{source}_{group}")
}

/// The one cohort a single-cohort command works on.
pub fn single_cohort(records: Vec<ParticipantRecord>) -> Result<Vec<ParticipantRecord>, CliError> {
    let mut cohorts = split_cohorts(records);
    match cohorts.len() {
        0 => Err(CliError::validation(
            "EmptyCohort",
            "no participant matches the selection",
        )),
        1 => Ok(cohorts.pop_first().map(|(_, v)| v).unwrap_or_default()),
        _ => Err(CliError::validation(
            "AmbiguousCohort",
            format!(
                "input holds {} cohorts ({}); select one with --source and --group",
                cohorts.len(),
                cohorts
                    .keys()
                    .map(|&(s, g)| cohort_name(s, g))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        )),
    }
}

pub fn label_config(config: &RunConfig) -> LabelConfig {
    LabelConfig {
        alpha: config.alpha,
        min_n: config.min_n,
        blank_policy: config.blank_policy,
    }
}

pub fn community_config(config: &RunConfig) -> CommunityConfig {
    CommunityConfig {
        seed: config.seed(),
        restarts: config.restarts,
    }
}

pub fn null_spec(config: &RunConfig) -> NullEnsembleSpec {
    NullEnsembleSpec {
        n_samples: config.n_samples,
        seed: config.seed(),
        swap_factor: config.swap_factor,
    }
}

/// Normalizes and filters an already exclusion-checked cohort.
pub fn prepare_cohort(
    kept: &[ParticipantRecord],
    lemma_map: &LemmaMap,
    config: &RunConfig,
) -> Result<(NormalizedCohort, NormalizedCohort), CliError> {
    let normalized = normalize_cohort(kept, lemma_map);
    let filtered = filter_idiosyncratic(&normalized, config.min_participants)?;
    Ok((normalized, filtered))
}

pub fn labels_csv(labels: &BTreeMap<String, ValenceLabel>) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    write_labels_report(labels, &mut out, b',')?;
    Ok(out)
}

/// Metrics report in its fixed key order.
pub fn metrics_json(m: &NetworkMetrics) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&m.rounded())?;
    s.push('\n');
    Ok(s)
}

pub fn nulltest_json(
    network: &str,
    reports: &[NullTestReport],
    config: &RunConfig,
) -> Result<String, CliError> {
    let tests: Vec<NullTestReport> = reports.iter().map(NullTestReport::rounded).collect();
    Ok(canonical_json(&json!({
        "network": network,
        "n_samples": config.n_samples,
        "seed": config.seed(),
        "swap_factor": config.swap_factor,
        "restarts": config.restarts,
        "tests": tests,
    }))?)
}

/// The distribution file (one value per line) and its sidecar.
pub fn distribution_files(
    network: &str,
    empirical: f64,
    values: &[f64],
    values_file: &str,
    config: &RunConfig,
) -> Result<(String, String), CliError> {
    let mut txt = String::new();
    for v in values {
        txt.push_str(&format!("{}\n", sig6(*v)));
    }
    let sidecar = canonical_json(&json!({
        "network": network,
        "metric": "mean_cc",
        "empirical": sig6(empirical),
        "n_samples": values.len(),
        "seed": config.seed(),
        "swap_factor": config.swap_factor,
        "values_file": values_file,
    }))?;
    Ok((txt, sidecar))
}

pub fn file_stem_safe(word: &str) -> String {
    word.chars()
        .map(|c| if c.is_alphanumeric() { c } else { '_' })
        .collect()
}

/// Files of a run, keyed by path relative to the output directory.
pub type OutputTree = BTreeMap<PathBuf, Vec<u8>>;

#[derive(Debug, Clone, Default, Serialize)]
pub struct CohortCounts {
    pub participants: usize,
    pub associations_raw: usize,
    pub associations_normalized: usize,
    pub associations_filtered: usize,
    pub removed: BTreeMap<String, usize>,
    pub words_labelled: usize,
    pub labels: BTreeMap<String, usize>,
    pub nodes: usize,
    pub edges: usize,
    pub self_loops_dropped: usize,
}

/// Wall-clock time per stage in milliseconds, summed over cohorts.
#[derive(Debug, Default)]
pub struct Timings(BTreeMap<&'static str, f64>);

impl Timings {
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.0.entry(stage).or_default() += start.elapsed().as_secs_f64() * 1e3;
        out
    }
}

pub struct CohortOutputs {
    pub counts: CohortCounts,
    pub network: FormaMentisNetwork,
    pub graph: UndirectedGraph,
}

/// Runs every analysis stage for one cohort and adds its files under
/// `<source>_<group>/`.
fn run_cohort(
    source: Source,
    group: Group,
    kept: &[ParticipantRecord],
    lemma_map: &LemmaMap,
    config: &RunConfig,
    tree: &mut OutputTree,
    timings: &mut Timings,
) -> Result<CohortOutputs, CliError> {
    let name = cohort_name(source, group);
    let wrap = |e: CliError| match e {
        CliError::Validation { kind, message } => CliError::Validation {
            kind,
            message: format!("cohort {name}: {message}"),
        },
        other => other,
    };
    let dir = PathBuf::from(&name);
    let mut counts = CohortCounts {
        participants: kept.len(),
        ..Default::default()
    };
    counts.associations_raw = kept
        .iter()
        .flat_map(|r| &r.responses)
        .flat_map(|c| &c.associations)
        .filter(|a| !a.is_blank())
        .count();

    let (normalized, filtered) = timings
        .time("normalize", || prepare_cohort(kept, lemma_map, config))
        .map_err(wrap)?;
    counts.associations_normalized = normalized.association_count();
    counts.associations_filtered = filtered.association_count();
    for entry in &filtered.provenance_log {
        if let Outcome::Removed(reason) = &entry.outcome {
            *counts.removed.entry(reason.to_string()).or_default() += 1;
        }
    }
    tree.insert(
        dir.join("provenance.json"),
        canonical_json(&filtered.provenance_log)?.into_bytes(),
    );

    let labels = timings
        .time("label", || label_cohort(&filtered, &label_config(config)))
        .map_err(|e| wrap(e.into()))?;
    counts.words_labelled = labels.len();
    for v in [Valence::Positive, Valence::Neutral, Valence::Negative] {
        counts.labels.insert(
            v.to_string(),
            labels.values().filter(|l| l.label == v).count(),
        );
    }
    tree.insert(dir.join("labels.csv"), labels_csv(&labels)?);

    let (network, self_loops) = timings
        .time("build", || build_network(&filtered, &labels))
        .map_err(|e| wrap(e.into()))?;
    counts.nodes = network.nodes().len();
    counts.edges = network.edges().len();
    counts.self_loops_dropped = self_loops.len();
    timings.time("export", || -> Result<(), CliError> {
        tree.insert(
            dir.join("network.json"),
            network::to_json(&network).into_bytes(),
        );
        tree.insert(
            dir.join("network.graphml"),
            network::to_graphml(&network).into_bytes(),
        );
        tree.insert(
            dir.join("network.dot"),
            network::to_dot(&network).into_bytes(),
        );
        for cue in network.cues() {
            let frame = semantic_frame(&network, &cue.word)?;
            let stem = dir.join("frames").join(file_stem_safe(&cue.word));
            tree.insert(
                stem.with_extension("json"),
                network::to_json(&frame.network).into_bytes(),
            );
            tree.insert(
                stem.with_extension("graphml"),
                network::to_graphml(&frame.network).into_bytes(),
            );
            tree.insert(
                stem.with_extension("dot"),
                network::to_dot(&frame.network).into_bytes(),
            );
        }
        Ok(())
    })?;

    let graph = undirected_projection(&network);
    let community = community_config(config);
    let metrics = timings
        .time("metrics", || compute_metrics(&graph, &community))
        .map_err(|e| wrap(e.into()))?;
    tree.insert(
        dir.join("metrics.json"),
        metrics_json(&metrics)?.into_bytes(),
    );

    let spec = null_spec(config);
    let reports = timings
        .time("nulltest", || {
            null_test_suite(&graph, &Metric::ALL, &community, &spec)
        })
        .map_err(|e| wrap(e.into()))?;
    tree.insert(
        dir.join("nulltest.json"),
        nulltest_json(&name, &reports, config)?.into_bytes(),
    );
    let values = timings
        .time("nulltest", || clustering_distribution(&graph, &spec))
        .map_err(|e| wrap(e.into()))?;
    let (txt, sidecar) = distribution_files(
        &name,
        metrics.mean_cc,
        &values,
        "clustering_distribution.txt",
        config,
    )?;
    tree.insert(dir.join("clustering_distribution.txt"), txt.into_bytes());
    tree.insert(
        dir.join("clustering_distribution.json"),
        sidecar.into_bytes(),
    );

    Ok(CohortOutputs {
        counts,
        network,
        graph,
    })
}

/// The whole pipeline as a pure function of the configuration and the
/// input files: returns every output file, manifest included.
pub fn run_pipeline(config: &RunConfig, record_timings: bool) -> Result<OutputTree, CliError> {
    let mut timings = Timings::default();
    let (records, mut digests) = timings.time("ingest", || load_records(config))?;
    let (lemma_map, lemma_digest) = load_lemma_map(config)?;
    digests.extend(lemma_digest);
    let records_read = records.len();
    let exclusion =
        exclude_sparse_participants(records, &config.cue_list(), config.max_blank_fraction)?;
    let dropped: Vec<String> = exclusion
        .dropped
        .iter()
        .map(|r| r.participant_id.clone())
        .collect();
    let cohorts = split_cohorts(exclusion.kept);
    if cohorts.is_empty() {
        return Err(CliError::validation(
            "EmptyCohort",
            "no participant survives selection and exclusion",
        ));
    }

    let mut tree = OutputTree::new();
    let mut cohort_counts = BTreeMap::new();
    for ((source, group), kept) in &cohorts {
        let out = run_cohort(
            *source,
            *group,
            kept,
            &lemma_map,
            config,
            &mut tree,
            &mut timings,
        )?;
        cohort_counts.insert(cohort_name(*source, *group), out.counts);
    }

    let outputs: BTreeMap<String, String> = tree
        .iter()
        .map(|(p, bytes)| (p.to_string_lossy().replace('\\', "/"), sha256_hex(bytes)))
        .collect();
    let mut manifest = json!({
        "tool": "bfmn",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "inputs": digests,
        "counts": {
            "records_read": records_read,
            "participants_kept": cohorts.values().map(Vec::len).sum::<usize>(),
            "participants_dropped": dropped.len(),
            "dropped_participants": dropped,
            "cohorts": cohort_counts,
        },
        "outputs": outputs,
    });
    if record_timings {
        let stages: BTreeMap<&str, Value> = timings
            .0
            .iter()
            .map(|(k, v)| (*k, json!(sig6(*v))))
            .collect();
        manifest["timings_ms"] = json!(stages);
    }
    tree.insert(
        PathBuf::from("manifest.json"),
        canonical_json(&manifest)?.into_bytes(),
    );
    Ok(tree)
}
