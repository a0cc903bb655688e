//! Run configuration: a TOML file, flag overrides and the seed environment
//! variable, in increasing order of precedence except that the environment
//! only supplies a seed when nothing else does.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use bfmn_core::ingest::ColumnMapping;
use bfmn_core::model::DEFAULT_CUES;
use bfmn_core::nullmodel::{DEFAULT_SAMPLES, DEFAULT_SWAP_FACTOR};
use bfmn_core::valence::{BlankPolicy, DEFAULT_ALPHA, DEFAULT_MIN_N};
use bfmn_core::{CueList, Group, Source};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SEED_ENV: &str = "BFMN_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Tabular,
    Transcript,
}

/// One input: a long-format table, or a transcript file or directory of
/// `.txt` transcripts (one participant per file, id = file stem).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub path: PathBuf,
    pub format: InputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Group>,
}

/// Parses `path=…,format=…[,source=…][,group=…]`.
impl FromStr for InputSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mut path, mut format, mut source, mut group) = (None, None, None, None);
        for part in s.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
            match key.trim() {
                "path" => path = Some(PathBuf::from(value)),
                "format" => {
                    format = Some(match value {
                        "tabular" => InputFormat::Tabular,
                        "transcript" => InputFormat::Transcript,
                        other => return Err(format!("unknown format {other:?}")),
                    })
                }
                "source" => source = Some(value.parse().map_err(|e| format!("{e}"))?),
                "group" => group = Some(value.parse().map_err(|e| format!("{e}"))?),
                other => return Err(format!("unknown input key {other:?}")),
            }
        }
        Ok(InputSpec {
            path: path.ok_or("input needs path=")?,
            format: format.ok_or("input needs format=")?,
            source,
            group,
        })
    }
}

/// Column names of the long-format table, TOML-friendly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TabularSchema {
    pub participant_id: String,
    pub group: String,
    pub source: Option<String>,
    pub cue: String,
    pub cue_rating: String,
    pub position: String,
    pub association: String,
    pub association_rating: String,
    pub delimiter: char,
    pub default_source: Source,
}

impl Default for TabularSchema {
    fn default() -> Self {
        let m = ColumnMapping::default();
        Self {
            participant_id: m.participant_id,
            group: m.group,
            source: m.source,
            cue: m.cue,
            cue_rating: m.cue_rating,
            position: m.position,
            association: m.association,
            association_rating: m.association_rating,
            delimiter: m.delimiter as char,
            default_source: m.default_source,
        }
    }
}

impl TabularSchema {
    pub fn mapping(&self) -> Result<ColumnMapping, CliError> {
        if !self.delimiter.is_ascii() {
            return Err(CliError::validation(
                "InvalidConfig",
                format!(
                    "delimiter {:?} must be a single ASCII character",
                    self.delimiter
                ),
            ));
        }
        Ok(ColumnMapping {
            participant_id: self.participant_id.clone(),
            group: self.group.clone(),
            source: self.source.clone(),
            cue: self.cue.clone(),
            cue_rating: self.cue_rating.clone(),
            position: self.position.clone(),
            association: self.association.clone(),
            association_rating: self.association_rating.clone(),
            delimiter: self.delimiter as u8,
            default_source: self.default_source,
        })
    }
}

/// Everything that determines a run's results. The output directory is
/// deliberately not serialized: it does not change any result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: Vec<InputSpec>,
    pub cues: Vec<String>,
    /// Cohort selectors; empty means every source / group present.
    pub sources: Vec<Source>,
    pub groups: Vec<Group>,
    pub alpha: f64,
    pub min_n: usize,
    pub blank_policy: BlankPolicy,
    pub min_participants: usize,
    pub max_blank_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma_map: Option<PathBuf>,
    pub n_samples: usize,
    pub seed: Option<u64>,
    pub swap_factor: usize,
    pub restarts: usize,
    pub schema: TabularSchema,
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            cues: DEFAULT_CUES.iter().map(|c| c.to_string()).collect(),
            sources: Vec::new(),
            groups: Vec::new(),
            alpha: DEFAULT_ALPHA,
            min_n: DEFAULT_MIN_N,
            blank_policy: BlankPolicy::default(),
            min_participants: 2,
            max_blank_fraction: 0.25,
            lemma_map: None,
            n_samples: DEFAULT_SAMPLES,
            seed: None,
            swap_factor: DEFAULT_SWAP_FACTOR,
            restarts: 10,
            schema: TabularSchema::default(),
            output: None,
        }
    }
}

fn parse_source(s: &str) -> Result<Source, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_group(s: &str) -> Result<Group, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_policy(s: &str) -> Result<BlankPolicy, String> {
    match s {
        "impute_neutral" => Ok(BlankPolicy::ImputeNeutral),
        "exclude" => Ok(BlankPolicy::Exclude),
        other => Err(format!(
            "unknown blank policy {other:?} (impute_neutral | exclude)"
        )),
    }
}

/// Flags shared by every subcommand. Each mirrors a `RunConfig` field and
/// overrides the config file when given.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Reuse the configuration recorded in a previous run's manifest.json.
    #[arg(long, global = true, conflicts_with = "config")]
    pub from_manifest: Option<PathBuf>,
    /// `path=…,format=tabular|transcript[,source=…][,group=…]`; repeatable,
    /// replaces the configured inputs.
    #[arg(long = "input", global = true)]
    pub inputs: Vec<InputSpec>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub cues: Option<Vec<String>>,
    /// Restrict to these sources; repeatable.
    #[arg(long = "source", global = true, value_parser = parse_source)]
    pub sources: Vec<Source>,
    /// Restrict to these groups; repeatable.
    #[arg(long = "group", global = true, value_parser = parse_group)]
    pub groups: Vec<Group>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub min_n: Option<usize>,
    #[arg(long, global = true, value_parser = parse_policy)]
    pub blank_policy: Option<BlankPolicy>,
    #[arg(long, global = true)]
    pub min_participants: Option<usize>,
    #[arg(long, global = true)]
    pub max_blank_fraction: Option<f64>,
    #[arg(long, global = true)]
    pub lemma_map: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n_samples: Option<usize>,
    /// Defaults to $BFMN_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub swap_factor: Option<usize>,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))
}

fn relative_to(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::validation("InvalidConfig", e.to_string()))
    }

    /// Loads the config file (paths inside it are relative to the file),
    /// applies flag overrides and resolves the seed.
    pub fn load(args: &ConfigArgs) -> Result<Self, CliError> {
        let mut config = if let Some(path) = &args.config {
            let mut c = Self::from_toml(&read_text(path)?)?;
            let base = path.parent().unwrap_or(Path::new(""));
            for input in &mut c.inputs {
                input.path = relative_to(base, &input.path);
            }
            c.lemma_map = c.lemma_map.map(|p| relative_to(base, &p));
            c.output = c.output.map(|p| relative_to(base, &p));
            c
        } else if let Some(path) = &args.from_manifest {
            let manifest: serde_json::Value = serde_json::from_str(&read_text(path)?)
                .map_err(|e| CliError::validation("InvalidManifest", e.to_string()))?;
            serde_json::from_value(manifest["config"].clone())
                .map_err(|e| CliError::validation("InvalidManifest", e.to_string()))?
        } else {
            Self::default()
        };

        if !args.inputs.is_empty() {
            config.inputs = args.inputs.clone();
        }
        if let Some(cues) = &args.cues {
            config.cues = cues.clone();
        }
        if !args.sources.is_empty() {
            config.sources = args.sources.clone();
        }
        if !args.groups.is_empty() {
            config.groups = args.groups.clone();
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = args.$field.clone() {
                    config.$field = v;
                }
            )*};
        }
        set!(
            alpha,
            min_n,
            blank_policy,
            min_participants,
            max_blank_fraction,
            n_samples,
            swap_factor,
            restarts
        );
        if args.lemma_map.is_some() {
            config.lemma_map = args.lemma_map.clone();
        }
        if args.output.is_some() {
            config.output = args.output.clone();
        }
        if args.seed.is_some() {
            config.seed = args.seed;
        }
        if config.seed.is_none() {
            config.seed = Some(match std::env::var(SEED_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| {
                    CliError::validation(
                        "InvalidConfig",
                        format!("{SEED_ENV}={v:?} is not an unsigned integer"),
                    )
                })?,
                Err(_) => 0,
            });
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::validation("InvalidConfig", msg));
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.max_blank_fraction) {
            return bad(format!(
                "max_blank_fraction {} outside [0, 1]",
                self.max_blank_fraction
            ));
        }
        if self.min_participants == 0 {
            return bad("min_participants must be at least 1".into());
        }
        if self.n_samples == 0 || self.swap_factor == 0 || self.restarts == 0 {
            return bad("n_samples, swap_factor and restarts must be at least 1".into());
        }
        if self.cues.is_empty() || self.cues.iter().any(|c| c.trim().is_empty()) {
            return bad("cue list must be non-empty and contain no blank cue".into());
        }
        self.schema.mapping()?;
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn cue_list(&self) -> CueList {
        CueList::new(self.cues.iter().cloned())
    }

    pub fn selects(&self, source: Source, group: Group) -> bool {
        (self.sources.is_empty() || self.sources.contains(&source))
            && (self.groups.is_empty() || self.groups.contains(&group))
    }
}
