//! Statistical valence labels.
//!
//! A word's ratings are compared against the pooled ratings of every other
//! word in the cohort with a two-group Kruskal-Wallis test. Significant
//! words are labelled by the direction of their mean rank.

mod kruskal;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use kruskal::{chi_square_1_sf, kruskal_wallis_two_group, KruskalWallis};

use crate::model::Rating;
use crate::normalize::NormalizedCohort;
use crate::report::sig6;

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_MIN_N: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValenceError {
    #[error("both groups must be non-empty")]
    EmptyGroup,
    #[error("ratings must be finite")]
    NonFinite,
    #[error("cohort has no words")]
    EmptyCohort,
    #[error("labels report: {0}")]
    Report(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Valence {
    Positive,
    Neutral,
    Negative,
}

impl Valence {
    pub fn as_str(self) -> &'static str {
        match self {
            Valence::Positive => "positive",
            Valence::Neutral => "neutral",
            Valence::Negative => "negative",
        }
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Valence {
    type Err = ValenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Valence::Positive),
            "neutral" => Ok(Valence::Neutral),
            "negative" => Ok(Valence::Negative),
            other => Err(ValenceError::Report(format!("unknown label {other:?}"))),
        }
    }
}

/// All ratings collected for one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingSample {
    pub word: String,
    pub ratings: Vec<Rating>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValenceLabel {
    pub word: String,
    pub label: Valence,
    pub h_statistic: f64,
    pub p_value: f64,
    pub n_word: usize,
    pub n_rest: usize,
}

impl ValenceLabel {
    fn untested(word: &str, n_word: usize, n_rest: usize) -> Self {
        Self {
            word: word.to_string(),
            label: Valence::Neutral,
            h_statistic: 0.0,
            p_value: 1.0,
            n_word,
            n_rest,
        }
    }

    fn from_test(
        word: &str,
        test: KruskalWallis,
        alpha: f64,
        n_word: usize,
        n_rest: usize,
    ) -> Self {
        let label = if test.p < alpha {
            if test.mean_rank_a > test.mean_rank_b {
                Valence::Positive
            } else if test.mean_rank_a < test.mean_rank_b {
                Valence::Negative
            } else {
                Valence::Neutral
            }
        } else {
            Valence::Neutral
        };
        Self {
            word: word.to_string(),
            label,
            h_statistic: test.h,
            p_value: test.p,
            n_word,
            n_rest,
        }
    }
}

/// Labels one word against the rest. Samples smaller than `min_n` are
/// Neutral without testing. `rest` must be non-empty.
pub fn label_word(word: &RatingSample, rest: &[f64], alpha: f64, min_n: usize) -> ValenceLabel {
    let n_word = word.ratings.len();
    if n_word < min_n.max(1) || rest.is_empty() {
        return ValenceLabel::untested(&word.word, n_word, rest.len());
    }
    let ratings: Vec<f64> = word.ratings.iter().map(|r| r.value() as f64).collect();
    match kruskal_wallis_two_group(&ratings, rest) {
        Ok(test) => ValenceLabel::from_test(&word.word, test, alpha, n_word, rest.len()),
        Err(_) => ValenceLabel::untested(&word.word, n_word, rest.len()),
    }
}

/// How missing valence ratings enter the test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlankPolicy {
    /// A blank counts as the neutral midpoint 3.
    #[default]
    ImputeNeutral,
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelConfig {
    pub alpha: f64,
    pub min_n: usize,
    pub blank_policy: BlankPolicy,
}

impl Default for LabelConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            min_n: DEFAULT_MIN_N,
            blank_policy: BlankPolicy::default(),
        }
    }
}

type Tally = [u64; 5];

/// Gathers every rating per word: cue ratings under the cue word and
/// association ratings under the association text.
pub fn collect_ratings(
    cohort: &NormalizedCohort,
    policy: BlankPolicy,
) -> BTreeMap<String, Vec<Rating>> {
    let mut out: BTreeMap<String, Vec<Rating>> = BTreeMap::new();
    let mut push = |word: &str, rating: Option<Rating>| {
        let slot = out.entry(word.to_string()).or_default();
        match (rating, policy) {
            (Some(r), _) => slot.push(r),
            (None, BlankPolicy::ImputeNeutral) => slot.push(Rating::NEUTRAL),
            (None, BlankPolicy::Exclude) => {}
        }
    };
    for record in &cohort.records {
        for response in &record.responses {
            push(&response.cue, response.cue_rating);
            for a in &response.associations {
                push(&a.text, a.rating);
            }
        }
    }
    out
}

/// Labels every word of the cohort against the pooled ratings of all other
/// words.
pub fn label_cohort(
    cohort: &NormalizedCohort,
    config: &LabelConfig,
) -> Result<BTreeMap<String, ValenceLabel>, ValenceError> {
    let ratings = collect_ratings(cohort, config.blank_policy);
    if ratings.is_empty() {
        return Err(ValenceError::EmptyCohort);
    }
    let tallies: Vec<(&String, Tally)> = ratings
        .iter()
        .map(|(w, rs)| {
            let mut t = [0u64; 5];
            for r in rs {
                t[(r.value() - 1) as usize] += 1;
            }
            (w, t)
        })
        .collect();
    let mut total = [0u64; 5];
    for (_, t) in &tallies {
        for k in 0..5 {
            total[k] += t[k];
        }
    }
    let n_total: u64 = total.iter().sum();

    let labels: Vec<ValenceLabel> = tallies
        .par_iter()
        .map(|(word, t)| {
            let n_word: u64 = t.iter().sum();
            let n_rest = n_total - n_word;
            if (n_word as usize) < config.min_n.max(1) || n_rest == 0 {
                return ValenceLabel::untested(word, n_word as usize, n_rest as usize);
            }
            let test = kruskal::from_tallies((0..5).map(|k| (t[k], total[k] - t[k])));
            ValenceLabel::from_test(word, test, config.alpha, n_word as usize, n_rest as usize)
        })
        .collect();
    Ok(labels.into_iter().map(|l| (l.word.clone(), l)).collect())
}

const REPORT_HEADER: [&str; 6] = ["word", "label", "h", "p", "n_word", "n_rest"];

/// Writes the labels report: one row per word, sorted by word, floats at six
/// significant digits.
pub fn write_labels_report<W: Write>(
    labels: &BTreeMap<String, ValenceLabel>,
    out: W,
    delimiter: u8,
) -> Result<(), ValenceError> {
    let err = |e: csv::Error| ValenceError::Report(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out);
    w.write_record(REPORT_HEADER).map_err(err)?;
    for l in labels.values() {
        w.write_record([
            l.word.clone(),
            l.label.to_string(),
            sig6(l.h_statistic).to_string(),
            sig6(l.p_value).to_string(),
            l.n_word.to_string(),
            l.n_rest.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| ValenceError::Report(e.to_string()))
}

pub fn read_labels_report<R: Read>(
    input: R,
    delimiter: u8,
) -> Result<BTreeMap<String, ValenceLabel>, ValenceError> {
    let err = |e: csv::Error| ValenceError::Report(e.to_string());
    let mut r = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .from_reader(input);
    let header = r.headers().map_err(err)?.clone();
    if header.iter().ne(REPORT_HEADER) {
        return Err(ValenceError::Report(format!(
            "unexpected header {header:?}"
        )));
    }
    let mut out = BTreeMap::new();
    for row in r.records() {
        let row = row.map_err(err)?;
        let num = |i: usize| -> Result<f64, ValenceError> {
            row[i]
                .parse()
                .map_err(|_| ValenceError::Report(format!("bad number {:?}", &row[i])))
        };
        let count = |i: usize| -> Result<usize, ValenceError> {
            row[i]
                .parse()
                .map_err(|_| ValenceError::Report(format!("bad count {:?}", &row[i])))
        };
        let label = ValenceLabel {
            word: row[0].to_string(),
            label: row[1].parse()?,
            h_statistic: num(2)?,
            p_value: num(3)?,
            n_word: count(4)?,
            n_rest: count(5)?,
        };
        out.insert(label.word.clone(), label);
    }
    Ok(out)
}
