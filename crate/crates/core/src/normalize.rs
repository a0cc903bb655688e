//! Text normalization and the idiosyncrasy filter.
//!
//! The normalization pipeline runs in a fixed order on every association
//! text: whitespace trim, lowercase, lemma-map lookup, plural-`s` stripping,
//! then junk removal (blank, non-letter, single-letter). Every change or
//! removal is written to a provenance log that can be replayed over the raw
//! records to reproduce the normalized cohort.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::ParticipantRecord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error("lemma map line {lineno}: expected `raw<TAB>base`")]
    BadLemmaLine { lineno: usize },
    #[error("lemma map is not idempotent: {base:?} is itself mapped to {next:?}")]
    NonIdempotentMap { base: String, next: String },
    #[error("no association survives the filter")]
    EmptyCohort,
    #[error("min_participants must be at least 1")]
    InvalidThreshold,
}

/// Raw form to base form. Base forms never map onward.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaMap {
    entries: BTreeMap<String, String>,
}

impl LemmaMap {
    pub fn new<I, K, V>(pairs: I) -> Result<Self, NormalizeError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let entries: BTreeMap<String, String> = pairs
            .into_iter()
            .map(|(k, v)| {
                (
                    k.as_ref().trim().to_lowercase(),
                    v.as_ref().trim().to_lowercase(),
                )
            })
            .collect();
        for base in entries.values() {
            if let Some(next) = entries.get(base) {
                if next != base {
                    return Err(NormalizeError::NonIdempotentMap {
                        base: base.clone(),
                        next: next.clone(),
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    /// Parses the `raw<TAB>base` file format. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, NormalizeError> {
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (raw, base) = line
                .split_once('\t')
                .filter(|(r, b)| !r.trim().is_empty() && !b.trim().is_empty() && !b.contains('\t'))
                .ok_or(NormalizeError::BadLemmaLine { lineno: idx + 1 })?;
            pairs.push((raw.to_string(), base.to_string()));
        }
        Self::new(pairs)
    }

    pub fn lookup<'a>(&'a self, word: &'a str) -> &'a str {
        self.entries.get(word).map(String::as_str).unwrap_or(word)
    }

    fn is_base_form(&self, word: &str) -> bool {
        self.entries.values().any(|v| v == word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    Blank,
    NonLetter,
    SingleLetter,
    Idiosyncratic,
}

impl fmt::Display for RemovalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RemovalReason::Blank => "blank",
            RemovalReason::NonLetter => "non_letter",
            RemovalReason::SingleLetter => "single_letter",
            RemovalReason::Idiosyncratic => "idiosyncratic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Normalized(String),
    Removed(RemovalReason),
}

/// One logged transformation. `slot` indexes the association in the raw record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub participant: String,
    pub cue: String,
    pub slot: usize,
    pub raw: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedCohort {
    pub records: Vec<ParticipantRecord>,
    pub provenance_log: Vec<ProvenanceEntry>,
    /// For every surviving association, its slot index in the raw record.
    slot_origins: Vec<Vec<Vec<usize>>>,
}

impl NormalizedCohort {
    pub fn association_count(&self) -> usize {
        self.records
            .iter()
            .flat_map(|r| &r.responses)
            .map(|c| c.associations.len())
            .sum()
    }
}

fn clean_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn classify(word: &str) -> Option<RemovalReason> {
    if word.is_empty() {
        Some(RemovalReason::Blank)
    } else if !word.chars().all(|c| c.is_alphabetic() || c == ' ') {
        Some(RemovalReason::NonLetter)
    } else if word.chars().count() < 2 {
        Some(RemovalReason::SingleLetter)
    } else {
        None
    }
}

/// Runs the normalization pipeline over every association of every record.
/// Cue words and ratings are left untouched. Total: removals are logged,
/// never raised.
pub fn normalize_cohort(records: &[ParticipantRecord], lemma_map: &LemmaMap) -> NormalizedCohort {
    let mapped = |text: &str| {
        let lowered = clean_whitespace(text).to_lowercase();
        lemma_map.lookup(&lowered).to_string()
    };

    let mut vocabulary: BTreeSet<String> = BTreeSet::new();
    for record in records {
        for response in &record.responses {
            vocabulary.insert(response.cue.clone());
            for a in &response.associations {
                vocabulary.insert(mapped(&a.text));
            }
        }
    }

    // Stripping repeats until no known stem remains, so a second pass over
    // the output finds nothing left to strip.
    let singular = |mut word: String| -> String {
        loop {
            let known = word.strip_suffix('s').is_some_and(|stem| {
                !stem.is_empty()
                    && lemma_map.lookup(stem) == stem
                    && (vocabulary.contains(stem) || lemma_map.is_base_form(stem))
            });
            if !known {
                break;
            }
            word.pop();
        }
        word
    };

    let mut out_records = Vec::with_capacity(records.len());
    let mut origins = Vec::with_capacity(records.len());
    let mut log = Vec::new();

    for record in records {
        let mut rec = record.clone();
        let mut rec_origins = Vec::with_capacity(rec.responses.len());
        for response in rec.responses.iter_mut() {
            let mut kept = Vec::with_capacity(response.associations.len());
            let mut kept_origins = Vec::with_capacity(response.associations.len());
            for (slot, entry) in response.associations.drain(..).enumerate() {
                let word = singular(mapped(&entry.text));
                let outcome = match classify(&word) {
                    Some(reason) => Outcome::Removed(reason),
                    None => Outcome::Normalized(word),
                };
                let changed = match &outcome {
                    Outcome::Normalized(w) => *w != entry.text,
                    Outcome::Removed(_) => true,
                };
                if changed {
                    log.push(ProvenanceEntry {
                        participant: record.participant_id.clone(),
                        cue: response.cue.clone(),
                        slot,
                        raw: entry.text.clone(),
                        outcome: outcome.clone(),
                    });
                }
                if let Outcome::Normalized(word) = outcome {
                    kept.push(crate::model::AssociationEntry {
                        text: word,
                        rating: entry.rating,
                    });
                    kept_origins.push(slot);
                }
            }
            response.associations = kept;
            rec_origins.push(kept_origins);
        }
        out_records.push(rec);
        origins.push(rec_origins);
    }

    NormalizedCohort {
        records: out_records,
        provenance_log: log,
        slot_origins: origins,
    }
}

/// Keeps an association only if at least `min_participants` distinct
/// participants of the cohort gave the same normalized word for the same cue.
pub fn filter_idiosyncratic(
    cohort: &NormalizedCohort,
    min_participants: usize,
) -> Result<NormalizedCohort, NormalizeError> {
    if min_participants == 0 {
        return Err(NormalizeError::InvalidThreshold);
    }
    let mut support: HashMap<(&str, &str), BTreeSet<&str>> = HashMap::new();
    for record in &cohort.records {
        for response in &record.responses {
            for a in &response.associations {
                support
                    .entry((response.cue.as_str(), a.text.as_str()))
                    .or_default()
                    .insert(record.participant_id.as_str());
            }
        }
    }
    let keep = |cue: &str, word: &str| {
        support.get(&(cue, word)).map_or(0, BTreeSet::len) >= min_participants
    };

    let mut out = cohort.clone();
    for (r_idx, record) in out.records.iter_mut().enumerate() {
        for (c_idx, response) in record.responses.iter_mut().enumerate() {
            let origins = &mut out.slot_origins[r_idx][c_idx];
            let mut kept = Vec::new();
            let mut kept_origins = Vec::new();
            for (entry, slot) in response.associations.drain(..).zip(origins.drain(..)) {
                if keep(&response.cue, &entry.text) {
                    kept.push(entry);
                    kept_origins.push(slot);
                } else {
                    out.provenance_log.push(ProvenanceEntry {
                        participant: record.participant_id.clone(),
                        cue: response.cue.clone(),
                        slot,
                        raw: entry.text,
                        outcome: Outcome::Removed(RemovalReason::Idiosyncratic),
                    });
                }
            }
            response.associations = kept;
            *origins = kept_origins;
        }
    }
    if out.association_count() == 0 {
        return Err(NormalizeError::EmptyCohort);
    }
    Ok(out)
}

/// Applies a provenance log to raw records. Entries are applied in log order;
/// slots without entries keep their raw text.
pub fn replay_provenance(
    raw: &[ParticipantRecord],
    log: &[ProvenanceEntry],
) -> Vec<ParticipantRecord> {
    let mut by_slot: HashMap<(&str, &str, usize), Vec<&Outcome>> = HashMap::new();
    for e in log {
        by_slot
            .entry((e.participant.as_str(), e.cue.as_str(), e.slot))
            .or_default()
            .push(&e.outcome);
    }
    raw.iter()
        .map(|record| {
            let mut rec = record.clone();
            for response in rec.responses.iter_mut() {
                let cue = response.cue.clone();
                let mut kept = Vec::with_capacity(response.associations.len());
                for (slot, mut entry) in response.associations.drain(..).enumerate() {
                    let mut alive = true;
                    if let Some(outcomes) =
                        by_slot.get(&(record.participant_id.as_str(), cue.as_str(), slot))
                    {
                        for o in outcomes {
                            match o {
                                Outcome::Normalized(w) => entry.text = w.clone(),
                                Outcome::Removed(_) => alive = false,
                            }
                        }
                    }
                    if alive {
                        kept.push(entry);
                    }
                }
                response.associations = kept;
            }
            rec
        })
        .collect()
}
