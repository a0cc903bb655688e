//! Reading raw study data into validated [`ParticipantRecord`]s.
//!
//! Two input shapes are supported: a long-format delimited table (one row
//! per association slot) and answer transcripts that follow the
//! `"cue"="rating"="assoc"="rating"=...` line grammar. Both produce one
//! [`CueResponse`] per administered cue; cues missing from the input become
//! empty responses so blank counting has a fixed denominator.

mod tabular;
mod transcript;

pub use tabular::{parse_tabular, ColumnMapping};
pub use transcript::{parse_transcript, render_transcript};

use crate::model::{CueList, ParticipantRecord, SLOTS_PER_CUE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("row {row}: bad rating {value:?}")]
    BadRating { row: u64, value: String },
    #[error("participant {participant:?}: duplicate response for cue {cue:?}")]
    DuplicateCue { participant: String, cue: String },
    #[error("row {row}: bad value {value:?} in column {column:?}")]
    BadField {
        row: u64,
        column: String,
        value: String,
    },
    #[error("participant {participant:?}: {reason}")]
    InconsistentParticipant { participant: String, reason: String },
    #[error("line {lineno}: {reason}")]
    MalformedLine { lineno: usize, reason: String },
    #[error("unknown cue {0:?}")]
    UnknownCue(String),
    #[error("line {lineno}: expected 8 fields, found {found}")]
    WrongFieldCount { lineno: usize, found: usize },
    #[error("cannot render {0:?} in transcript form")]
    Unrenderable(String),
    #[error("blank fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for IngestError {
    fn from(e: csv::Error) -> Self {
        IngestError::Csv(e.to_string())
    }
}

/// Result of the blank-response exclusion rule.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Exclusion {
    pub kept: Vec<ParticipantRecord>,
    pub dropped: Vec<ParticipantRecord>,
}

/// Drops every participant whose blank association slots exceed
/// `max_blank_fraction` of `3 * cues.len()`. Ratings never count as blanks and
/// the comparison is strict, so a fraction exactly at the threshold is kept.
pub fn exclude_sparse_participants(
    records: Vec<ParticipantRecord>,
    cues: &CueList,
    max_blank_fraction: f64,
) -> Result<Exclusion, IngestError> {
    if !(0.0..=1.0).contains(&max_blank_fraction) {
        return Err(IngestError::InvalidFraction(max_blank_fraction));
    }
    let slots = SLOTS_PER_CUE * cues.len();
    let mut out = Exclusion::default();
    for record in records {
        // blanks/slots > f  <=>  blanks > f * slots, kept in integer-friendly form
        let blanks = record.blank_slots(cues.len());
        if slots > 0 && (blanks as f64) > max_blank_fraction * slots as f64 {
            out.dropped.push(record);
        } else {
            out.kept.push(record);
        }
    }
    Ok(out)
}
