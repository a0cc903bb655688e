//! Study data model: participants, cues, associations and ratings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The ten cue words administered in the study, in alphabetical order.
pub const DEFAULT_CUES: [&str; 10] = [
    "art",
    "biology",
    "chemistry",
    "complex",
    "life",
    "mathematics",
    "physics",
    "school",
    "system",
    "university",
];

/// Number of association slots offered per cue.
pub const SLOTS_PER_CUE: usize = 3;

/// Where a set of responses came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Human,
    Simulated,
}

/// Expertise group of a participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Trainee,
    Expert,
    Academic,
}

impl Source {
    pub const ALL: [Source; 2] = [Source::Human, Source::Simulated];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Human => "human",
            Source::Simulated => "simulated",
        }
    }
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Trainee, Group::Expert, Group::Academic];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Trainee => "trainee",
            Group::Expert => "expert",
            Group::Academic => "academic",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error returned when a source or group tag is not recognised.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognised tag {0:?}")]
pub struct UnknownTag(pub String);

impl FromStr for Source {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "human" => Ok(Source::Human),
            "simulated" | "gpt" | "llm" => Ok(Source::Simulated),
            _ => Err(UnknownTag(s.to_string())),
        }
    }
}

impl FromStr for Group {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trainee" | "trainees" => Ok(Group::Trainee),
            "expert" | "experts" => Ok(Group::Expert),
            "academic" | "academics" => Ok(Group::Academic),
            _ => Err(UnknownTag(s.to_string())),
        }
    }
}

/// A 1–5 Likert valence rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Rating(u8);

impl Rating {
    pub const NEUTRAL: Rating = Rating(3);

    pub fn new(value: u8) -> Option<Self> {
        (1..=5).contains(&value).then_some(Rating(value))
    }

    /// Parses an integer rating, rejecting anything outside `1..=5` or non-integral.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        text.parse::<u8>().ok().and_then(Rating::new)
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for Rating {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Rating::new(value).ok_or_else(|| format!("rating {value} outside 1..=5"))
    }
}

impl From<Rating> for u8 {
    fn from(r: Rating) -> u8 {
        r.0
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One association slot. Blank text counts toward the blank quota.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationEntry {
    pub text: String,
    pub rating: Option<Rating>,
}

impl AssociationEntry {
    pub fn new(text: impl Into<String>, rating: Option<Rating>) -> Self {
        Self {
            text: text.into(),
            rating,
        }
    }

    pub fn is_blank(&self) -> bool {
        self.text.trim().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CueResponse {
    pub cue: String,
    pub cue_rating: Option<Rating>,
    pub associations: Vec<AssociationEntry>,
}

impl CueResponse {
    /// A response with no rating and no associations, used for absent cue rows.
    pub fn empty(cue: impl Into<String>) -> Self {
        Self {
            cue: cue.into(),
            cue_rating: None,
            associations: Vec::new(),
        }
    }

    pub fn filled_slots(&self) -> usize {
        self.associations.iter().filter(|a| !a.is_blank()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipantRecord {
    pub participant_id: String,
    pub source: Source,
    pub group: Group,
    pub responses: Vec<CueResponse>,
}

impl ParticipantRecord {
    pub fn response(&self, cue: &str) -> Option<&CueResponse> {
        self.responses.iter().find(|r| r.cue == cue)
    }

    /// Blank association slots out of `SLOTS_PER_CUE * cue_count`; absent
    /// responses and missing slots count as blank.
    pub fn blank_slots(&self, cue_count: usize) -> usize {
        let filled: usize = self.responses.iter().map(|r| r.filled_slots()).sum();
        (SLOTS_PER_CUE * cue_count).saturating_sub(filled)
    }
}

/// The administered cue list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CueList(Vec<String>);

impl CueList {
    pub fn new<I, S>(cues: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut cues: Vec<String> = cues.into_iter().map(Into::into).collect();
        cues.sort();
        cues.dedup();
        Self(cues)
    }

    pub fn contains(&self, cue: &str) -> bool {
        self.0.binary_search_by(|c| c.as_str().cmp(cue)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }
}

impl Default for CueList {
    fn default() -> Self {
        CueList::new(DEFAULT_CUES)
    }
}
