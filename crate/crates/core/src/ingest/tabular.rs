use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::{
    AssociationEntry, CueList, CueResponse, Group, ParticipantRecord, Rating, Source, SLOTS_PER_CUE,
};

/// Names the columns of a long-format export, one row per association slot.
///
/// A row with an empty `position` carries only the cue rating. Rows for the
/// same participant and cue may repeat the cue rating, but must agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMapping {
    pub participant_id: String,
    pub group: String,
    /// When `None` (or absent from the header) every row gets `default_source`.
    pub source: Option<String>,
    pub cue: String,
    pub cue_rating: String,
    pub position: String,
    pub association: String,
    pub association_rating: String,
    pub delimiter: u8,
    pub default_source: Source,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            participant_id: "participant_id".into(),
            group: "group".into(),
            source: Some("source".into()),
            cue: "cue".into(),
            cue_rating: "cue_rating".into(),
            position: "position".into(),
            association: "association".into(),
            association_rating: "association_rating".into(),
            delimiter: b',',
            default_source: Source::Human,
        }
    }
}

struct Columns {
    id: usize,
    group: usize,
    source: Option<usize>,
    cue: usize,
    cue_rating: usize,
    position: usize,
    association: usize,
    association_rating: usize,
}

impl Columns {
    fn resolve(headers: &csv::StringRecord, m: &ColumnMapping) -> Result<Self, IngestError> {
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
        };
        let source = match &m.source {
            Some(name) => headers.iter().position(|h| h.trim() == name),
            None => None,
        };
        Ok(Self {
            id: find(&m.participant_id)?,
            group: find(&m.group)?,
            source,
            cue: find(&m.cue)?,
            cue_rating: find(&m.cue_rating)?,
            position: find(&m.position)?,
            association: find(&m.association)?,
            association_rating: find(&m.association_rating)?,
        })
    }
}

#[derive(Default)]
struct CueAccumulator {
    rating: Option<Rating>,
    slots: BTreeMap<usize, AssociationEntry>,
}

struct ParticipantAccumulator {
    source: Source,
    group: Group,
    cues: BTreeMap<String, CueAccumulator>,
}

fn optional_rating(raw: &str, row: u64) -> Result<Option<Rating>, IngestError> {
    if raw.trim().is_empty() {
        return Ok(None);
    }
    Rating::parse(raw)
        .map(Some)
        .ok_or_else(|| IngestError::BadRating {
            row,
            value: raw.to_string(),
        })
}

/// Parses a long-format delimited export into one record per participant,
/// in order of first appearance. `row` numbers in errors are 1-based file
/// lines, so the header is line 1.
pub fn parse_tabular<R: Read>(
    input: R,
    mapping: &ColumnMapping,
    cues: &CueList,
) -> Result<Vec<ParticipantRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(mapping.delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(input);
    let cols = Columns::resolve(reader.headers()?, mapping)?;

    let mut order: Vec<String> = Vec::new();
    let mut people: BTreeMap<String, ParticipantAccumulator> = BTreeMap::new();

    for result in reader.records() {
        let rec = result?;
        let row = rec.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| rec.get(i).unwrap_or("").trim();

        let id = field(cols.id);
        if id.is_empty() {
            return Err(IngestError::BadField {
                row,
                column: mapping.participant_id.clone(),
                value: String::new(),
            });
        }
        let group: Group = field(cols.group)
            .parse()
            .map_err(|_| IngestError::BadField {
                row,
                column: mapping.group.clone(),
                value: field(cols.group).to_string(),
            })?;
        let source = match cols.source {
            Some(i) => field(i).parse().map_err(|_| IngestError::BadField {
                row,
                column: mapping.source.clone().unwrap_or_default(),
                value: field(i).to_string(),
            })?,
            None => mapping.default_source,
        };
        let cue = field(cols.cue);
        if !cues.contains(cue) {
            return Err(IngestError::UnknownCue(cue.to_string()));
        }
        let cue_rating = optional_rating(field(cols.cue_rating), row)?;
        let association_rating = optional_rating(field(cols.association_rating), row)?;
        let association = field(cols.association);
        let position_raw = field(cols.position);

        let person = match people.get_mut(id) {
            Some(p) => {
                if p.group != group || p.source != source {
                    return Err(IngestError::InconsistentParticipant {
                        participant: id.to_string(),
                        reason: format!("row {row}: group/source differs from earlier rows"),
                    });
                }
                p
            }
            None => {
                order.push(id.to_string());
                people
                    .entry(id.to_string())
                    .or_insert(ParticipantAccumulator {
                        source,
                        group,
                        cues: BTreeMap::new(),
                    })
            }
        };
        let acc = person.cues.entry(cue.to_string()).or_default();

        if let Some(r) = cue_rating {
            match acc.rating {
                Some(prev) if prev != r => {
                    return Err(IngestError::InconsistentParticipant {
                        participant: id.to_string(),
                        reason: format!("row {row}: conflicting ratings for cue {cue:?}"),
                    })
                }
                _ => acc.rating = Some(r),
            }
        }

        if position_raw.is_empty() {
            if !association.is_empty() || association_rating.is_some() {
                return Err(IngestError::BadField {
                    row,
                    column: mapping.position.clone(),
                    value: String::new(),
                });
            }
            continue;
        }
        let position: usize = position_raw
            .parse()
            .ok()
            .filter(|p| (1..=SLOTS_PER_CUE).contains(p))
            .ok_or_else(|| IngestError::BadField {
                row,
                column: mapping.position.clone(),
                value: position_raw.to_string(),
            })?;
        if acc.slots.contains_key(&position) {
            return Err(IngestError::DuplicateCue {
                participant: id.to_string(),
                cue: cue.to_string(),
            });
        }
        acc.slots.insert(
            position,
            AssociationEntry::new(association, association_rating),
        );
    }

    Ok(order
        .into_iter()
        .map(|id| {
            let mut person = people.remove(&id).expect("participant recorded in order");
            let responses = cues
                .iter()
                .map(|cue| match person.cues.remove(cue) {
                    Some(acc) => {
                        let last = acc.slots.keys().next_back().copied().unwrap_or(0);
                        let associations = (1..=last)
                            .map(|p| {
                                acc.slots
                                    .get(&p)
                                    .cloned()
                                    .unwrap_or_else(|| AssociationEntry::new("", None))
                            })
                            .collect();
                        CueResponse {
                            cue: cue.to_string(),
                            cue_rating: acc.rating,
                            associations,
                        }
                    }
                    None => CueResponse::empty(cue),
                })
                .collect();
            ParticipantRecord {
                participant_id: id,
                source: person.source,
                group: person.group,
                responses,
            }
        })
        .collect())
}
