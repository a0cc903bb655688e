use std::collections::BTreeMap;

use super::IngestError;
use crate::model::{
    AssociationEntry, CueList, CueResponse, Group, ParticipantRecord, Rating, Source, SLOTS_PER_CUE,
};

const FIELDS_PER_LINE: usize = 2 + 2 * SLOTS_PER_CUE;
const QUOTES: [char; 4] = ['"', '\u{201C}', '\u{201D}', '\u{201E}'];

fn is_quote(c: char) -> bool {
    QUOTES.contains(&c)
}

fn unquote(field: &str, lineno: usize) -> Result<&str, IngestError> {
    let field = field.trim();
    let mut chars = field.chars();
    match (chars.next(), chars.next_back()) {
        (Some(open), Some(close)) if is_quote(open) => {
            if !is_quote(close) {
                return Err(IngestError::MalformedLine {
                    lineno,
                    reason: format!("unterminated quote in {field:?}"),
                });
            }
            let inner = chars.as_str();
            if inner.contains(is_quote) {
                return Err(IngestError::MalformedLine {
                    lineno,
                    reason: format!("stray quote in {field:?}"),
                });
            }
            Ok(inner.trim())
        }
        (Some(open), None) if is_quote(open) => Err(IngestError::MalformedLine {
            lineno,
            reason: format!("unterminated quote in {field:?}"),
        }),
        _ if field.contains(is_quote) => Err(IngestError::MalformedLine {
            lineno,
            reason: format!("stray quote in {field:?}"),
        }),
        _ => Ok(field),
    }
}

fn rating_field(field: &str, lineno: usize) -> Result<Option<Rating>, IngestError> {
    if field.is_empty() {
        return Ok(None);
    }
    Rating::parse(field)
        .map(Some)
        .ok_or_else(|| IngestError::MalformedLine {
            lineno,
            reason: format!("invalid rating {field:?}"),
        })
}

/// Parses one participant's answer transcript.
///
/// Each non-blank line must read
/// `"cue"="rating"="assoc 1"="rating"="assoc 2"="rating"="assoc 3"="rating"`.
/// Quotes are optional; straight or typographic double quotes and
/// surrounding whitespace are accepted, anything else is an error. Cues with
/// no line become empty responses. Line numbers are 1-based.
pub fn parse_transcript(
    text: &str,
    participant_id: &str,
    source: Source,
    group: Group,
    cues: &CueList,
) -> Result<ParticipantRecord, IngestError> {
    let mut parsed: BTreeMap<String, CueResponse> = BTreeMap::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: Vec<&str> = line.split('=').collect();
        if raw.len() != FIELDS_PER_LINE {
            return Err(IngestError::WrongFieldCount {
                lineno,
                found: raw.len(),
            });
        }
        let fields = raw
            .iter()
            .map(|f| unquote(f, lineno))
            .collect::<Result<Vec<_>, _>>()?;

        let cue = fields[0];
        if !cues.contains(cue) {
            return Err(IngestError::UnknownCue(cue.to_string()));
        }
        if parsed.contains_key(cue) {
            return Err(IngestError::MalformedLine {
                lineno,
                reason: format!("duplicate cue {cue:?}"),
            });
        }
        let cue_rating = rating_field(fields[1], lineno)?;
        let associations = fields[2..]
            .chunks(2)
            .map(|pair| {
                Ok(AssociationEntry::new(
                    pair[0],
                    rating_field(pair[1], lineno)?,
                ))
            })
            .collect::<Result<Vec<_>, IngestError>>()?;
        parsed.insert(
            cue.to_string(),
            CueResponse {
                cue: cue.to_string(),
                cue_rating,
                associations,
            },
        );
    }

    let responses = cues
        .iter()
        .map(|cue| {
            parsed
                .remove(cue)
                .unwrap_or_else(|| CueResponse::empty(cue))
        })
        .collect();
    Ok(ParticipantRecord {
        participant_id: participant_id.to_string(),
        source,
        group,
        responses,
    })
}

fn renderable(text: &str) -> Result<&str, IngestError> {
    let bad = text.contains(is_quote)
        || text.contains('=')
        || text.contains('\n')
        || text.contains('\r')
        || text.trim() != text;
    if bad {
        Err(IngestError::Unrenderable(text.to_string()))
    } else {
        Ok(text)
    }
}

/// Writes a record back in transcript form, one line per non-empty response.
/// Responses with fewer than three associations are padded with blank slots.
pub fn render_transcript(record: &ParticipantRecord) -> Result<String, IngestError> {
    let rating = |r: Option<Rating>| r.map(|r| r.to_string()).unwrap_or_default();
    let mut out = String::new();
    for response in &record.responses {
        if response.cue_rating.is_none() && response.associations.is_empty() {
            continue;
        }
        if response.associations.len() > SLOTS_PER_CUE {
            return Err(IngestError::Unrenderable(response.cue.clone()));
        }
        let mut fields = vec![
            renderable(&response.cue)?.to_string(),
            rating(response.cue_rating),
        ];
        for k in 0..SLOTS_PER_CUE {
            match response.associations.get(k) {
                Some(a) => {
                    fields.push(renderable(&a.text)?.to_string());
                    fields.push(rating(a.rating));
                }
                None => {
                    fields.push(String::new());
                    fields.push(String::new());
                }
            }
        }
        let line: Vec<String> = fields.iter().map(|f| format!("\"{f}\"")).collect();
        out.push_str(&line.join("="));
        out.push('\n');
    }
    Ok(out)
}
