use serde_json::Value;

use crate::som::SEPARATOR;
use crate::taxonomy::{Taxonomy, TaxonomyError};

use super::AnnotationRecord;

/// Why an annotator output was excluded from the dataset.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseFailure {
    #[error("output is not valid JSON: {0}")]
    NotJson(String),
    #[error("output is not a JSON array")]
    NotArray,
    #[error("entry {index} is missing string field '{field}'")]
    MissingField { index: usize, field: &'static str },
    #[error("output is an empty array")]
    EmptyArray,
    #[error("entry {index} contains the reserved separator token")]
    ReservedToken { index: usize },
    #[error("entry {index} names skill '{name}' outside the taxonomy")]
    OpenSetSkill { index: usize, name: String },
}

/// Removes one surrounding markdown code fence, if present.
fn strip_fence(text: &str) -> &str {
    let trimmed = text.trim();
    let Some(body) = trimmed.strip_prefix("```") else {
        return trimmed;
    };
    let Some(body) = body.trim_end().strip_suffix("```") else {
        return trimmed;
    };
    // drop the info string (e.g. "json") on the opening line
    match body.find('\n') {
        Some(nl) => body[nl + 1..].trim(),
        None => body.trim(),
    }
}

fn string_field<'a>(item: &'a Value, index: usize, field: &'static str) -> Result<&'a str, ParseFailure> {
    item.get(field)
        .and_then(Value::as_str)
        .filter(|s| !s.trim().is_empty())
        .ok_or(ParseFailure::MissingField { index, field })
}

pub(super) fn parse_annotation(text: &str, taxonomy: &Taxonomy, strict: bool) -> Result<Vec<AnnotationRecord>, ParseFailure> {
    let value: Value =
        serde_json::from_str(strip_fence(text)).map_err(|e| ParseFailure::NotJson(e.to_string()))?;
    let items = value.as_array().ok_or(ParseFailure::NotArray)?;
    if items.is_empty() {
        return Err(ParseFailure::EmptyArray);
    }
    items
        .iter()
        .enumerate()
        .map(|(index, item)| {
            let skill_raw = string_field(item, index, "skill")?;
            let explanation = string_field(item, index, "explanation")?.trim();
            if explanation.contains(SEPARATOR) || skill_raw.contains(SEPARATOR) {
                return Err(ParseFailure::ReservedToken { index });
            }
            let resolved = if strict {
                taxonomy.resolve_strict(skill_raw)
            } else {
                taxonomy.resolve(skill_raw)
            };
            let skill = resolved.map_err(|e| match e {
                TaxonomyError::OpenSetRejected(name) => ParseFailure::OpenSetSkill { index, name },
                _ => ParseFailure::MissingField { index, field: "skill" },
            })?;
            Ok(AnnotationRecord {
                explanation: explanation.to_string(),
                skill,
            })
        })
        .collect()
}

/// Parses annotator output: a JSON array of `{"skill", "explanation"}`
/// objects, optionally wrapped in one code fence. Skills outside the
/// taxonomy are kept as open-set matches.
pub fn parse_annotation_output(
    text: &str,
    taxonomy: &Taxonomy,
) -> Result<Vec<AnnotationRecord>, ParseFailure> {
    parse_annotation(text, taxonomy, false)
}

/// Like [`parse_annotation_output`] but rejects open-set skills.
pub fn parse_annotation_output_strict(
    text: &str,
    taxonomy: &Taxonomy,
) -> Result<Vec<AnnotationRecord>, ParseFailure> {
    parse_annotation(text, taxonomy, true)
}
