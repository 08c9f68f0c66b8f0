use std::collections::BTreeMap;

use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};

use crate::backend::{BackendError, ChatBackend, ChatRequest};
use crate::corpus::{SourceKind, SubDialogue, Turn};
use crate::taxonomy::Taxonomy;
use crate::templates::{TemplateError, TemplateRegistry};

use super::dataset::{DatasetEntry, Split};
use super::parse::parse_annotation;
use super::prompt::build_annotation_prompt;

/// One sub-dialogue ready to be sent to the annotator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationJob {
    pub id: String,
    pub source: SourceKind,
    pub social_context: BTreeMap<String, String>,
    pub social_context_text: String,
    pub context: Vec<Turn>,
    pub next_response: Turn,
}

impl AnnotationJob {
    /// Renders the social context with a variant keyed by the sub-dialogue id.
    pub fn from_subdialogue(
        sub: &SubDialogue,
        registry: &TemplateRegistry,
        seed: u64,
    ) -> Result<Self, TemplateError> {
        let rendered = registry.render_social_context(sub.source, &sub.social_context, seed, &sub.id)?;
        Ok(Self::with_text(sub, rendered.text))
    }

    pub fn with_text(sub: &SubDialogue, social_context_text: String) -> Self {
        AnnotationJob {
            id: sub.id.clone(),
            source: sub.source,
            social_context: sub.social_context.clone(),
            social_context_text,
            context: sub.context.clone(),
            next_response: sub.next_response.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AnnotateOptions {
    pub max_concurrency: usize,
    /// Exclude skills outside the taxonomy instead of keeping them open-set.
    pub strict: bool,
}

impl Default for AnnotateOptions {
    fn default() -> Self {
        AnnotateOptions {
            max_concurrency: 8,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub id: String,
    pub cause: String,
    pub raw_output: String,
}

pub type FailureLog = Vec<FailureRecord>;

#[derive(Debug, Clone, Default)]
pub struct AnnotationOutcome {
    pub entries: Vec<DatasetEntry>,
    pub failures: FailureLog,
}

#[derive(Debug, thiserror::Error)]
pub enum AnnotateError {
    #[error(transparent)]
    Auth(BackendError),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
}

enum ItemResult {
    Entry(DatasetEntry),
    Failure(FailureRecord),
}

async fn annotate_one(
    job: &AnnotationJob,
    backend: &dyn ChatBackend,
    taxonomy: &Taxonomy,
    strict: bool,
) -> Result<ItemResult, BackendError> {
    let failure = |cause: String, raw: &str| {
        Ok(ItemResult::Failure(FailureRecord {
            id: job.id.clone(),
            cause,
            raw_output: raw.to_string(),
        }))
    };
    let messages = match build_annotation_prompt(&job.social_context_text, &job.context, &job.next_response) {
        Ok(m) => m,
        Err(e) => return failure(e.to_string(), ""),
    };
    let raw = match backend.complete(ChatRequest::with_id(&job.id, &messages)).await {
        Ok(raw) => raw,
        Err(e @ BackendError::Auth(_)) => return Err(e),
        Err(e) => return failure(e.to_string(), ""),
    };
    match parse_annotation(&raw, taxonomy, strict) {
        Ok(annotations) => Ok(ItemResult::Entry(DatasetEntry {
            id: job.id.clone(),
            source: job.source,
            social_context_text: job.social_context_text.clone(),
            social_context: job.social_context.clone(),
            context: job.context.clone(),
            next_response: job.next_response.clone(),
            annotations,
            split: Split::Unassigned,
        })),
        Err(e) => failure(e.to_string(), &raw),
    }
}

/// Annotates every job with at most `max_concurrency` backend calls in
/// flight. Entries and failures come back in input order. Only an
/// authentication error aborts the batch.
pub async fn annotate_corpus(
    jobs: &[AnnotationJob],
    backend: &dyn ChatBackend,
    taxonomy: &Taxonomy,
    options: AnnotateOptions,
) -> Result<AnnotationOutcome, AnnotateError> {
    if options.max_concurrency == 0 {
        return Err(AnnotateError::InvalidOptions("max_concurrency must be positive".into()));
    }
    let mut results = stream::iter(jobs)
        .map(|job| annotate_one(job, backend, taxonomy, options.strict))
        .buffered(options.max_concurrency);

    let mut outcome = AnnotationOutcome::default();
    while let Some(item) = results.next().await {
        match item.map_err(AnnotateError::Auth)? {
            ItemResult::Entry(e) => outcome.entries.push(e),
            ItemResult::Failure(f) => {
                tracing::debug!(id = %f.id, cause = %f.cause, "annotation excluded");
                outcome.failures.push(f);
            }
        }
    }
    Ok(outcome)
}
