//! Skill-of-mind annotation: prompt construction, output parsing, the
//! batch engine, and dataset split/export.

mod dataset;
mod engine;
mod parse;
mod prompt;

pub use dataset::{
    entry_to_json_line, export_training_records, load_dataset, save_dataset, select_training_annotation,
    test_count, train_test_split, DatasetEntry, DatasetError, Split, TrainingRecord,
};
pub use engine::{
    annotate_corpus, AnnotateError, AnnotateOptions, AnnotationJob, AnnotationOutcome,
    FailureLog, FailureRecord,
};
pub use parse::{parse_annotation_output, parse_annotation_output_strict, ParseFailure};
pub use prompt::{build_annotation_prompt, SKILL_COLLECTION, SYSTEM_MESSAGE};

use crate::taxonomy::SkillMatch;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AnnotationError {
    #[error("dialogue context is empty")]
    EmptyDialogue,
}

/// One `(explanation, skill)` pair produced by the annotator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub explanation: String,
    pub skill: SkillMatch,
}
