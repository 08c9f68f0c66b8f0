use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{SourceKind, Turn};
use crate::jsonl::{self, ReadError};
use crate::seeding::rng_for;
use crate::som;
use crate::taxonomy::{Resolution, Taxonomy};
use crate::templates::{TemplateError, TemplateRegistry};

use super::AnnotationRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    Unassigned,
}

/// One annotated sub-dialogue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub id: String,
    pub source: SourceKind,
    pub social_context_text: String,
    /// Template bindings the text was rendered from; lets training export
    /// draw a fresh variant.
    pub social_context: BTreeMap<String, String>,
    pub context: Vec<Turn>,
    pub next_response: Turn,
    pub annotations: Vec<AnnotationRecord>,
    pub split: Split,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("test_fraction must be in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("entry {0} has no annotations")]
    NoAnnotations(String),
    #[error("entry {0} is not in the train split")]
    NotTrain(String),
    #[error("entry {id}: unknown skill '{skill}'")]
    UnknownSkill { id: String, skill: String },
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct AnnotationRow {
    explanation: String,
    skill: String,
    skill_resolution: Resolution,
}

#[derive(Serialize, Deserialize)]
struct DatasetRow {
    id: String,
    source: SourceKind,
    social_context_text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    social_context: BTreeMap<String, String>,
    context: Vec<Turn>,
    next_response: Turn,
    annotations: Vec<AnnotationRow>,
    split: Split,
}

impl From<&DatasetEntry> for DatasetRow {
    fn from(e: &DatasetEntry) -> Self {
        DatasetRow {
            id: e.id.clone(),
            source: e.source,
            social_context_text: e.social_context_text.clone(),
            social_context: e.social_context.clone(),
            context: e.context.clone(),
            next_response: e.next_response.clone(),
            annotations: e
                .annotations
                .iter()
                .map(|a| AnnotationRow {
                    explanation: a.explanation.clone(),
                    skill: a.skill.name().to_string(),
                    skill_resolution: a.skill.resolution,
                })
                .collect(),
            split: e.split,
        }
    }
}

impl DatasetRow {
    fn into_entry(self, taxonomy: &Taxonomy) -> Result<DatasetEntry, DatasetError> {
        let annotations = self
            .annotations
            .into_iter()
            .map(|a| {
                let skill = taxonomy.resolve(&a.skill).map_err(|_| DatasetError::UnknownSkill {
                    id: self.id.clone(),
                    skill: a.skill.clone(),
                })?;
                Ok(AnnotationRecord {
                    explanation: a.explanation,
                    skill,
                })
            })
            .collect::<Result<Vec<_>, DatasetError>>()?;
        Ok(DatasetEntry {
            id: self.id,
            source: self.source,
            social_context_text: self.social_context_text,
            social_context: self.social_context,
            context: self.context,
            next_response: self.next_response,
            annotations,
            split: self.split,
        })
    }
}

pub fn entry_to_json_line(entry: &DatasetEntry) -> String {
    jsonl::to_line(&DatasetRow::from(entry))
}

pub fn save_dataset(entries: &[DatasetEntry], path: &Path) -> Result<(), DatasetError> {
    let rows: Vec<DatasetRow> = entries.iter().map(DatasetRow::from).collect();
    jsonl::write_lines(path, &rows)?;
    Ok(())
}

/// Reads a dataset file, re-resolving every stored skill name.
pub fn load_dataset(path: &Path, taxonomy: &Taxonomy) -> Result<Vec<DatasetEntry>, DatasetError> {
    jsonl::read_lines::<DatasetRow>(path)?
        .into_iter()
        .map(|row| row.into_entry(taxonomy))
        .collect()
}

/// Number of test items: `N * fraction` rounded half up.
pub fn test_count(n: usize, test_fraction: f64) -> usize {
    (n as f64 * test_fraction + 0.5).floor() as usize
}

/// Seeded shuffle then partition. Both halves keep the input order and
/// carry their split tag.
pub fn train_test_split(
    mut entries: Vec<DatasetEntry>,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<DatasetEntry>, Vec<DatasetEntry>), DatasetError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction(test_fraction));
    }
    let n_test = test_count(entries.len(), test_fraction);
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.shuffle(&mut rng_for(seed, "train_test_split"));
    let mut is_test = vec![false; entries.len()];
    for &i in &order[..n_test] {
        is_test[i] = true;
    }
    for (entry, test) in entries.iter_mut().zip(&is_test) {
        entry.split = if *test { Split::Test } else { Split::Train };
    }
    Ok(entries.into_iter().partition(|e| e.split == Split::Train))
}

/// Picks one annotation uniformly, seeded by `(seed, entry.id)`.
pub fn select_training_annotation(
    entry: &DatasetEntry,
    seed: u64,
) -> Result<&AnnotationRecord, DatasetError> {
    if entry.annotations.is_empty() {
        return Err(DatasetError::NoAnnotations(entry.id.clone()));
    }
    let index = rng_for(seed, &entry.id).random_range(0..entry.annotations.len());
    Ok(&entry.annotations[index])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub input: String,
    pub target: String,
}

/// Builds `{input, target}` pairs for fine-tuning. The social context is
/// re-rendered from the stored bindings with a freshly sampled variant;
/// entries without bindings fall back to their stored text.
pub fn export_training_records(
    entries: &[DatasetEntry],
    registry: &TemplateRegistry,
    seed: u64,
) -> Result<Vec<TrainingRecord>, DatasetError> {
    entries
        .iter()
        .map(|entry| {
            if entry.split != Split::Train {
                return Err(DatasetError::NotTrain(entry.id.clone()));
            }
            let ctx = if entry.social_context.is_empty() {
                entry.social_context_text.clone()
            } else {
                let key = format!("export:{}", entry.id);
                let text = registry
                    .render_social_context(entry.source, &entry.social_context, seed, &key)?
                    .text;
                if text.is_empty() {
                    entry.social_context_text.clone()
                } else {
                    text
                }
            };
            let chosen = select_training_annotation(entry, seed)?;
            Ok(TrainingRecord {
                input: som::training_input(Some(&ctx), &entry.context),
                target: som::format_parts(&chosen.explanation, [chosen.skill.name()]),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::builtin_taxonomy;
    use crate::templates::builtin_registry;
    use proptest::prelude::*;

    fn entry(i: usize, skills: &[&str]) -> DatasetEntry {
        let t = builtin_taxonomy();
        DatasetEntry {
            id: format!("e{i}"),
            source: SourceKind::Soda,
            social_context_text: "Sawyer and Gregg are shopping.".into(),
            social_context: BTreeMap::new(),
            context: vec![Turn::new("Sawyer", "I need milk."), Turn::new("Gregg", "Aisle four.")],
            next_response: Turn::new("Sawyer", "Thanks!"),
            annotations: skills
                .iter()
                .enumerate()
                .map(|(k, s)| AnnotationRecord {
                    explanation: format!("because {k}"),
                    skill: t.resolve(s).unwrap(),
                })
                .collect(),
            split: Split::Unassigned,
        }
    }

    #[test]
    fn split_counts() {
        assert_eq!(test_count(50, 0.1), 5);
        assert_eq!(test_count(99_997, 0.1), 10_000);
        assert_eq!(test_count(15, 0.1), 2);
        assert_eq!(test_count(14, 0.1), 1);
        let entries: Vec<_> = (0..50).map(|i| entry(i, &["Empathy"])).collect();
        let (train, test) = train_test_split(entries.clone(), 0.1, 3).unwrap();
        assert_eq!((train.len(), test.len()), (45, 5));
        assert!(train.iter().all(|e| e.split == Split::Train));
        assert!(test.iter().all(|e| e.split == Split::Test));
        let (_, again) = train_test_split(entries, 0.1, 3).unwrap();
        assert_eq!(test, again);
        assert!(matches!(
            train_test_split(vec![], 1.0, 0),
            Err(DatasetError::InvalidFraction(_))
        ));
    }

    #[test]
    fn selection() {
        let one = entry(0, &["Empathy"]);
        for seed in 0..20 {
            assert_eq!(select_training_annotation(&one, seed).unwrap().skill.name(), "Empathy");
        }
        let none = entry(1, &[]);
        assert!(matches!(
            select_training_annotation(&none, 0),
            Err(DatasetError::NoAnnotations(_))
        ));
        let two = entry(2, &["Empathy", "Ethics"]);
        let trials = 4000;
        let firsts = (0..trials)
            .filter(|&s| select_training_annotation(&two, s).unwrap().skill.name() == "Empathy")
            .count();
        let p = firsts as f64 / trials as f64;
        assert!((p - 0.5).abs() < 0.03, "p = {p}");
    }

    #[test]
    fn export_format() {
        let mut e = entry(0, &["Empathy"]);
        e.annotations[0].explanation = "E".into();
        e.split = Split::Train;
        let recs = export_training_records(&[e.clone()], &builtin_registry(), 1).unwrap();
        assert_eq!(recs[0].target, "E [RESULT SKILL] Empathy");
        assert_eq!(
            recs[0].input,
            "Sawyer and Gregg are shopping.\n\nSawyer: I need milk.\nGregg: Aisle four."
        );
        e.split = Split::Test;
        assert!(matches!(
            export_training_records(&[e], &builtin_registry(), 1),
            Err(DatasetError::NotTrain(_))
        ));
    }

    #[test]
    fn dataset_round_trip() {
        let t = builtin_taxonomy();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let mut entries = vec![entry(0, &["Empathy", "Preference Elicitation"]), entry(1, &["Feedback Giving"])];
        entries[0].social_context.insert("narrative".into(), "x".into());
        save_dataset(&entries, &path).unwrap();
        let back = load_dataset(&path, &t).unwrap();
        assert_eq!(back, entries);
        let line = std::fs::read_to_string(&path).unwrap();
        assert!(line.contains("\"skill_resolution\":\"extended\""));
        assert!(line.contains("\"skill_resolution\":\"open_set\""));
        assert!(line.contains("\"split\":\"unassigned\""));
    }

    proptest! {
        #[test]
        fn split_is_partition(n in 0usize..200, frac in 0.01f64..0.99, seed in any::<u64>()) {
            let entries: Vec<_> = (0..n).map(|i| entry(i, &["Empathy"])).collect();
            let (train, test) = train_test_split(entries, frac, seed).unwrap();
            prop_assert_eq!(test.len(), test_count(n, frac));
            prop_assert_eq!(train.len() + test.len(), n);
            let mut ids: Vec<_> = train.iter().chain(&test).map(|e| e.id.clone()).collect();
            ids.sort();
            ids.dedup();
            prop_assert_eq!(ids.len(), n);
        }
    }
}
