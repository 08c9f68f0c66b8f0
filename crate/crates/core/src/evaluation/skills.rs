use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::annotation::DatasetEntry;
use crate::taxonomy::SkillMatch;

use super::{count, lit, EvalError, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkillPrediction {
    pub predicted: Vec<SkillMatch>,
    pub gold: Vec<SkillMatch>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyMode {
    /// Correct when any predicted key is in the gold set.
    #[default]
    AnyMatch,
    /// Correct when the predicted and gold key sets are equal.
    Exact,
}

fn keys(skills: &[SkillMatch]) -> BTreeSet<&str> {
    skills.iter().map(SkillMatch::key).collect()
}

/// Percentage of correct predictions, compared by normalized key.
pub fn skill_accuracy<T: Scalar>(preds: &[SkillPrediction], mode: AccuracyMode) -> Result<T, EvalError> {
    if preds.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut correct = 0;
    for (i, p) in preds.iter().enumerate() {
        let gold = keys(&p.gold);
        if gold.is_empty() {
            return Err(EvalError::EmptyGold(i));
        }
        let predicted = keys(&p.predicted);
        let hit = match mode {
            AccuracyMode::AnyMatch => predicted.iter().any(|k| gold.contains(k)),
            AccuracyMode::Exact => predicted == gold,
        };
        correct += usize::from(hit);
    }
    Ok(lit::<T>(100.0) * count::<T>(correct) / count::<T>(preds.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkillShare<T> {
    pub skill: String,
    pub count: usize,
    pub percentage: T,
}

/// Share of every annotation per skill, top `top_k` by count with an
/// alphabetical tie-break.
pub fn skill_distribution<T: Scalar>(
    entries: &[DatasetEntry],
    top_k: usize,
) -> Result<Vec<SkillShare<T>>, EvalError> {
    if entries.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut counts: HashMap<&str, (&str, usize)> = HashMap::new();
    let mut total = 0usize;
    for a in entries.iter().flat_map(|e| &e.annotations) {
        counts.entry(a.skill.key()).or_insert((a.skill.name(), 0)).1 += 1;
        total += 1;
    }
    if total == 0 {
        return Err(EvalError::EmptyInput);
    }
    let mut rows: Vec<(&str, usize)> = counts.into_values().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(rows
        .into_iter()
        .take(top_k)
        .map(|(name, n)| SkillShare {
            skill: name.to_string(),
            count: n,
            percentage: lit::<T>(100.0) * count::<T>(n) / count::<T>(total),
        })
        .collect())
}
