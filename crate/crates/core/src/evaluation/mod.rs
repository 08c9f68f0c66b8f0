//! Offline statistics: BLEU, ROUGE-L, skill accuracy and distribution,
//! Krippendorff's alpha, safety-label ratios, head-to-head tallies, and a
//! classifier interface for external label models.
//!
//! Numeric results are generic over [`Scalar`] (`f32` or `f64`).

mod agreement;
mod classify;
mod report;
mod skills;
mod tally;
mod text;

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

pub use agreement::{
    distance, krippendorff_alpha, load_ratings, AgreementError, AlphaReport, Level, RatingMatrix,
    RatingRow,
};
pub use classify::{
    ClassifierBackendConfig, ClassifierTask, Classifier, ClassifyError, HttpClassifier,
    LabelSets, MockClassifier, SAFETY_LABELS,
};
pub use report::MetricReport;
pub use skills::{skill_accuracy, skill_distribution, AccuracyMode, SkillPrediction, SkillShare};
pub use tally::{
    head_to_head, load_preferences, safety_ratio, Choice, Criterion, CriterionTally,
    HeadToHeadReport, PreferenceRecord, SafetyLabel, SafetyReport, Strength,
};
pub use text::{bleu, rouge_l, tokenize, PredictionPair};

pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite literal")
}

#[inline]
pub(crate) fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count fits in float")
}

/// Rounds a percentage to one decimal place, as shown in tables.
pub fn one_decimal<T: Scalar>(x: T) -> f64 {
    (x.to_f64().unwrap_or(f64::NAN) * 10.0).round() / 10.0
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("input is empty")]
    EmptyInput,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("pair {0} has no references")]
    NoReferences(usize),
    #[error("invalid n-gram order {0}")]
    InvalidOrder(usize),
    #[error("duplicate record for {0}")]
    DuplicateRecord(String),
    #[error("prediction {0} has an empty gold set")]
    EmptyGold(usize),
}
