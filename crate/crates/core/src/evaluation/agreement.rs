use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{count, lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Nominal,
    #[default]
    Ordinal,
    Interval,
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nominal" => Ok(Level::Nominal),
            "ordinal" => Ok(Level::Ordinal),
            "interval" => Ok(Level::Interval),
            other => Err(format!("unknown level '{other}'")),
        }
    }
}

/// Sparse ratings: `(rater, item) -> value`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatingMatrix {
    pub ratings: BTreeMap<(String, String), i64>,
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRow {
    pub rater: String,
    pub item: String,
    pub criterion: String,
    pub score: i64,
}

#[derive(Debug, thiserror::Error)]
pub enum AgreementError {
    #[error("no item has two or more ratings")]
    NoPairableValues,
    #[error("duplicate rating for rater {rater} on item {item}")]
    Duplicate { rater: String, item: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl RatingMatrix {
    pub fn new(level: Level) -> Self {
        RatingMatrix {
            ratings: BTreeMap::new(),
            level,
        }
    }

    pub fn insert(&mut self, rater: &str, item: &str, value: i64) -> Result<(), AgreementError> {
        let key = (rater.to_string(), item.to_string());
        if self.ratings.insert(key, value).is_some() {
            return Err(AgreementError::Duplicate {
                rater: rater.into(),
                item: item.into(),
            });
        }
        Ok(())
    }

    /// One row per rater, one column per item; `None` marks a missing rating.
    pub fn from_rows(rows: &[Vec<Option<i64>>], level: Level) -> Self {
        let mut m = RatingMatrix::new(level);
        for (r, row) in rows.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    m.ratings.insert((format!("r{r}"), format!("i{i:06}")), *v);
                }
            }
        }
        m
    }

    pub fn raters(&self) -> BTreeSet<&str> {
        self.ratings.keys().map(|(r, _)| r.as_str()).collect()
    }

    pub fn items(&self) -> BTreeSet<&str> {
        self.ratings.keys().map(|(_, i)| i.as_str()).collect()
    }

    fn values_by_item(&self) -> BTreeMap<&str, Vec<i64>> {
        let mut out: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
        for ((_, item), v) in &self.ratings {
            out.entry(item.as_str()).or_default().push(*v);
        }
        out
    }
}

/// Reads a `rater,item,criterion,score` CSV into one matrix per criterion.
pub fn load_ratings(path: &Path, level: Level) -> Result<BTreeMap<String, RatingMatrix>, AgreementError> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out: BTreeMap<String, RatingMatrix> = BTreeMap::new();
    for row in reader.deserialize() {
        let row: RatingRow = row?;
        out.entry(row.criterion.clone())
            .or_insert_with(|| RatingMatrix::new(level))
            .insert(&row.rater, &row.item, row.score)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaReport<T> {
    pub alpha: T,
    pub observed_disagreement: T,
    pub expected_disagreement: T,
    /// Number of pairable values.
    pub n: usize,
    /// True when every pairable value is identical and alpha is set to 1.
    pub by_convention: bool,
    pub level: Level,
}

/// Distance between values `a` and `b`. For the ordinal level, `marginals`
/// maps each value to its pooled count.
pub fn distance<T: Scalar>(level: Level, a: i64, b: i64, marginals: &BTreeMap<i64, usize>) -> T {
    match level {
        Level::Nominal => {
            if a == b {
                T::zero()
            } else {
                T::one()
            }
        }
        Level::Interval => {
            let d = T::from_i64(a - b).expect("difference fits");
            d * d
        }
        Level::Ordinal => {
            if a == b {
                return T::zero();
            }
            let (lo, hi) = (a.min(b), a.max(b));
            let span: usize = marginals.range(lo..=hi).map(|(_, n)| n).sum();
            let ends = count::<T>(marginals[&lo] + marginals[&hi]) / lit(2.0);
            let d = count::<T>(span) - ends;
            d * d
        }
    }
}

/// Krippendorff's alpha over a coincidence matrix built from every item
/// with at least two ratings.
pub fn krippendorff_alpha<T: Scalar>(m: &RatingMatrix) -> Result<AlphaReport<T>, AgreementError> {
    let pairable: Vec<Vec<i64>> = m
        .values_by_item()
        .into_values()
        .filter(|v| v.len() >= 2)
        .collect();
    if pairable.is_empty() {
        return Err(AgreementError::NoPairableValues);
    }

    let mut coincidence: BTreeMap<(i64, i64), T> = BTreeMap::new();
    for values in &pairable {
        let weight = T::one() / count::<T>(values.len() - 1);
        for (i, &a) in values.iter().enumerate() {
            for (j, &b) in values.iter().enumerate() {
                if i != j {
                    let cell = coincidence.entry((a, b)).or_insert_with(T::zero);
                    *cell = *cell + weight;
                }
            }
        }
    }
    let mut marginals: BTreeMap<i64, usize> = BTreeMap::new();
    for v in pairable.iter().flatten() {
        *marginals.entry(*v).or_insert(0) += 1;
    }
    let n: usize = marginals.values().sum();
    let n_t = count::<T>(n);

    let mut observed = T::zero();
    for (&(a, b), &o) in &coincidence {
        observed = observed + o * distance::<T>(m.level, a, b, &marginals);
    }
    observed = observed / n_t;

    let mut expected = T::zero();
    for (&a, &na) in &marginals {
        for (&b, &nb) in &marginals {
            expected = expected + count::<T>(na) * count::<T>(nb) * distance::<T>(m.level, a, b, &marginals);
        }
    }
    expected = expected / (n_t * (n_t - T::one()));

    let by_convention = marginals.len() == 1;
    let alpha = if by_convention {
        T::one()
    } else {
        T::one() - observed / expected
    };
    Ok(AlphaReport {
        alpha,
        observed_disagreement: observed,
        expected_disagreement: expected,
        n,
        by_convention,
        level: m.level,
    })
}
