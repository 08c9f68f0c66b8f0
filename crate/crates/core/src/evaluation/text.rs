use std::collections::HashMap;

use super::{count, EvalError, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PredictionPair {
    pub hypothesis: String,
    pub references: Vec<String>,
}

impl PredictionPair {
    pub fn new(hypothesis: impl Into<String>, references: Vec<String>) -> Self {
        PredictionPair {
            hypothesis: hypothesis.into(),
            references,
        }
    }
}

/// Lowercases, splits on whitespace, and emits every punctuation
/// character as its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars().flat_map(char::to_lowercase) {
        if c.is_whitespace() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else if c.is_alphanumeric() {
            current.push(c);
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            tokens.push(c.to_string());
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn ngram_counts(tokens: &[String], k: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= k {
        for gram in tokens.windows(k) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

struct Tokenized {
    hypothesis: Vec<String>,
    references: Vec<Vec<String>>,
}

fn tokenize_pairs(pairs: &[PredictionPair]) -> Result<Vec<Tokenized>, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.references.is_empty() {
                return Err(EvalError::NoReferences(i));
            }
            Ok(Tokenized {
                hypothesis: tokenize(&p.hypothesis),
                references: p.references.iter().map(|r| tokenize(r)).collect(),
            })
        })
        .collect()
}

/// Reference length closest to `c`; ties go to the shorter reference.
fn closest_ref_len(c: usize, refs: &[Vec<String>]) -> usize {
    refs.iter()
        .map(Vec::len)
        .min_by_key(|&r| (r.abs_diff(c), r))
        .unwrap_or(0)
}

/// Corpus-level BLEU with uniform weights over orders `1..=n`.
/// `smoothing` adds one to numerator and denominator for orders >= 2.
pub fn bleu<T: Scalar>(pairs: &[PredictionPair], n: usize, smoothing: bool) -> Result<T, EvalError> {
    if n == 0 {
        return Err(EvalError::InvalidOrder(n));
    }
    let corpus = tokenize_pairs(pairs)?;
    let mut matches = vec![0usize; n];
    let mut totals = vec![0usize; n];
    let (mut c, mut r) = (0usize, 0usize);
    for pair in &corpus {
        c += pair.hypothesis.len();
        r += closest_ref_len(pair.hypothesis.len(), &pair.references);
        for k in 1..=n {
            let hyp = ngram_counts(&pair.hypothesis, k);
            let mut max_ref: HashMap<&[String], usize> = HashMap::new();
            for reference in &pair.references {
                for (gram, cnt) in ngram_counts(reference, k) {
                    let slot = max_ref.entry(gram).or_insert(0);
                    *slot = (*slot).max(cnt);
                }
            }
            for (gram, cnt) in hyp {
                matches[k - 1] += cnt.min(max_ref.get(gram).copied().unwrap_or(0));
                totals[k - 1] += cnt;
            }
        }
    }
    if c == 0 {
        return Ok(T::zero());
    }
    let mut log_sum = T::zero();
    for k in 0..n {
        let (num, den) = if smoothing && k >= 1 {
            (matches[k] + 1, totals[k] + 1)
        } else {
            (matches[k], totals[k])
        };
        if num == 0 || den == 0 {
            return Ok(T::zero());
        }
        log_sum = log_sum + (count::<T>(num) / count::<T>(den)).ln();
    }
    let bp = if c < r {
        (T::one() - count::<T>(r) / count::<T>(c)).exp()
    } else {
        T::one()
    };
    Ok(bp * (log_sum / count::<T>(n)).exp())
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn f_score<T: Scalar>(lcs: usize, hyp_len: usize, ref_len: usize, beta: T) -> T {
    if lcs == 0 {
        return T::zero();
    }
    let p = count::<T>(lcs) / count::<T>(hyp_len);
    let r = count::<T>(lcs) / count::<T>(ref_len);
    let b2 = beta * beta;
    (T::one() + b2) * p * r / (r + b2 * p)
}

/// Mean per-pair ROUGE-L F-score; each pair is scored against its best
/// reference. `beta = 1` gives balanced F1.
pub fn rouge_l<T: Scalar>(pairs: &[PredictionPair], beta: T) -> Result<T, EvalError> {
    let corpus = tokenize_pairs(pairs)?;
    let mut total = T::zero();
    for pair in &corpus {
        let best = pair
            .references
            .iter()
            .map(|r| f_score(lcs_len(&pair.hypothesis, r), pair.hypothesis.len(), r.len(), beta))
            .fold(T::zero(), T::max);
        total = total + best;
    }
    Ok(total / count::<T>(corpus.len()))
}
