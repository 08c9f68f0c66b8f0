//! Dialogues, one-sided sub-dialogue splitting, proportional sampling and
//! JSONL persistence.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::jsonl;
use crate::seeding;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("dialogue '{id}' is too short to yield a sub-dialogue of at least {min_turns} turns")]
    TooShort { id: String, min_turns: usize },
    #[error("stride must be at least one exchange pair")]
    InvalidStride,
    #[error("proportions must be non-negative and sum to 1 (got {sum})")]
    BadProportions { sum: f64 },
    #[error("source '{source_kind}' has {available} sub-dialogues but {requested} were requested")]
    InsufficientGroup {
        source_kind: SourceKind,
        available: usize,
        requested: usize,
    },
    #[error("line {line}: {cause}")]
    Parse { line: usize, cause: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Upstream dialogue collection a dialogue was drawn from.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Soda,
    ConversationChronicles,
    Prosocial,
    EmpatheticDialogues,
    WizardOfWikipedia,
    Cactus,
    Casino,
    Multiwoz22,
    PersuasionForGood,
    Pearl,
    SynPersonachat,
    Stark,
    Other,
}

impl SourceKind {
    pub const ALL: [SourceKind; 13] = [
        SourceKind::Soda,
        SourceKind::ConversationChronicles,
        SourceKind::Prosocial,
        SourceKind::EmpatheticDialogues,
        SourceKind::WizardOfWikipedia,
        SourceKind::Cactus,
        SourceKind::Casino,
        SourceKind::Multiwoz22,
        SourceKind::PersuasionForGood,
        SourceKind::Pearl,
        SourceKind::SynPersonachat,
        SourceKind::Stark,
        SourceKind::Other,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SourceKind::Soda => "soda",
            SourceKind::ConversationChronicles => "conversation_chronicles",
            SourceKind::Prosocial => "prosocial",
            SourceKind::EmpatheticDialogues => "empathetic_dialogues",
            SourceKind::WizardOfWikipedia => "wizard_of_wikipedia",
            SourceKind::Cactus => "cactus",
            SourceKind::Casino => "casino",
            SourceKind::Multiwoz22 => "multiwoz22",
            SourceKind::PersuasionForGood => "persuasion_for_good",
            SourceKind::Pearl => "pearl",
            SourceKind::SynPersonachat => "syn_personachat",
            SourceKind::Stark => "stark",
            SourceKind::Other => "other",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SourceKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| format!("unknown source tag '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub speaker: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shared_image: Option<String>,
}

impl Turn {
    pub fn new(speaker: impl Into<String>, text: impl Into<String>) -> Self {
        Turn {
            speaker: speaker.into(),
            text: text.into(),
            shared_image: None,
        }
    }

    pub fn with_image(mut self, description: impl Into<String>) -> Self {
        self.shared_image = Some(description.into());
        self
    }

    /// Renders the turn as a `Speaker: text` transcript line.
    pub fn transcript_line(&self) -> String {
        match (&self.shared_image, self.text.trim().is_empty()) {
            (Some(image), true) => format!("{}: [Sharing Image] {}", self.speaker, image),
            (Some(image), false) => {
                format!("{}: {} [Sharing Image] {}", self.speaker, self.text, image)
            }
            (None, _) => format!("{}: {}", self.speaker, self.text),
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.text.is_empty() && self.shared_image.is_none() {
            return Err(format!("turn by '{}' has neither text nor image", self.speaker));
        }
        Ok(())
    }
}

/// Newline-joined transcript lines.
pub fn transcript(turns: &[Turn]) -> String {
    turns
        .iter()
        .map(Turn::transcript_line)
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dialogue {
    pub id: String,
    pub source: SourceKind,
    #[serde(default)]
    pub social_context: BTreeMap<String, String>,
    pub turns: Vec<Turn>,
    #[serde(default)]
    pub golden_next: Option<Turn>,
}

impl Dialogue {
    /// Checks the turn invariants: non-empty turns alternating between
    /// exactly two speakers.
    pub fn validate(&self) -> Result<(), String> {
        let mut speakers = BTreeSet::new();
        for (i, turn) in self.turns.iter().enumerate() {
            turn.validate()?;
            if i > 0 && self.turns[i - 1].speaker == turn.speaker {
                return Err(format!(
                    "turns {} and {} are both by '{}'",
                    i,
                    i + 1,
                    turn.speaker
                ));
            }
            speakers.insert(turn.speaker.as_str());
        }
        if speakers.len() > 2 {
            return Err(format!("{} distinct speakers, expected two", speakers.len()));
        }
        if let Some(next) = &self.golden_next {
            next.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubDialogue {
    pub id: String,
    pub parent_id: String,
    pub source: SourceKind,
    #[serde(default)]
    pub social_context: BTreeMap<String, String>,
    pub context: Vec<Turn>,
    pub next_response: Turn,
    pub context_turns: usize,
}

/// Emits every pair-aligned prefix of at least `min_turns` turns, stepping
/// by `stride_pairs` exchanges, each with the turn that follows it held out
/// as the next response.
pub fn split_one_sided(
    dialogue: &Dialogue,
    stride_pairs: usize,
    min_turns: usize,
) -> Result<Vec<SubDialogue>, CorpusError> {
    if stride_pairs == 0 {
        return Err(CorpusError::InvalidStride);
    }
    let n = dialogue.turns.len();
    let first_pairs = min_turns.div_ceil(2).max(1);
    let subs: Vec<SubDialogue> = (first_pairs..)
        .step_by(stride_pairs)
        .map(|pairs| 2 * pairs)
        .take_while(|&len| len < n)
        .map(|len| SubDialogue {
            id: format!("{}#{}", dialogue.id, len),
            parent_id: dialogue.id.clone(),
            source: dialogue.source,
            social_context: dialogue.social_context.clone(),
            context: dialogue.turns[..len].to_vec(),
            next_response: dialogue.turns[len].clone(),
            context_turns: len,
        })
        .collect();
    if subs.is_empty() {
        return Err(CorpusError::TooShort {
            id: dialogue.id.clone(),
            min_turns,
        });
    }
    Ok(subs)
}

/// Uniform proportions over the given sources.
pub fn uniform_proportions<'a>(
    sources: impl IntoIterator<Item = &'a SourceKind>,
) -> BTreeMap<SourceKind, f64> {
    let sources: BTreeSet<SourceKind> = sources.into_iter().copied().collect();
    let share = 1.0 / sources.len().max(1) as f64;
    sources.into_iter().map(|s| (s, share)).collect()
}

/// Largest-remainder apportionment of `total` over `proportions`; ties in the
/// fractional part go to the earlier source.
pub fn apportion(
    proportions: &BTreeMap<SourceKind, f64>,
    total: usize,
) -> Result<BTreeMap<SourceKind, usize>, CorpusError> {
    let sum: f64 = proportions.values().sum();
    if proportions.values().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(CorpusError::BadProportions { sum });
    }
    let mut counts = BTreeMap::new();
    let mut remainders = Vec::with_capacity(proportions.len());
    let mut assigned = 0usize;
    for (&source, &p) in proportions {
        let exact = total as f64 * p;
        let floor = exact.floor();
        counts.insert(source, floor as usize);
        assigned += floor as usize;
        remainders.push((source, exact - floor));
    }
    // stable sort keeps source order among equal remainders
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (source, _) in remainders
        .into_iter()
        .cycle()
        .take(total.saturating_sub(assigned))
    {
        *counts.get_mut(&source).expect("source present") += 1;
    }
    Ok(counts)
}

/// Draws an apportioned number of sub-dialogues from each source group
/// without replacement. Each group uses its own generator keyed by
/// `(seed, source tag)`.
pub fn proportional_sample(
    groups: &BTreeMap<SourceKind, Vec<SubDialogue>>,
    proportions: &BTreeMap<SourceKind, f64>,
    total: usize,
    seed: u64,
) -> Result<Vec<SubDialogue>, CorpusError> {
    let counts = apportion(proportions, total)?;
    for (&source, &requested) in &counts {
        let available = groups.get(&source).map_or(0, Vec::len);
        if requested > available {
            return Err(CorpusError::InsufficientGroup {
                source_kind: source,
                available,
                requested,
            });
        }
    }
    let mut out = Vec::with_capacity(total);
    for (&source, &count) in &counts {
        if count == 0 {
            continue;
        }
        let pool = &groups[&source];
        let mut rng = seeding::rng_for(seed, source.tag());
        let picks = rand::seq::index::sample(&mut rng, pool.len(), count);
        out.extend(picks.into_iter().map(|i| pool[i].clone()));
    }
    Ok(out)
}

pub fn group_by_source(subs: Vec<SubDialogue>) -> BTreeMap<SourceKind, Vec<SubDialogue>> {
    let mut groups: BTreeMap<SourceKind, Vec<SubDialogue>> = BTreeMap::new();
    for sub in subs {
        groups.entry(sub.source).or_default().push(sub);
    }
    groups
}

pub fn load_corpus(path: &Path) -> Result<Vec<Dialogue>, CorpusError> {
    let file = File::open(path)?;
    read_corpus(BufReader::new(file))
}

pub fn read_corpus(reader: impl BufRead) -> Result<Vec<Dialogue>, CorpusError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = line_no + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |cause: String| CorpusError::Parse {
            line: line_no,
            cause,
        };
        let dialogue: Dialogue =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        dialogue.validate().map_err(parse_err)?;
        if !seen.insert(dialogue.id.clone()) {
            return Err(parse_err(format!("duplicate dialogue id '{}'", dialogue.id)));
        }
        out.push(dialogue);
    }
    Ok(out)
}

pub fn save_corpus(dialogues: &[Dialogue], path: &Path) -> Result<(), CorpusError> {
    let mut w = BufWriter::new(File::create(path)?);
    for d in dialogues {
        writeln!(w, "{}", jsonl::to_line(d))?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_subdialogues(path: &Path) -> Result<Vec<SubDialogue>, CorpusError> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for (line_no, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let sub: SubDialogue = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no + 1,
            cause: e.to_string(),
        })?;
        out.push(sub);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub dialogue_count: usize,
    pub dialogues_per_source: BTreeMap<SourceKind, usize>,
    pub subdialogues_per_source: BTreeMap<SourceKind, usize>,
    /// turn count -> number of dialogues with that many turns
    pub turn_histogram: BTreeMap<usize, usize>,
}

pub fn corpus_stats(dialogues: &[Dialogue], stride_pairs: usize, min_turns: usize) -> CorpusStats {
    let mut stats = CorpusStats {
        dialogue_count: dialogues.len(),
        ..Default::default()
    };
    for d in dialogues {
        *stats.dialogues_per_source.entry(d.source).or_default() += 1;
        let subs = split_one_sided(d, stride_pairs, min_turns).map_or(0, |s| s.len());
        *stats.subdialogues_per_source.entry(d.source).or_default() += subs;
        *stats.turn_histogram.entry(d.turns.len()).or_default() += 1;
    }
    stats
}
