//! Source-specific social-context templates.
//!
//! Each source with structured context has a set of wording variants; one is
//! sampled per example. Placeholders are written `{name}` and substituted
//! verbatim. Sources without templates pass their narrative through.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::SourceKind;
use crate::seeding;

/// Binding key that selects a template group (e.g. `nth_round` for Stark).
pub const GROUP_KEY: &str = "template_group";
/// Binding key carrying the narrative for pass-through sources.
pub const NARRATIVE_KEY: &str = "narrative";

pub const STARK_FIRST_ROUND: &str = "first_round";
pub const STARK_NTH_ROUND: &str = "nth_round";
pub const CASINO_SENTENCE: &str = "sentence";
pub const CASINO_STRUCTURED: &str = "structured";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("missing binding for placeholder '{0}'")]
    MissingBinding(String),
    #[error("variant index {index} out of range ({count} variants)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("no template group '{group}' for source '{source_kind}'")]
    UnknownGroup { source_kind: SourceKind, group: String },
    #[error("invalid template set: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSet {
    pub source: SourceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub variants: Vec<String>,
    pub placeholders: Vec<BTreeSet<String>>,
}

impl TemplateSet {
    pub fn new(source: SourceKind, group: Option<&str>, variants: Vec<String>) -> Self {
        let placeholders = variants.iter().map(|v| placeholders_in(v)).collect();
        TemplateSet {
            source,
            group: group.map(str::to_string),
            variants,
            placeholders,
        }
    }

    fn from_strs(source: SourceKind, group: Option<&str>, variants: &[&str]) -> Self {
        Self::new(source, group, variants.iter().map(|s| s.to_string()).collect())
    }

    /// Checks that the declared placeholder sets match the variant strings.
    pub fn validate(&self) -> Result<(), TemplateError> {
        if self.variants.is_empty() {
            return Err(TemplateError::Invalid("no variants".into()));
        }
        if self.placeholders.len() != self.variants.len() {
            return Err(TemplateError::Invalid(format!(
                "{} variants but {} placeholder sets",
                self.variants.len(),
                self.placeholders.len()
            )));
        }
        for (i, (variant, declared)) in self.variants.iter().zip(&self.placeholders).enumerate() {
            let found = placeholders_in(variant);
            if &found != declared {
                return Err(TemplateError::Invalid(format!(
                    "variant {i} uses {found:?} but declares {declared:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self, TemplateError> {
        let set: TemplateSet =
            serde_json::from_str(text).map_err(|e| TemplateError::Invalid(e.to_string()))?;
        set.validate()?;
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenderedContext {
    pub source: SourceKind,
    pub group: Option<String>,
    pub variant_index: usize,
    pub text: String,
}

enum Segment<'a> {
    Literal(&'a str),
    Placeholder(&'a str),
}

/// Splits a template into literal text and `{name}` placeholders. A brace
/// without a matching close, or enclosing another `{`, is literal text.
fn segments(template: &str) -> Vec<Segment<'_>> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        match after.find(['{', '}']) {
            Some(close) if after.as_bytes()[close] == b'}' && close > 0 => {
                out.push(Segment::Literal(&rest[..open]));
                out.push(Segment::Placeholder(&after[..close]));
                rest = &after[close + 1..];
            }
            Some(next) => {
                // literal brace; resume scanning at the next brace
                out.push(Segment::Literal(&rest[..open + 1 + next]));
                rest = &after[next..];
            }
            None => break,
        }
    }
    out.push(Segment::Literal(rest));
    out
}

pub fn placeholders_in(template: &str) -> BTreeSet<String> {
    segments(template)
        .into_iter()
        .filter_map(|s| match s {
            Segment::Placeholder(name) => Some(name.to_string()),
            Segment::Literal(_) => None,
        })
        .collect()
}

/// Fills every `{name}` placeholder from `bindings`. Bound values are
/// inserted verbatim and never re-scanned.
pub fn substitute(template: &str, bindings: &BTreeMap<String, String>) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(template.len());
    for segment in segments(template) {
        match segment {
            Segment::Literal(s) => out.push_str(s),
            Segment::Placeholder(name) => out.push_str(
                bindings
                    .get(name)
                    .ok_or_else(|| TemplateError::MissingBinding(name.to_string()))?,
            ),
        }
    }
    Ok(out)
}

pub fn render(
    set: &TemplateSet,
    variant_index: usize,
    bindings: &BTreeMap<String, String>,
) -> Result<RenderedContext, TemplateError> {
    let template = set
        .variants
        .get(variant_index)
        .ok_or(TemplateError::IndexOutOfRange {
            index: variant_index,
            count: set.variants.len(),
        })?;
    Ok(RenderedContext {
        source: set.source,
        group: set.group.clone(),
        variant_index,
        text: substitute(template, bindings)?,
    })
}

/// Uniform variant index under a generator seeded with `seed`.
pub fn sample_variant(set: &TemplateSet, seed: u64) -> usize {
    if set.variants.len() <= 1 {
        return 0;
    }
    seeding::rng(seed).random_range(0..set.variants.len())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceTemplates {
    /// Emits the `narrative` binding unchanged.
    PassThrough,
    /// Labeled groups; the first one is the default.
    Groups(Vec<TemplateSet>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateRegistry {
    entries: BTreeMap<SourceKind, SourceTemplates>,
}

impl TemplateRegistry {
    pub fn builtin() -> Self {
        let mut entries = BTreeMap::new();
        for source in SourceKind::ALL {
            entries.insert(source, SourceTemplates::PassThrough);
        }
        let groups = |sets: Vec<TemplateSet>| SourceTemplates::Groups(sets);
        entries.insert(
            SourceKind::Prosocial,
            groups(vec![TemplateSet::from_strs(SourceKind::Prosocial, None, &PROSOCIAL)]),
        );
        entries.insert(
            SourceKind::Stark,
            groups(vec![
                TemplateSet::from_strs(SourceKind::Stark, Some(STARK_FIRST_ROUND), &STARK_FIRST),
                TemplateSet::from_strs(SourceKind::Stark, Some(STARK_NTH_ROUND), &STARK_NTH),
            ]),
        );
        entries.insert(
            SourceKind::Cactus,
            groups(vec![TemplateSet::from_strs(SourceKind::Cactus, None, &CACTUS)]),
        );
        entries.insert(
            SourceKind::SynPersonachat,
            groups(vec![TemplateSet::from_strs(
                SourceKind::SynPersonachat,
                None,
                &SYN_PERSONACHAT,
            )]),
        );
        entries.insert(
            SourceKind::Casino,
            groups(vec![
                TemplateSet::new(
                    SourceKind::Casino,
                    Some(CASINO_SENTENCE),
                    vec![casino_sentence()],
                ),
                TemplateSet::new(
                    SourceKind::Casino,
                    Some(CASINO_STRUCTURED),
                    vec![casino_structured()],
                ),
            ]),
        );
        entries.insert(
            SourceKind::Pearl,
            groups(vec![TemplateSet::from_strs(SourceKind::Pearl, None, &PEARL)]),
        );
        entries.insert(
            SourceKind::PersuasionForGood,
            groups(vec![TemplateSet::from_strs(
                SourceKind::PersuasionForGood,
                None,
                &PERSUASION_FOR_GOOD,
            )]),
        );
        entries.insert(
            SourceKind::EmpatheticDialogues,
            groups(vec![TemplateSet::from_strs(
                SourceKind::EmpatheticDialogues,
                None,
                &EMPATHETIC_DIALOGUES,
            )]),
        );
        TemplateRegistry { entries }
    }

    pub fn get(&self, source: SourceKind) -> &SourceTemplates {
        self.entries
            .get(&source)
            .unwrap_or(&SourceTemplates::PassThrough)
    }

    /// The template set for `source`, in `group` or the default group.
    /// `None` for pass-through sources.
    pub fn set(
        &self,
        source: SourceKind,
        group: Option<&str>,
    ) -> Result<Option<&TemplateSet>, TemplateError> {
        let SourceTemplates::Groups(sets) = self.get(source) else {
            return Ok(None);
        };
        match group {
            None => Ok(sets.first()),
            Some(g) => sets
                .iter()
                .find(|s| s.group.as_deref() == Some(g))
                .map(Some)
                .ok_or_else(|| TemplateError::UnknownGroup {
                    source_kind: source,
                    group: g.to_string(),
                }),
        }
    }

    /// Adds a user-supplied set, replacing any set with the same source and
    /// group.
    pub fn insert(&mut self, set: TemplateSet) -> Result<(), TemplateError> {
        set.validate()?;
        let entry = self
            .entries
            .entry(set.source)
            .or_insert(SourceTemplates::PassThrough);
        match entry {
            SourceTemplates::PassThrough => *entry = SourceTemplates::Groups(vec![set]),
            SourceTemplates::Groups(sets) => {
                match sets.iter_mut().find(|s| s.group == set.group) {
                    Some(existing) => *existing = set,
                    None => sets.push(set),
                }
            }
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), TemplateError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| TemplateError::Invalid(e.to_string()))?;
        self.insert(TemplateSet::from_json_str(&text)?)
    }

    /// Renders a dialogue's social context with a variant drawn from
    /// `(seed, key)`. The group comes from the `template_group` binding.
    pub fn render_social_context(
        &self,
        source: SourceKind,
        bindings: &BTreeMap<String, String>,
        seed: u64,
        key: &str,
    ) -> Result<RenderedContext, TemplateError> {
        let group = bindings.get(GROUP_KEY).map(String::as_str);
        match self.set(source, group)? {
            None => Ok(RenderedContext {
                source,
                group: None,
                variant_index: 0,
                text: bindings.get(NARRATIVE_KEY).cloned().unwrap_or_default(),
            }),
            Some(set) => {
                let index = sample_variant(set, seeding::derive_seed(seed, key));
                render(set, index, bindings)
            }
        }
    }
}

pub fn builtin_registry() -> TemplateRegistry {
    TemplateRegistry::builtin()
}

const PROSOCIAL: [&str; 5] = [
    "Speaker B should foster prosocial behavior by providing constructive feedback based on these Rule-of-Thumbs:\n- {rots}",
    "Speaker B should encourage prosocial behavior by giving constructive feedback based on these Rule-of-Thumbs:\n- {rots}",
    "To promote positive behavior, Speaker B should offer constructive feedback following these Rule-of-Thumbs:\n- {rots}",
    "Guided by these Rule-of-Thumbs, Speaker B should encourage prosocial behavior through constructive feedback:\n- {rots}",
    "Speaker B is expected to provide constructive feedback to encourage positive interactions, using these Rule-of-Thumbs:\n- {rots}",
];

const STARK_FIRST: [&str; 5] = [
    "{name} is {age} years old, born in {birthplace}, and currently lives in {residence}. {event}",
    "{name}, aged {age}, was born in {birthplace} and resides in {residence}. {event}",
    "{name}, who is {age}, was born in {birthplace} and now lives in {residence}. {event}",
    "{name} is {age}, originally from {birthplace}, and now living in {residence}. {event}",
    "{name} is {age} years old, born in {birthplace}, and resides in {residence}. {event}",
];

const STARK_NTH: [&str; 5] = [
    "{name} is {age} years old, born in {birthplace}, and currently lives in {residence}. After {time_interval}, {name} has gone through {experience}, and now {event}",
    "{name}, aged {age}, was born in {birthplace} and now resides in {residence}. Following {time_interval}, {name} experienced {experience}, and {event}",
    "{name}, who is {age} years old, originally from {birthplace} and living in {residence}, went through {experience} after {time_interval}, and now {event}",
    "{name} is {age}, born in {birthplace}, and currently resides in {residence}. After {time_interval} of {experience}, {name} has now {event}",
    "{name}, {age} years old, from {birthplace} and residing in {residence}, has experienced {experience} over {time_interval}, and as a result, {event}",
];

const CACTUS: [&str; 5] = [
    "Client's attitude is {client attitude}. The client's intake form is as follows:\n{client intake form}.",
    "The client has an attitude of {client attitude}. Below is the client's intake form:\n{client intake form}.",
    "With an attitude of {client attitude}, the client's intake form details are:\n{client intake form}.",
    "Client's attitude: {client attitude}. Intake form information:\n{client intake form}.",
    "The client's attitude is {client attitude}. Here is their intake form:\n{client intake form}.",
];

const SYN_PERSONACHAT: [&str; 5] = [
    "User 1's Persona Information:\n- {user1 persona}\n\nUser 2's Persona Information:\n- {user2 persona}",
    "User 1's Profile:\n- {user1 persona}\n\nUser 2's Profile:\n- {user2 persona}",
    "Details of User 1's Persona:\n- {user1 persona}\n\nDetails of User 2's Persona:\n- {user2 persona}",
    "Persona for User 1:\n- {user1 persona}\n\nPersona for User 2:\n- {user2 persona}",
    "Information about User 1's Persona:\n- {user1 persona}\n\nInformation about User 2's Persona:\n- {user2 persona}",
];

const PEARL: [&str; 5] = [
    "Seeker's overall movie preferences are represented as follows:\n{user persona}",
    "Here is the seeker's complete movie profile:\n{user persona}",
    "The seeker's general movie state is described below:\n{user persona}",
    "Representation of seeker's overall movie interests:\n{user persona}",
    "Below is the seeker's overall movie persona:\n{user persona}",
];

const PERSUASION_FOR_GOOD: [&str; 5] = [
    "Speaker A is attempting to persuade Speaker B.",
    "In this scenario, Speaker A is the Persuader and Speaker B is the Persuadee.",
    "Speaker A acts as Persuader, while Speaker B plays the role of Persuadee.",
    "In the conversation, Speaker A is persuading Speaker B.",
    "Speaker A aims to convince Speaker B.",
];

const EMPATHETIC_DIALOGUES: [&str; 5] = [
    "Speaker A is feeling {emotion} because {situation}.",
    "Due to {situation}, Speaker A's emotion is {emotion}.",
    "Speaker A's emotional state: {emotion}; Situation: {situation}.",
    "Because of {situation}, Speaker A is in a {emotion} mood.",
    "The situation is {situation}, so Speaker A feels {emotion}.",
];

// The two CaSiNo speaker paragraphs are worded differently, so both are spelled out.
const CASINO_SENTENCE_A: &str = "Speaker A is a {speaker_a_age}-year-old {speaker_a_ethnicity} {speaker_a_gender} who has a {speaker_a_education} education. Their social value orientation is {speaker_a_svo}. According to the Big Five personality traits, they score {speaker_a_extraversion} in extraversion, {speaker_a_agreeableness} in agreeableness, {speaker_a_conscientiousness} in conscientiousness, {speaker_a_emotional_stability} in emotional stability, and {speaker_a_openness_to_experiences} in openness to experiences. In the negotiation, Speaker A's highest priority is {speaker_a_value2issue_high}, for which they reasoned: \"{speaker_a_value2reason_high}\". Their medium priority is {speaker_a_value2issue_medium}, with the reasoning: \"{speaker_a_value2reason_medium}\". Their lowest priority is {speaker_a_value2issue_low}, and they stated: \"{speaker_a_value2reason_low}\".";

const CASINO_SENTENCE_B: &str = "Speaker B is a {speaker_b_age}-year-old {speaker_b_ethnicity} {speaker_b_gender} who has a {speaker_b_education} education. Their social value orientation is {speaker_b_svo}. Their Big Five personality traits scores are {speaker_b_extraversion} in extraversion, {speaker_b_agreeableness} in agreeableness, {speaker_b_conscientiousness} in conscientiousness, {speaker_b_emotional_stability} in emotional stability, and {speaker_b_openness_to_experiences} in openness to experiences. During the negotiation, Speaker B's top priority is {speaker_b_value2issue_high}, and they explained: \"{speaker_b_value2reason_high}\". Their medium priority is {speaker_b_value2issue_medium}, with the reason: \"{speaker_b_value2reason_medium}\". Their lowest priority is {speaker_b_value2issue_low}, about which they mentioned: \"{speaker_b_value2reason_low}\".";

fn casino_sentence() -> String {
    format!("{CASINO_SENTENCE_A}\n---\n{CASINO_SENTENCE_B}")
}

fn casino_structured_block(speaker: char) -> String {
    let p = format!("speaker_{}", speaker.to_ascii_lowercase());
    let s = speaker.to_ascii_uppercase();
    [
        format!("Speaker {s}'s Demographic Information:"),
        format!("- Age: {{{p}_age}}"),
        format!("- Gender: {{{p}_gender}}"),
        format!("- Ethnicity: {{{p}_ethnicity}}"),
        format!("- Education: {{{p}_education}}"),
        format!("Speaker {s}'s Personality Information:"),
        format!("- Social Value Orientation (SVO): {{{p}_svo}}"),
        "- Big Five Personality Traits:".to_string(),
        format!("    - Extraversion: {{{p}_extraversion}}"),
        format!("    - Agreeableness: {{{p}_agreeableness}}"),
        format!("    - Conscientiousness: {{{p}_conscientiousness}}"),
        format!("    - Emotional Stability: {{{p}_emotional_stability}}"),
        format!("    - Openness to Experiences: {{{p}_openness_to_experiences}}"),
        format!("Speaker {s}'s Negotiation Information:"),
        "- Priority Order (value2issue):".to_string(),
        format!("    - High: {{{p}_value2issue_high}}"),
        format!("    - Medium: {{{p}_value2issue_medium}}"),
        format!("    - Low: {{{p}_value2issue_low}}"),
        "- Personal Arguments (value2reason):".to_string(),
        format!("    - High: {{{p}_value2reason_high}}"),
        format!("    - Medium: {{{p}_value2reason_medium}}"),
        format!("    - Low: {{{p}_value2reason_low}}"),
    ]
    .join("\n")
}

fn casino_structured() -> String {
    format!(
        "{}\n---\n{}",
        casino_structured_block('a'),
        casino_structured_block('b')
    )
}
