//! Hierarchical catalog of conversational skills.
//!
//! The catalog has five categories holding 38 canonical skills, plus
//! "Preference Elicitation", which annotators may emit but which has no
//! category. Free-form names (including ones an LLM invents) are resolved by
//! exact match on a normalized key; names outside the catalog become
//! open-set skills instead of being rejected.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("skill name is empty after normalization")]
    EmptyName,
    #[error("skill '{0}' is not part of the taxonomy (strict mode)")]
    OpenSetRejected(String),
    #[error("duplicate skill key '{0}'")]
    DuplicateKey(String),
    #[error("unknown skill category '{0}'")]
    UnknownCategory(String),
    #[error("invalid taxonomy document: {0}")]
    Document(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SkillCategory {
    Interpersonal,
    MemoryKnowledge,
    CognitiveProblemSolving,
    CommunicationListening,
    TaskOriented,
}

impl SkillCategory {
    pub const ALL: [SkillCategory; 5] = [
        SkillCategory::Interpersonal,
        SkillCategory::MemoryKnowledge,
        SkillCategory::CognitiveProblemSolving,
        SkillCategory::CommunicationListening,
        SkillCategory::TaskOriented,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            SkillCategory::Interpersonal => "Interpersonal Skills",
            SkillCategory::MemoryKnowledge => "Memory & Knowledge Management Skills",
            SkillCategory::CognitiveProblemSolving => "Cognitive & Problem-Solving Skills",
            SkillCategory::CommunicationListening => "Communication & Listening Skills",
            SkillCategory::TaskOriented => "Task-Oriented Skills",
        }
    }
}

impl fmt::Display for SkillCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for SkillCategory {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SkillCategory::ALL
            .into_iter()
            .find(|c| c.display_name() == s)
            .ok_or_else(|| TaxonomyError::UnknownCategory(s.to_string()))
    }
}

impl Serialize for SkillCategory {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.display_name())
    }
}

impl<'de> Deserialize<'de> for SkillCategory {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skill {
    pub canonical_name: String,
    pub key: String,
    /// `None` for extended skills without a category and for open-set skills.
    pub category: Option<SkillCategory>,
    pub extended: bool,
    pub aliases: Vec<String>,
}

impl Skill {
    fn new(canonical_name: &str, category: Option<SkillCategory>, extended: bool) -> Self {
        Skill {
            canonical_name: canonical_name.to_string(),
            key: normalize_name(canonical_name),
            category,
            extended,
            aliases: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Canonical,
    Extended,
    OpenSet,
}

impl Resolution {
    pub fn as_str(self) -> &'static str {
        match self {
            Resolution::Canonical => "canonical",
            Resolution::Extended => "extended",
            Resolution::OpenSet => "open_set",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkillMatch {
    pub resolution: Resolution,
    pub skill: Skill,
}

impl SkillMatch {
    pub fn key(&self) -> &str {
        &self.skill.key
    }

    pub fn name(&self) -> &str {
        &self.skill.canonical_name
    }

    pub fn is_open_set(&self) -> bool {
        self.resolution == Resolution::OpenSet
    }
}

/// Lowercases, turns hyphens and underscores into spaces, drops every other
/// non-alphanumeric character and collapses whitespace.
pub fn normalize_name(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.chars().flat_map(char::to_lowercase) {
        if c == '-' || c == '_' || c.is_whitespace() {
            pending_space = true;
        } else if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        }
    }
    out
}

/// Title-cases each whitespace-separated word of `raw` (trimmed). A word's
/// first character is only changed when that keeps its normalized key.
fn title_case(raw: &str) -> String {
    raw.split_whitespace()
        .map(|word| {
            let mut chars = word.chars();
            let Some(first) = chars.next() else {
                return String::new();
            };
            let upper: String = first.to_uppercase().collect();
            let lowered: String = upper.chars().flat_map(char::to_lowercase).collect();
            let original: String = first.to_lowercase().collect();
            let head = if lowered == original {
                upper
            } else {
                first.to_string()
            };
            head + chars.as_str()
        })
        .collect::<Vec<_>>()
        .join(" ")
}

const INTERPERSONAL: [&str; 17] = [
    "Empathy",
    "Personal Background",
    "Persona Recall",
    "Self-Disclosure",
    "Negotiation",
    "Conflict Resolution",
    "Conflict Avoidance",
    "Persuasion",
    "Commonsense Understanding",
    "Cultural Sensitivity",
    "Ethics",
    "Harmlessness",
    "Avoiding Social Bias",
    "Helpfulness",
    "Mentoring",
    "Image Commenting",
    "Image Sharing",
];

const MEMORY_KNOWLEDGE: [&str; 4] = [
    "Memory Recall",
    "Knowledge Sharing",
    "Knowledge Acquisition",
    "Knowledge Searching",
];

const COGNITIVE: [&str; 5] = [
    "Critical Thinking",
    "Logical Thinking",
    "Creative Problem Solving",
    "Factual Problem Solving",
    "Decision-Making",
];

const COMMUNICATION: [&str; 9] = [
    "Clarification",
    "Confirmation",
    "Rephrasing",
    "Echoing",
    "Topic Transition",
    "Rhetoric",
    "Active Listening",
    "Reflective Listening",
    "Immediate Response",
];

const TASK_ORIENTED: [&str; 3] = ["Recommendation", "Task Execution", "Urgency Recognition"];

/// Skills offered to the annotator that have no category of their own.
const EXTENDED: [&str; 1] = ["Preference Elicitation"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct SkillDocument {
    canonical_name: String,
    category: Option<SkillCategory>,
    extended: bool,
    #[serde(default)]
    aliases: Vec<String>,
}

/// Immutable skill catalog with a normalized-key index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    skills: Vec<Skill>,
    index: HashMap<String, usize>,
}

impl Taxonomy {
    pub fn builtin() -> Self {
        let groups: [(SkillCategory, &[&str]); 5] = [
            (SkillCategory::Interpersonal, &INTERPERSONAL),
            (SkillCategory::MemoryKnowledge, &MEMORY_KNOWLEDGE),
            (SkillCategory::CognitiveProblemSolving, &COGNITIVE),
            (SkillCategory::CommunicationListening, &COMMUNICATION),
            (SkillCategory::TaskOriented, &TASK_ORIENTED),
        ];
        let mut skills: Vec<Skill> = groups
            .iter()
            .flat_map(|(cat, names)| names.iter().map(|n| Skill::new(n, Some(*cat), false)))
            .collect();
        skills.extend(EXTENDED.iter().map(|n| Skill::new(n, None, true)));
        Self::from_skills(skills).expect("built-in taxonomy keys are unique")
    }

    pub fn from_skills(skills: Vec<Skill>) -> Result<Self, TaxonomyError> {
        let mut index = HashMap::new();
        for (i, skill) in skills.iter().enumerate() {
            if skill.key.is_empty() {
                return Err(TaxonomyError::EmptyName);
            }
            for key in std::iter::once(&skill.key).chain(skill.aliases.iter()) {
                if index.insert(key.clone(), i).is_some() {
                    return Err(TaxonomyError::DuplicateKey(key.clone()));
                }
            }
        }
        Ok(Taxonomy { skills, index })
    }

    pub fn skills(&self) -> &[Skill] {
        &self.skills
    }

    /// Skills belonging to a category, i.e. excluding extended ones.
    pub fn canonical_skills(&self) -> impl Iterator<Item = &Skill> {
        self.skills.iter().filter(|s| !s.extended)
    }

    pub fn in_category(&self, category: SkillCategory) -> impl Iterator<Item = &Skill> {
        self.skills
            .iter()
            .filter(move |s| s.category == Some(category))
    }

    /// Looks up a skill by normalized key or alias.
    pub fn get(&self, key: &str) -> Option<&Skill> {
        self.index.get(key).map(|&i| &self.skills[i])
    }

    pub fn resolve(&self, raw: &str) -> Result<SkillMatch, TaxonomyError> {
        let key = normalize_name(raw);
        if key.is_empty() {
            return Err(TaxonomyError::EmptyName);
        }
        if let Some(skill) = self.get(&key) {
            let resolution = if skill.extended {
                Resolution::Extended
            } else {
                Resolution::Canonical
            };
            return Ok(SkillMatch {
                resolution,
                skill: skill.clone(),
            });
        }
        let canonical_name = title_case(raw.trim());
        Ok(SkillMatch {
            resolution: Resolution::OpenSet,
            skill: Skill {
                key: normalize_name(&canonical_name),
                canonical_name,
                category: None,
                extended: true,
                aliases: Vec::new(),
            },
        })
    }

    /// Like [`Taxonomy::resolve`] but rejects names outside the catalog.
    pub fn resolve_strict(&self, raw: &str) -> Result<SkillMatch, TaxonomyError> {
        let m = self.resolve(raw)?;
        if m.is_open_set() {
            return Err(TaxonomyError::OpenSetRejected(m.skill.canonical_name));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let docs: Vec<SkillDocument> = self
            .skills
            .iter()
            .map(|s| SkillDocument {
                canonical_name: s.canonical_name.clone(),
                category: s.category,
                extended: s.extended,
                aliases: s.aliases.clone(),
            })
            .collect();
        serde_json::to_value(docs).expect("taxonomy serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, TaxonomyError> {
        let docs: Vec<SkillDocument> = serde_json::from_value(value.clone())
            .map_err(|e| TaxonomyError::Document(e.to_string()))?;
        let skills = docs
            .into_iter()
            .map(|d| {
                let mut skill = Skill::new(&d.canonical_name, d.category, d.extended);
                skill.aliases = d.aliases.iter().map(|a| normalize_name(a)).collect();
                skill
            })
            .collect();
        Self::from_skills(skills)
    }

    /// Short hex digest of the ordered canonical skill list.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for skill in &self.skills {
            hasher.update(skill.canonical_name.as_bytes());
            hasher.update(b"\n");
        }
        hasher
            .finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub fn builtin_taxonomy() -> Taxonomy {
    Taxonomy::builtin()
}
