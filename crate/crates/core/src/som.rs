//! Skill-of-mind outputs: parsing, formatting, planner inference and
//! guidance injection into a responder prompt.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::backend::{BackendError, ChatBackend, ChatMessage, ChatRequest};
use crate::corpus::{transcript, Turn};
use crate::taxonomy::{normalize_name, SkillMatch, Taxonomy};
use crate::templates::{placeholders_in, substitute, TemplateError};

/// Token separating the explanation from the skill list.
pub const SEPARATOR: &str = "[RESULT SKILL]";

const REPAIR_REMINDER: &str = "Answer again using exactly this format: <explanation> [RESULT SKILL] <skill>, <skill>";

#[derive(Debug, thiserror::Error)]
pub enum SomError {
    #[error("output has no [RESULT SKILL] separator")]
    MissingSeparator,
    #[error("explanation is empty")]
    EmptyExplanation,
    #[error("skill list is empty")]
    EmptySkillList,
    #[error("explanation contains the separator token")]
    SeparatorInExplanation,
    #[error("dialogue context is empty")]
    EmptyDialogue,
    #[error("invalid guidance config: {0}")]
    Config(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SomResult {
    pub explanation: String,
    pub skills: Vec<SkillMatch>,
}

impl SomResult {
    /// Validates and canonicalizes: trims the explanation and drops
    /// duplicate skills (by key), keeping the first occurrence.
    pub fn new(explanation: &str, skills: Vec<SkillMatch>) -> Result<Self, SomError> {
        let explanation = explanation.trim();
        if explanation.is_empty() {
            return Err(SomError::EmptyExplanation);
        }
        if explanation.contains(SEPARATOR) {
            return Err(SomError::SeparatorInExplanation);
        }
        let mut seen = HashSet::new();
        let skills: Vec<_> = skills.into_iter().filter(|s| seen.insert(s.key().to_string())).collect();
        if skills.is_empty() {
            return Err(SomError::EmptySkillList);
        }
        Ok(SomResult {
            explanation: explanation.to_string(),
            skills,
        })
    }

    pub fn skill_names(&self) -> Vec<&str> {
        self.skills.iter().map(SkillMatch::name).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "explanation": self.explanation,
            "skills": self.skills.iter().map(|s| json!({
                "skill": s.name(),
                "resolution": s.resolution.as_str(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Splits on the first separator; the right side is a comma-separated
/// skill list resolved through `taxonomy`.
pub fn parse_som_output(text: &str, taxonomy: &Taxonomy) -> Result<SomResult, SomError> {
    let (left, right) = text.split_once(SEPARATOR).ok_or(SomError::MissingSeparator)?;
    if left.trim().is_empty() {
        return Err(SomError::EmptyExplanation);
    }
    let skills: Vec<SkillMatch> = right
        .split(',')
        .filter(|frag| !normalize_name(frag).is_empty())
        .filter_map(|frag| taxonomy.resolve(frag).ok())
        .collect();
    SomResult::new(left, skills)
}

pub fn format_parts<'a>(explanation: &str, skills: impl IntoIterator<Item = &'a str>) -> String {
    let names: Vec<&str> = skills.into_iter().collect();
    format!("{explanation} {SEPARATOR} {}", names.join(", "))
}

pub fn format_som_output(result: &SomResult) -> String {
    format_parts(&result.explanation, result.skill_names())
}

/// Planner input: the social context (when present and non-empty), a blank
/// line, then the transcript.
pub fn training_input(social_context_text: Option<&str>, context: &[Turn]) -> String {
    let dialogue = transcript(context);
    match social_context_text.map(str::trim) {
        Some(ctx) if !ctx.is_empty() => format!("{ctx}\n\n{dialogue}"),
        _ => dialogue,
    }
}

/// Runs the planner, retrying once with a format reminder when the output
/// lacks the separator.
pub async fn infer_som(
    planner: &dyn ChatBackend,
    social_context_text: Option<&str>,
    context: &[Turn],
    taxonomy: &Taxonomy,
) -> Result<SomResult, SomError> {
    if context.is_empty() {
        return Err(SomError::EmptyDialogue);
    }
    let mut messages = vec![ChatMessage::user(training_input(social_context_text, context))];
    let first = planner.complete(ChatRequest::new(&messages)).await?;
    match parse_som_output(&first, taxonomy) {
        Err(SomError::MissingSeparator) => {
            tracing::debug!("planner output lacked separator; retrying once");
            messages.push(ChatMessage::assistant(if first.is_empty() { " ".into() } else { first }));
            messages.push(ChatMessage::user(REPAIR_REMINDER));
            let second = planner.complete(ChatRequest::new(&messages)).await?;
            parse_som_output(&second, taxonomy)
        }
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GuidanceConfig {
    /// Must contain `{skills}`; `{explanation}` is optional.
    pub guidance_template: String,
    /// Used instead of `guidance_template` when explanations are excluded.
    pub skills_only_template: String,
    pub include_explanation: bool,
    /// System message for the unguided arm.
    pub baseline_system: String,
    /// Cue name for the reply when the context shows only one speaker.
    pub responder_name: String,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        GuidanceConfig {
            guidance_template: "You are a conversational agent. Before replying, consider this analysis: {explanation} Respond using the following conversational skill(s): {skills}.".into(),
            skills_only_template: "You are a conversational agent. Respond using the following conversational skill(s): {skills}.".into(),
            include_explanation: true,
            baseline_system: "You are a conversational agent.".into(),
            responder_name: "Assistant".into(),
        }
    }
}

impl GuidanceConfig {
    pub fn validate(&self) -> Result<(), SomError> {
        for (name, template) in [
            ("guidance_template", &self.guidance_template),
            ("skills_only_template", &self.skills_only_template),
        ] {
            let found = placeholders_in(template);
            if !found.contains("skills") {
                return Err(SomError::Config(format!("{name} must contain {{skills}}")));
            }
            if let Some(other) = found.iter().find(|p| *p != "skills" && *p != "explanation") {
                return Err(SomError::Config(format!("{name} has unknown placeholder {{{other}}}")));
            }
        }
        if self.skills_only_template.contains("{explanation}") {
            return Err(SomError::Config("skills_only_template must not use {explanation}".into()));
        }
        Ok(())
    }
}

/// The speaker expected to talk next: whoever spoke before the last turn's
/// speaker, or `fallback` when only one speaker appears.
pub fn next_speaker<'a>(context: &'a [Turn], fallback: &'a str) -> &'a str {
    let Some(last) = context.last() else {
        return fallback;
    };
    context
        .iter()
        .rev()
        .map(|t| t.speaker.as_str())
        .find(|s| *s != last.speaker)
        .unwrap_or(fallback)
}

fn responder_user_message(context: &[Turn], cfg: &GuidanceConfig) -> ChatMessage {
    ChatMessage::user(format!(
        "{}\n{}:",
        transcript(context),
        next_speaker(context, &cfg.responder_name)
    ))
}

pub fn render_guidance(som: &SomResult, cfg: &GuidanceConfig) -> Result<String, SomError> {
    let mut bindings = BTreeMap::new();
    bindings.insert("skills".to_string(), som.skill_names().join(", "));
    let template = if cfg.include_explanation {
        bindings.insert("explanation".to_string(), som.explanation.clone());
        &cfg.guidance_template
    } else {
        &cfg.skills_only_template
    };
    Ok(substitute(template, &bindings)?)
}

/// `[system, user]` for the guided arm.
pub fn augment_prompt(
    context: &[Turn],
    som: &SomResult,
    cfg: &GuidanceConfig,
) -> Result<Vec<ChatMessage>, SomError> {
    Ok(vec![
        ChatMessage::system(render_guidance(som, cfg)?),
        responder_user_message(context, cfg),
    ])
}

/// `[system, user]` for the unguided arm; the user message matches
/// [`augment_prompt`] byte for byte.
pub fn baseline_prompt(context: &[Turn], cfg: &GuidanceConfig) -> Vec<ChatMessage> {
    vec![
        ChatMessage::system(cfg.baseline_system.clone()),
        responder_user_message(context, cfg),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuidedResponse {
    /// `None` in baseline mode.
    pub som: Option<SomResult>,
    pub response: String,
}

impl GuidedResponse {
    pub fn to_json(&self) -> Value {
        json!({
            "som": self.som.as_ref().map(SomResult::to_json),
            "response": self.response,
        })
    }
}

/// Plans with `planner` (if any) and then asks `responder` for the reply.
/// Without a planner the responder gets the baseline prompt.
pub async fn guided_respond(
    cfg: &GuidanceConfig,
    planner: Option<&dyn ChatBackend>,
    responder: &dyn ChatBackend,
    social_context_text: Option<&str>,
    context: &[Turn],
    taxonomy: &Taxonomy,
) -> Result<GuidedResponse, SomError> {
    if context.is_empty() {
        return Err(SomError::EmptyDialogue);
    }
    let (som, messages) = match planner {
        Some(planner) => {
            let som = infer_som(planner, social_context_text, context, taxonomy).await?;
            let messages = augment_prompt(context, &som, cfg)?;
            (Some(som), messages)
        }
        None => (None, baseline_prompt(context, cfg)),
    };
    let response = responder.complete(ChatRequest::new(&messages)).await?;
    Ok(GuidedResponse { som, response })
}
