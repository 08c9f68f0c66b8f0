//! The skill-of-mind annotation prompt.

use crate::backend::ChatMessage;
use crate::corpus::{transcript, Turn};

use super::AnnotationError;

pub const SYSTEM_MESSAGE: &str = "You are a helpful assistant that generates the most appropriate conversational skill and corresponding explanation. Read the provided instruction carefully.";

const INSTRUCTION: &str = "In the given dialogue, two speakers are communicating with each other, and each speaker has their own information such as demographics, preferences, persona, current situation/narrative, past dialogue summaries, episodic memory, or other relevant details. This information is represented in the \"[Social Context]\" part. In this dialogue, image-sharing moments sometimes occur, represented in the format of \"[Sharing Image] <image_description>\", where <image_description> represents the description of the shared image. You are also given the ideal response for the next turn in the given dialogue. Your task is to identify the most appropriate conversational skill that would lead to the ideal response in the given dialogue from the skill collection below, and explain why this particular skill was chosen. When generating the explanation, you should adopt the perspective of the speaker in the dialogue, selecting the skill based solely on the context of the given conversation. Do not consider the ideal response when generating your explanation; focus only on the given dialogue itself and why the chosen skill is the most suitable in that specific situation.";

/// Skill collection as offered to the annotator (its own spelling and order).
pub const SKILL_COLLECTION: &str = "Empathy, Personal Background, Persona Recall, Self-disclosure, Negotiation, Conflict Resolution, Conflict Avoidance, Persuasion, Memory Recall, Topic Transition, Ethics, Harmlessness, Helpfulness, Avoiding Social Bias, Cultural Sensitivity, Commonsense Understanding, Rhetoric, Preference Elicitation, Knowledge Sharing, Knowledge Acquisition, Knowledge Searching, Active Listening, Factual Problem Solving, Logical Thinking, Critical Thinking, Creative Problem Solving, Immediate Response, Rephrasing, Echoing, Mentoring, Reflective Listening, Image-Sharing, Image-Commenting, Recommendation, Task Execution, Urgency Recognition, Clarification, Confirmation, Decision-making";

const GUIDELINES: &str = "You should strictly follow the guidelines below:
[Guidelines]
- The answer should be represented in the form of a JSON list.
- Each entry in the list should be a Python dictionary containing the following keys: \"skill\", \"explanation\".
- The \"skill\" field should contain the one skill that is mostly required to generate the next response.
- The \"explanation\" field should provide a reason that occurs in the actual speaker's mind before selecting the skill, from the speaker's perspective.
- The \"explanation\" should be written from the perspective of the actual speaker who made the next response.
- You can choose one or multiple skills if necessary, but each skill must have its own explanation.";

/// Builds the `[system, user]` annotation messages.
pub fn build_annotation_prompt(
    social_context_text: &str,
    context: &[Turn],
    next_response: &Turn,
) -> Result<Vec<ChatMessage>, AnnotationError> {
    if context.is_empty() {
        return Err(AnnotationError::EmptyDialogue);
    }
    let user = format!(
        "{INSTRUCTION}\n\nWe provide the skill collection:\n[Skill Collections]\n- {SKILL_COLLECTION}\n\nGiven the dialogue, social context information, and the next response, please brainstorm the most appropriate conversation skill and corresponding explanation.\n[Social Context]\n{social_context_text}\n\n[Dialogue]\n{dialogue}\n\n[Next Response]\n{response}\n\n{GUIDELINES}\n\n[Generated Skills and Explanations ]\n",
        dialogue = transcript(context),
        response = next_response.transcript_line(),
    );
    Ok(vec![ChatMessage::system(SYSTEM_MESSAGE), ChatMessage::user(user)])
}
