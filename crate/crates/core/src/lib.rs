//! Skill-of-mind toolkit: a conversational-skill taxonomy, corpus
//! preparation, social-context templates, LLM-backed annotation, planner
//! and responder runtime, and offline evaluation metrics.

pub mod annotation;
pub mod backend;
pub mod cli;
pub mod corpus;
pub mod evaluation;
pub mod jsonl;
pub mod seeding;
pub mod som;
pub mod taxonomy;
pub mod templates;

pub use evaluation::Scalar;
pub use taxonomy::{builtin_taxonomy, Taxonomy};
pub use templates::{builtin_registry, TemplateRegistry};

pub type AlphaReportF32 = evaluation::AlphaReport<f32>;
pub type AlphaReportF64 = evaluation::AlphaReport<f64>;
pub type SafetyReportF32 = evaluation::SafetyReport<f32>;
pub type SafetyReportF64 = evaluation::SafetyReport<f64>;
pub type HeadToHeadReportF32 = evaluation::HeadToHeadReport<f32>;
pub type HeadToHeadReportF64 = evaluation::HeadToHeadReport<f64>;
pub type SkillShareF32 = evaluation::SkillShare<f32>;
pub type SkillShareF64 = evaluation::SkillShare<f64>;
