use std::collections::HashMap;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

pub const SAFETY_LABELS: [&str; 3] = ["casual", "needs_caution", "needs_intervention"];

const EMOTION_LABELS: [&str; 32] = [
    "afraid", "angry", "annoyed", "anticipating", "anxious", "apprehensive", "ashamed", "caring",
    "confident", "content", "devastated", "disappointed", "disgusted", "embarrassed", "excited",
    "faithful", "furious", "grateful", "guilty", "hopeful", "impressed", "jealous", "joyful",
    "lonely", "nostalgic", "prepared", "proud", "sad", "sentimental", "surprised", "terrified",
    "trusting",
];

const INTENT_LABELS: [&str; 9] = [
    "agreeing", "acknowledging", "encouraging", "consoling", "sympathizing", "suggesting",
    "questioning", "wishing", "neutral",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierTask {
    Safety,
    Emotion,
    Intent,
}

impl ClassifierTask {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierTask::Safety => "safety",
            ClassifierTask::Emotion => "emotion",
            ClassifierTask::Intent => "intent",
        }
    }
}

/// Closed label sets for the emotion and intent tasks. The safety set is
/// fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelSets {
    pub emotion: Vec<String>,
    pub intent: Vec<String>,
}

impl Default for LabelSets {
    fn default() -> Self {
        LabelSets {
            emotion: EMOTION_LABELS.iter().map(|s| s.to_string()).collect(),
            intent: INTENT_LABELS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl LabelSets {
    pub fn contains(&self, task: ClassifierTask, label: &str) -> bool {
        match task {
            ClassifierTask::Safety => SAFETY_LABELS.contains(&label),
            ClassifierTask::Emotion => self.emotion.iter().any(|l| l == label),
            ClassifierTask::Intent => self.intent.iter().any(|l| l == label),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierBackendConfig {
    pub endpoint_url: String,
    pub request_timeout_secs: f64,
    /// Optional bearer token variable; the key itself never lives in config.
    pub api_key_env: Option<String>,
    pub max_concurrency: usize,
    pub labels: LabelSets,
}

impl Default for ClassifierBackendConfig {
    fn default() -> Self {
        ClassifierBackendConfig {
            endpoint_url: "http://localhost:8080/classify".into(),
            request_timeout_secs: 30.0,
            api_key_env: None,
            max_concurrency: 8,
            labels: LabelSets::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("label '{label}' is not in the {task} label set")]
    UnknownLabel { task: &'static str, label: String },
}

#[async_trait]
pub trait Classifier: Send + Sync {
    async fn classify(&self, task: ClassifierTask, text: &str) -> Result<String, ClassifyError>;
}

fn check(labels: &LabelSets, task: ClassifierTask, label: String) -> Result<String, ClassifyError> {
    if labels.contains(task, &label) {
        Ok(label)
    } else {
        Err(ClassifyError::UnknownLabel {
            task: task.as_str(),
            label,
        })
    }
}

pub struct HttpClassifier {
    config: ClassifierBackendConfig,
    client: reqwest::Client,
    api_key: Option<String>,
}

impl HttpClassifier {
    pub fn new(config: ClassifierBackendConfig) -> Result<Self, ClassifyError> {
        let api_key = config.api_key_env.as_deref().and_then(|v| std::env::var(v).ok());
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs_f64(config.request_timeout_secs))
            .build()
            .map_err(|e| ClassifyError::Transport(e.to_string()))?;
        Ok(HttpClassifier {
            config,
            client,
            api_key,
        })
    }
}

#[derive(Deserialize)]
struct LabelResponse {
    label: String,
}

#[async_trait]
impl Classifier for HttpClassifier {
    async fn classify(&self, task: ClassifierTask, text: &str) -> Result<String, ClassifyError> {
        let mut request = self
            .client
            .post(&self.config.endpoint_url)
            .json(&serde_json::json!({ "task": task.as_str(), "text": text }));
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request
            .send()
            .await
            .map_err(|e| ClassifyError::Transport(e.to_string()))?;
        if !response.status().is_success() {
            return Err(ClassifyError::Transport(format!("HTTP {}", response.status())));
        }
        let body: LabelResponse = response
            .json()
            .await
            .map_err(|e| ClassifyError::Transport(e.to_string()))?;
        check(&self.config.labels, task, body.label)
    }
}

/// Looks labels up in a `text -> label` fixture table.
pub struct MockClassifier {
    labels: LabelSets,
    fixtures: HashMap<String, String>,
    fallback: Option<String>,
}

impl MockClassifier {
    pub fn new(fixtures: HashMap<String, String>) -> Self {
        MockClassifier {
            labels: LabelSets::default(),
            fixtures,
            fallback: None,
        }
    }

    /// Label returned for texts missing from the table.
    pub fn with_fallback(mut self, label: impl Into<String>) -> Self {
        self.fallback = Some(label.into());
        self
    }

    pub fn with_labels(mut self, labels: LabelSets) -> Self {
        self.labels = labels;
        self
    }
}

#[async_trait]
impl Classifier for MockClassifier {
    async fn classify(&self, task: ClassifierTask, text: &str) -> Result<String, ClassifyError> {
        let label = self
            .fixtures
            .get(text)
            .or(self.fallback.as_ref())
            .cloned()
            .ok_or_else(|| ClassifyError::Transport(format!("no fixture for text '{text}'")))?;
        check(&self.labels, task, label)
    }
}
