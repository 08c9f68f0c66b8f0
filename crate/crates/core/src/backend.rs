//! Chat-completion backends.
//!
//! [`HttpBackend`] speaks the OpenAI-compatible `/chat/completions` protocol
//! with bounded retries. [`MockBackend`] and [`ScriptedBackend`] answer
//! offline, deterministically.

use std::collections::{HashMap, VecDeque};
use std::sync::Mutex;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::taxonomy::Taxonomy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    /// Base URL; requests go to `{endpoint_url}/chat/completions`.
    pub endpoint_url: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub request_timeout_secs: f64,
    pub max_retries: u32,
    /// First retry delay; doubles on every further attempt.
    pub initial_backoff_ms: u64,
    pub max_concurrency: usize,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    pub require_api_key: bool,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            endpoint_url: "https://api.openai.com/v1".into(),
            model_name: "gpt-4-turbo".into(),
            temperature: 0.7,
            max_output_tokens: 1024,
            request_timeout_secs: 60.0,
            max_retries: 3,
            initial_backoff_ms: 1000,
            max_concurrency: 8,
            api_key_env: "THANOS_API_KEY".into(),
            require_api_key: true,
        }
    }
}

impl BackendConfig {
    /// Negated comparisons so that NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), String> {
        if !(self.temperature >= 0.0) {
            return Err(format!("temperature must be >= 0, got {}", self.temperature));
        }
        if self.max_output_tokens == 0 {
            return Err("max_output_tokens must be positive".into());
        }
        if self.max_concurrency == 0 {
            return Err("max_concurrency must be positive".into());
        }
        if !(self.request_timeout_secs > 0.0) {
            return Err("request_timeout_secs must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
}

/// One chat-completion call. `id` names the work item (e.g. a sub-dialogue
/// id); HTTP backends ignore it, mocks use it to look up fixture outputs.
#[derive(Debug, Clone, Copy)]
pub struct ChatRequest<'a> {
    pub id: Option<&'a str>,
    pub messages: &'a [ChatMessage],
}

impl<'a> ChatRequest<'a> {
    pub fn new(messages: &'a [ChatMessage]) -> Self {
        ChatRequest { id: None, messages }
    }

    pub fn with_id(id: &'a str, messages: &'a [ChatMessage]) -> Self {
        ChatRequest {
            id: Some(id),
            messages,
        }
    }
}

#[async_trait]
pub trait ChatBackend: Send + Sync {
    async fn complete(&self, request: ChatRequest<'_>) -> Result<String, BackendError>;
}

pub struct HttpBackend {
    config: BackendConfig,
    api_key: Option<String>,
    client: reqwest::Client,
}

#[derive(Serialize)]
struct CompletionBody<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
    max_tokens: u32,
}

enum Attempt {
    Done(Result<String, BackendError>),
    Retry(BackendError),
}

impl HttpBackend {
    /// Reads the API key from the configured environment variable.
    pub fn new(config: BackendConfig) -> Result<Self, BackendError> {
        let api_key = std::env::var(&config.api_key_env)
            .ok()
            .filter(|k| !k.is_empty());
        Self::with_api_key(config, api_key)
    }

    pub fn with_api_key(config: BackendConfig, api_key: Option<String>) -> Result<Self, BackendError> {
        config.validate().map_err(BackendError::Transport)?;
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs_f64(config.request_timeout_secs))
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(HttpBackend {
            config,
            api_key,
            client,
        })
    }

    pub fn config(&self) -> &BackendConfig {
        &self.config
    }

    fn url(&self) -> String {
        format!(
            "{}/chat/completions",
            self.config.endpoint_url.trim_end_matches('/')
        )
    }

    async fn attempt(&self, body: &CompletionBody<'_>) -> Attempt {
        let mut req = self.client.post(self.url()).json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = match req.send().await {
            Ok(r) => r,
            Err(e) if e.is_timeout() || e.is_connect() => {
                return Attempt::Retry(BackendError::Transport(e.to_string()))
            }
            Err(e) => return Attempt::Done(Err(BackendError::Transport(e.to_string()))),
        };
        let status = resp.status();
        if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN {
            return Attempt::Done(Err(BackendError::Auth(format!("HTTP {status}"))));
        }
        if status == reqwest::StatusCode::TOO_MANY_REQUESTS {
            return Attempt::Retry(BackendError::RateLimited { attempts: 0 });
        }
        if status.is_server_error() {
            return Attempt::Retry(BackendError::Transport(format!("HTTP {status}")));
        }
        if !status.is_success() {
            let text = resp.text().await.unwrap_or_default();
            return Attempt::Done(Err(BackendError::Transport(format!("HTTP {status}: {text}"))));
        }
        let value: serde_json::Value = match resp.json().await {
            Ok(v) => v,
            Err(e) => return Attempt::Done(Err(BackendError::MalformedResponse(e.to_string()))),
        };
        Attempt::Done(
            value
                .pointer("/choices/0/message/content")
                .and_then(|c| c.as_str())
                .map(str::to_string)
                .ok_or_else(|| {
                    BackendError::MalformedResponse("missing choices[0].message.content".into())
                }),
        )
    }
}

#[async_trait]
impl ChatBackend for HttpBackend {
    async fn complete(&self, request: ChatRequest<'_>) -> Result<String, BackendError> {
        if self.config.require_api_key && self.api_key.is_none() {
            return Err(BackendError::Auth(format!(
                "environment variable {} is not set",
                self.config.api_key_env
            )));
        }
        let body = CompletionBody {
            model: &self.config.model_name,
            messages: request.messages,
            temperature: self.config.temperature,
            max_tokens: self.config.max_output_tokens,
        };
        let mut attempt = 0u32;
        loop {
            match self.attempt(&body).await {
                Attempt::Done(result) => return result,
                Attempt::Retry(err) => {
                    attempt += 1;
                    if attempt > self.config.max_retries {
                        return Err(match err {
                            BackendError::RateLimited { .. } => {
                                BackendError::RateLimited { attempts: attempt }
                            }
                            other => other,
                        });
                    }
                    let delay = self
                        .config
                        .initial_backoff_ms
                        .saturating_mul(1u64 << (attempt - 1).min(16));
                    tracing::debug!(attempt, delay_ms = delay, error = %err, "retrying request");
                    tokio::time::sleep(Duration::from_millis(delay)).await;
                }
            }
        }
    }
}

fn digest(text: &str) -> u64 {
    let d = Sha256::digest(text.as_bytes());
    u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes"))
}

/// What a [`MockBackend`] produces when no fixture output matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockRole {
    /// JSON list of `{skill, explanation}` objects.
    Annotator,
    /// `explanation [RESULT SKILL] skill` text.
    Planner,
    /// A short conversational reply.
    Responder,
}

const MOCK_REPLIES: [&str; 6] = [
    "That sounds really meaningful. How are you feeling about it now?",
    "I hear you. Do you want to tell me a bit more about what happened?",
    "Thanks for sharing that with me. What would help most right now?",
    "That makes sense to me. I would probably feel the same way.",
    "Sounds like a plan. Let me know if you need a hand with anything.",
    "Oh, interesting! What made you decide on that?",
];

/// Deterministic offline backend. Output depends only on the request
/// content (or on a fixture keyed by request id), never on call order.
pub struct MockBackend {
    role: MockRole,
    skills: Vec<String>,
    fixtures: HashMap<String, String>,
    calls: Mutex<Vec<Vec<ChatMessage>>>,
}

impl MockBackend {
    pub fn new(role: MockRole, taxonomy: &Taxonomy) -> Self {
        MockBackend {
            role,
            skills: taxonomy
                .canonical_skills()
                .map(|s| s.canonical_name.clone())
                .collect(),
            fixtures: HashMap::new(),
            calls: Mutex::new(Vec::new()),
        }
    }

    /// Canned outputs keyed by request id; they take precedence over the
    /// synthesized output.
    pub fn with_fixtures(mut self, fixtures: HashMap<String, String>) -> Self {
        self.fixtures = fixtures;
        self
    }

    pub fn calls(&self) -> Vec<Vec<ChatMessage>> {
        self.calls.lock().expect("mock call log poisoned").clone()
    }

    pub fn call_count(&self) -> usize {
        self.calls.lock().expect("mock call log poisoned").len()
    }

    fn synthesize(&self, messages: &[ChatMessage]) -> String {
        let content: String = messages.iter().map(|m| m.content.as_str()).collect();
        let h = digest(&content);
        let skill = &self.skills[(h % self.skills.len() as u64) as usize];
        match self.role {
            MockRole::Annotator => {
                let mut items = vec![serde_json::json!({
                    "skill": skill,
                    "explanation": format!(
                        "Looking at where the conversation is going, I should respond with {} so the other person feels understood.",
                        skill.to_lowercase()
                    ),
                })];
                if (h >> 16).is_multiple_of(4) {
                    let second = &self.skills[((h >> 24) % self.skills.len() as u64) as usize];
                    if second != skill {
                        items.push(serde_json::json!({
                            "skill": second,
                            "explanation": format!(
                                "I also want to bring in {} to keep the exchange going naturally.",
                                second.to_lowercase()
                            ),
                        }));
                    }
                }
                serde_json::to_string(&items).expect("mock annotation serializes")
            }
            MockRole::Planner => format!(
                "The other speaker has shared something that matters to them, so I want my reply to draw on {}. [RESULT SKILL] {}",
                skill.to_lowercase(),
                skill
            ),
            MockRole::Responder => MOCK_REPLIES[(h % MOCK_REPLIES.len() as u64) as usize].to_string(),
        }
    }
}

#[async_trait]
impl ChatBackend for MockBackend {
    async fn complete(&self, request: ChatRequest<'_>) -> Result<String, BackendError> {
        self.calls
            .lock()
            .expect("mock call log poisoned")
            .push(request.messages.to_vec());
        if let Some(out) = request.id.and_then(|id| self.fixtures.get(id)) {
            return Ok(out.clone());
        }
        Ok(self.synthesize(request.messages))
    }
}

/// Returns queued results in call order; errors once the queue is empty.
#[derive(Default)]
pub struct ScriptedBackend {
    queue: Mutex<VecDeque<Result<String, BackendError>>>,
    calls: Mutex<Vec<Vec<ChatMessage>>>,
}

impl ScriptedBackend {
    pub fn new(results: impl IntoIterator<Item = Result<String, BackendError>>) -> Self {
        ScriptedBackend {
            queue: Mutex::new(results.into_iter().collect()),
            calls: Mutex::new(Vec::new()),
        }
    }

    pub fn replies<S: Into<String>>(replies: impl IntoIterator<Item = S>) -> Self {
        Self::new(replies.into_iter().map(|r| Ok(r.into())))
    }

    pub fn calls(&self) -> Vec<Vec<ChatMessage>> {
        self.calls.lock().expect("scripted call log poisoned").clone()
    }

    pub fn call_count(&self) -> usize {
        self.calls.lock().expect("scripted call log poisoned").len()
    }
}

#[async_trait]
impl ChatBackend for ScriptedBackend {
    async fn complete(&self, request: ChatRequest<'_>) -> Result<String, BackendError> {
        self.calls
            .lock()
            .expect("scripted call log poisoned")
            .push(request.messages.to_vec());
        self.queue
            .lock()
            .expect("scripted queue poisoned")
            .pop_front()
            .unwrap_or_else(|| Err(BackendError::Transport("script exhausted".into())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::builtin_taxonomy;

    #[tokio::test]
    async fn mock_is_content_deterministic() {
        let t = builtin_taxonomy();
        let a = MockBackend::new(MockRole::Planner, &t);
        let b = MockBackend::new(MockRole::Planner, &t);
        let msgs = vec![ChatMessage::user("A: hi\nB: hello")];
        let x = a.complete(ChatRequest::new(&msgs)).await.unwrap();
        let y = b.complete(ChatRequest::new(&msgs)).await.unwrap();
        assert_eq!(x, y);
        assert!(x.contains("[RESULT SKILL]"));
        assert_eq!(a.call_count(), 1);
    }

    #[tokio::test]
    async fn mock_fixtures_take_precedence() {
        let t = builtin_taxonomy();
        let m = MockBackend::new(MockRole::Annotator, &t)
            .with_fixtures([("x".to_string(), "canned".to_string())].into());
        let msgs = vec![ChatMessage::user("hello")];
        assert_eq!(m.complete(ChatRequest::with_id("x", &msgs)).await.unwrap(), "canned");
        let other = m.complete(ChatRequest::with_id("y", &msgs)).await.unwrap();
        assert!(serde_json::from_str::<serde_json::Value>(&other).unwrap().is_array());
    }

    #[tokio::test]
    async fn missing_key_is_auth_error() {
        let cfg = BackendConfig {
            endpoint_url: "http://127.0.0.1:9".into(),
            ..Default::default()
        };
        let backend = HttpBackend::with_api_key(cfg, None).unwrap();
        let msgs = vec![ChatMessage::user("hi")];
        assert!(matches!(
            backend.complete(ChatRequest::new(&msgs)).await,
            Err(BackendError::Auth(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(BackendConfig::default().validate().is_ok());
        let bad = BackendConfig {
            max_concurrency: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
