use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::GenError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        Self { role: "user".into(), content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: "assistant".into(), content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndpointFailure {
    /// Worth retrying: transport errors, 429 and 5xx.
    Transient(String),
    Permanent(String),
}

/// Anything that turns a conversation into the next assistant reply.
pub trait ChatEndpoint {
    fn complete(&self, messages: &[ChatMessage]) -> Result<String, EndpointFailure>;
}

/// Chat-completions over HTTP: `POST {model, messages}` with a bearer token,
/// reply read from `choices[0].message.content`.
pub struct HttpChatEndpoint {
    url: String,
    model: String,
    api_key: String,
    agent: ureq::Agent,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChatMessage,
}

impl HttpChatEndpoint {
    pub fn new(url: impl Into<String>, model: impl Into<String>, api_key: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(300)))
            .build()
            .into();
        Self { url: url.into(), model: model.into(), api_key: api_key.into(), agent }
    }

    /// Reads the key from `env_var`; missing or empty is `AuthMissing`.
    pub fn from_env(url: impl Into<String>, model: impl Into<String>, env_var: &str) -> Result<Self, GenError> {
        match std::env::var(env_var) {
            Ok(key) if !key.is_empty() => Ok(Self::new(url, model, key)),
            _ => Err(GenError::AuthMissing(env_var.to_string())),
        }
    }
}

impl ChatEndpoint for HttpChatEndpoint {
    fn complete(&self, messages: &[ChatMessage]) -> Result<String, EndpointFailure> {
        let body = ChatRequest { model: &self.model, messages };
        let mut response = self
            .agent
            .post(&self.url)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| EndpointFailure::Transient(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| EndpointFailure::Transient(e.to_string()))?;
        match status {
            200..=299 => {}
            429 | 500..=599 => return Err(EndpointFailure::Transient(format!("HTTP {status}: {text}"))),
            _ => return Err(EndpointFailure::Permanent(format!("HTTP {status}: {text}"))),
        }
        let parsed: ChatResponse =
            serde_json::from_str(&text).map_err(|e| EndpointFailure::Permanent(format!("bad response body: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| EndpointFailure::Permanent("response has no choices".into()))
    }
}
