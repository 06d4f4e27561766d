//! Chat-completion access with live, mock and record/replay modes.
//!
//! Every request is keyed by a digest of (model, system text, user text,
//! temperature). Recording appends `(digest, response)` entries to a
//! transcript; replaying serves them back in order, so whole pipeline runs
//! can be reproduced byte for byte without a model.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use graphcode_core::eval::{Purpose, UsageRecord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use tracing::{debug, warn};

/// Sampling temperature used when a request does not set one.
pub const DEFAULT_TEMPERATURE: f64 = 0.1;
pub const DEFAULT_MAX_TOKENS: u32 = 2048;
pub const API_BASE_ENV: &str = "LLM_API_BASE";
pub const API_KEY_ENV: &str = "LLM_API_KEY";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GatewayError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("endpoint rejected the request with status {status}: {body}")]
    Rejected { status: u16, body: String },
    #[error("no recorded response for request digest {0}")]
    ReplayMiss(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("transcript error: {0}")]
    Transcript(String),
    #[error("gateway is not configured: {0}")]
    NotConfigured(String),
}

impl GatewayError {
    fn retryable(&self) -> bool {
        matches!(self, GatewayError::Transport(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system_text: String,
    pub user_text: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub model_id: String,
    pub purpose: Purpose,
    /// Task the call is made for; used for cost attribution only.
    #[serde(default)]
    pub task_id: String,
}

impl ChatRequest {
    pub fn new(
        purpose: Purpose,
        system_text: impl Into<String>,
        user_text: impl Into<String>,
    ) -> Self {
        Self {
            system_text: system_text.into(),
            user_text: user_text.into(),
            temperature: DEFAULT_TEMPERATURE,
            max_tokens: DEFAULT_MAX_TOKENS,
            model_id: String::new(),
            purpose,
            task_id: String::new(),
        }
    }

    pub fn for_task(mut self, task_id: &str) -> Self {
        self.task_id = task_id.to_string();
        self
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(GatewayError::InvalidRequest(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.user_text.is_empty() {
            return Err(GatewayError::InvalidRequest("empty user text".into()));
        }
        if self.max_tokens == 0 {
            return Err(GatewayError::InvalidRequest(
                "max_tokens must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Hex SHA-256 over the length-prefixed model id, system text, user text
    /// and temperature.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for part in [
            self.model_id.as_bytes(),
            self.system_text.as_bytes(),
            self.user_text.as_bytes(),
        ] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(part);
        }
        h.update(self.temperature.to_bits().to_le_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    #[serde(with = "duration_ms")]
    pub latency: Duration,
}

mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1000.0)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(ms.max(0.0) / 1000.0))
    }
}

/// Rough token count (four characters per token) for backends that do not
/// report usage.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

/// Something that answers chat requests.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, GatewayError>;
}

/// A backend defined by a function from request to response text; token
/// counts are estimated and latency is zero.
pub struct FnBackend<F>(pub F);

impl<F> ChatBackend for FnBackend<F>
where
    F: Fn(&ChatRequest) -> Result<String, GatewayError> + Send + Sync,
{
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let text = (self.0)(req)?;
        Ok(ChatResponse {
            prompt_tokens: estimate_tokens(&req.system_text) + estimate_tokens(&req.user_text),
            completion_tokens: estimate_tokens(&text),
            text,
            latency: Duration::ZERO,
        })
    }
}

/// OpenAI-compatible `POST {base}/chat/completions` client.
pub struct HttpBackend {
    agent: ureq::Agent,
    base_url: String,
    api_key: Option<String>,
}

impl HttpBackend {
    pub fn new(base_url: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            agent,
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key,
        }
    }

    /// Endpoint and key from the environment.
    pub fn from_env(timeout: Duration) -> Result<Self, GatewayError> {
        let base = std::env::var(API_BASE_ENV)
            .map_err(|_| GatewayError::NotConfigured(format!("{API_BASE_ENV} is not set")))?;
        Ok(Self::new(base, std::env::var(API_KEY_ENV).ok(), timeout))
    }
}

impl ChatBackend for HttpBackend {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let mut messages = Vec::new();
        if !req.system_text.is_empty() {
            messages.push(serde_json::json!({"role": "system", "content": req.system_text}));
        }
        messages.push(serde_json::json!({"role": "user", "content": req.user_text}));
        let body = serde_json::json!({
            "model": req.model_id,
            "messages": messages,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        });
        let mut call = self
            .agent
            .post(format!("{}/chat/completions", self.base_url))
            .header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            call = call.header("Authorization", format!("Bearer {key}"));
        }
        let started = Instant::now();
        let mut resp = call
            .send_json(&body)
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        match status {
            200..=299 => {}
            401 | 403 => return Err(GatewayError::Auth(text)),
            429 | 500..=599 => {
                return Err(GatewayError::Transport(format!("status {status}: {text}")))
            }
            _ => return Err(GatewayError::Rejected { status, body: text }),
        }
        let json: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| GatewayError::Transport(format!("bad response body: {e}")))?;
        let content = json["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| GatewayError::Transport("response has no message content".into()))?
            .to_string();
        let usage = &json["usage"];
        Ok(ChatResponse {
            prompt_tokens: usage["prompt_tokens"].as_u64().unwrap_or_else(|| {
                estimate_tokens(&req.system_text) + estimate_tokens(&req.user_text)
            }),
            completion_tokens: usage["completion_tokens"]
                .as_u64()
                .unwrap_or_else(|| estimate_tokens(&content)),
            text: content,
            latency: started.elapsed(),
        })
    }
}

/// One recorded exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub digest: String,
    pub text: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranscriptMode {
    Record,
    Replay,
    Passthrough,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
    pub mode: TranscriptMode,
}

impl Transcript {
    pub fn read_jsonl(input: impl BufRead) -> Result<Vec<TranscriptEntry>, GatewayError> {
        let mut out = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| GatewayError::Transcript(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry = serde_json::from_str(&line)
                .map_err(|e| GatewayError::Transcript(format!("line {}: {e}", i + 1)))?;
            out.push(entry);
        }
        Ok(out)
    }

    pub fn write_jsonl(
        entries: &[TranscriptEntry],
        mut out: impl Write,
    ) -> Result<(), GatewayError> {
        for e in entries {
            let line = serde_json::to_string(e).expect("entries serialise");
            writeln!(out, "{line}").map_err(|e| GatewayError::Transcript(e.to_string()))?;
        }
        Ok(())
    }
}

/// Replay lookup: entries per digest served in order, the last one repeating.
struct ReplayIndex {
    by_digest: HashMap<String, (Vec<TranscriptEntry>, usize)>,
}

impl ReplayIndex {
    fn new(entries: Vec<TranscriptEntry>) -> Self {
        let mut by_digest: HashMap<String, (Vec<TranscriptEntry>, usize)> = HashMap::new();
        for e in entries {
            by_digest.entry(e.digest.clone()).or_default().0.push(e);
        }
        Self { by_digest }
    }

    fn next(&mut self, digest: &str) -> Option<TranscriptEntry> {
        let (entries, cursor) = self.by_digest.get_mut(digest)?;
        let i = (*cursor).min(entries.len() - 1);
        *cursor += 1;
        Some(entries[i].clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            base_delay: Duration::from_millis(500),
        }
    }
}

enum Source {
    Backend(Arc<dyn ChatBackend>),
    Replay(Mutex<ReplayIndex>),
}

/// The single entry point for model calls; safe to share across threads.
pub struct Gateway {
    source: Source,
    mode: TranscriptMode,
    model_id: String,
    retry: RetryPolicy,
    recorded: Mutex<Vec<TranscriptEntry>>,
    usage: Mutex<Vec<UsageRecord>>,
}

impl Gateway {
    /// Calls go straight to `backend`.
    pub fn passthrough(backend: Arc<dyn ChatBackend>, model_id: impl Into<String>) -> Self {
        Self::with_source(
            Source::Backend(backend),
            TranscriptMode::Passthrough,
            model_id,
        )
    }

    /// Calls go to `backend` and every exchange is kept for [`Gateway::transcript`].
    pub fn recording(backend: Arc<dyn ChatBackend>, model_id: impl Into<String>) -> Self {
        Self::with_source(Source::Backend(backend), TranscriptMode::Record, model_id)
    }

    /// Calls are answered from `entries`; unknown digests fail with
    /// [`GatewayError::ReplayMiss`].
    pub fn replaying(entries: Vec<TranscriptEntry>, model_id: impl Into<String>) -> Self {
        Self::with_source(
            Source::Replay(Mutex::new(ReplayIndex::new(entries))),
            TranscriptMode::Replay,
            model_id,
        )
    }

    fn with_source(source: Source, mode: TranscriptMode, model_id: impl Into<String>) -> Self {
        Self {
            source,
            mode,
            model_id: model_id.into(),
            retry: RetryPolicy::default(),
            recorded: Mutex::new(Vec::new()),
            usage: Mutex::new(Vec::new()),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn mode(&self) -> TranscriptMode {
        self.mode
    }

    /// Send `req`, filling in the gateway's model id when the request has none.
    pub fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let mut req = req.clone();
        if req.model_id.is_empty() {
            req.model_id = self.model_id.clone();
        }
        req.validate()?;
        let digest = req.digest();
        let resp = match &self.source {
            Source::Replay(index) => {
                let entry = index
                    .lock()
                    .expect("replay index lock")
                    .next(&digest)
                    .ok_or_else(|| GatewayError::ReplayMiss(digest.clone()))?;
                ChatResponse {
                    text: entry.text,
                    prompt_tokens: entry.prompt_tokens,
                    completion_tokens: entry.completion_tokens,
                    latency: Duration::ZERO,
                }
            }
            Source::Backend(backend) => self.call_with_retry(backend.as_ref(), &req)?,
        };
        if self.mode == TranscriptMode::Record {
            self.recorded
                .lock()
                .expect("transcript lock")
                .push(TranscriptEntry {
                    digest: digest.clone(),
                    text: resp.text.clone(),
                    prompt_tokens: resp.prompt_tokens,
                    completion_tokens: resp.completion_tokens,
                });
        }
        debug!(purpose = req.purpose.as_str(), digest = %digest, "model call");
        self.usage.lock().expect("usage lock").push(UsageRecord {
            task_id: req.task_id.clone(),
            purpose: req.purpose,
            model_id: req.model_id.clone(),
            prompt_tokens: resp.prompt_tokens,
            completion_tokens: resp.completion_tokens,
            latency_ms: resp.latency.as_secs_f64() * 1000.0,
        });
        Ok(resp)
    }

    fn call_with_retry(
        &self,
        backend: &dyn ChatBackend,
        req: &ChatRequest,
    ) -> Result<ChatResponse, GatewayError> {
        let mut delay = self.retry.base_delay;
        let mut attempt = 1;
        loop {
            match backend.complete(req) {
                Ok(r) => return Ok(r),
                Err(e) if e.retryable() && attempt < self.retry.attempts => {
                    warn!(attempt, error = %e, "model call failed; retrying");
                    std::thread::sleep(delay);
                    delay *= 2;
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// Exchanges recorded so far (record mode), in call order.
    pub fn transcript(&self) -> Transcript {
        Transcript {
            entries: self.recorded.lock().expect("transcript lock").clone(),
            mode: self.mode,
        }
    }

    /// Usage records accumulated since the last call, oldest first.
    pub fn take_usage(&self) -> Vec<UsageRecord> {
        std::mem::take(&mut *self.usage.lock().expect("usage lock"))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};

    use super::*;

    fn echo() -> Arc<dyn ChatBackend> {
        Arc::new(FnBackend(|r: &ChatRequest| {
            Ok(format!("echo:{}", r.user_text))
        }))
    }

    #[test]
    fn defaults_and_validation() {
        let r = ChatRequest::new(Purpose::Codegen, "s", "u");
        assert_eq!(r.temperature, 0.1);
        assert!(r.validate().is_ok());
        let mut bad = r.clone();
        bad.temperature = 2.5;
        assert!(matches!(
            bad.validate(),
            Err(GatewayError::InvalidRequest(_))
        ));
        let empty = ChatRequest::new(Purpose::Codegen, "s", "");
        assert!(empty.validate().is_err());
    }

    #[test]
    fn digest_covers_the_keyed_fields_only() {
        let a = ChatRequest::new(Purpose::Codegen, "s", "u");
        let mut b = a.clone();
        b.task_id = "other".into();
        b.purpose = Purpose::Refine;
        assert_eq!(a.digest(), b.digest());
        let mut c = a.clone();
        c.temperature = 0.2;
        assert_ne!(a.digest(), c.digest());
        // boundaries between fields matter
        let d = ChatRequest::new(Purpose::Codegen, "su", "");
        let e = ChatRequest::new(Purpose::Codegen, "s", "u");
        assert_ne!(d.digest(), e.digest());
    }

    #[test]
    fn record_then_replay_is_verbatim() {
        let live = Gateway::recording(echo(), "m");
        let reqs: Vec<_> = ["a", "b", "a"]
            .iter()
            .map(|u| ChatRequest::new(Purpose::Testgen, "s", *u))
            .collect();
        let first: Vec<String> = reqs
            .iter()
            .map(|r| live.complete(r).unwrap().text)
            .collect();
        let transcript = live.transcript();
        assert_eq!(transcript.entries.len(), 3);
        let mut buf = Vec::new();
        Transcript::write_jsonl(&transcript.entries, &mut buf).unwrap();
        let entries = Transcript::read_jsonl(buf.as_slice()).unwrap();
        for _ in 0..2 {
            let replay = Gateway::replaying(entries.clone(), "m");
            let again: Vec<String> = reqs
                .iter()
                .map(|r| replay.complete(r).unwrap().text)
                .collect();
            assert_eq!(again, first);
        }
    }

    #[test]
    fn replay_miss_is_an_error() {
        let replay = Gateway::replaying(Vec::new(), "m");
        let err = replay
            .complete(&ChatRequest::new(Purpose::Codegen, "s", "u"))
            .unwrap_err();
        assert!(matches!(err, GatewayError::ReplayMiss(_)));
    }

    #[test]
    fn repeated_digests_replay_in_order_then_repeat() {
        let req = ChatRequest::new(Purpose::Codegen, "s", "u");
        let mut keyed = req.clone();
        keyed.model_id = "m".into();
        let digest = keyed.digest();
        let entries: Vec<_> = ["one", "two"]
            .iter()
            .map(|t| TranscriptEntry {
                digest: digest.clone(),
                text: t.to_string(),
                prompt_tokens: 1,
                completion_tokens: 1,
            })
            .collect();
        let g = Gateway::replaying(entries, "m");
        let texts: Vec<String> = (0..3).map(|_| g.complete(&req).unwrap().text).collect();
        assert_eq!(texts, ["one", "two", "two"]);
    }

    #[test]
    fn transport_errors_are_retried_a_bounded_number_of_times() {
        let calls = Arc::new(AtomicUsize::new(0));
        let seen = calls.clone();
        let flaky = Arc::new(FnBackend(move |_: &ChatRequest| {
            if seen.fetch_add(1, Ordering::SeqCst) < 2 {
                Err(GatewayError::Transport("reset".into()))
            } else {
                Ok("fine".into())
            }
        }));
        let retry = RetryPolicy {
            attempts: 3,
            base_delay: Duration::from_millis(1),
        };
        let g = Gateway::passthrough(flaky, "m").with_retry(retry);
        assert_eq!(
            g.complete(&ChatRequest::new(Purpose::Codegen, "s", "u"))
                .unwrap()
                .text,
            "fine"
        );
        assert_eq!(calls.load(Ordering::SeqCst), 3);

        let always = Arc::new(FnBackend(|_: &ChatRequest| {
            Err(GatewayError::Transport("down".into()))
        }));
        let g = Gateway::passthrough(always, "m").with_retry(retry);
        assert!(matches!(
            g.complete(&ChatRequest::new(Purpose::Codegen, "s", "u")),
            Err(GatewayError::Transport(_))
        ));
        let auth = Arc::new(FnBackend(|_: &ChatRequest| {
            Err(GatewayError::Auth("no".into()))
        }));
        let g = Gateway::passthrough(auth, "m").with_retry(retry);
        assert!(matches!(
            g.complete(&ChatRequest::new(Purpose::Codegen, "s", "u")),
            Err(GatewayError::Auth(_))
        ));
    }

    #[test]
    fn usage_is_attributed() {
        let g = Gateway::passthrough(echo(), "m");
        g.complete(&ChatRequest::new(Purpose::Relevance, "s", "hello").for_task("sp"))
            .unwrap();
        let usage = g.take_usage();
        assert_eq!(usage.len(), 1);
        assert_eq!(usage[0].task_id, "sp");
        assert_eq!(usage[0].purpose, Purpose::Relevance);
        assert_eq!(usage[0].model_id, "m");
        assert!(g.take_usage().is_empty());
    }
}
