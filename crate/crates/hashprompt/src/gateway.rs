//! Provider-agnostic chat-completion client with record/replay.
//!
//! Every experiment trial is one fresh, single-turn conversation: the wire
//! payload carries exactly one user message, so no state leaks between
//! iterations. Three modes share that contract:
//!
//! - **Live**: POST to the provider and return the completion text.
//! - **Record**: live, plus every call is appended to a cassette file.
//! - **Replay**: answered entirely from a cassette — no network, no API
//!   keys — which is what makes experiment runs reproducible byte for byte.
//!
//! A cassette is an append-only JSON-lines file, one record per call with
//! fields `{key, prompt, response, status, timestamp}`. The key is the full
//! trial identity (experiment, variant, model, iteration, prompt digest),
//! not the prompt digest alone: the experiments intentionally repeat
//! identical prompts and need each sampled response preserved.
//!
//! Refusals (empty completion bodies) are first-class, scoreable outcomes.
//! They are never retried — retrying would bias the measured refusal rate.
//! Only transport failures are retried, three attempts with exponential
//! backoff. API keys are read from an environment variable named by the
//! provider config and are never stored in any file.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Errors raised by the completion client.
#[derive(Debug, Error)]
pub enum GatewayError {
    /// All retry attempts failed at the transport level.
    #[error("transport failure after {attempts} attempts: {message}")]
    TransportError { attempts: u32, message: String },
    /// Replay mode found no cassette entry for this trial.
    #[error("no cassette entry for prompt digest {0}")]
    CassetteMiss(String),
    /// The provider's API-key environment variable is unset.
    #[error("environment variable {0} is not set (expected an API key)")]
    MissingApiKey(String),
    /// A cassette line could not be decoded.
    #[error("malformed cassette line {line}: {message}")]
    MalformedCassette { line: usize, message: String },
    /// Provider configuration violates an invariant.
    #[error("invalid provider config: {0}")]
    InvalidProvider(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sampling parameters sent with a completion request. `None` fields are
/// omitted from the payload, leaving the provider's defaults in force.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SamplingParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// One provider endpoint plus the sampling preset and rate limit to use
/// with it. The API key is referenced by environment-variable name only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    #[serde(default)]
    pub sampling: SamplingParams,
    pub requests_per_minute: u32,
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), GatewayError> {
        if let Some(t) = self.sampling.temperature {
            if t < 0.0 {
                return Err(GatewayError::InvalidProvider(format!(
                    "temperature must be non-negative, got {t}"
                )));
            }
        }
        if self.sampling.max_tokens == Some(0) {
            return Err(GatewayError::InvalidProvider(
                "max_tokens must be at least 1".into(),
            ));
        }
        if self.requests_per_minute == 0 {
            return Err(GatewayError::InvalidProvider(
                "requests_per_minute must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Hex SHA-256 of a prompt text; the content part of a cassette key.
pub fn prompt_digest(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// Full identity of one trial: which experiment, which template variant,
/// which model, which repetition, and a digest of the exact prompt bytes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrialKey {
    pub experiment: String,
    pub variant: String,
    pub model: String,
    pub iteration: u32,
    pub digest: String,
}

impl TrialKey {
    pub fn new(
        experiment: impl Into<String>,
        variant: impl Into<String>,
        model: impl Into<String>,
        iteration: u32,
        prompt: &str,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            variant: variant.into(),
            model: model.into(),
            iteration,
            digest: prompt_digest(prompt),
        }
    }
}

impl fmt::Display for TrialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}#{}",
            self.experiment, self.variant, self.model, self.iteration
        )
    }
}

/// How a completed call ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialStatus {
    /// A non-empty completion came back.
    Ok,
    /// The provider answered with an empty completion; scoreable as
    /// "no answer", never retried.
    Refusal,
    /// The transport failed even after retries.
    TransportError,
}

/// One call and its outcome — the unit a cassette stores and the runner
/// scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub key: TrialKey,
    pub prompt: String,
    pub response: String,
    pub status: TrialStatus,
    pub timestamp: String,
}

/// An in-memory cassette: ordered records plus a key index. On disk this is
/// JSON-lines, one record per line, appended and never rewritten.
#[derive(Debug, Clone, Default)]
pub struct Cassette {
    records: Vec<TrialRecord>,
    index: BTreeMap<TrialKey, usize>,
}

impl Cassette {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, GatewayError> {
        let mut cassette = Cassette::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: TrialRecord =
                serde_json::from_str(line).map_err(|e| GatewayError::MalformedCassette {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            cassette.append(record);
        }
        Ok(cassette)
    }

    pub fn load(path: &Path) -> Result<Self, GatewayError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Appends a record; for a repeated key the later record wins lookups,
    /// matching append-only log semantics.
    pub fn append(&mut self, record: TrialRecord) {
        self.index.insert(record.key.clone(), self.records.len());
        self.records.push(record);
    }

    pub fn lookup(&self, key: &TrialKey) -> Option<&TrialRecord> {
        self.index.get(key).map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), GatewayError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, self.to_jsonl())?;
        Ok(())
    }
}

/// Time source abstraction so pacing and backoff can run against a virtual
/// clock in tests. `now` is monotonic time since an arbitrary origin.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
    fn sleep(&self, duration: Duration);
}

/// Wall-clock implementation used outside tests.
pub struct SystemClock {
    origin: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Spaces calls so that consecutive acquisitions sit at least one interval
/// apart: `n` requests per minute means a minimum gap of `60/n` seconds,
/// so 31 calls at 30 rpm cannot finish in under a minute.
pub struct RateLimiter {
    interval: Duration,
    last: Mutex<Option<Duration>>,
    clock: Arc<dyn Clock>,
}

impl RateLimiter {
    pub fn per_minute(requests_per_minute: u32, clock: Arc<dyn Clock>) -> Self {
        assert!(requests_per_minute >= 1, "rate limit must allow requests");
        Self {
            interval: Duration::from_secs_f64(60.0 / f64::from(requests_per_minute)),
            last: Mutex::new(None),
            clock,
        }
    }

    /// Blocks (via the clock) until the next call is allowed.
    pub fn acquire(&self) {
        let mut last = self.last.lock().expect("limiter lock");
        let now = self.clock.now();
        let ready = match *last {
            None => now,
            Some(previous) => previous + self.interval,
        };
        if ready > now {
            self.clock.sleep(ready - now);
        }
        *last = Some(self.clock.now().max(ready));
    }
}

/// Builds the request body: the model, exactly one user message, and any
/// sampling parameters the preset pins down.
pub fn chat_payload(provider: &ProviderConfig, prompt: &str) -> serde_json::Value {
    let mut payload = serde_json::json!({
        "model": provider.model,
        "messages": [{"role": "user", "content": prompt}],
    });
    let sampling = &provider.sampling;
    if let Some(temperature) = sampling.temperature {
        payload["temperature"] = temperature.into();
    }
    if let Some(top_p) = sampling.top_p {
        payload["top_p"] = top_p.into();
    }
    if let Some(max_tokens) = sampling.max_tokens {
        payload["max_tokens"] = max_tokens.into();
    }
    if let Some(seed) = sampling.seed {
        payload["seed"] = seed.into();
    }
    payload
}

/// Outcome of a completed (non-erroring) call. The timestamp is the
/// recorded one when replaying, so replayed runs are fully deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub response: String,
    pub status: TrialStatus,
    pub timestamp: String,
}

enum Mode {
    Live,
    Record { store: Mutex<RecordStore> },
    Replay { cassette: Cassette },
}

struct RecordStore {
    cassette: Cassette,
    file: std::fs::File,
}

const RETRY_ATTEMPTS: u32 = 3;
const BACKOFF_BASE: Duration = Duration::from_millis(500);

/// The completion client. See the module docs for the three modes.
pub struct Gateway {
    mode: Mode,
    clock: Arc<dyn Clock>,
    client: reqwest::blocking::Client,
    limiters: Mutex<BTreeMap<String, Arc<RateLimiter>>>,
}

impl Gateway {
    fn with_mode(mode: Mode) -> Self {
        Self {
            mode,
            clock: Arc::new(SystemClock::new()),
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("http client"),
            limiters: Mutex::new(BTreeMap::new()),
        }
    }

    /// Network calls only; nothing is persisted.
    pub fn live() -> Self {
        Self::with_mode(Mode::Live)
    }

    /// Network calls, appending every outcome to the cassette at `path`
    /// (created if missing, extended if present).
    pub fn record(path: &Path) -> Result<Self, GatewayError> {
        let cassette = if path.exists() {
            Cassette::load(path)?
        } else {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            Cassette::new()
        };
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        Ok(Self::with_mode(Mode::Record {
            store: Mutex::new(RecordStore { cassette, file }),
        }))
    }

    /// Cassette lookups only; touches neither the network nor API keys.
    pub fn replay(path: &Path) -> Result<Self, GatewayError> {
        Ok(Self::replay_cassette(Cassette::load(path)?))
    }

    /// Replay over an already-loaded cassette.
    pub fn replay_cassette(cassette: Cassette) -> Self {
        Self::with_mode(Mode::Replay { cassette })
    }

    /// Substitutes the time source used for pacing and backoff.
    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    fn limiter_for(&self, provider: &ProviderConfig) -> Arc<RateLimiter> {
        let key = format!("{}::{}", provider.endpoint, provider.model);
        let mut limiters = self.limiters.lock().expect("limiter map lock");
        limiters
            .entry(key)
            .or_insert_with(|| {
                Arc::new(RateLimiter::per_minute(
                    provider.requests_per_minute,
                    Arc::clone(&self.clock),
                ))
            })
            .clone()
    }

    fn send_once(
        &self,
        provider: &ProviderConfig,
        api_key: &str,
        prompt: &str,
    ) -> Result<String, String> {
        let response = self
            .client
            .post(&provider.endpoint)
            .bearer_auth(api_key)
            .json(&chat_payload(provider, prompt))
            .send()
            .map_err(|e| e.to_string())?;
        let status = response.status();
        if !status.is_success() {
            return Err(format!("http status {status}"));
        }
        let body: serde_json::Value = response.json().map_err(|e| e.to_string())?;
        body["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| "completion body missing choices[0].message.content".to_string())
    }

    fn call_with_retries(
        &self,
        provider: &ProviderConfig,
        api_key: &str,
        prompt: &str,
    ) -> Result<String, GatewayError> {
        let limiter = self.limiter_for(provider);
        let mut last_error = String::new();
        for attempt in 1..=RETRY_ATTEMPTS {
            limiter.acquire();
            match self.send_once(provider, api_key, prompt) {
                Ok(text) => return Ok(text),
                Err(message) => {
                    last_error = message;
                    if attempt < RETRY_ATTEMPTS {
                        self.clock.sleep(BACKOFF_BASE * 2u32.pow(attempt - 1));
                    }
                }
            }
        }
        Err(GatewayError::TransportError {
            attempts: RETRY_ATTEMPTS,
            message: last_error,
        })
    }

    /// Runs one fresh single-turn completion for `key`.
    ///
    /// In replay mode the response comes from the cassette (missing entry →
    /// [`GatewayError::CassetteMiss`] carrying the prompt digest). In live
    /// and record modes the provider is called with retries and pacing; an
    /// empty completion is a refusal outcome, not an error.
    pub fn complete(
        &self,
        provider: &ProviderConfig,
        key: &TrialKey,
        prompt: &str,
    ) -> Result<Completion, GatewayError> {
        provider.validate()?;
        match &self.mode {
            Mode::Replay { cassette } => {
                let record = cassette
                    .lookup(key)
                    .ok_or_else(|| GatewayError::CassetteMiss(key.digest.clone()))?;
                Ok(Completion {
                    response: record.response.clone(),
                    status: record.status,
                    timestamp: record.timestamp.clone(),
                })
            }
            Mode::Live => {
                let api_key = read_api_key(&provider.api_key_env)?;
                let text = self.call_with_retries(provider, &api_key, prompt)?;
                Ok(completion_from_text(text))
            }
            Mode::Record { store } => {
                let api_key = read_api_key(&provider.api_key_env)?;
                let text = self.call_with_retries(provider, &api_key, prompt)?;
                let completion = completion_from_text(text);
                let record = TrialRecord {
                    key: key.clone(),
                    prompt: prompt.to_string(),
                    response: completion.response.clone(),
                    status: completion.status,
                    timestamp: completion.timestamp.clone(),
                };
                let mut store = store.lock().expect("cassette store lock");
                let line = serde_json::to_string(&record).expect("record serializes");
                writeln!(store.file, "{line}")?;
                store.cassette.append(record);
                Ok(completion)
            }
        }
    }
}

fn read_api_key(var: &str) -> Result<String, GatewayError> {
    std::env::var(var).map_err(|_| GatewayError::MissingApiKey(var.to_string()))
}

fn completion_from_text(text: String) -> Completion {
    let status = if text.trim().is_empty() {
        TrialStatus::Refusal
    } else {
        TrialStatus::Ok
    };
    Completion {
        response: text,
        status,
        timestamp: chrono::Utc::now().to_rfc3339(),
    }
}
