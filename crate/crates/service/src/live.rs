//! OpenAI-style chat-completions adapter.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use parking_lot::Mutex;
use serde_json::{json, Value};
use upsell_core::prompt::{BackendError, LlmBackend};

use crate::config::BackendConfig;

/// Default environment variable holding the API key.
pub const API_KEY_ENV: &str = "UPSELL_LLM_API_KEY";

pub struct LiveBackend {
    key_env: String,
    endpoint: String,
    model: String,
    api_key: Option<String>,
    timeout: Duration,
    max_in_flight: usize,
    per_minute: u32,
    in_flight: AtomicUsize,
    recent: Mutex<VecDeque<Instant>>,
    client: OnceLock<reqwest::blocking::Client>,
}

impl LiveBackend {
    /// Reads the credential from the environment. A missing key is not an
    /// error here; every request then reports the backend as unavailable.
    pub fn from_config(config: &BackendConfig) -> Self {
        let key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        Self::with_key(config, key)
    }

    pub fn with_key(config: &BackendConfig, api_key: Option<String>) -> Self {
        Self {
            key_env: config.api_key_env.clone(),
            endpoint: config.endpoint.clone(),
            model: config.model.clone(),
            api_key,
            timeout: Duration::from_secs(config.timeout_seconds.max(1)),
            max_in_flight: config.max_in_flight.max(1),
            per_minute: config.per_minute.max(1),
            in_flight: AtomicUsize::new(0),
            recent: Mutex::new(VecDeque::new()),
            client: OnceLock::new(),
        }
    }

    fn admit(&self) -> Result<InFlight<'_>, BackendError> {
        if self.in_flight.fetch_add(1, Ordering::SeqCst) >= self.max_in_flight {
            self.in_flight.fetch_sub(1, Ordering::SeqCst);
            return Err(BackendError::RateLimited);
        }
        let slot = InFlight(&self.in_flight);
        let now = Instant::now();
        let mut recent = self.recent.lock();
        while recent
            .front()
            .is_some_and(|t| now.duration_since(*t) >= Duration::from_secs(60))
        {
            recent.pop_front();
        }
        if recent.len() >= self.per_minute as usize {
            return Err(BackendError::RateLimited);
        }
        recent.push_back(now);
        Ok(slot)
    }
}

struct InFlight<'a>(&'a AtomicUsize);

impl Drop for InFlight<'_> {
    fn drop(&mut self) {
        self.0.fetch_sub(1, Ordering::SeqCst);
    }
}

impl LlmBackend for LiveBackend {
    fn name(&self) -> &str {
        "live"
    }

    fn is_deterministic(&self) -> bool {
        false
    }

    fn generate(
        &self,
        prompt: &str,
        temperature: f64,
        seed: Option<u64>,
    ) -> Result<String, BackendError> {
        let key = self
            .api_key
            .as_deref()
            .ok_or_else(|| BackendError::Unavailable(format!("{} is not set", self.key_env)))?;
        let _slot = self.admit()?;
        let client = match self.client.get() {
            Some(client) => client,
            None => {
                let built = reqwest::blocking::Client::builder()
                    .timeout(self.timeout)
                    .build()
                    .map_err(|e| BackendError::Unavailable(e.to_string()))?;
                self.client.get_or_init(|| built)
            }
        };
        let mut body = json!({
            "model": self.model,
            "messages": [{ "role": "user", "content": prompt }],
            "temperature": temperature,
            "n": 1,
        });
        if let Some(seed) = seed {
            body["seed"] = json!(seed);
        }
        let response = client
            .post(&self.endpoint)
            .bearer_auth(key)
            .json(&body)
            .send()
            .map_err(|e| BackendError::Unavailable(e.to_string()))?;
        let status = response.status();
        if status.as_u16() == 429 {
            return Err(BackendError::RateLimited);
        }
        if !status.is_success() {
            return Err(BackendError::Upstream(format!("HTTP {status}")));
        }
        let value: Value = response
            .json()
            .map_err(|e| BackendError::Upstream(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| BackendError::Upstream("completion has no message content".into()))
    }
}

impl Drop for LiveBackend {
    fn drop(&mut self) {
        // The blocking client owns a runtime that must not be dropped on an
        // async worker thread.
        if let Some(client) = self.client.take() {
            std::thread::spawn(move || drop(client));
        }
    }
}
