//! Blocking JSON-over-HTTP client shared by the remote providers.

use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Base URL, e.g. `http://127.0.0.1:8000`. Endpoint paths are appended.
    pub endpoint: String,
    pub timeout: Duration,
    /// Total attempts for a request that fails at the transport level.
    pub attempts: u32,
    /// Delay before the second attempt; doubles after each failure.
    pub backoff: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            timeout: Duration::from_secs(60),
            attempts: 3,
            backoff: Duration::from_millis(100),
        }
    }

    pub(crate) fn url(&self, path: &str) -> String {
        format!("{}/{}", self.endpoint.trim_end_matches('/'), path.trim_start_matches('/'))
    }
}

#[derive(Debug)]
pub(crate) struct JsonClient {
    config: RemoteConfig,
    client: reqwest::blocking::Client,
}

impl JsonClient {
    pub(crate) fn new(config: RemoteConfig) -> Result<Self> {
        if config.endpoint.trim().is_empty() {
            return Err(Error::Config("remote endpoint is empty".into()));
        }
        if config.attempts == 0 {
            return Err(Error::Config("remote attempts must be at least 1".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| Error::Config(format!("http client: {e}")))?;
        Ok(JsonClient { config, client })
    }

    /// POSTs `body` and decodes the JSON reply, retrying transport failures
    /// and 5xx statuses with exponential backoff.
    pub(crate) fn post<B: Serialize, R: DeserializeOwned>(&self, path: &str, body: &B) -> Result<R> {
        let url = self.config.url(path);
        let mut delay = self.config.backoff;
        let mut last = None;
        for attempt in 0..self.config.attempts {
            if attempt > 0 {
                std::thread::sleep(delay);
                delay *= 2;
            }
            match self.post_once(&url, body) {
                Ok(r) => return Ok(r),
                Err(e) if e.is_retryable() => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::Transport(format!("{url}: no attempt made"))))
    }

    fn post_once<B: Serialize, R: DeserializeOwned>(&self, url: &str, body: &B) -> Result<R> {
        let resp = self
            .client
            .post(url)
            .json(body)
            .send()
            .map_err(|e| Error::Transport(format!("{url}: {e}")))?;
        let status = resp.status();
        let text = resp
            .text()
            .map_err(|e| Error::Transport(format!("{url}: reading body: {e}")))?;
        if status.is_server_error() {
            return Err(Error::Transport(format!("{url}: HTTP {status}: {text}")));
        }
        if !status.is_success() {
            return Err(Error::protocol(None, format!("{url}: HTTP {status}: {text}")));
        }
        serde_json::from_str(&text).map_err(|e| Error::protocol(None, format!("{url}: bad JSON: {e}")))
    }
}
