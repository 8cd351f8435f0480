//! Blocking JSON client for the model bridge.

use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Wire schema version carried in every request and response as `"v"`.
pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct BridgeClient {
    base: String,
    agent: ureq::Agent,
}

impl BridgeClient {
    pub fn new(base_url: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(60)))
            .build()
            .new_agent();
        BridgeClient {
            base: base_url.trim_end_matches('/').to_string(),
            agent,
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    fn endpoint(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    fn transport(&self, path: &str, detail: impl Into<String>) -> Error {
        Error::Transport {
            endpoint: self.endpoint(path),
            detail: detail.into(),
        }
    }

    pub fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T> {
        let resp = self
            .agent
            .get(&self.endpoint(path))
            .call()
            .map_err(|e| self.transport(path, e.to_string()))?;
        self.read(path, resp)
    }

    pub fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T> {
        let resp = self
            .agent
            .post(&self.endpoint(path))
            .send_json(body)
            .map_err(|e| self.transport(path, e.to_string()))?;
        self.read(path, resp)
    }

    fn read<T: DeserializeOwned>(&self, path: &str, mut resp: ureq::http::Response<ureq::Body>) -> Result<T> {
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| self.transport(path, e.to_string()))?;
        if !(200..300).contains(&status) {
            let snippet: String = text.chars().take(200).collect();
            return Err(self.transport(path, format!("HTTP {status}: {snippet}")));
        }
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| self.transport(path, format!("malformed JSON: {e}")))?;
        match value.get("v").and_then(|v| v.as_u64()) {
            Some(v) if v == PROTOCOL_VERSION as u64 => {}
            other => {
                return Err(Error::contract(format!(
                    "{}: expected protocol version {PROTOCOL_VERSION}, got {other:?}",
                    self.endpoint(path)
                )))
            }
        }
        serde_json::from_value(value)
            .map_err(|e| Error::contract(format!("{}: response schema: {e}", self.endpoint(path))))
    }
}
