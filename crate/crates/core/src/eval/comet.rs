use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::http::{BridgeClient, PROTOCOL_VERSION};

#[derive(Serialize)]
struct CometRequest<'a> {
    v: u32,
    source: &'a str,
    candidate: &'a str,
    reference: &'a str,
}

#[derive(Deserialize)]
struct CometResponse {
    score: f64,
}

/// Pass-through client for the bridge's semantic-similarity endpoint.
#[derive(Debug, Clone)]
pub struct CometClient {
    client: BridgeClient,
}

impl CometClient {
    pub fn new(base_url: &str) -> Self {
        CometClient {
            client: BridgeClient::new(base_url),
        }
    }

    pub fn score(&self, source: &str, candidate: &str, reference: &str) -> Result<f64> {
        let resp: CometResponse = self.client.post(
            "/comet",
            &CometRequest {
                v: PROTOCOL_VERSION,
                source,
                candidate,
                reference,
            },
        )?;
        if !resp.score.is_finite() {
            return Err(Error::contract("/comet returned a non-finite score"));
        }
        Ok(resp.score)
    }
}
