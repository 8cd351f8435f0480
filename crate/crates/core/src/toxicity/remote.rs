use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{SequenceToxicity, ToxicityProfile, ToxicityScorer};
use crate::error::{Error, Result};
use crate::http::{BridgeClient, PROTOCOL_VERSION};
use crate::vocab::{TokenId, Vocabulary};

/// How a sequence classifier is turned into a per-token vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenStrategy {
    /// Classify every vocabulary token on its own, once per vocabulary.
    #[default]
    Isolated,
    /// Classify `prefix + token` for every token at every step. V requests per step.
    PrefixExtension,
}

#[derive(Serialize)]
struct ToxicityRequest<'a> {
    v: u32,
    text: &'a str,
}

#[derive(Deserialize)]
struct ToxicityResponse {
    toxicity: f64,
}

/// Client for the bridge's `/toxicity` endpoint.
#[derive(Debug)]
pub struct RemoteScorer {
    client: BridgeClient,
    strategy: TokenStrategy,
    cache: Mutex<HashMap<String, Arc<ToxicityProfile>>>,
}

impl RemoteScorer {
    pub fn new(base_url: &str, strategy: TokenStrategy) -> Self {
        RemoteScorer {
            client: BridgeClient::new(base_url),
            strategy,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Classifies detokenized `text`. Blank text is 0 without a request.
    pub fn classify(&self, text: &str) -> Result<SequenceToxicity> {
        if text.trim().is_empty() {
            return Ok(SequenceToxicity::ZERO);
        }
        let resp: ToxicityResponse = self.client.post(
            "/toxicity",
            &ToxicityRequest {
                v: PROTOCOL_VERSION,
                text,
            },
        )?;
        if !(0.0..=1.0).contains(&resp.toxicity) {
            return Err(Error::contract(format!(
                "{}/toxicity returned {} (outside [0, 1])",
                self.client.base_url(),
                resp.toxicity
            )));
        }
        Ok(SequenceToxicity(resp.toxicity))
    }

    fn vector(&self, vocab: &Vocabulary, prefix_text: &str) -> Result<ToxicityProfile> {
        let mut values = Vec::with_capacity(vocab.len());
        for (id, tok) in vocab.tokens().iter().enumerate() {
            if vocab.is_special(id) {
                values.push(0.0);
                continue;
            }
            let text = if prefix_text.is_empty() {
                tok.clone()
            } else {
                format!("{prefix_text} {tok}")
            };
            values.push(self.classify(&text)?.value());
        }
        ToxicityProfile::new(values)
    }
}

impl ToxicityScorer for RemoteScorer {
    fn score_tokens(&self, tokens: &[&str]) -> Result<SequenceToxicity> {
        let text: Vec<&str> = tokens
            .iter()
            .copied()
            .filter(|t| !matches!(*t, crate::vocab::BOS | crate::vocab::EOS | crate::vocab::UNK))
            .collect();
        self.classify(&text.join(" "))
    }

    fn score_text(&self, text: &str) -> Result<SequenceToxicity> {
        self.classify(text)
    }

    fn token_toxicity(&self, vocab: &Vocabulary) -> Result<Arc<ToxicityProfile>> {
        let key = vocab.fingerprint();
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let profile = Arc::new(self.vector(vocab, "")?);
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(key, Arc::clone(&profile));
        Ok(profile)
    }

    fn prefix_dependent(&self) -> bool {
        self.strategy == TokenStrategy::PrefixExtension
    }

    fn step_token_toxicity(&self, vocab: &Vocabulary, prefix: &[TokenId]) -> Result<Arc<ToxicityProfile>> {
        match self.strategy {
            TokenStrategy::Isolated => self.token_toxicity(vocab),
            TokenStrategy::PrefixExtension => Ok(Arc::new(self.vector(vocab, &vocab.decode(prefix))?)),
        }
    }
}
