use serde::{Deserialize, Serialize};

use super::{check_tokens, LanguageModel};
use crate::engine::{logsumexp, ScoreVector};
use crate::error::{Error, Result};
use crate::http::{BridgeClient, PROTOCOL_VERSION};
use crate::vocab::{TokenId, Vocabulary};

#[derive(Serialize)]
struct VocabRequest {
    v: u32,
    text: String,
    include_vocab: bool,
}

#[derive(Deserialize)]
struct Specials {
    bos: TokenId,
    eos: TokenId,
    unk: TokenId,
}

#[derive(Deserialize)]
struct VocabResponse {
    vocab: Vec<String>,
    specials: Specials,
    vocab_hash: String,
}

#[derive(Serialize)]
struct LogitsRequest<'a> {
    v: u32,
    prefix_tokens: &'a [TokenId],
    #[serde(skip_serializing_if = "Option::is_none")]
    source_text: Option<String>,
}

#[derive(Deserialize)]
struct LogitsResponse {
    log_probs: Vec<f64>,
    vocab_hash: String,
}

/// Client for the bridge's `/logits` endpoint.
#[derive(Debug)]
pub struct RemoteBackend {
    client: BridgeClient,
    vocab: Vocabulary,
    vocab_hash: String,
}

impl RemoteBackend {
    /// Fetches the model vocabulary through `/tokenize` and checks its hash.
    pub fn connect(base_url: &str) -> Result<Self> {
        let client = BridgeClient::new(base_url);
        let resp: VocabResponse = client.post(
            "/tokenize",
            &VocabRequest {
                v: PROTOCOL_VERSION,
                text: String::new(),
                include_vocab: true,
            },
        )?;
        let vocab = Vocabulary::with_specials(resp.vocab, resp.specials.bos, resp.specials.eos, resp.specials.unk)?;
        Self::with_vocabulary(client, vocab, resp.vocab_hash)
    }

    /// Uses an engine-side vocabulary; the bridge must report the same hash on every call.
    pub fn with_expected_vocabulary(base_url: &str, vocab: Vocabulary) -> Result<Self> {
        let hash = vocab.fingerprint();
        Self::with_vocabulary(BridgeClient::new(base_url), vocab, hash)
    }

    fn with_vocabulary(client: BridgeClient, vocab: Vocabulary, claimed_hash: String) -> Result<Self> {
        let local = vocab.fingerprint();
        if local != claimed_hash {
            return Err(Error::contract(format!(
                "vocab_hash mismatch: bridge reports {claimed_hash}, engine computes {local}"
            )));
        }
        Ok(RemoteBackend {
            client,
            vocab,
            vocab_hash: local,
        })
    }

    pub fn vocab_hash(&self) -> &str {
        &self.vocab_hash
    }

    fn request(&self, source: Option<String>, prefix: &[TokenId]) -> Result<ScoreVector> {
        check_tokens(&self.vocab, prefix)?;
        let resp: LogitsResponse = self.client.post(
            "/logits",
            &LogitsRequest {
                v: PROTOCOL_VERSION,
                prefix_tokens: prefix,
                source_text: source,
            },
        )?;
        let url = self.client.base_url();
        if resp.vocab_hash != self.vocab_hash {
            return Err(Error::contract(format!(
                "{url}/logits vocab_hash {} does not match engine vocabulary {}",
                resp.vocab_hash, self.vocab_hash
            )));
        }
        if resp.log_probs.len() != self.vocab.len() {
            return Err(Error::contract(format!(
                "{url}/logits returned {} log-probs for a vocabulary of {}",
                resp.log_probs.len(),
                self.vocab.len()
            )));
        }
        let scores = ScoreVector::new(resp.log_probs)?;
        let lse = logsumexp(scores.values());
        if lse.abs() > 1e-6 {
            return Err(Error::contract(format!(
                "{url}/logits not normalized (logsumexp {lse})"
            )));
        }
        Ok(scores)
    }
}

impl LanguageModel for RemoteBackend {
    fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn next_scores(&self, prefix: &[TokenId]) -> Result<ScoreVector> {
        self.request(None, prefix)
    }

    fn next_scores_given(&self, source: &[TokenId], prefix: &[TokenId]) -> Result<ScoreVector> {
        check_tokens(&self.vocab, source)?;
        let text = (!source.is_empty()).then(|| self.vocab.decode(source));
        self.request(text, prefix)
    }
}
