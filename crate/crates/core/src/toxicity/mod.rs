//! `tox(·)` for tokens, prefixes and finished texts.
//!
//! Two scorers ship: a word lexicon (desk scale, fully deterministic) and an HTTP client for a
//! classifier served by the model bridge.

mod lexicon;
mod remote;

pub use lexicon::{parse_lexicon, Aggregation, LexiconScorer, DEFAULT_UNMAPPED_TOXICITY};
pub use remote::{RemoteScorer, TokenStrategy};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::{tokenize, TokenId, Vocabulary};

/// A toxicity value in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SequenceToxicity(f64);

impl SequenceToxicity {
    pub const ZERO: SequenceToxicity = SequenceToxicity(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::contract(format!("toxicity {value} outside [0, 1]")));
        }
        Ok(SequenceToxicity(value))
    }

    /// Clamps into [0, 1]; NaN maps to 0.
    pub fn clamped(value: f64) -> Self {
        if value.is_nan() {
            SequenceToxicity(0.0)
        } else {
            SequenceToxicity(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Per-vocabulary token toxicity `tox(y_t)`, aligned with the vocabulary indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ToxicityProfile(Vec<f64>);

impl ToxicityProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::contract(format!(
                "token toxicity at index {i} is {} (outside [0, 1])",
                values[i]
            )));
        }
        Ok(ToxicityProfile(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Source of toxicity judgements. Implementations are immutable after construction and
/// shared across sessions.
pub trait ToxicityScorer: Send + Sync {
    /// Toxicity of a token sequence. The empty sequence scores 0.
    fn score_tokens(&self, tokens: &[&str]) -> Result<SequenceToxicity>;

    /// Toxicity of raw text, tokenized with the engine tokenizer.
    fn score_text(&self, text: &str) -> Result<SequenceToxicity> {
        let words = tokenize(text);
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        self.score_tokens(&refs)
    }

    /// Prefix-independent token toxicity vector.
    fn token_toxicity(&self, vocab: &Vocabulary) -> Result<Arc<ToxicityProfile>>;

    /// Whether the token vector depends on the already generated prefix.
    fn prefix_dependent(&self) -> bool {
        false
    }

    /// Token vector for the next step given the prefix. Defaults to [`Self::token_toxicity`].
    fn step_token_toxicity(&self, vocab: &Vocabulary, _prefix: &[TokenId]) -> Result<Arc<ToxicityProfile>> {
        self.token_toxicity(vocab)
    }
}

/// Scores a sentence; blank text is 0 without consulting the scorer.
pub fn score_sentence(scorer: &dyn ToxicityScorer, text: &str) -> Result<SequenceToxicity> {
    if tokenize(text).is_empty() {
        return Ok(SequenceToxicity::ZERO);
    }
    scorer.score_text(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toxicity_range_checked() {
        assert!(SequenceToxicity::new(1.2).is_err());
        assert!(SequenceToxicity::new(-0.1).is_err());
        assert_eq!(SequenceToxicity::clamped(1.7).value(), 1.0);
        assert_eq!(SequenceToxicity::clamped(-0.3).value(), 0.0);
        assert!(ToxicityProfile::new(vec![0.0, 1.01]).is_err());
    }
}
