//! Token-distribution providers.
//!
//! Every backend answers one question: given what has been generated so far (and, for
//! sentence-conditioned models, the input sentence), what are the log-probabilities of each
//! vocabulary token next?

mod mock;
mod ngram;
mod paraphrase;
mod remote;

pub use mock::MockBackend;
pub use ngram::{train_ngram, NGramModel, NGRAM_FORMAT, NGRAM_FORMAT_VERSION};
pub use paraphrase::ParaphraseBackend;
pub use remote::RemoteBackend;

use crate::engine::ScoreVector;
use crate::error::{Error, Result};
use crate::vocab::{TokenId, Vocabulary};

pub trait LanguageModel: Send + Sync {
    fn vocabulary(&self) -> &Vocabulary;

    /// `log p(· | prefix)` over the full vocabulary.
    fn next_scores(&self, prefix: &[TokenId]) -> Result<ScoreVector>;

    /// `log p(· | source, prefix)`. Unconditioned models ignore `source`.
    fn next_scores_given(&self, source: &[TokenId], prefix: &[TokenId]) -> Result<ScoreVector> {
        let _ = source;
        self.next_scores(prefix)
    }
}

pub(crate) fn check_tokens(vocab: &Vocabulary, tokens: &[TokenId]) -> Result<()> {
    if let Some(&bad) = tokens.iter().find(|&&t| t >= vocab.len()) {
        return Err(Error::contract(format!(
            "token id {bad} not in vocabulary of size {}",
            vocab.len()
        )));
    }
    Ok(())
}

/// Chain-rule log-probability of `tokens` under the backend's own (uncalibrated) scores.
pub fn sequence_log_prob(backend: &dyn LanguageModel, tokens: &[TokenId]) -> Result<f64> {
    sequence_log_prob_given(backend, &[], tokens)
}

pub fn sequence_log_prob_given(backend: &dyn LanguageModel, source: &[TokenId], tokens: &[TokenId]) -> Result<f64> {
    check_tokens(backend.vocabulary(), tokens)?;
    // Neumaier summation: long sequences of equal log-probs stay within an ulp of T·lp.
    let (mut total, mut comp) = (0.0f64, 0.0f64);
    for t in 0..tokens.len() {
        let x = backend.next_scores_given(source, &tokens[..t])?.values()[tokens[t]];
        let sum = total + x;
        comp += if total.abs() >= x.abs() {
            (total - sum) + x
        } else {
            (x - sum) + total
        };
        total = sum;
    }
    Ok(total + comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sequence_has_log_prob_zero() {
        let m = MockBackend::uniform(Vocabulary::from_words(["a", "b"]));
        assert_eq!(sequence_log_prob(&m, &[]).unwrap(), 0.0);
    }

    #[test]
    fn uniform_closed_form() {
        let vocab = Vocabulary::from_words(["a", "b", "c", "d", "e"]);
        let v = vocab.len() as f64;
        let m = MockBackend::uniform(vocab);
        let seq = [3, 4, 5, 3, 7, 6, 3];
        let lp = sequence_log_prob(&m, &seq).unwrap();
        assert!((lp - seq.len() as f64 * (1.0 / v).ln()).abs() < 1e-12);
    }

    #[test]
    fn chain_rule_consistency() {
        let corpus = ["the cat sat", "the dog sat down", "a cat ran"];
        let m = train_ngram(corpus.iter().copied(), 2, 0.1).unwrap();
        let seq = m.vocabulary().encode("the cat sat down");
        let lp = sequence_log_prob(&m, &seq).unwrap();
        let mut prod = 1.0;
        for t in 0..seq.len() {
            prod *= m.next_scores(&seq[..t]).unwrap().values()[seq[t]].exp();
        }
        assert!((lp.exp() - prod).abs() < 1e-15);
    }

    #[test]
    fn unknown_token_is_contract_error() {
        let m = MockBackend::uniform(Vocabulary::from_words(["a"]));
        assert!(matches!(sequence_log_prob(&m, &[99]), Err(Error::Contract(_))));
    }
}
