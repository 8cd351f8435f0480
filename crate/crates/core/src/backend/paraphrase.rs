use std::sync::Arc;

use super::{check_tokens, LanguageModel};
use crate::engine::{logsumexp, ScoreVector};
use crate::error::{Error, Result};
use crate::vocab::{TokenId, Vocabulary};

/// Sentence-conditioned interpretation model built from an unconditioned base LM.
///
/// It is a two-component mixture over whole sequences. The *restate* component walks the
/// source sentence position by position, emitting the source token with probability
/// `fidelity` and otherwise falling back to the base LM (a substitution). The *reinterpret*
/// component is the base LM alone. The next-token distribution marginalizes over the two
/// components using their posterior given the prefix, so every step is a proper conditional
/// distribution.
#[derive(Clone)]
pub struct ParaphraseBackend {
    base: Arc<dyn LanguageModel>,
    restate_prior: f64,
    fidelity: f64,
}

impl std::fmt::Debug for ParaphraseBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParaphraseBackend")
            .field("restate_prior", &self.restate_prior)
            .field("fidelity", &self.fidelity)
            .finish_non_exhaustive()
    }
}

impl ParaphraseBackend {
    pub fn new(base: Arc<dyn LanguageModel>, restate_prior: f64, fidelity: f64) -> Result<Self> {
        if !(restate_prior > 0.0 && restate_prior < 1.0) {
            return Err(Error::contract("restate prior must be in (0, 1)"));
        }
        if !(fidelity > 0.0 && fidelity < 1.0) {
            return Err(Error::contract("fidelity must be in (0, 1)"));
        }
        Ok(ParaphraseBackend {
            base,
            restate_prior,
            fidelity,
        })
    }

    fn source_token(&self, source: &[TokenId], position: usize) -> TokenId {
        source
            .get(position)
            .copied()
            .unwrap_or_else(|| self.base.vocabulary().eos())
    }
}

impl LanguageModel for ParaphraseBackend {
    fn vocabulary(&self) -> &Vocabulary {
        self.base.vocabulary()
    }

    fn next_scores(&self, prefix: &[TokenId]) -> Result<ScoreVector> {
        self.next_scores_given(&[], prefix)
    }

    fn next_scores_given(&self, source: &[TokenId], prefix: &[TokenId]) -> Result<ScoreVector> {
        let vocab = self.base.vocabulary();
        check_tokens(vocab, source)?;
        check_tokens(vocab, prefix)?;

        let keep = self.fidelity.ln();
        let drift = (1.0 - self.fidelity).ln();
        let mut log_restate = self.restate_prior.ln();
        let mut log_free = (1.0 - self.restate_prior).ln();
        for t in 0..prefix.len() {
            let lm = self.base.next_scores(&prefix[..t])?.values()[prefix[t]];
            log_free += lm;
            let copy = if prefix[t] == self.source_token(source, t) {
                logsumexp(&[keep, drift + lm])
            } else {
                drift + lm
            };
            log_restate += copy;
        }
        let norm = logsumexp(&[log_restate, log_free]);
        let (w_restate, w_free) = (log_restate - norm, log_free - norm);

        let lm_next = self.base.next_scores(prefix)?;
        let target = self.source_token(source, prefix.len());
        let values = lm_next
            .values()
            .iter()
            .enumerate()
            .map(|(tok, &lm)| {
                let copy = if tok == target {
                    logsumexp(&[keep, drift + lm])
                } else {
                    drift + lm
                };
                logsumexp(&[w_restate + copy, w_free + lm])
            })
            .collect();
        ScoreVector::new(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{sequence_log_prob_given, train_ngram};

    fn backend() -> ParaphraseBackend {
        let base = train_ngram(["the cat sat", "a dog ran", "the dog sat"], 2, 0.1).unwrap();
        ParaphraseBackend::new(Arc::new(base), 0.5, 0.9).unwrap()
    }

    #[test]
    fn normalized_at_every_step() {
        let b = backend();
        let v = b.vocabulary();
        let src = v.encode("a cat sat");
        for prefix in [vec![], v.encode("a"), v.encode("a dog"), v.encode("the cat sat ran")] {
            let s = b.next_scores_given(&src, &prefix).unwrap();
            assert!(s.logsumexp().abs() < 1e-9);
        }
    }

    #[test]
    fn restating_the_source_is_likely() {
        let b = backend();
        let v = b.vocabulary();
        let src = v.encode("a cat sat");
        let copy = sequence_log_prob_given(&b, &src, &src).unwrap();
        let alt = sequence_log_prob_given(&b, &src, &v.encode("the dog ran")).unwrap();
        assert!(copy > alt);
        // after restating the whole source, </s> dominates
        let s = b.next_scores_given(&src, &src).unwrap();
        let eos = s.values()[v.eos()];
        assert!(s.values().iter().all(|&x| x <= eos));
    }

    #[test]
    fn parameter_ranges() {
        let base: Arc<dyn LanguageModel> = Arc::new(train_ngram(["a"], 2, 0.1).unwrap());
        assert!(ParaphraseBackend::new(base.clone(), 0.0, 0.5).is_err());
        assert!(ParaphraseBackend::new(base, 0.5, 1.0).is_err());
    }
}
