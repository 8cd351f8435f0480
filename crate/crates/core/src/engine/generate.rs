use serde::{Deserialize, Serialize};

use super::{calibrate_scores, calibration_branch, compute_lambda, renormalize, Branch, CalibrationConfig, Sampler};
use crate::backend::LanguageModel;
use crate::error::{Error, Result};
use crate::toxicity::ToxicityScorer;
use crate::vocab::{TokenId, Vocabulary};

/// What happened at one decode step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub token: TokenId,
    /// `None` when objective 1 is off.
    pub lambda: Option<f64>,
    pub prefix_tox: Option<f64>,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation {
    /// Generated tokens, without the terminating `</s>`.
    pub tokens: Vec<TokenId>,
    pub trace: Vec<StepTrace>,
    /// True when the backend emitted `</s>` before the length limit.
    pub finished: bool,
}

/// The autoregressive loop: query scores, calibrate against the target, renormalize, select.
pub struct Decoder<'a> {
    backend: &'a dyn LanguageModel,
    scorer: &'a dyn ToxicityScorer,
    calibration: CalibrationConfig,
    max_len: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(
        backend: &'a dyn LanguageModel,
        scorer: &'a dyn ToxicityScorer,
        calibration: CalibrationConfig,
        max_len: usize,
    ) -> Result<Self> {
        calibration.validate()?;
        if max_len == 0 {
            return Err(Error::contract("max_len must be ≥ 1"));
        }
        Ok(Decoder {
            backend,
            scorer,
            calibration,
            max_len,
        })
    }

    pub fn calibration(&self) -> &CalibrationConfig {
        &self.calibration
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        self.backend.vocabulary()
    }

    /// Generates one interpretation of `source` steered toward `target_tox`.
    pub fn generate(&self, source: &[TokenId], target_tox: f64, sampler: &mut Sampler) -> Result<Interpretation> {
        if !(0.0..=1.0).contains(&target_tox) {
            return Err(Error::contract(format!("target toxicity {target_tox} outside [0, 1]")));
        }
        let vocab = self.backend.vocabulary();
        let controlled = self.calibration.objective1;
        let lambda = compute_lambda(&self.calibration, target_tox);

        let mut tokens: Vec<TokenId> = Vec::with_capacity(self.max_len);
        let mut trace = Vec::with_capacity(self.max_len);
        let mut prefix_tox = 0.0;
        let mut finished = false;
        let static_tox = if controlled && !self.scorer.prefix_dependent() {
            Some(self.scorer.token_toxicity(vocab)?)
        } else {
            None
        };

        for step in 0..self.max_len {
            let wrap = |e: Error| Error::Step {
                step,
                source: Box::new(e),
            };
            let scores = self.backend.next_scores_given(source, &tokens).map_err(wrap)?;
            if scores.len() != vocab.len() {
                return Err(wrap(Error::contract(format!(
                    "backend returned {} scores for a vocabulary of {}",
                    scores.len(),
                    vocab.len()
                ))));
            }

            let (calibrated, record) = if controlled {
                if step > 0 && step % self.calibration.rescore_every == 0 {
                    prefix_tox = self.prefix_toxicity(vocab, &tokens).map_err(wrap)?;
                }
                let tox = match &static_tox {
                    Some(t) => std::sync::Arc::clone(t),
                    None => self.scorer.step_token_toxicity(vocab, &tokens).map_err(wrap)?,
                };
                let tol = self.calibration.equality_tolerance;
                let out = calibrate_scores(&scores, &tox, prefix_tox, target_tox, lambda, tol).map_err(wrap)?;
                let branch = calibration_branch(prefix_tox, target_tox, tol);
                (out, (Some(lambda), Some(prefix_tox), branch))
            } else {
                (scores, (None, None, Branch::Hold))
            };

            let probs = renormalize(&calibrated).map_err(wrap)?;
            let token = sampler.select(&probs);
            trace.push(StepTrace {
                token,
                lambda: record.0,
                prefix_tox: record.1,
                branch: record.2,
            });
            if token == vocab.eos() {
                finished = true;
                break;
            }
            tokens.push(token);
        }

        Ok(Interpretation {
            tokens,
            trace,
            finished,
        })
    }

    fn prefix_toxicity(&self, vocab: &Vocabulary, tokens: &[TokenId]) -> Result<f64> {
        Ok(self.scorer.score_tokens(&vocab.words(tokens))?.value())
    }
}
