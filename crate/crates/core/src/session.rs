//! Generation of a whole interpretation set for one sentence, alternating the target
//! toxicity between interpretations.

use serde::{Deserialize, Serialize};

use crate::backend::LanguageModel;
use crate::engine::{compute_lambda, CalibrationConfig, Decoder, Sampler, SamplerConfig, StepTrace};
use crate::error::{Error, Result};
use crate::toxicity::{SequenceToxicity, ToxicityScorer};
use crate::vocab::TokenId;

/// Next target after an interpretation scored `previous_tox`: `clamp(2·current − previous)`.
///
/// A previous interpretation below the target pushes the next target up by the same gap,
/// and vice versa.
pub fn update_target(current_target: f64, previous_tox: f64) -> f64 {
    (2.0 * current_target - previous_tox).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedInterpretation {
    pub text: String,
    pub toxicity: f64,
    /// Target toxicity this interpretation was decoded against.
    pub target_used: f64,
    /// λ applied at every step of this interpretation; absent without objective 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip)]
    pub tokens: Vec<TokenId>,
    #[serde(skip)]
    pub trace: Vec<StepTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpretationSet {
    pub sentence: String,
    pub interpretations: Vec<GeneratedInterpretation>,
}

impl InterpretationSet {
    pub fn toxicities(&self) -> Vec<f64> {
        self.interpretations.iter().map(|i| i.toxicity).collect()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.interpretations.iter().map(|i| i.target_used).collect()
    }
}

/// Mutable state while generating the interpretations of one sentence.
#[derive(Debug, Clone)]
pub struct DecodeSession {
    sentence: String,
    base_target: SequenceToxicity,
    current_target: SequenceToxicity,
    previous_tox: Option<SequenceToxicity>,
    calibration: CalibrationConfig,
    sampler: SamplerConfig,
    set_size: usize,
}

impl DecodeSession {
    /// `sentence_tox` is `tox(s)`, normally the scorer's measurement of `sentence`.
    pub fn new(
        sentence: impl Into<String>,
        sentence_tox: f64,
        calibration: CalibrationConfig,
        sampler: SamplerConfig,
        set_size: usize,
    ) -> Result<Self> {
        calibration.validate()?;
        sampler.validate()?;
        if set_size == 0 {
            return Err(Error::contract("interpretation set size must be ≥ 1"));
        }
        let tox = SequenceToxicity::new(sentence_tox)?;
        Ok(DecodeSession {
            sentence: sentence.into(),
            base_target: tox,
            current_target: tox,
            previous_tox: None,
            calibration,
            sampler,
            set_size,
        })
    }

    /// Measures `tox(s)` with `scorer` and opens a session on it.
    pub fn measured(
        sentence: impl Into<String>,
        scorer: &dyn ToxicityScorer,
        calibration: CalibrationConfig,
        sampler: SamplerConfig,
        set_size: usize,
    ) -> Result<Self> {
        let sentence = sentence.into();
        let tox = crate::toxicity::score_sentence(scorer, &sentence)?;
        Self::new(sentence, tox.value(), calibration, sampler, set_size)
    }

    /// Replaces `tox(s)` with an arbitrary value, e.g. a low one to moderate a toxic sentence.
    pub fn override_target(&mut self, value: f64) -> Result<()> {
        let tox = SequenceToxicity::new(value)
            .map_err(|_| Error::contract(format!("override toxicity {value} outside [0, 1]")))?;
        self.base_target = tox;
        self.current_target = tox;
        Ok(())
    }

    pub fn sentence(&self) -> &str {
        &self.sentence
    }

    pub fn base_target(&self) -> f64 {
        self.base_target.value()
    }

    pub fn current_target(&self) -> f64 {
        self.current_target.value()
    }

    pub fn previous_tox(&self) -> Option<f64> {
        self.previous_tox.map(SequenceToxicity::value)
    }

    pub fn calibration(&self) -> &CalibrationConfig {
        &self.calibration
    }

    pub fn set_size(&self) -> usize {
        self.set_size
    }

    /// λ the next interpretation would be decoded with.
    pub fn lambda(&self) -> f64 {
        compute_lambda(&self.calibration, self.current_target())
    }

    /// Generates the full set. Objective 3 updates the target before every interpretation
    /// after the first, and λ is computed from the updated target.
    pub fn generate_set(
        &mut self,
        backend: &dyn LanguageModel,
        scorer: &dyn ToxicityScorer,
        max_len: usize,
    ) -> Result<InterpretationSet> {
        let decoder = Decoder::new(backend, scorer, self.calibration.clone(), max_len)?;
        let vocab = backend.vocabulary();
        let source = vocab.encode(&self.sentence);
        let mut sampler = Sampler::new(&self.sampler)?;
        let mut interpretations = Vec::with_capacity(self.set_size);

        for index in 0..self.set_size {
            let wrap = |e: Error| Error::Interpretation {
                index,
                source: Box::new(e),
            };
            if self.calibration.objective3 {
                if let Some(prev) = self.previous_tox {
                    let next = update_target(self.current_target.value(), prev.value());
                    self.current_target = SequenceToxicity::clamped(next);
                }
            }
            let target = self.current_target.value();
            let out = decoder.generate(&source, target, &mut sampler).map_err(wrap)?;
            let toxicity = scorer.score_tokens(&vocab.words(&out.tokens)).map_err(wrap)?;
            self.previous_tox = Some(toxicity);
            interpretations.push(GeneratedInterpretation {
                text: vocab.decode(&out.tokens),
                toxicity: toxicity.value(),
                target_used: target,
                lambda: self
                    .calibration
                    .objective1
                    .then(|| compute_lambda(&self.calibration, target)),
                tokens: out.tokens,
                trace: out.trace,
            });
        }

        Ok(InterpretationSet {
            sentence: self.sentence.clone(),
            interpretations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::train_ngram;
    use crate::toxicity::{Aggregation, LexiconScorer};
    use proptest::prelude::*;

    fn stack() -> (crate::backend::NGramModel, LexiconScorer) {
        let corpus = [
            "you are a stupid idiot",
            "what a nice day",
            "that idiot ruined a nice day",
            "you are nice",
            "stupid rain today",
        ];
        let lm = train_ngram(corpus, 2, 0.1).unwrap();
        let lex = [("stupid", 0.8), ("idiot", 0.9), ("ruined", 0.4)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        (lm, LexiconScorer::new(lex, 0.05, Aggregation::Mean).unwrap())
    }

    #[test]
    fn update_target_examples() {
        assert!((update_target(0.47, 0.53) - 0.41).abs() < 1e-12);
        assert_eq!(update_target(0.5, 0.5), 0.5);
        assert_eq!(update_target(0.9, 0.1), 1.0);
        assert_eq!(update_target(0.1, 0.9), 0.0);
    }

    #[test]
    fn single_interpretation_uses_base_target() {
        let (lm, lex) = stack();
        let mut s = DecodeSession::new(
            "x",
            0.3,
            CalibrationConfig::default(),
            SamplerConfig::nucleus(0.9, 1),
            1,
        )
        .unwrap();
        let set = s.generate_set(&lm, &lex, 10).unwrap();
        assert_eq!(set.targets(), vec![0.3]);
    }

    #[test]
    fn recurrence_chains_on_updated_target() {
        let (lm, lex) = stack();
        let mut s = DecodeSession::new(
            "x",
            0.4,
            CalibrationConfig::default(),
            SamplerConfig::nucleus(0.9, 9),
            5,
        )
        .unwrap();
        let set = s.generate_set(&lm, &lex, 12).unwrap();
        let t = set.targets();
        let y = set.toxicities();
        assert_eq!(t[0], 0.4);
        for k in 0..4 {
            assert!((t[k + 1] - (2.0 * t[k] - y[k]).clamp(0.0, 1.0)).abs() < 1e-12);
        }
        for (i, interp) in set.interpretations.iter().enumerate() {
            let expect = 1.0 / (t[i].max(1e-3) * 100.0);
            assert_eq!(interp.lambda, Some(expect));
            assert!(interp.trace.iter().all(|st| st.lambda == Some(expect)));
        }
    }

    #[test]
    fn objective3_off_keeps_target_constant() {
        let (lm, lex) = stack();
        let cfg = CalibrationConfig::with_objectives(true, true, false);
        let mut s = DecodeSession::new("x", 0.25, cfg, SamplerConfig::nucleus(0.9, 2), 4).unwrap();
        let set = s.generate_set(&lm, &lex, 10).unwrap();
        assert!(set.targets().iter().all(|&t| t == 0.25));
    }

    #[test]
    fn override_replaces_target() {
        let (lm, lex) = stack();
        let mut s = DecodeSession::new(
            "you stupid idiot",
            0.47,
            CalibrationConfig::default(),
            SamplerConfig::default(),
            3,
        )
        .unwrap();
        s.override_target(0.2).unwrap();
        assert_eq!(s.sentence(), "you stupid idiot");
        assert_eq!((s.base_target(), s.current_target()), (0.2, 0.2));
        let set = s.generate_set(&lm, &lex, 10).unwrap();
        assert_eq!(set.targets()[0], 0.2);

        s.override_target(0.0).unwrap();
        assert!((s.lambda() - 10.0).abs() < 1e-12);
        assert!(matches!(s.override_target(1.5), Err(Error::Contract(_))));
    }

    #[test]
    fn override_with_measured_value_is_identity() {
        let (lm, lex) = stack();
        let sentence = "that idiot ruined a nice day";
        let mut a = DecodeSession::measured(
            sentence,
            &lex,
            CalibrationConfig::default(),
            SamplerConfig::nucleus(0.9, 4),
            3,
        )
        .unwrap();
        let mut b = a.clone();
        b.override_target(a.base_target()).unwrap();
        assert_eq!(
            a.generate_set(&lm, &lex, 10).unwrap(),
            b.generate_set(&lm, &lex, 10).unwrap()
        );
    }

    #[test]
    fn sessions_are_reproducible() {
        let (lm, lex) = stack();
        let run = || {
            let mut s = DecodeSession::new(
                "x",
                0.6,
                CalibrationConfig::default(),
                SamplerConfig::nucleus(0.9, 77),
                4,
            )
            .unwrap();
            s.generate_set(&lm, &lex, 15).unwrap()
        };
        assert_eq!(run(), run());
    }

    proptest! {
        #[test]
        fn alternation_direction_and_clamp(cur in 0.0f64..=1.0, prev in 0.0f64..=1.0) {
            let next = update_target(cur, prev);
            prop_assert!((0.0..=1.0).contains(&next));
            let raw = 2.0 * cur - prev;
            if prev != cur && (0.0..=1.0).contains(&raw) {
                prop_assert_eq!((next - cur).signum(), (cur - prev).signum());
            }
        }
    }
}
