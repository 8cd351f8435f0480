//! Run configuration: one TOML document whose keys mirror the command-line flags.
//!
//! ```toml
//! backend = "ngram:models/bigram.json"   # mock | ngram:PATH | paraphrase:PATH | remote:URL
//! scorer = "lexicon:data/lexicon.tsv"    # lexicon | lexicon:PATH | remote:URL
//! objectives = [1, 2, 3]
//! # fixed_lambda = 0.5                   # constant λ; excludes objective 2
//! nucleus_p = 0.9
//! greedy = false
//! seed = 0
//! k = 4
//! max_len = 30
//! # override_tox = 0.2
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backend::{LanguageModel, MockBackend, NGramModel, ParaphraseBackend, RemoteBackend};
use crate::engine::{CalibrationConfig, SamplerConfig, SelectionMode};
use crate::error::{Error, Result};
use crate::toxicity::{Aggregation, LexiconScorer, RemoteScorer, TokenStrategy, ToxicityScorer};
use crate::vocab::{hex, Vocabulary};

/// Where next-token scores come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendSpec {
    /// Uniform over a vocabulary assembled from the run's own inputs.
    Mock,
    Ngram(PathBuf),
    /// Sentence-conditioned mixture over an n-gram artifact.
    Paraphrase(PathBuf),
    Remote(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScorerSpec {
    /// `None` is the empty lexicon: every word gets the unmapped default.
    Lexicon(Option<PathBuf>),
    Remote(String),
}

fn split_spec(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((kind, rest)) => (kind, Some(rest)),
        None => (s, None),
    }
}

impl FromStr for BackendSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::config(
                "backend",
                format!("{s:?} is not mock, ngram:PATH, paraphrase:PATH or remote:URL"),
            )
        };
        match split_spec(s) {
            ("mock", None) => Ok(BackendSpec::Mock),
            ("ngram", Some(p)) if !p.is_empty() => Ok(BackendSpec::Ngram(p.into())),
            ("paraphrase", Some(p)) if !p.is_empty() => Ok(BackendSpec::Paraphrase(p.into())),
            ("remote", Some(u)) if !u.is_empty() => Ok(BackendSpec::Remote(u.into())),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendSpec::Mock => f.write_str("mock"),
            BackendSpec::Ngram(p) => write!(f, "ngram:{}", p.display()),
            BackendSpec::Paraphrase(p) => write!(f, "paraphrase:{}", p.display()),
            BackendSpec::Remote(u) => write!(f, "remote:{u}"),
        }
    }
}

impl FromStr for ScorerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match split_spec(s) {
            ("lexicon", None) => Ok(ScorerSpec::Lexicon(None)),
            ("lexicon", Some(p)) if !p.is_empty() => Ok(ScorerSpec::Lexicon(Some(p.into()))),
            ("remote", Some(u)) if !u.is_empty() => Ok(ScorerSpec::Remote(u.into())),
            _ => Err(Error::config(
                "scorer",
                format!("{s:?} is not lexicon, lexicon:PATH or remote:URL"),
            )),
        }
    }
}

impl fmt::Display for ScorerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScorerSpec::Lexicon(None) => f.write_str("lexicon"),
            ScorerSpec::Lexicon(Some(p)) => write!(f, "lexicon:{}", p.display()),
            ScorerSpec::Remote(u) => write!(f, "remote:{u}"),
        }
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(BackendSpec);
string_serde!(ScorerSpec);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub backend: BackendSpec,
    pub scorer: ScorerSpec,
    /// Enabled objectives, any subset of 1, 2, 3.
    pub objectives: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_lambda: Option<f64>,
    pub nucleus_p: f64,
    pub greedy: bool,
    pub seed: u64,
    pub k: usize,
    pub max_len: usize,
    /// Replaces the measured `tox(s)` of every sentence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub override_tox: Option<f64>,
    /// Recompute the prefix toxicity every this many steps.
    pub rescore_every: usize,
    pub unmapped_toxicity: f64,
    pub aggregation: Aggregation,
    pub token_strategy: TokenStrategy,
    pub restate_prior: f64,
    pub fidelity: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: BackendSpec::Mock,
            scorer: ScorerSpec::Lexicon(None),
            objectives: vec![1, 2, 3],
            fixed_lambda: None,
            nucleus_p: 0.9,
            greedy: false,
            seed: 0,
            k: 4,
            max_len: 30,
            override_tox: None,
            rescore_every: 1,
            unmapped_toxicity: crate::toxicity::DEFAULT_UNMAPPED_TOXICITY,
            aggregation: Aggregation::Mean,
            token_strategy: TokenStrategy::Isolated,
            restate_prior: 0.5,
            fidelity: 0.9,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::config(origin, e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn has_objective(&self, n: u8) -> bool {
        self.objectives.contains(&n)
    }

    /// Checks every field, naming the offending one.
    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.objectives.iter().find(|o| !(1..=3).contains(*o)) {
            return Err(Error::config(
                "objectives",
                format!("unknown objective {bad}; expected 1, 2 or 3"),
            ));
        }
        if self.has_objective(2) && !self.has_objective(1) {
            return Err(Error::config(
                "objectives",
                "objective 2 sets λ for objective 1's calibration; enable objective 1 too (objectives = [1, 2])",
            ));
        }
        if let Some(l) = self.fixed_lambda {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::config("fixed_lambda", format!("{l} must be a positive number")));
            }
            if self.has_objective(2) {
                return Err(Error::config(
                    "fixed_lambda",
                    "a fixed λ replaces objective 2's schedule; drop 2 from objectives or unset fixed_lambda",
                ));
            }
        }
        if !(self.nucleus_p > 0.0 && self.nucleus_p <= 1.0) {
            return Err(Error::config(
                "nucleus_p",
                format!("{} must be in (0, 1]", self.nucleus_p),
            ));
        }
        if self.k == 0 {
            return Err(Error::config("k", "interpretation set size must be ≥ 1"));
        }
        if self.max_len == 0 {
            return Err(Error::config("max_len", "must be ≥ 1"));
        }
        if let Some(t) = self.override_tox {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::config("override_tox", format!("{t} must be in [0, 1]")));
            }
        }
        if self.rescore_every == 0 {
            return Err(Error::config("rescore_every", "must be ≥ 1"));
        }
        if !(0.0..=1.0).contains(&self.unmapped_toxicity) {
            return Err(Error::config(
                "unmapped_toxicity",
                format!("{} must be in [0, 1]", self.unmapped_toxicity),
            ));
        }
        for (name, v) in [("restate_prior", self.restate_prior), ("fidelity", self.fidelity)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::config(name, format!("{v} must be in (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn calibration(&self) -> CalibrationConfig {
        let mut c =
            CalibrationConfig::with_objectives(self.has_objective(1), self.has_objective(2), self.has_objective(3));
        c.fixed_lambda = self.fixed_lambda;
        c.rescore_every = self.rescore_every;
        c
    }

    pub fn sampler(&self, seed: u64) -> SamplerConfig {
        let mode = if self.greedy {
            SelectionMode::Greedy
        } else {
            SelectionMode::Nucleus { p: self.nucleus_p }
        };
        SamplerConfig { mode, rng_seed: seed }
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }

    /// Seed for one sentence, derived from the run seed and the sentence id so that results do
    /// not depend on the order sentences are processed in.
    pub fn sentence_seed(&self, id: &str) -> u64 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(id.as_bytes());
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }

    pub fn build_scorer(&self) -> Result<Arc<dyn ToxicityScorer>> {
        Ok(match &self.scorer {
            ScorerSpec::Lexicon(None) => Arc::new(LexiconScorer::new(
                Default::default(),
                self.unmapped_toxicity,
                self.aggregation,
            )?),
            ScorerSpec::Lexicon(Some(path)) => Arc::new(LexiconScorer::from_file(
                path,
                self.unmapped_toxicity,
                self.aggregation,
            )?),
            ScorerSpec::Remote(url) => Arc::new(RemoteScorer::new(url, self.token_strategy)),
        })
    }

    /// `mock_texts` supplies the vocabulary of the mock backend; other backends ignore it.
    pub fn build_backend<'a, I>(&self, mock_texts: I) -> Result<Arc<dyn LanguageModel>>
    where
        I: IntoIterator<Item = &'a str>,
    {
        Ok(match &self.backend {
            BackendSpec::Mock => Arc::new(MockBackend::uniform(Vocabulary::from_texts(mock_texts))),
            BackendSpec::Ngram(path) => Arc::new(NGramModel::load(path)?),
            BackendSpec::Paraphrase(path) => {
                let base: Arc<dyn LanguageModel> = Arc::new(NGramModel::load(path)?);
                Arc::new(ParaphraseBackend::new(base, self.restate_prior, self.fidelity)?)
            }
            BackendSpec::Remote(url) => Arc::new(RemoteBackend::connect(url)?),
        })
    }

    /// Words the mock backend should know beyond the run's own texts: the lexicon's entries.
    pub fn lexicon_words(&self) -> Result<Vec<String>> {
        match &self.scorer {
            ScorerSpec::Lexicon(Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                Ok(crate::toxicity::parse_lexicon(&text)?.into_keys().collect())
            }
            _ => Ok(Vec::new()),
        }
    }
}
