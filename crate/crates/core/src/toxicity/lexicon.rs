use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{SequenceToxicity, ToxicityProfile, ToxicityScorer};
use crate::error::{Error, Result};
use crate::vocab::{tokenize, Vocabulary, BOS, EOS, UNK};

/// Toxicity assumed for words missing from the lexicon.
pub const DEFAULT_UNMAPPED_TOXICITY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Mean of per-token values, unmapped tokens at the default.
    #[default]
    Mean,
    /// Most toxic token.
    Max,
    /// Sum of mapped values over sequence length: unmapped tokens count as 0, so the score
    /// scales with lexicon coverage.
    CoverageWeighted,
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Aggregation::Mean),
            "max" => Ok(Aggregation::Max),
            "coverage" | "coverage-weighted" => Ok(Aggregation::CoverageWeighted),
            other => Err(Error::input(format!("unknown aggregation {other:?}"))),
        }
    }
}

/// Word → toxicity lookup.
#[derive(Debug)]
pub struct LexiconScorer {
    entries: BTreeMap<String, f64>,
    default_toxicity: f64,
    aggregation: Aggregation,
    cache: Mutex<HashMap<String, Arc<ToxicityProfile>>>,
}

/// Parses the `token<TAB>toxicity` lexicon format. Blank lines and `#` comments are skipped.
pub fn parse_lexicon(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = n + 1;
        let (tok, val) = line
            .split_once('\t')
            .ok_or_else(|| Error::input(format!("lexicon line {lineno}: expected token<TAB>toxicity")))?;
        let tok = tok.trim();
        if tok.is_empty() {
            return Err(Error::input(format!("lexicon line {lineno}: empty token")));
        }
        let v: f64 = val
            .trim()
            .parse()
            .map_err(|_| Error::input(format!("lexicon line {lineno}: bad number {:?}", val.trim())))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::input(format!(
                "lexicon line {lineno}: toxicity {v} outside [0, 1]"
            )));
        }
        out.insert(tok.to_lowercase(), v);
    }
    Ok(out)
}

impl LexiconScorer {
    pub fn new(entries: BTreeMap<String, f64>, default_toxicity: f64, aggregation: Aggregation) -> Result<Self> {
        if !(0.0..=1.0).contains(&default_toxicity) {
            return Err(Error::contract("default toxicity outside [0, 1]"));
        }
        if let Some((k, v)) = entries.iter().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::contract(format!("lexicon entry {k:?} = {v} outside [0, 1]")));
        }
        Ok(LexiconScorer {
            entries,
            default_toxicity,
            aggregation,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn from_file(path: &Path, default_toxicity: f64, aggregation: Aggregation) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::new(parse_lexicon(&text)?, default_toxicity, aggregation)
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }

    pub fn lookup(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    fn is_special(token: &str) -> bool {
        matches!(token, BOS | EOS | UNK)
    }
}

impl ToxicityScorer for LexiconScorer {
    fn score_tokens(&self, tokens: &[&str]) -> Result<SequenceToxicity> {
        let words = tokens.iter().filter(|t| !Self::is_special(t));
        let mut n = 0usize;
        let mut acc = 0.0f64;
        for w in words {
            let mapped = self.lookup(w);
            let v = match self.aggregation {
                Aggregation::CoverageWeighted => mapped.unwrap_or(0.0),
                _ => mapped.unwrap_or(self.default_toxicity),
            };
            acc = match self.aggregation {
                Aggregation::Max => acc.max(v),
                _ => acc + v,
            };
            n += 1;
        }
        if n == 0 {
            return Ok(SequenceToxicity::ZERO);
        }
        let value = match self.aggregation {
            Aggregation::Max => acc,
            _ => acc / n as f64,
        };
        Ok(SequenceToxicity::clamped(value))
    }

    fn score_text(&self, text: &str) -> Result<SequenceToxicity> {
        let words = tokenize(text);
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        self.score_tokens(&refs)
    }

    fn token_toxicity(&self, vocab: &Vocabulary) -> Result<Arc<ToxicityProfile>> {
        let key = vocab.fingerprint();
        let mut cache = self.cache.lock().expect("lexicon cache poisoned");
        if let Some(hit) = cache.get(&key) {
            return Ok(Arc::clone(hit));
        }
        let values = vocab
            .tokens()
            .iter()
            .enumerate()
            .map(|(id, t)| {
                if vocab.is_special(id) {
                    0.0
                } else {
                    self.lookup(t).unwrap_or(self.default_toxicity)
                }
            })
            .collect();
        let profile = Arc::new(ToxicityProfile::new(values)?);
        cache.insert(key, Arc::clone(&profile));
        Ok(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex(pairs: &[(&str, f64)], agg: Aggregation) -> LexiconScorer {
        let map = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        LexiconScorer::new(map, DEFAULT_UNMAPPED_TOXICITY, agg).unwrap()
    }

    #[test]
    fn empty_sequence_is_zero() {
        let s = lex(&[("idiot", 0.8)], Aggregation::Mean);
        assert_eq!(s.score_tokens(&[]).unwrap().value(), 0.0);
        assert_eq!(s.score_text("").unwrap().value(), 0.0);
        assert_eq!(s.score_tokens(&["<s>", "</s>"]).unwrap().value(), 0.0);
    }

    #[test]
    fn zero_lexicon_zero_score() {
        for agg in [Aggregation::Mean, Aggregation::Max, Aggregation::CoverageWeighted] {
            let s = LexiconScorer::new(
                [("a".to_string(), 0.0), ("b".to_string(), 0.0)].into_iter().collect(),
                0.0,
                agg,
            )
            .unwrap();
            assert_eq!(s.score_tokens(&["a", "b", "a"]).unwrap().value(), 0.0);
        }
    }

    #[test]
    fn aggregations() {
        let pairs = [("bad", 0.9), ("ok", 0.1)];
        let mean = lex(&pairs, Aggregation::Mean);
        assert!((mean.score_tokens(&["bad", "ok"]).unwrap().value() - 0.5).abs() < 1e-15);
        let max = lex(&pairs, Aggregation::Max);
        assert_eq!(max.score_tokens(&["bad", "ok", "zzz"]).unwrap().value(), 0.9);
        let cov = lex(&pairs, Aggregation::CoverageWeighted);
        assert!((cov.score_tokens(&["bad", "zzz"]).unwrap().value() - 0.45).abs() < 1e-15);
        // empty lexicon, mean: every word sits at the default
        let empty = lex(&[], Aggregation::Mean);
        assert!((empty.score_text("hello there friend").unwrap().value() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn token_vector_fills_default() {
        let vocab = Vocabulary::from_words(["hello", "idiot", "world"]);
        let s = lex(&[("idiot", 0.8)], Aggregation::Mean);
        let p = s.token_toxicity(&vocab).unwrap();
        assert_eq!(p.values(), &[0.0, 0.0, 0.0, 0.05, 0.8, 0.05]);
        let again = s.token_toxicity(&vocab).unwrap();
        assert!(Arc::ptr_eq(&p, &again));
        let empty = LexiconScorer::new(BTreeMap::new(), 0.0, Aggregation::Mean).unwrap();
        assert!(empty.token_toxicity(&vocab).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lexicon_file_format() {
        let text = "# comment\nidiot\t0.8\n\nNice\t0.0\r\nmoron\t1\n";
        let m = parse_lexicon(text).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m["nice"], 0.0);
        let err = parse_lexicon("a\t0.1\nb 0.2\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(parse_lexicon("a\t1.5\n").is_err());
        assert!(parse_lexicon("a\tx\n").is_err());
    }

    proptest! {
        #[test]
        fn scores_stay_in_unit_interval(words in prop::collection::vec("[a-e]{1,3}", 0..30),
                                        vals in prop::collection::vec(0.0f64..=1.0, 5)) {
            let keys = ["a", "b", "c", "d", "e"];
            let map: BTreeMap<String, f64> = keys.iter().zip(&vals).map(|(k, v)| (k.to_string(), *v)).collect();
            for agg in [Aggregation::Mean, Aggregation::Max, Aggregation::CoverageWeighted] {
                let s = LexiconScorer::new(map.clone(), 0.05, agg).unwrap();
                let refs: Vec<&str> = words.iter().map(String::as_str).collect();
                let v = s.score_tokens(&refs).unwrap().value();
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        #[test]
        fn mean_moves_toward_appended_token(prefix in prop::collection::vec(0usize..5, 1..10), next in 0usize..5,
                                            vals in prop::collection::vec(0.0f64..=1.0, 5)) {
            let keys = ["a", "b", "c", "d", "e"];
            let map: BTreeMap<String, f64> = keys.iter().zip(&vals).map(|(k, v)| (k.to_string(), *v)).collect();
            let s = LexiconScorer::new(map, 0.05, Aggregation::Mean).unwrap();
            let mut toks: Vec<&str> = prefix.iter().map(|&i| keys[i]).collect();
            let before = s.score_tokens(&toks).unwrap().value();
            toks.push(keys[next]);
            let after = s.score_tokens(&toks).unwrap().value();
            let v = vals[next];
            if v > before + 1e-12 { prop_assert!(after > before); }
            if v < before - 1e-12 { prop_assert!(after < before); }
        }
    }
}
