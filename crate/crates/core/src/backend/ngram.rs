use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_tokens, LanguageModel};
use crate::engine::ScoreVector;
use crate::error::{Error, Result};
use crate::vocab::{TokenId, Vocabulary};

pub const NGRAM_FORMAT: &str = "toxctl-ngram";
pub const NGRAM_FORMAT_VERSION: u32 = 1;

/// Add-α smoothed n-gram model over a word vocabulary.
///
/// Each sentence is padded with `order - 1` begin tokens and one end token. Every vocabulary
/// token, specials included, receives smoothed mass, so all log-scores are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    alpha: f64,
    vocab: Vocabulary,
    counts: HashMap<Vec<TokenId>, HashMap<TokenId, u64>>,
    totals: HashMap<Vec<TokenId>, u64>,
}

#[derive(Serialize, Deserialize)]
struct Artifact {
    format: String,
    version: u32,
    order: usize,
    alpha: f64,
    vocabulary: Vocabulary,
    /// Sorted by context for byte-stable output.
    counts: Vec<ContextCounts>,
}

#[derive(Serialize, Deserialize)]
struct ContextCounts {
    context: Vec<TokenId>,
    next: Vec<(TokenId, u64)>,
}

/// Trains on whitespace/punctuation-tokenized lines. The vocabulary is the sorted set of corpus
/// words, so line order does not affect the model.
pub fn train_ngram<'a, I>(corpus: I, order: usize, alpha: f64) -> Result<NGramModel>
where
    I: IntoIterator<Item = &'a str>,
{
    let lines: Vec<&str> = corpus.into_iter().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(Error::input("training corpus is empty"));
    }
    let vocab = Vocabulary::from_texts(lines.iter().copied());
    NGramModel::train_with_vocabulary(lines, vocab, order, alpha)
}

impl NGramModel {
    /// Trains with a caller-chosen vocabulary; corpus words outside it map to `<unk>`.
    pub fn train_with_vocabulary<'a, I>(corpus: I, vocab: Vocabulary, order: usize, alpha: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        if order == 0 {
            return Err(Error::input("n-gram order must be ≥ 1"));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::input(format!("smoothing α must be > 0, got {alpha}")));
        }
        let mut model = NGramModel {
            order,
            alpha,
            vocab,
            counts: HashMap::new(),
            totals: HashMap::new(),
        };
        let mut seen = 0usize;
        for line in corpus {
            let ids = model.vocab.encode(line);
            if ids.is_empty() {
                continue;
            }
            seen += 1;
            let mut padded = vec![model.vocab.bos(); order - 1];
            padded.extend(ids);
            padded.push(model.vocab.eos());
            for w in padded.windows(order) {
                let (ctx, next) = w.split_at(order - 1);
                *model
                    .counts
                    .entry(ctx.to_vec())
                    .or_default()
                    .entry(next[0])
                    .or_default() += 1;
                *model.totals.entry(ctx.to_vec()).or_default() += 1;
            }
        }
        if seen == 0 {
            return Err(Error::input("training corpus is empty"));
        }
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn count(&self, context: &[TokenId], next: TokenId) -> u64 {
        self.counts
            .get(context)
            .and_then(|m| m.get(&next))
            .copied()
            .unwrap_or(0)
    }

    pub fn context_total(&self, context: &[TokenId]) -> u64 {
        self.totals.get(context).copied().unwrap_or(0)
    }

    /// `(count + α) / (total + α·V)`.
    pub fn probability(&self, context: &[TokenId], next: TokenId) -> f64 {
        let v = self.vocab.len() as f64;
        (self.count(context, next) as f64 + self.alpha) / (self.context_total(context) as f64 + self.alpha * v)
    }

    /// Unsmoothed relative frequency `count / total`; `None` for unseen contexts.
    pub fn mle_probability(&self, context: &[TokenId], next: TokenId) -> Option<f64> {
        let total = self.context_total(context);
        (total > 0).then(|| self.count(context, next) as f64 / total as f64)
    }

    /// The `order - 1` tokens that condition the next prediction.
    pub fn context_of(&self, prefix: &[TokenId]) -> Vec<TokenId> {
        let n = self.order - 1;
        let mut ctx = vec![self.vocab.bos(); n.saturating_sub(prefix.len())];
        ctx.extend_from_slice(&prefix[prefix.len().saturating_sub(n)..]);
        ctx
    }

    pub fn to_json(&self) -> Result<String> {
        let mut counts: Vec<ContextCounts> = self
            .counts
            .iter()
            .map(|(ctx, next)| {
                let mut next: Vec<(TokenId, u64)> = next.iter().map(|(k, v)| (*k, *v)).collect();
                next.sort_unstable();
                ContextCounts {
                    context: ctx.clone(),
                    next,
                }
            })
            .collect();
        counts.sort_by(|a, b| a.context.cmp(&b.context));
        let artifact = Artifact {
            format: NGRAM_FORMAT.into(),
            version: NGRAM_FORMAT_VERSION,
            order: self.order,
            alpha: self.alpha,
            vocabulary: self.vocab.clone(),
            counts,
        };
        Ok(serde_json::to_string(&artifact)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a: Artifact = serde_json::from_str(text)?;
        if a.format != NGRAM_FORMAT {
            return Err(Error::input(format!("not an n-gram artifact (format {:?})", a.format)));
        }
        if a.version != NGRAM_FORMAT_VERSION {
            return Err(Error::input(format!(
                "unsupported n-gram artifact version {}",
                a.version
            )));
        }
        if a.order == 0 || !(a.alpha.is_finite() && a.alpha > 0.0) {
            return Err(Error::input("n-gram artifact has invalid order or α"));
        }
        let mut counts = HashMap::new();
        let mut totals = HashMap::new();
        for cc in a.counts {
            if cc.context.len() != a.order - 1 {
                return Err(Error::input("n-gram artifact context length does not match order"));
            }
            check_tokens(&a.vocabulary, &cc.context)?;
            let next: HashMap<TokenId, u64> = cc.next.into_iter().collect();
            check_tokens(&a.vocabulary, &next.keys().copied().collect::<Vec<_>>())?;
            totals.insert(cc.context.clone(), next.values().sum());
            counts.insert(cc.context, next);
        }
        Ok(NGramModel {
            order: a.order,
            alpha: a.alpha,
            vocab: a.vocabulary,
            counts,
            totals,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Distinct continuation counts per context, mostly for inspection.
    pub fn continuations(&self, context: &[TokenId]) -> BTreeMap<TokenId, u64> {
        self.counts
            .get(context)
            .map(|m| m.iter().map(|(k, v)| (*k, *v)).collect())
            .unwrap_or_default()
    }
}

impl LanguageModel for NGramModel {
    fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn next_scores(&self, prefix: &[TokenId]) -> Result<ScoreVector> {
        check_tokens(&self.vocab, prefix)?;
        let ctx = self.context_of(prefix);
        let v = self.vocab.len();
        let denom = (self.context_total(&ctx) as f64 + self.alpha * v as f64).ln();
        let row = self.counts.get(&ctx);
        let values = (0..v)
            .map(|t| {
                let c = row.and_then(|m| m.get(&t)).copied().unwrap_or(0) as f64;
                (c + self.alpha).ln() - denom
            })
            .collect();
        ScoreVector::new(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::sequence_log_prob;
    use proptest::prelude::*;

    #[test]
    fn bigram_hand_count() {
        let m = train_ngram(["a b a b a b"], 2, 0.1).unwrap();
        let v = m.vocabulary();
        assert_eq!(v.len(), 5);
        let (a, b) = (v.id("a").unwrap(), v.id("b").unwrap());
        assert_eq!(m.count(&[a], b), 3);
        assert_eq!(m.context_total(&[a]), 3);
        assert_eq!(m.count(&[b], a), 2);
        assert_eq!(m.count(&[b], v.eos()), 1);
        // (3 + 0.1) / (3 + 0.1·5)
        let p = m.next_scores(&[a]).unwrap().values()[b].exp();
        assert!((p - 0.885_714_285_714_285_8).abs() < 1e-12, "{p}");
    }

    #[test]
    fn unseen_context_is_uniform_and_normalized() {
        let m = train_ngram(["x y z"], 3, 0.1).unwrap();
        let z = m.vocabulary().id("z").unwrap();
        let s = m.next_scores(&[z, z]).unwrap();
        let sum: f64 = s.values().iter().map(|x| x.exp()).sum();
        assert!((sum - 1.0).abs() < 1e-9);
        let first = s.values()[0];
        assert!(s.values().iter().all(|&x| (x - first).abs() < 1e-15));
    }

    #[test]
    fn unigram_proportional_to_smoothed_frequency() {
        let m = train_ngram(["a a b"], 1, 0.5).unwrap();
        let v = m.vocabulary();
        let s = m.next_scores(&[]).unwrap();
        let (a, b) = (v.id("a").unwrap(), v.id("b").unwrap());
        // counts a:2 b:1 </s>:1, total 4, V = 5
        assert!((s.values()[a].exp() - 2.5 / 6.5).abs() < 1e-12);
        assert!((s.values()[b].exp() - 1.5 / 6.5).abs() < 1e-12);
    }

    #[test]
    fn duplicated_corpus_keeps_relative_frequencies() {
        let lines = ["the cat sat", "the dog ran", "a cat ran"];
        let once = train_ngram(lines, 2, 0.1).unwrap();
        let twice = train_ngram(lines.iter().chain(lines.iter()).copied(), 2, 0.1).unwrap();
        assert_eq!(once.vocabulary(), twice.vocabulary());
        let v = once.vocabulary().len();
        for ctx in 0..v {
            for next in 0..v {
                assert_eq!(once.mle_probability(&[ctx], next), twice.mle_probability(&[ctx], next));
            }
            let a = once.next_scores(&[ctx]).unwrap();
            let b = twice.next_scores(&[ctx]).unwrap();
            let rank = |s: &ScoreVector| {
                let mut idx: Vec<usize> = (0..v).collect();
                idx.sort_by(|&i, &j| s.values()[j].total_cmp(&s.values()[i]).then(i.cmp(&j)));
                idx
            };
            assert_eq!(rank(&a), rank(&b));
        }
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(matches!(train_ngram(Vec::<&str>::new(), 2, 0.1), Err(Error::Input(_))));
        assert!(matches!(train_ngram(["  ", ""], 2, 0.1), Err(Error::Input(_))));
        assert!(train_ngram(["a"], 0, 0.1).is_err());
    }

    #[test]
    fn held_out_perplexity_beats_uniform() {
        let train = [
            "the cat sat on the mat",
            "the dog sat on the rug",
            "a cat lay on the mat",
            "the dog lay on a rug",
        ];
        let m = train_ngram(train, 2, 0.1).unwrap();
        let held = m.vocabulary().encode("the cat lay on the rug");
        let lp = sequence_log_prob(&m, &held).unwrap();
        let ppl = (-lp / held.len() as f64).exp();
        assert!(ppl < m.vocabulary().len() as f64, "ppl {ppl}");
    }

    #[test]
    fn artifact_round_trip_is_lossless() {
        let m = train_ngram(["the cat sat", "the dog ran fast", "a cat ran"], 3, 0.37).unwrap();
        let json = m.to_json().unwrap();
        let back = NGramModel::from_json(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json().unwrap(), json);
        let bad = json.replace(NGRAM_FORMAT, "other");
        assert!(NGramModel::from_json(&bad).is_err());
    }

    proptest! {
        #[test]
        fn every_conditional_normalizes(lines in prop::collection::vec("[abc]( [abc]){0,5}", 1..6),
                                         order in 1usize..4, prefix in prop::collection::vec(0usize..6, 0..5)) {
            let m = train_ngram(lines.iter().map(String::as_str), order, 0.1).unwrap();
            let v = m.vocabulary().len();
            let prefix: Vec<usize> = prefix.into_iter().map(|t| t % v).collect();
            let s = m.next_scores(&prefix).unwrap();
            prop_assert!(s.logsumexp().abs() < 1e-9);
        }

        #[test]
        fn training_ignores_line_order(mut lines in prop::collection::vec("[abcd]( [abcd]){0,4}", 1..6)) {
            let a = train_ngram(lines.iter().map(String::as_str), 2, 0.1).unwrap();
            lines.reverse();
            let b = train_ngram(lines.iter().map(String::as_str), 2, 0.1).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
