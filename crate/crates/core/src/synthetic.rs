//! Deterministic desk-scale fixtures: a word-level toxicity lexicon, a training corpus with a
//! controllable share of toxic sentences, and input sentences of a requested toxicity.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backend::{LanguageModel, NGramModel, ParaphraseBackend};
use crate::toxicity::{Aggregation, LexiconScorer, DEFAULT_UNMAPPED_TOXICITY};
use crate::vocab::Vocabulary;

pub const TOXIC_ADJECTIVES: [&str; 20] = [
    "stupid",
    "dumb",
    "idiotic",
    "pathetic",
    "worthless",
    "disgusting",
    "moronic",
    "brainless",
    "useless",
    "hateful",
    "vile",
    "filthy",
    "ignorant",
    "clueless",
    "lousy",
    "nasty",
    "rotten",
    "spineless",
    "gutless",
    "repulsive",
];
pub const TOXIC_NOUNS: [&str; 20] = [
    "idiot", "moron", "fool", "loser", "jerk", "clown", "creep", "scum", "trash", "garbage", "imbecile", "dimwit",
    "halfwit", "dope", "buffoon", "weasel", "parasite", "pig", "rat", "slob",
];
pub const TOXIC_VERBS: [&str; 15] = [
    "hate",
    "despise",
    "destroy",
    "ruin",
    "loathe",
    "mock",
    "insult",
    "humiliate",
    "sabotage",
    "wreck",
    "curse",
    "sneer",
    "bully",
    "belittle",
    "smash",
];

pub const FUNCTION_WORDS: [&str; 12] = [
    "the", "a", "an", "this", "that", "some", "every", "our", "their", "and", "with", "about",
];
pub const NEUTRAL_ADJECTIVES: [&str; 45] = [
    "quiet",
    "green",
    "early",
    "local",
    "small",
    "large",
    "bright",
    "calm",
    "warm",
    "cold",
    "new",
    "old",
    "simple",
    "careful",
    "quick",
    "slow",
    "open",
    "busy",
    "gentle",
    "honest",
    "clever",
    "polite",
    "steady",
    "fresh",
    "modern",
    "rural",
    "urban",
    "young",
    "senior",
    "public",
    "private",
    "formal",
    "casual",
    "practical",
    "useful",
    "curious",
    "patient",
    "friendly",
    "familiar",
    "distant",
    "recent",
    "annual",
    "daily",
    "popular",
    "complex",
];
pub const NEUTRAL_NOUNS: [&str; 60] = [
    "garden", "river", "teacher", "report", "market", "city", "council", "budget", "school", "student", "library",
    "project", "meeting", "policy", "village", "neighbor", "family", "weekend", "morning", "train", "station",
    "museum", "recipe", "kitchen", "forest", "mountain", "office", "manager", "engineer", "doctor", "nurse", "patient",
    "article", "journal", "festival", "concert", "team", "coach", "player", "season", "harvest", "farmer", "bridge",
    "road", "window", "letter", "parcel", "phone", "computer", "software", "voter", "election", "debate", "plan",
    "idea", "question", "answer", "story", "movie", "song",
];
pub const NEUTRAL_VERBS: [&str; 40] = [
    "visit",
    "build",
    "discuss",
    "improve",
    "support",
    "review",
    "plan",
    "share",
    "enjoy",
    "explain",
    "organize",
    "repair",
    "describe",
    "prefer",
    "study",
    "watch",
    "follow",
    "consider",
    "answer",
    "welcome",
    "measure",
    "publish",
    "paint",
    "carry",
    "deliver",
    "collect",
    "prepare",
    "design",
    "protect",
    "invite",
    "notice",
    "remember",
    "suggest",
    "teach",
    "visit",
    "praise",
    "thank",
    "cook",
    "plant",
    "celebrate",
];

fn toxic_value(i: usize) -> f64 {
    0.8 + 0.2 * ((i * 37) % 100) as f64 / 100.0
}

fn neutral_value(i: usize) -> f64 {
    0.01 * ((i * 13) % 10) as f64
}

pub fn toxic_words() -> Vec<&'static str> {
    let mut v: Vec<&str> = TOXIC_ADJECTIVES
        .iter()
        .chain(&TOXIC_NOUNS)
        .chain(&TOXIC_VERBS)
        .copied()
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn neutral_words() -> Vec<&'static str> {
    let mut v: Vec<&str> = FUNCTION_WORDS
        .iter()
        .chain(&NEUTRAL_ADJECTIVES)
        .chain(&NEUTRAL_NOUNS)
        .chain(&NEUTRAL_VERBS)
        .copied()
        .collect();
    v.sort_unstable();
    v.dedup();
    v.retain(|w| !toxic_words().contains(w));
    v
}

/// Toxic words in [0.8, 1.0), neutral words in [0.0, 0.1).
pub fn lexicon() -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for (i, w) in toxic_words().into_iter().enumerate() {
        out.insert(w.to_string(), toxic_value(i));
    }
    for (i, w) in neutral_words().into_iter().enumerate() {
        out.insert(w.to_string(), neutral_value(i));
    }
    out
}

pub fn lexicon_scorer() -> LexiconScorer {
    LexiconScorer::new(lexicon(), DEFAULT_UNMAPPED_TOXICITY, Aggregation::Mean).expect("lexicon values in range")
}

/// Lexicon in the `token<TAB>toxicity` file format.
pub fn lexicon_tsv() -> String {
    let mut s = String::from("# synthetic toxicity lexicon\n");
    for (w, v) in lexicon() {
        s.push_str(&format!("{w}\t{v}\n"));
    }
    s
}

/// Specials followed by every lexicon word, sorted.
pub fn vocabulary() -> Vocabulary {
    Vocabulary::from_texts(lexicon().keys())
}

/// Knobs for [`corpus`].
#[derive(Debug, Clone, Copy)]
pub struct CorpusSpec {
    pub sentences: usize,
    /// Share of sentences written in a hostile register.
    pub hostile_share: f64,
    /// Probability that a content slot takes a toxic word in a hostile sentence.
    pub hostile_slot_rate: f64,
    /// Same, in a calm sentence.
    pub calm_slot_rate: f64,
    /// Probability of a determiner before a noun phrase in a hostile sentence (always present
    /// in calm ones).
    pub hostile_determiner_rate: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            sentences: 200,
            hostile_share: 0.3,
            hostile_slot_rate: 0.85,
            calm_slot_rate: 0.1,
            hostile_determiner_rate: 0.4,
            seed: 2024,
        }
    }
}

/// Skewed pick: low indices are much more frequent, so the bigram statistics stay dense.
fn zipf<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    let u: f64 = rng.random();
    let i = ((u * u) * words.len() as f64) as usize;
    words[i.min(words.len() - 1)]
}

fn clause(rng: &mut ChaCha8Rng, toxic_rate: f64, det_rate: f64, out: &mut Vec<&'static str>) {
    let det = |rng: &mut ChaCha8Rng, out: &mut Vec<&'static str>| {
        if rng.random::<f64>() < det_rate {
            out.push(zipf(rng, &FUNCTION_WORDS[..9]));
        }
    };
    let slot = |rng: &mut ChaCha8Rng, toxic: &[&'static str], neutral: &[&'static str]| {
        if rng.random::<f64>() < toxic_rate {
            zipf(rng, toxic)
        } else {
            zipf(rng, neutral)
        }
    };
    det(rng, out);
    if rng.random::<f64>() < 0.7 {
        out.push(slot(rng, &TOXIC_ADJECTIVES, &NEUTRAL_ADJECTIVES));
    }
    out.push(slot(rng, &TOXIC_NOUNS, &NEUTRAL_NOUNS));
    out.push(slot(rng, &TOXIC_VERBS, &NEUTRAL_VERBS));
    det(rng, out);
    if rng.random::<f64>() < 0.5 {
        out.push(slot(rng, &TOXIC_ADJECTIVES, &NEUTRAL_ADJECTIVES));
    }
    out.push(slot(rng, &TOXIC_NOUNS, &NEUTRAL_NOUNS));
}

/// One sentence per line.
pub fn corpus(spec: &CorpusSpec) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.sentences)
        .map(|_| {
            let (rate, det_rate) = if rng.random::<f64>() < spec.hostile_share {
                (spec.hostile_slot_rate, spec.hostile_determiner_rate)
            } else {
                (spec.calm_slot_rate, 1.0)
            };
            let mut words = Vec::new();
            clause(&mut rng, rate, det_rate, &mut words);
            if rng.random::<f64>() < 0.4 {
                words.push(zipf(&mut rng, &FUNCTION_WORDS[9..]));
                clause(&mut rng, rate, det_rate, &mut words);
            }
            words.join(" ")
        })
        .collect()
}

/// Add-α used for the fixture bigrams.
pub const SMOOTHING_ALPHA: f64 = 0.1;

/// Mostly calm text, for a base model that rarely turns toxic on its own.
pub fn calm_corpus_spec() -> CorpusSpec {
    CorpusSpec {
        hostile_share: 0.05,
        ..CorpusSpec::default()
    }
}

/// Bigram over [`vocabulary`] trained on `corpus(spec)`.
pub fn bigram(spec: &CorpusSpec) -> NGramModel {
    let lines = corpus(spec);
    NGramModel::train_with_vocabulary(lines.iter().map(String::as_str), vocabulary(), 2, SMOOTHING_ALPHA)
        .expect("synthetic corpus is non-empty")
}

/// Sentence-conditioned interpretation model: restates the source with fidelity 0.9 or
/// reinterprets freely (prior 0.5) from the calm bigram.
pub fn interpretation_backend() -> ParaphraseBackend {
    let base: Arc<dyn LanguageModel> = Arc::new(bigram(&calm_corpus_spec()));
    ParaphraseBackend::new(base, 0.5, 0.9).expect("valid mixture parameters")
}

/// A sentence whose lexicon toxicity (mean aggregation) lies in `[lower, upper)`
/// (`upper` inclusive when it is 1.0).
pub fn sentence_in_range(rng: &mut ChaCha8Rng, lower: f64, upper: f64) -> String {
    let toxic = toxic_words();
    let neutral = neutral_words();
    let lex = lexicon();
    let mid = 0.5 * (lower + upper);
    for _ in 0..100_000 {
        let len = rng.random_range(5..=10);
        let share = (mid / 0.8 + rng.random_range(-0.15..0.15)).clamp(0.0, 1.0);
        let words: Vec<&str> = (0..len)
            .map(|_| {
                if rng.random::<f64>() < share {
                    toxic[rng.random_range(0..toxic.len())]
                } else {
                    neutral[rng.random_range(0..neutral.len())]
                }
            })
            .collect();
        let tox = words.iter().map(|w| lex[*w]).sum::<f64>() / len as f64;
        let inside = tox >= lower && (tox < upper || (upper >= 1.0 && tox <= 1.0));
        if inside {
            return words.join(" ");
        }
    }
    panic!("could not construct a sentence with toxicity in [{lower}, {upper})");
}
