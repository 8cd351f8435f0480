//! Word-level vocabulary shared by the toy language models and the lexicon scorer.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type TokenId = usize;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

/// Ordered, duplicate-free token list with designated begin, end and unknown tokens.
///
/// Vocabularies built locally put `<s>`, `</s>`, `<unk>` at indices 0, 1, 2; a remote model
/// may place its specials anywhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vocabulary {
    tokens: Vec<String>,
    bos: TokenId,
    eos: TokenId,
    unk: TokenId,
    #[serde(skip)]
    index: HashMap<String, TokenId>,
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            tokens: Vec<String>,
            bos: TokenId,
            eos: TokenId,
            unk: TokenId,
        }
        let raw = Raw::deserialize(deserializer)?;
        Vocabulary::with_specials(raw.tokens, raw.bos, raw.eos, raw.unk).map_err(serde::de::Error::custom)
    }
}

impl Vocabulary {
    /// Token list with explicit special-token indices.
    pub fn with_specials(tokens: Vec<String>, bos: TokenId, eos: TokenId, unk: TokenId) -> Result<Self> {
        if tokens.len() < 2 {
            return Err(Error::contract("vocabulary needs at least 2 tokens"));
        }
        for (name, id) in [("bos", bos), ("eos", eos), ("unk", unk)] {
            if id >= tokens.len() {
                return Err(Error::contract(format!(
                    "{name} index {id} out of range for {} tokens",
                    tokens.len()
                )));
            }
        }
        if bos == eos {
            return Err(Error::contract("bos and eos must be distinct tokens"));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::contract(format!("duplicate token {t:?} in vocabulary")));
            }
        }
        Ok(Vocabulary {
            tokens,
            bos,
            eos,
            unk,
            index,
        })
    }

    /// Token list that contains `<s>`, `</s>` and `<unk>` somewhere.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        let find = |s: &str| {
            tokens
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::contract(format!("vocabulary lacks special token {s}")))
        };
        let (bos, eos, unk) = (find(BOS)?, find(EOS)?, find(UNK)?);
        Self::with_specials(tokens, bos, eos, unk)
    }

    /// Specials followed by the distinct words in first-seen order.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut tokens: Vec<String> = vec![BOS.into(), EOS.into(), UNK.into()];
        let mut index: HashMap<String, TokenId> = tokens.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        for w in words {
            let w = w.as_ref();
            if !index.contains_key(w) {
                index.insert(w.to_string(), tokens.len());
                tokens.push(w.to_string());
            }
        }
        Vocabulary {
            tokens,
            bos: 0,
            eos: 1,
            unk: 2,
            index,
        }
    }

    /// Specials followed by every distinct token of `texts` in sorted order, so the result
    /// does not depend on text order.
    pub fn from_texts<I, S>(texts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut words: Vec<String> = texts.into_iter().flat_map(|t| tokenize(t.as_ref())).collect();
        words.sort();
        words.dedup();
        Self::from_words(words)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, id: TokenId) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.index.get(token).copied()
    }

    pub fn bos(&self) -> TokenId {
        self.bos
    }

    pub fn eos(&self) -> TokenId {
        self.eos
    }

    pub fn unk(&self) -> TokenId {
        self.unk
    }

    pub fn is_special(&self, id: TokenId) -> bool {
        id == self.bos || id == self.eos || id == self.unk
    }

    /// Tokenizes `text` and maps out-of-vocabulary words to the unknown token.
    pub fn encode(&self, text: &str) -> Vec<TokenId> {
        tokenize(text).iter().map(|w| self.id(w).unwrap_or(self.unk)).collect()
    }

    /// Non-special tokens of `ids` as strings.
    pub fn words<'a>(&'a self, ids: &[TokenId]) -> Vec<&'a str> {
        ids.iter()
            .filter(|&&id| !self.is_special(id))
            .filter_map(|&id| self.token(id))
            .collect()
    }

    /// Space-joined surface form; special tokens are dropped.
    pub fn decode(&self, ids: &[TokenId]) -> String {
        self.words(ids).join(" ")
    }

    /// Hex SHA-256 over the newline-joined token list. Used to detect vocabulary drift
    /// between the engine and a remote model.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                h.update(b"\n");
            }
            h.update(t.as_bytes());
        }
        hex(&h.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn token_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\p{L}\p{N}]+(?:['’][\p{L}]+)*|[^\s\p{L}\p{N}]").unwrap())
}

/// Lowercased word-level tokenization: runs of letters/digits (with inner apostrophes)
/// and single punctuation characters.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    token_re().find_iter(&lower).map(|m| m.as_str().to_string()).collect()
}
