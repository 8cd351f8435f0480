use super::{check_tokens, LanguageModel};
use crate::engine::{logsumexp, ScoreVector};
use crate::error::{Error, Result};
use crate::vocab::{TokenId, Vocabulary};

/// Fixed table of score rows, row `t mod len` served at step `t`.
#[derive(Debug, Clone)]
pub struct MockBackend {
    vocab: Vocabulary,
    rows: Vec<ScoreVector>,
}

impl MockBackend {
    /// Rows must be normalized log-probabilities over `vocab`.
    pub fn new(vocab: Vocabulary, rows: Vec<ScoreVector>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::contract("mock backend needs at least one row"));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != vocab.len() {
                return Err(Error::contract(format!(
                    "mock row {i} has {} entries, vocabulary has {}",
                    r.len(),
                    vocab.len()
                )));
            }
            let lse = logsumexp(r.values());
            if lse.abs() > 1e-9 {
                return Err(Error::contract(format!(
                    "mock row {i} is not normalized (logsumexp {lse})"
                )));
            }
        }
        Ok(MockBackend { vocab, rows })
    }

    pub fn from_probabilities(vocab: Vocabulary, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| ScoreVector::new(r.into_iter().map(f64::ln).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vocab, rows)
    }

    pub fn uniform(vocab: Vocabulary) -> Self {
        let v = vocab.len();
        let row = ScoreVector::new(vec![-(v as f64).ln(); v]).expect("finite");
        MockBackend { vocab, rows: vec![row] }
    }

    pub fn row(&self, step: usize) -> &ScoreVector {
        &self.rows[step % self.rows.len()]
    }
}

impl LanguageModel for MockBackend {
    fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn next_scores(&self, prefix: &[TokenId]) -> Result<ScoreVector> {
        check_tokens(&self.vocab, prefix)?;
        Ok(self.row(prefix.len()).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serves_rows_verbatim_and_cycles() {
        let vocab = Vocabulary::from_words(["a"]);
        let rows = vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.25; 4]];
        let m = MockBackend::from_probabilities(vocab, rows.clone()).unwrap();
        let expect0: Vec<f64> = rows[0].iter().map(|p| p.ln()).collect();
        assert_eq!(m.next_scores(&[]).unwrap().values(), expect0.as_slice());
        assert_eq!(m.next_scores(&[3, 3]).unwrap().values(), expect0.as_slice());
        assert_eq!(m.next_scores(&[3]).unwrap().values(), &[0.25f64.ln(); 4]);
    }

    #[test]
    fn rejects_bad_rows() {
        let vocab = Vocabulary::from_words(["a"]);
        assert!(MockBackend::from_probabilities(vocab.clone(), vec![vec![0.5, 0.5]]).is_err());
        assert!(MockBackend::from_probabilities(vocab, vec![vec![0.5, 0.2, 0.2, 0.2]]).is_err());
    }
}
