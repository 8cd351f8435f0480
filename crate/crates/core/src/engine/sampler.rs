use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ProbabilityVector;
use crate::error::{Error, Result};
use crate::vocab::TokenId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SelectionMode {
    /// Top-p sampling; `p` in (0, 1].
    Nucleus { p: f64 },
    /// Argmax, lowest index on ties.
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub mode: SelectionMode,
    pub rng_seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            mode: SelectionMode::Nucleus { p: 0.9 },
            rng_seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn nucleus(p: f64, seed: u64) -> Self {
        SamplerConfig {
            mode: SelectionMode::Nucleus { p },
            rng_seed: seed,
        }
    }

    pub fn greedy() -> Self {
        SamplerConfig {
            mode: SelectionMode::Greedy,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SelectionMode::Nucleus { p } = self.mode {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::contract(format!("nucleus p must be in (0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// Smallest set of most-probable tokens whose mass reaches `p`, in descending
/// probability order (index order among equal probabilities). Never empty.
pub fn nucleus_support(probs: &ProbabilityVector, p: f64) -> Vec<TokenId> {
    let values = probs.values();
    let mut order: Vec<TokenId> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut mass = 0.0;
    let mut cut = order.len();
    for (i, &tok) in order.iter().enumerate() {
        mass += values[tok];
        if mass >= p {
            cut = i + 1;
            break;
        }
    }
    order.truncate(cut.max(1));
    order
}

/// Token selector with its own seeded RNG stream.
#[derive(Debug, Clone)]
pub struct Sampler {
    mode: SelectionMode,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(config: &SamplerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Sampler {
            mode: config.mode,
            rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
        })
    }

    pub fn mode(&self) -> SelectionMode {
        self.mode
    }

    pub fn select(&mut self, probs: &ProbabilityVector) -> TokenId {
        match self.mode {
            SelectionMode::Greedy => probs.argmax(),
            SelectionMode::Nucleus { p } => {
                let support = nucleus_support(probs, p);
                let values = probs.values();
                let mass: f64 = support.iter().map(|&t| values[t]).sum();
                let u = self.rng.random::<f64>() * mass;
                let mut acc = 0.0;
                for &tok in &support {
                    acc += values[tok];
                    if u < acc {
                        return tok;
                    }
                }
                *support.last().expect("nucleus support is never empty")
            }
        }
    }
}
