//! Per-step score calibration, re-normalization and token selection.
//!
//! One decode step takes the backend's log-probabilities, shifts every token's score by
//! `±λ·tox(token)` depending on whether the running prefix is below or above the target
//! toxicity, re-applies softmax and picks the next token.

mod calibrate;
mod generate;
mod sampler;

pub use calibrate::{calibrate_scores, calibration_branch, compute_lambda, renormalize, Branch};
pub use generate::{Decoder, Interpretation, StepTrace};
pub use sampler::{nucleus_support, Sampler, SamplerConfig, SelectionMode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Log-domain scores over the vocabulary at one decode step.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::contract(format!(
                "score vector entry {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(ScoreVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `log Σ exp(v)`, computed with max-subtraction.
    pub fn logsumexp(&self) -> f64 {
        logsumexp(&self.0)
    }
}

pub(crate) fn logsumexp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// A distribution over the vocabulary. Entries are non-negative and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::contract("empty probability vector"));
        }
        if values.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::contract("probabilities must be finite and non-negative"));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::contract(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(ProbabilityVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest entry; lowest index on exact ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate().skip(1) {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Which toxicity objectives are active and how strongly calibration pushes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationConfig {
    /// Shift token scores toward the target toxicity at every step.
    pub objective1: bool,
    /// Relax the push for toxic inputs: `λ = 1 / (tox(s)·100)`.
    pub objective2: bool,
    /// Alternate the target across the interpretations of one sentence.
    pub objective3: bool,
    /// Constant λ (ablation). Mutually exclusive with `objective2`.
    pub fixed_lambda: Option<f64>,
    /// Half-width of the band around the target in which scores are left untouched.
    pub equality_tolerance: f64,
    /// Lower bound on `tox(s)` inside the objective-2 formula.
    pub lambda_floor_epsilon: f64,
    /// Re-score the prefix every n steps (1 = every step).
    pub rescore_every: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            objective1: true,
            objective2: true,
            objective3: true,
            fixed_lambda: None,
            equality_tolerance: 1e-6,
            lambda_floor_epsilon: 1e-3,
            rescore_every: 1,
        }
    }
}

impl CalibrationConfig {
    /// No calibration at all: plain sampling from the backend.
    pub fn uncontrolled() -> Self {
        CalibrationConfig {
            objective1: false,
            objective2: false,
            objective3: false,
            ..Default::default()
        }
    }

    pub fn with_objectives(objective1: bool, objective2: bool, objective3: bool) -> Self {
        CalibrationConfig {
            objective1,
            objective2,
            objective3,
            ..Default::default()
        }
    }

    pub fn with_fixed_lambda(mut self, lambda: f64) -> Self {
        self.fixed_lambda = Some(lambda);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective2 && !self.objective1 {
            return Err(Error::contract(
                "objective 2 only modulates objective 1's λ; enable objective 1 as well",
            ));
        }
        if let Some(l) = self.fixed_lambda {
            if self.objective2 {
                return Err(Error::contract(
                    "fixed λ and objective 2's variable λ are mutually exclusive",
                ));
            }
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::contract(format!("fixed λ must be in (0, ∞), got {l}")));
            }
        }
        if !(self.equality_tolerance.is_finite() && self.equality_tolerance >= 0.0) {
            return Err(Error::contract("equality tolerance must be ≥ 0"));
        }
        if !(self.lambda_floor_epsilon.is_finite() && self.lambda_floor_epsilon > 0.0) {
            return Err(Error::contract("λ floor epsilon must be > 0"));
        }
        if self.rescore_every == 0 {
            return Err(Error::contract("rescore_every must be ≥ 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_invariants() {
        assert!(CalibrationConfig::default().validate().is_ok());
        assert!(CalibrationConfig::uncontrolled().validate().is_ok());
        assert!(CalibrationConfig::with_objectives(false, true, false)
            .validate()
            .is_err());
        let both = CalibrationConfig::with_objectives(true, true, false).with_fixed_lambda(0.5);
        assert!(both.validate().is_err());
        let fixed = CalibrationConfig::with_objectives(true, false, true).with_fixed_lambda(0.5);
        assert!(fixed.validate().is_ok());
        assert!(CalibrationConfig::with_objectives(true, false, false)
            .with_fixed_lambda(0.0)
            .validate()
            .is_err());
    }

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        let p = ProbabilityVector::new(vec![0.4, 0.4, 0.2]).unwrap();
        assert_eq!(p.argmax(), 0);
    }

    #[test]
    fn vectors_reject_invalid_entries() {
        assert!(ScoreVector::new(vec![0.0, f64::NAN]).is_err());
        assert!(ScoreVector::new(vec![0.0, f64::NEG_INFINITY]).is_err());
        assert!(ProbabilityVector::new(vec![0.5, 0.4]).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5]).is_err());
    }
}
