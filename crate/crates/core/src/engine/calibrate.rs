use serde::{Deserialize, Serialize};

use super::{CalibrationConfig, ProbabilityVector, ScoreVector};
use crate::error::{Error, Result};
use crate::toxicity::ToxicityProfile;

/// Which side of the target the running prefix sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Prefix is less toxic than the target: scores get `+λ·tox`.
    Raise,
    /// Prefix is more toxic than the target: scores get `-λ·tox`.
    Lower,
    /// Within tolerance of the target (or calibration disabled).
    Hold,
}

pub fn calibration_branch(prefix_tox: f64, target_tox: f64, tolerance: f64) -> Branch {
    if prefix_tox < target_tox - tolerance {
        Branch::Raise
    } else if prefix_tox > target_tox + tolerance {
        Branch::Lower
    } else {
        Branch::Hold
    }
}

/// Shifts each token's log-score by `±λ·tox(token)`.
///
/// The sign comes from [`calibration_branch`]; inside the tolerance band the input is
/// returned unchanged.
pub fn calibrate_scores(
    scores: &ScoreVector,
    token_toxicity: &ToxicityProfile,
    prefix_tox: f64,
    target_tox: f64,
    lambda: f64,
    tolerance: f64,
) -> Result<ScoreVector> {
    if scores.len() != token_toxicity.len() {
        return Err(Error::contract(format!(
            "score vector has {} entries but toxicity profile has {}",
            scores.len(),
            token_toxicity.len()
        )));
    }
    for (name, v) in [
        ("prefix toxicity", prefix_tox),
        ("target toxicity", target_tox),
        ("lambda", lambda),
        ("tolerance", tolerance),
    ] {
        if !v.is_finite() {
            return Err(Error::contract(format!("{name} is not finite")));
        }
    }
    let sign = match calibration_branch(prefix_tox, target_tox, tolerance) {
        Branch::Raise => 1.0,
        Branch::Lower => -1.0,
        Branch::Hold => return Ok(scores.clone()),
    };
    let shifted = scores
        .values()
        .iter()
        .zip(token_toxicity.values())
        .map(|(s, t)| s + sign * lambda * t)
        .collect();
    ScoreVector::new(shifted)
}

/// Calibration strength for a given target toxicity.
///
/// Objective 2 gives `1 / (max(target, ε)·100)`; otherwise the fixed λ if set, else 1.
pub fn compute_lambda(config: &CalibrationConfig, target_tox: f64) -> f64 {
    if config.objective2 {
        1.0 / (target_tox.max(config.lambda_floor_epsilon) * 100.0)
    } else {
        config.fixed_lambda.unwrap_or(1.0)
    }
}

/// Softmax over log-domain scores.
pub fn renormalize(scores: &ScoreVector) -> Result<ProbabilityVector> {
    let values = scores.values();
    if values.is_empty() {
        return Err(Error::contract("cannot renormalize an empty score vector"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::contract("NaN in score vector"));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut exps: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    for e in &mut exps {
        *e /= sum;
    }
    ProbabilityVector::new(exps)
}
