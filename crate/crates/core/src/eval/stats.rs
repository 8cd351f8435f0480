use crate::backend::{sequence_log_prob_given, LanguageModel};
use crate::error::{Error, Result};
use crate::vocab::TokenId;

/// `exp(−log p(tokens) / T)` under the uncalibrated backend.
pub fn perplexity(backend: &dyn LanguageModel, tokens: &[TokenId]) -> Result<f64> {
    perplexity_given(backend, &[], tokens)
}

pub fn perplexity_given(backend: &dyn LanguageModel, source: &[TokenId], tokens: &[TokenId]) -> Result<f64> {
    if tokens.is_empty() {
        return Err(Error::input("perplexity of an empty sequence is undefined"));
    }
    let lp = sequence_log_prob_given(backend, source, tokens)?;
    Ok((-lp / tokens.len() as f64).exp())
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's ρ with mid-ranks for ties. `Ok(None)` when either list is constant, where the
/// coefficient is undefined.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::contract(format!(
            "spearman inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::contract("spearman needs at least 2 pairs"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::contract("spearman inputs must be finite"));
    }
    Ok(pearson(&average_ranks(x), &average_ranks(y)))
}
