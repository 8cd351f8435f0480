use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper edges of the five input-toxicity intervals; the last bucket includes 1.0.
pub const BUCKET_EDGES: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadBucket {
    pub lower: f64,
    pub upper: f64,
    /// Mean over sets in this interval of the set's population std; `None` if no sets fell here.
    pub mean_std: Option<f64>,
    pub sets: usize,
}

pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

pub fn bucket_index(sentence_tox: f64) -> usize {
    BUCKET_EDGES[1..5]
        .iter()
        .position(|&edge| sentence_tox < edge)
        .unwrap_or(4)
}

/// Buckets sets by sentence toxicity and averages the per-set spread of interpretation
/// toxicities within each bucket.
pub fn spread_analysis<'a, I>(sets: I) -> Result<Vec<SpreadBucket>>
where
    I: IntoIterator<Item = (f64, &'a [f64])>,
{
    let mut sums = [0.0f64; 5];
    let mut counts = [0usize; 5];
    for (n, (sentence_tox, interps)) in sets.into_iter().enumerate() {
        if !(0.0..=1.0).contains(&sentence_tox) {
            return Err(Error::input(format!(
                "set {n}: sentence toxicity {sentence_tox} outside [0, 1]"
            )));
        }
        if interps.len() < 2 {
            return Err(Error::input(format!(
                "set {n}: spread needs at least 2 interpretations, got {}",
                interps.len()
            )));
        }
        let b = bucket_index(sentence_tox);
        sums[b] += population_std(interps);
        counts[b] += 1;
    }
    Ok((0..5)
        .map(|b| SpreadBucket {
            lower: BUCKET_EDGES[b],
            upper: BUCKET_EDGES[b + 1],
            mean_std: (counts[b] > 0).then(|| sums[b] / counts[b] as f64),
            sets: counts[b],
        })
        .collect())
}

/// Five-row plain-text table, one line per toxicity interval.
pub fn render_spread_table(buckets: &[SpreadBucket]) -> String {
    let mut out = String::from("Toxicity Interval  Avg Std of Interpretations  Sets\n");
    for b in buckets {
        let std = b.mean_std.map_or_else(|| "-".to_string(), |s| format!("{s:.2}"));
        out.push_str(&format!(
            "({:.1} - {:.1})       {:>26}  {:>4}\n",
            b.lower, b.upper, std, b.sets
        ));
    }
    out
}
