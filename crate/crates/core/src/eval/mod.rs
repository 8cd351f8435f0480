//! Metric suite: set matching, METEOR, perplexity, toxicity rank correlation and the
//! input-toxicity spread analysis.

mod comet;
mod hungarian;
mod meteor;
mod report;
mod spread;
mod stats;

pub use comet::CometClient;
pub use hungarian::{hungarian_match, MatchedPairs};
pub use meteor::{align, chunks, meteor};
pub use report::{evaluate_run, render_table, EvalOptions, EvalReport, RunSummary, SentenceEval};
pub use spread::{bucket_index, population_std, render_spread_table, spread_analysis, SpreadBucket, BUCKET_EDGES};
pub use stats::{average_ranks, pearson, perplexity, perplexity_given, spearman};
