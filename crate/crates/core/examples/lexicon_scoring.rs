// Sentence toxicity from a word lexicon under the three aggregation rules.

use toxctl::toxicity::{parse_lexicon, Aggregation, LexiconScorer, ToxicityScorer, DEFAULT_UNMAPPED_TOXICITY};

pub fn run_example() -> toxctl::Result<()> {
    let entries = parse_lexicon("# word\ttoxicity\nidiot\t0.9\nstupid\t0.8\nnice\t0.0\n")?;
    let texts = ["What a nice day", "You stupid idiot!", "an unknown phrase"];
    for aggregation in [Aggregation::Mean, Aggregation::Max, Aggregation::CoverageWeighted] {
        let scorer = LexiconScorer::new(entries.clone(), DEFAULT_UNMAPPED_TOXICITY, aggregation)?;
        for text in texts {
            println!("{aggregation:?}\t{:.3}\t{text}", scorer.score_text(text)?.value());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> toxctl::Result<()> {
    run_example()
}
