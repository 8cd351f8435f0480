// Train a bigram on the synthetic corpus, save it, reload it, and compare held-out
// perplexity against a uniform model over the same vocabulary.

use toxctl::backend::{train_ngram, LanguageModel, MockBackend, NGramModel};
use toxctl::eval::perplexity;
use toxctl::synthetic::{corpus, CorpusSpec};

pub fn run_example() -> toxctl::Result<()> {
    let lines = corpus(&CorpusSpec::default());
    let (train, held_out) = lines.split_at(180);
    let model = train_ngram(train.iter().map(String::as_str), 2, 0.1)?;

    let dir = tempfile::tempdir().map_err(|e| toxctl::Error::Io {
        path: "tempdir".into(),
        source: e,
    })?;
    let path = dir.path().join("bigram.json");
    model.save(&path)?;
    let reloaded = NGramModel::load(&path)?;
    assert_eq!(reloaded, model);

    let uniform = MockBackend::uniform(model.vocabulary().clone());
    let (mut ours, mut flat, mut n) = (0.0, 0.0, 0);
    for line in held_out {
        let tokens = model.vocabulary().encode(line);
        ours += perplexity(&reloaded, &tokens)?;
        flat += perplexity(&uniform, &tokens)?;
        n += 1;
    }
    println!(
        "vocabulary {}; held-out perplexity: bigram {:.1}, uniform {:.1}",
        model.vocabulary().len(),
        ours / n as f64,
        flat / n as f64
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> toxctl::Result<()> {
    run_example()
}
