// Generate interpretation sets and score them against human interpretations: Hungarian
// matching on METEOR, perplexity, and toxicity correlation.

use toxctl::cli::generate_records;
use toxctl::config::{BackendSpec, RunConfig, ScorerSpec};
use toxctl::dataset::DatasetRecord;
use toxctl::eval::{evaluate_run, render_table, EvalOptions, RunSummary};
use toxctl::synthetic;

fn reference(id: &str, sentence: &str, interpretations: &[&str]) -> DatasetRecord {
    DatasetRecord {
        id: id.into(),
        sentence: sentence.into(),
        interpretations: interpretations.iter().map(|s| s.to_string()).collect(),
        sentence_toxicity: None,
    }
}

pub fn run_example() -> toxctl::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| toxctl::Error::Io {
        path: "tempdir".into(),
        source: e,
    })?;
    let model = dir.path().join("bigram.json");
    let lexicon = dir.path().join("lexicon.tsv");
    synthetic::bigram(&synthetic::calm_corpus_spec()).save(&model)?;
    std::fs::write(&lexicon, synthetic::lexicon_tsv()).map_err(|e| toxctl::Error::Io {
        path: lexicon.clone(),
        source: e,
    })?;

    let human = vec![
        reference(
            "a",
            "the manager ruin the project",
            &[
                "the manager improve the project",
                "the stupid manager ruin the project",
                "the manager destroy our plan",
            ],
        ),
        reference(
            "b",
            "a quiet morning in the garden",
            &["a calm morning in the garden", "the garden morning", "a quiet garden"],
        ),
        reference(
            "c",
            "that idiot wreck the bridge",
            &[
                "that fool wreck the bridge",
                "the engineer repair the bridge",
                "that stupid idiot destroy the road",
            ],
        ),
    ];

    let scorer = synthetic::lexicon_scorer();
    let mut reports = Vec::new();
    for seed in 0..3 {
        let cfg = RunConfig {
            backend: BackendSpec::Paraphrase(model.clone()),
            scorer: ScorerSpec::Lexicon(Some(lexicon.clone())),
            seed,
            k: 3,
            ..RunConfig::default()
        };
        let generated = generate_records(&cfg, &human)?;
        let backend = cfg.build_backend(std::iter::empty())?;
        assert!(backend.vocabulary().len() > 3);
        reports.push(evaluate_run(
            &generated,
            &human,
            backend.as_ref(),
            &scorer,
            &EvalOptions::default(),
        )?);
    }
    print!(
        "{}",
        render_table(&[RunSummary {
            label: "paraphrase Obj1,2,3".into(),
            runs: &reports
        }])
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> toxctl::Result<()> {
    run_example()
}
