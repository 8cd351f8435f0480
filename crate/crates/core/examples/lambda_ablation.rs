// Fixed λ grid against the toxicity-dependent schedule, run through the same pipeline the
// `generate` command uses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toxctl::cli::generate_records;
use toxctl::config::{BackendSpec, RunConfig, ScorerSpec};
use toxctl::dataset::DatasetRecord;
use toxctl::synthetic;

pub fn run_example() -> toxctl::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| toxctl::Error::Io {
        path: "tempdir".into(),
        source: e,
    })?;
    let model = dir.path().join("bigram.json");
    let lexicon = dir.path().join("lexicon.tsv");
    synthetic::bigram(&synthetic::CorpusSpec::default()).save(&model)?;
    std::fs::write(&lexicon, synthetic::lexicon_tsv()).map_err(|e| toxctl::Error::Io {
        path: lexicon.clone(),
        source: e,
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let records: Vec<DatasetRecord> = (0..20)
        .map(|i| DatasetRecord {
            id: format!("s{i:02}"),
            sentence: synthetic::sentence_in_range(&mut rng, 0.05 * (i % 20) as f64, 0.05 * (i % 20 + 1) as f64),
            interpretations: Vec::new(),
            sentence_toxicity: None,
        })
        .collect();

    let base = RunConfig {
        backend: BackendSpec::Ngram(model),
        scorer: ScorerSpec::Lexicon(Some(lexicon)),
        k: 3,
        ..RunConfig::default()
    };
    let mut runs: Vec<(String, RunConfig)> = [0.25, 0.5, 0.75, 1.0]
        .into_iter()
        .map(|l| {
            (
                format!("λ = {l}"),
                RunConfig {
                    objectives: vec![1, 3],
                    fixed_lambda: Some(l),
                    ..base.clone()
                },
            )
        })
        .collect();
    runs.push((
        "1/(tox·100)".into(),
        RunConfig {
            objectives: vec![1, 2, 3],
            ..base.clone()
        },
    ));

    println!("{:<12}  mean |tox(y) − tox(s)|", "λ");
    for (label, cfg) in runs {
        let out = generate_records(&cfg, &records)?;
        let errs: Vec<f64> = out
            .iter()
            .flat_map(|r| {
                r.interpretations
                    .iter()
                    .map(move |i| (i.toxicity - r.sentence_toxicity).abs())
            })
            .collect();
        println!("{label:<12}  {:.3}", errs.iter().sum::<f64>() / errs.len() as f64);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> toxctl::Result<()> {
    run_example()
}
