#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;
use toxctl::dataset::{write_jsonl, DatasetRecord};
use toxctl::synthetic;

/// Temporary directory holding the synthetic lexicon, a trained bigram and a dataset.
pub struct Workspace {
    pub dir: TempDir,
    pub lexicon: PathBuf,
    pub model: PathBuf,
    pub dataset: PathBuf,
}

impl Workspace {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn lexicon_spec(&self) -> String {
        format!("lexicon:{}", self.lexicon.display())
    }

    pub fn model_spec(&self) -> String {
        format!("ngram:{}", self.model.display())
    }
}

/// `per_bucket` sentences from each of the five toxicity buckets, ids `s000`, `s001`, ….
pub fn synthetic_records(per_bucket: usize, seed: u64) -> Vec<DatasetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for b in 0..5 {
        for _ in 0..per_bucket {
            let sentence = synthetic::sentence_in_range(&mut rng, 0.2 * b as f64, 0.2 * (b + 1) as f64);
            out.push(DatasetRecord {
                id: format!("s{:03}", out.len()),
                sentence,
                interpretations: Vec::new(),
                sentence_toxicity: None,
            });
        }
    }
    out
}

pub fn workspace(per_bucket: usize) -> Workspace {
    let dir = tempfile::tempdir().expect("tempdir");
    let lexicon = dir.path().join("lexicon.tsv");
    std::fs::write(&lexicon, synthetic::lexicon_tsv()).unwrap();
    let model = dir.path().join("bigram.json");
    synthetic::bigram(&synthetic::CorpusSpec::default())
        .save(&model)
        .unwrap();
    let dataset = dir.path().join("dataset.jsonl");
    write_jsonl(&dataset, &synthetic_records(per_bucket, 11)).unwrap();
    Workspace {
        dir,
        lexicon,
        model,
        dataset,
    }
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn cli<S: AsRef<str>>(args: &[S]) -> (i32, String, String) {
    let mut argv = vec!["toxctl".to_string()];
    argv.extend(args.iter().map(|a| a.as_ref().to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = toxctl::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}
