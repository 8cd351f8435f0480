//! `toxctl` command line: generate, evaluate, train-ngram, spread and score.
//!
//! Every `cmd_*` function is usable from library code; [`run`] only parses arguments, layers
//! flags over the config file and maps errors to exit codes (see [`Error::exit_code`]).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::backend::{train_ngram, LanguageModel, NGramModel};
use crate::config::{BackendSpec, RunConfig, ScorerSpec};
use crate::dataset::{check_unique_ids, read_jsonl, write_jsonl, DatasetRecord, GeneratedRecord, Provenance};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_run, render_spread_table, render_table, spread_analysis, CometClient, EvalOptions, EvalReport, RunSummary,
};
use crate::session::DecodeSession;
use crate::toxicity::score_sentence;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "toxctl",
    version,
    about = "Toxicity-steered generation of sentence interpretations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate interpretation sets for every sentence of a JSONL dataset.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Score one or more generated runs against human interpretations.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Generated JSONL; repeat for several runs of the same configuration.
        #[arg(long = "generated", required = true)]
        generated: Vec<PathBuf>,
        #[arg(long)]
        reference: PathBuf,
        /// Row label in the summary table.
        #[arg(long, default_value = "run")]
        label: String,
        /// Bridge base URL for the optional COMET column.
        #[arg(long)]
        comet: Option<String>,
    },
    /// Train an add-α n-gram model on a one-sentence-per-line corpus.
    TrainNgram {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interpretation-toxicity spread per input-toxicity bucket.
    Spread {
        #[command(flatten)]
        common: Common,
        /// Human (string interpretations) or generated JSONL.
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Print the toxicity of one text.
    Score {
        #[command(flatten)]
        common: Common,
        text: String,
    },
}

/// Flags shared by the commands that run the stack. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub nucleus_p: Option<f64>,
    /// Comma-separated subset of 1,2,3, or `none`.
    #[arg(long)]
    pub objectives: Option<String>,
    #[arg(long)]
    pub fixed_lambda: Option<f64>,
    #[arg(long)]
    pub override_tox: Option<f64>,
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub scorer: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_objectives(s: &str) -> Result<Vec<u8>> {
    let s = s.trim();
    if s.is_empty() || s == "none" {
        return Ok(Vec::new());
    }
    let mut out: Vec<u8> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::config("objectives", format!("{p:?} is not an objective number")))
        })
        .collect::<Result<_>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl Common {
    /// Config file (or defaults) with every given flag applied on top, validated.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.max_len {
            cfg.max_len = v;
        }
        if let Some(v) = self.nucleus_p {
            cfg.nucleus_p = v;
        }
        if let Some(v) = &self.objectives {
            cfg.objectives = parse_objectives(v)?;
        }
        if let Some(v) = self.fixed_lambda {
            cfg.fixed_lambda = Some(v);
        }
        if let Some(v) = self.override_tox {
            cfg.override_tox = Some(v);
        }
        if let Some(v) = &self.backend {
            cfg.backend = v.parse::<BackendSpec>()?;
        }
        if let Some(v) = &self.scorer {
            cfg.scorer = v.parse::<ScorerSpec>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs the full pipeline for `records`, returning sets ordered by sentence id.
pub fn generate_records(cfg: &RunConfig, records: &[DatasetRecord]) -> Result<Vec<GeneratedRecord>> {
    cfg.validate()?;
    check_unique_ids(records.iter().map(|r| r.id.as_str()), "dataset")?;
    let scorer = cfg.build_scorer()?;
    let lexicon_words = cfg.lexicon_words()?;
    let backend = cfg.build_backend(
        records
            .iter()
            .map(|r| r.sentence.as_str())
            .chain(lexicon_words.iter().map(String::as_str)),
    )?;
    let provenance = Provenance {
        config_hash: cfg.config_hash(),
        seed: cfg.seed,
        code_version: CODE_VERSION.to_string(),
    };

    let mut ordered: Vec<&DatasetRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = Vec::with_capacity(ordered.len());
    for rec in ordered {
        let ctx = |e: Error| match e {
            Error::Input(m) => Error::Input(format!("sentence {:?}: {m}", rec.id)),
            other => other,
        };
        let measured = score_sentence(scorer.as_ref(), &rec.sentence).map_err(ctx)?.value();
        let tox = cfg.override_tox.or(rec.sentence_toxicity).unwrap_or(measured);
        let mut session = DecodeSession::new(
            rec.sentence.clone(),
            tox,
            cfg.calibration(),
            cfg.sampler(cfg.sentence_seed(&rec.id)),
            cfg.k,
        )
        .map_err(ctx)?;
        let set = session
            .generate_set(backend.as_ref(), scorer.as_ref(), cfg.max_len)
            .map_err(ctx)?;
        out.push(GeneratedRecord {
            id: rec.id.clone(),
            sentence: rec.sentence.clone(),
            sentence_toxicity: session.base_target(),
            measured_toxicity: Some(measured),
            interpretations: set.interpretations,
            provenance: provenance.clone(),
        });
    }
    Ok(out)
}

pub fn cmd_generate(cfg: &RunConfig, dataset: &Path, out: &Path) -> Result<Vec<GeneratedRecord>> {
    let records: Vec<DatasetRecord> = read_jsonl(dataset)?;
    let generated = generate_records(cfg, &records)?;
    write_jsonl(out, &generated)?;
    Ok(generated)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub generated: PathBuf,
    pub report: EvalReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationOutput {
    pub label: String,
    pub runs: Vec<RunReport>,
    pub table: String,
}

pub fn cmd_evaluate(
    cfg: &RunConfig,
    generated: &[PathBuf],
    reference: &Path,
    label: &str,
    comet: Option<&str>,
) -> Result<EvaluationOutput> {
    let human: Vec<DatasetRecord> = read_jsonl(reference)?;
    let runs: Vec<Vec<GeneratedRecord>> = generated.iter().map(|p| read_jsonl(p)).collect::<Result<_>>()?;
    let scorer = cfg.build_scorer()?;
    let lexicon_words = cfg.lexicon_words()?;
    let mut texts: Vec<&str> = human
        .iter()
        .flat_map(|h| std::iter::once(h.sentence.as_str()).chain(h.interpretations.iter().map(String::as_str)))
        .collect();
    for run in &runs {
        texts.extend(
            run.iter()
                .flat_map(|g| g.interpretations.iter().map(|i| i.text.as_str())),
        );
    }
    texts.extend(lexicon_words.iter().map(String::as_str));
    let backend = cfg.build_backend(texts)?;
    let comet = comet.map(CometClient::new);
    let opts = EvalOptions { comet: comet.as_ref() };

    let mut reports = Vec::with_capacity(runs.len());
    for (path, run) in generated.iter().zip(&runs) {
        let report = evaluate_run(run, &human, backend.as_ref(), scorer.as_ref(), &opts).map_err(|e| match e {
            Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
            other => other,
        })?;
        reports.push(RunReport {
            generated: path.clone(),
            report,
        });
    }
    let plain: Vec<EvalReport> = reports.iter().map(|r| r.report.clone()).collect();
    let table = render_table(&[RunSummary {
        label: label.to_string(),
        runs: &plain,
    }]);
    Ok(EvaluationOutput {
        label: label.to_string(),
        runs: reports,
        table,
    })
}

pub fn cmd_train_ngram(corpus: &Path, order: usize, alpha: f64, out: &Path) -> Result<NGramModel> {
    let text = std::fs::read_to_string(corpus).map_err(|e| Error::io(corpus, e))?;
    let model = train_ngram(text.lines(), order, alpha)?;
    model.save(out)?;
    Ok(model)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpreadRecord {
    Generated(GeneratedRecord),
    Human(DatasetRecord),
}

/// Spread table over sets with at least two interpretations. Generated sets use their recorded
/// toxicities; human sets are scored with the configured scorer.
pub fn cmd_spread(cfg: &RunConfig, dataset: &Path) -> Result<String> {
    let records: Vec<SpreadRecord> = read_jsonl(dataset)?;
    let scorer = cfg.build_scorer()?;
    let mut sets: Vec<(f64, Vec<f64>)> = Vec::with_capacity(records.len());
    for rec in &records {
        let (tox, values) = match rec {
            SpreadRecord::Generated(g) => (
                g.sentence_toxicity,
                g.interpretations.iter().map(|i| i.toxicity).collect(),
            ),
            SpreadRecord::Human(h) => {
                let tox = match h.sentence_toxicity {
                    Some(t) => t,
                    None => score_sentence(scorer.as_ref(), &h.sentence)?.value(),
                };
                let values = h
                    .interpretations
                    .iter()
                    .map(|t| score_sentence(scorer.as_ref(), t).map(|s| s.value()))
                    .collect::<Result<Vec<_>>>()?;
                (tox, values)
            }
        };
        if values.len() >= 2 {
            sets.push((tox, values));
        }
    }
    let buckets = spread_analysis(sets.iter().map(|(t, v)| (*t, v.as_slice())))?;
    Ok(render_spread_table(&buckets))
}

pub fn cmd_score(cfg: &RunConfig, text: &str) -> Result<f64> {
    let scorer = cfg.build_scorer()?;
    Ok(score_sentence(scorer.as_ref(), text)?.value())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<()> {
    let print = |stdout: &mut dyn Write, s: &str| stdout.write_all(s.as_bytes()).map_err(|e| Error::io("<stdout>", e));
    match command {
        Command::Generate { common, dataset } => {
            let cfg = common.resolve()?;
            let out = common
                .out
                .ok_or_else(|| Error::config("out", "generate needs --out PATH"))?;
            let generated = cmd_generate(&cfg, &dataset, &out)?;
            print(
                stdout,
                &format!("wrote {} interpretation sets to {}\n", generated.len(), out.display()),
            )
        }
        Command::Evaluate {
            common,
            generated,
            reference,
            label,
            comet,
        } => {
            let cfg = common.resolve()?;
            let output = cmd_evaluate(&cfg, &generated, &reference, &label, comet.as_deref())?;
            if let Some(out) = &common.out {
                write_text(out, &(serde_json::to_string_pretty(&output)? + "\n"))?;
                write_text(&out.with_extension("txt"), &output.table)?;
            }
            print(stdout, &output.table)
        }
        Command::TrainNgram {
            corpus,
            order,
            alpha,
            out,
        } => {
            let model = cmd_train_ngram(&corpus, order, alpha, &out)?;
            print(
                stdout,
                &format!(
                    "trained order-{} model over {} tokens → {}\n",
                    model.order(),
                    model.vocabulary().len(),
                    out.display()
                ),
            )
        }
        Command::Spread { common, dataset } => {
            let cfg = common.resolve()?;
            let table = cmd_spread(&cfg, &dataset)?;
            if let Some(out) = &common.out {
                write_text(out, &table)?;
            }
            print(stdout, &table)
        }
        Command::Score { common, text } => {
            let cfg = common.resolve()?;
            print(stdout, &format!("{:.4}\n", cmd_score(&cfg, &text)?))
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
