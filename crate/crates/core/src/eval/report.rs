use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{hungarian_match, meteor, perplexity_given, spearman, spread_analysis, CometClient, SpreadBucket};
use crate::backend::LanguageModel;
use crate::dataset::{DatasetRecord, GeneratedRecord};
use crate::error::{Error, Result};
use crate::toxicity::ToxicityScorer;
use crate::vocab::tokenize;

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions<'a> {
    /// When set, every matched pair is also scored through the bridge's `/comet`.
    pub comet: Option<&'a CometClient>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceEval {
    pub id: String,
    /// `(generated index, human index)`.
    pub pairs: Vec<(usize, usize)>,
    /// METEOR of each matched pair, 0–100.
    pub meteor: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub sentences: usize,
    pub matched_pairs: usize,
    /// Mean METEOR over matched pairs, on a 0–100 scale.
    pub meteor_mean: f64,
    /// Mean perplexity of the non-empty generated interpretations under the base model.
    pub perplexity: Option<f64>,
    /// Spearman ρ between generated and human toxicity over all matched pairs; `null` when
    /// undefined (constant toxicities or fewer than two pairs).
    pub spearman: Option<f64>,
    pub spread_buckets: Vec<SpreadBucket>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comet_mean: Option<f64>,
    pub per_sentence: Vec<SentenceEval>,
}

/// Matches each generated set to its human set with cost `1 − METEOR` and aggregates the
/// metric suite. Sentences are processed in id order.
pub fn evaluate_run(
    generated: &[GeneratedRecord],
    human: &[DatasetRecord],
    backend: &dyn LanguageModel,
    scorer: &dyn ToxicityScorer,
    opts: &EvalOptions<'_>,
) -> Result<EvalReport> {
    let gen_by_id: BTreeMap<&str, &GeneratedRecord> = generated.iter().map(|g| (g.id.as_str(), g)).collect();
    let hum_by_id: BTreeMap<&str, &DatasetRecord> = human.iter().map(|h| (h.id.as_str(), h)).collect();
    if gen_by_id.len() != generated.len() || hum_by_id.len() != human.len() {
        return Err(Error::input("duplicate sentence ids in evaluation input"));
    }
    let only_gen: Vec<&str> = gen_by_id
        .keys()
        .filter(|k| !hum_by_id.contains_key(*k))
        .copied()
        .collect();
    let only_hum: Vec<&str> = hum_by_id
        .keys()
        .filter(|k| !gen_by_id.contains_key(*k))
        .copied()
        .collect();
    if !only_gen.is_empty() || !only_hum.is_empty() {
        return Err(Error::input(format!(
            "sentence ids do not align; missing from references: {only_gen:?}; missing from generated: {only_hum:?}"
        )));
    }
    if gen_by_id.is_empty() {
        return Err(Error::input("nothing to evaluate"));
    }

    let vocab = backend.vocabulary();
    let mut per_sentence = Vec::with_capacity(gen_by_id.len());
    let mut meteors = Vec::new();
    let mut ppls = Vec::new();
    let mut tox_gen = Vec::new();
    let mut tox_hum = Vec::new();
    let mut comets = Vec::new();
    let mut spread_sets: Vec<(f64, Vec<f64>)> = Vec::new();

    for (id, g) in &gen_by_id {
        let h = hum_by_id[id];
        if h.interpretations.is_empty() {
            return Err(Error::input(format!("sentence {id:?} has no human interpretations")));
        }
        if g.interpretations.is_empty() {
            return Err(Error::input(format!(
                "sentence {id:?} has no generated interpretations"
            )));
        }
        let gen_tokens: Vec<Vec<String>> = g.interpretations.iter().map(|i| tokenize(&i.text)).collect();
        let hum_tokens: Vec<Vec<String>> = h.interpretations.iter().map(|t| tokenize(t)).collect();
        let cost: Vec<Vec<f64>> = gen_tokens
            .iter()
            .map(|c| hum_tokens.iter().map(|r| 1.0 - meteor(c, r)).collect())
            .collect();
        let matched = hungarian_match(&cost)?;

        let mut sentence_meteor = Vec::with_capacity(matched.pairs.len());
        for &(gi, hi) in &matched.pairs {
            let m = 100.0 * (1.0 - cost[gi][hi]);
            sentence_meteor.push(m);
            meteors.push(m);
            tox_gen.push(scorer.score_text(&g.interpretations[gi].text)?.value());
            tox_hum.push(scorer.score_text(&h.interpretations[hi])?.value());
            if let Some(c) = opts.comet {
                comets.push(c.score(&g.sentence, &g.interpretations[gi].text, &h.interpretations[hi])?);
            }
        }

        let source = vocab.encode(&g.sentence);
        let mut set_tox = Vec::with_capacity(g.interpretations.len());
        for interp in &g.interpretations {
            let ids = vocab.encode(&interp.text);
            if !ids.is_empty() {
                ppls.push(perplexity_given(backend, &source, &ids)?);
            }
            set_tox.push(scorer.score_text(&interp.text)?.value());
        }
        if set_tox.len() >= 2 {
            spread_sets.push((g.sentence_toxicity.clamp(0.0, 1.0), set_tox));
        }

        per_sentence.push(SentenceEval {
            id: id.to_string(),
            pairs: matched.pairs,
            meteor: sentence_meteor,
        });
    }

    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let spearman = if tox_gen.len() >= 2 {
        spearman(&tox_gen, &tox_hum)?
    } else {
        None
    };
    Ok(EvalReport {
        sentences: per_sentence.len(),
        matched_pairs: meteors.len(),
        meteor_mean: mean(&meteors).unwrap_or(0.0),
        perplexity: mean(&ppls),
        spearman,
        spread_buckets: spread_analysis(spread_sets.iter().map(|(s, v)| (*s, v.as_slice())))?,
        comet_mean: mean(&comets).map(|c| c * 100.0),
        per_sentence,
    })
}

/// Several runs of one configuration, summarized as mean ± std.
#[derive(Debug, Clone)]
pub struct RunSummary<'a> {
    pub label: String,
    pub runs: &'a [EvalReport],
}

fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some((mean, var.sqrt()))
}

/// Plain-text table with METEOR, COMET, perplexity and correlation columns.
pub fn render_table(rows: &[RunSummary<'_>]) -> String {
    let cell = |values: Vec<f64>| match mean_std(&values) {
        Some((m, s)) => format!("{m:.2} ± {s:.2}"),
        None => "-".to_string(),
    };
    let width = rows.iter().map(|r| r.label.chars().count()).max().unwrap_or(6).max(6);
    let mut out = format!(
        "{:<width$}  {:>15}  {:>15}  {:>15}  {:>15}\n",
        "Method", "METEOR (↑)", "COMET (↑)", "Perplexity (↓)", "Correlation (↑)"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<width$}  {:>15}  {:>15}  {:>15}  {:>15}\n",
            r.label,
            cell(r.runs.iter().map(|x| x.meteor_mean).collect()),
            cell(r.runs.iter().filter_map(|x| x.comet_mean).collect()),
            cell(r.runs.iter().filter_map(|x| x.perplexity).collect()),
            cell(r.runs.iter().filter_map(|x| x.spearman).collect()),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::MockBackend;
    use crate::dataset::Provenance;
    use crate::session::GeneratedInterpretation;
    use crate::toxicity::{Aggregation, LexiconScorer};
    use crate::vocab::Vocabulary;

    pub(crate) fn gen_record(id: &str, sentence: &str, tox: f64, texts: &[&str]) -> GeneratedRecord {
        GeneratedRecord {
            id: id.into(),
            sentence: sentence.into(),
            sentence_toxicity: tox,
            measured_toxicity: None,
            interpretations: texts
                .iter()
                .map(|t| GeneratedInterpretation {
                    text: t.to_string(),
                    toxicity: 0.0,
                    target_used: tox,
                    lambda: None,
                    tokens: vec![],
                    trace: vec![],
                })
                .collect(),
            provenance: Provenance {
                config_hash: String::new(),
                seed: 0,
                code_version: String::new(),
            },
        }
    }

    fn human(id: &str, sentence: &str, texts: &[&str]) -> DatasetRecord {
        DatasetRecord {
            id: id.into(),
            sentence: sentence.into(),
            interpretations: texts.iter().map(|t| t.to_string()).collect(),
            sentence_toxicity: None,
        }
    }

    fn scorer() -> LexiconScorer {
        let lex = [("idiot", 0.9), ("stupid", 0.7), ("rude", 0.4)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        LexiconScorer::new(lex, 0.05, Aggregation::Mean).unwrap()
    }

    #[test]
    fn self_match() {
        let texts = [
            ["he is an idiot", "he is kind"],
            ["that was rude of you", "stupid stupid rain"],
        ];
        let gen: Vec<_> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| gen_record(&i.to_string(), "s", 0.3, t))
            .collect();
        let hum: Vec<_> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| human(&i.to_string(), "s", t))
            .collect();
        let backend = MockBackend::uniform(Vocabulary::from_texts(texts.iter().flatten()));
        let r = evaluate_run(&gen, &hum, &backend, &scorer(), &EvalOptions::default()).unwrap();
        let expect: Vec<f64> = texts
            .iter()
            .flatten()
            .map(|t| 100.0 * (1.0 - 0.5 / (tokenize(t).len() as f64).powi(3)))
            .collect();
        let expect = expect.iter().sum::<f64>() / expect.len() as f64;
        assert!((r.meteor_mean - expect).abs() < 1e-9);
        assert!((r.spearman.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.per_sentence[0].pairs, vec![(0, 0), (1, 1)]);
        assert!((r.perplexity.unwrap() - backend.vocabulary().len() as f64).abs() < 1e-9);
    }

    #[test]
    fn singleton_sets() {
        let gen = vec![gen_record("a", "s", 0.1, &["x y"])];
        let hum = vec![human("a", "s", &["x z"])];
        let backend = MockBackend::uniform(Vocabulary::from_texts(["x y z"]));
        let r = evaluate_run(&gen, &hum, &backend, &scorer(), &EvalOptions::default()).unwrap();
        assert_eq!(r.per_sentence[0].pairs, vec![(0, 0)]);
        assert_eq!(r.spearman, None);
        assert!(r.spread_buckets.iter().all(|b| b.mean_std.is_none()));
    }

    #[test]
    fn misaligned_ids_are_listed() {
        let gen = vec![gen_record("a", "s", 0.1, &["x"]), gen_record("b", "s", 0.1, &["x"])];
        let hum = vec![human("a", "s", &["x"]), human("c", "s", &["x"])];
        let backend = MockBackend::uniform(Vocabulary::from_texts(["x"]));
        let err = evaluate_run(&gen, &hum, &backend, &scorer(), &EvalOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Input(_)));
        assert!(msg.contains("\"b\"") && msg.contains("\"c\""), "{msg}");
    }

    #[test]
    fn table_layout() {
        let gen = vec![gen_record("a", "s", 0.1, &["x y", "y"])];
        let hum = vec![human("a", "s", &["x y", "y x"])];
        let backend = MockBackend::uniform(Vocabulary::from_texts(["x y"]));
        let r = evaluate_run(&gen, &hum, &backend, &scorer(), &EvalOptions::default()).unwrap();
        let runs = vec![r.clone(), r];
        let t = render_table(&[RunSummary {
            label: "bigram+Obj1,2,3".into(),
            runs: &runs,
        }]);
        assert!(t.starts_with("Method"));
        assert!(t.contains("± 0.00"));
        assert_eq!(t.lines().count(), 2);
    }
}
