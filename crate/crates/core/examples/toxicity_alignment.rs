// How close generated toxicity lands to a requested target, with and without calibration.

use toxctl::backend::LanguageModel;
use toxctl::engine::{CalibrationConfig, Decoder, Sampler, SamplerConfig};
use toxctl::synthetic;
use toxctl::toxicity::ToxicityScorer;

pub fn run_example() -> toxctl::Result<()> {
    let lm = synthetic::bigram(&synthetic::CorpusSpec::default());
    let scorer = synthetic::lexicon_scorer();
    let configs = [
        ("uncontrolled", CalibrationConfig::uncontrolled()),
        (
            "λ = 1",
            CalibrationConfig::with_objectives(true, false, false).with_fixed_lambda(1.0),
        ),
    ];
    println!("target  method        mean tox  mean |error|");
    for target in [0.1, 0.5, 0.9] {
        for (name, cal) in &configs {
            let decoder = Decoder::new(&lm, &scorer, cal.clone(), 30)?;
            let (mut tox_sum, mut err_sum) = (0.0, 0.0);
            for seed in 0..100 {
                let mut sampler = Sampler::new(&SamplerConfig::nucleus(0.9, seed))?;
                let out = decoder.generate(&[], target, &mut sampler)?;
                let tox = scorer.score_tokens(&lm.vocabulary().words(&out.tokens))?.value();
                tox_sum += tox;
                err_sum += (tox - target).abs();
            }
            println!(
                "{target:<6}  {name:<12}  {:>8.3}  {:>12.3}",
                tox_sum / 100.0,
                err_sum / 100.0
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> toxctl::Result<()> {
    run_example()
}
