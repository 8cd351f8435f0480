// A full interpretation set for one sentence with all three objectives, then the same
// sentence moderated by overriding its toxicity.

use toxctl::engine::{CalibrationConfig, SamplerConfig};
use toxctl::session::DecodeSession;
use toxctl::synthetic;

pub fn run_example() -> toxctl::Result<()> {
    let backend = synthetic::interpretation_backend();
    let scorer = synthetic::lexicon_scorer();
    let sentence = "the stupid manager ruin our project";

    let mut session = DecodeSession::measured(
        sentence,
        &scorer,
        CalibrationConfig::default(),
        SamplerConfig::nucleus(0.9, 3),
        5,
    )?;
    println!("{sentence:?} tox(s) = {:.3}", session.base_target());
    for i in session.generate_set(&backend, &scorer, 30)?.interpretations {
        println!(
            "  target {:.3}  λ {:.3}  tox {:.3}  {}",
            i.target_used,
            i.lambda.unwrap_or(0.0),
            i.toxicity,
            i.text
        );
    }

    let mut moderated = DecodeSession::measured(
        sentence,
        &scorer,
        CalibrationConfig::default(),
        SamplerConfig::nucleus(0.9, 3),
        5,
    )?;
    moderated.override_target(0.2)?;
    println!("moderated to tox(s) = 0.2");
    for i in moderated.generate_set(&backend, &scorer, 30)?.interpretations {
        println!("  target {:.3}  tox {:.3}  {}", i.target_used, i.toxicity, i.text);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> toxctl::Result<()> {
    run_example()
}
