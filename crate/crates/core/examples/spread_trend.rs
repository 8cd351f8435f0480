// Interpretation-toxicity spread per input-toxicity bucket, simulated with the
// sentence-conditioned backend.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toxctl::engine::{CalibrationConfig, SamplerConfig};
use toxctl::eval::{render_spread_table, spread_analysis};
use toxctl::session::DecodeSession;
use toxctl::synthetic;

pub fn run_example() -> toxctl::Result<()> {
    let backend = synthetic::interpretation_backend();
    let scorer = synthetic::lexicon_scorer();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sets = Vec::new();
    for bucket in 0..5u64 {
        for i in 0..20 {
            let sentence = synthetic::sentence_in_range(&mut rng, 0.2 * bucket as f64, 0.2 * (bucket + 1) as f64);
            let sampler = SamplerConfig::nucleus(0.9, 1000 * bucket + i);
            let mut session = DecodeSession::measured(sentence, &scorer, CalibrationConfig::default(), sampler, 4)?;
            let set = session.generate_set(&backend, &scorer, 30)?;
            sets.push((session.base_target(), set.toxicities()));
        }
    }
    let buckets = spread_analysis(sets.iter().map(|(t, v)| (*t, v.as_slice())))?;
    print!("{}", render_spread_table(&buckets));
    Ok(())
}

#[allow(dead_code)]
fn main() -> toxctl::Result<()> {
    run_example()
}
