// One calibration step by hand: raise, hold and lower a three-token distribution.

use toxctl::engine::{calibrate_scores, calibration_branch, renormalize, ScoreVector};
use toxctl::toxicity::ToxicityProfile;

pub fn run_example() -> toxctl::Result<()> {
    // log p for ["nice", "okay", "idiot"]
    let scores = ScoreVector::new(vec![0.5f64.ln(), 0.3f64.ln(), 0.2f64.ln()])?;
    let tox = ToxicityProfile::new(vec![0.0, 0.1, 0.9])?;
    let lambda = 1.0;
    let target = 0.4;

    for prefix_tox in [0.1, 0.4, 0.8] {
        let branch = calibration_branch(prefix_tox, target, 1e-6);
        let calibrated = calibrate_scores(&scores, &tox, prefix_tox, target, lambda, 1e-6)?;
        let probs = renormalize(&calibrated)?;
        let shown: Vec<String> = probs.values().iter().map(|p| format!("{p:.3}")).collect();
        println!(
            "prefix {prefix_tox:.1} vs target {target}: {branch:?} → [{}]",
            shown.join(", ")
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> toxctl::Result<()> {
    run_example()
}
