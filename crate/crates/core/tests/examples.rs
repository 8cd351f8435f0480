macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(calibrate_step, "calibrate_step.rs");
example!(lexicon_scoring, "lexicon_scoring.rs");
example!(train_ngram, "train_ngram.rs");
example!(toxicity_alignment, "toxicity_alignment.rs");
example!(interpretation_set, "interpretation_set.rs");
example!(lambda_ablation, "lambda_ablation.rs");
example!(spread_trend, "spread_trend.rs");
example!(evaluate_run, "evaluate_run.rs");
