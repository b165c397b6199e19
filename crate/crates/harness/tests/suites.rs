use bivar_harness::config::ExperimentConfig;
use bivar_harness::suites::{run_suite, SuiteError};

fn small(seed: u64) -> ExperimentConfig {
    ExperimentConfig { seed, trials: 5, grid: 32, ..ExperimentConfig::default() }
}

#[test]
fn identities_pass_on_any_seed() {
    for seed in [0, 1, 77, u64::MAX] {
        let checks = run_suite("identities", &small(seed)).unwrap();
        assert_eq!(checks.len(), 6);
        assert!(checks.iter().all(|c| c.pass), "seed {seed}: {checks:#?}");
    }
}

#[test]
fn exact_suites_pass_on_small_runs() {
    for suite in ["cz", "square", "interp", "counterexample"] {
        let checks = run_suite(suite, &small(3)).unwrap();
        assert!(checks.iter().filter(|c| c.gating).all(|c| c.pass), "{suite}");
    }
}

#[test]
fn tracked_constants_are_finite_and_nonnegative() {
    let cfg = small(5);
    for suite in ["domination", "carleson", "square", "sweep"] {
        for c in run_suite(suite, &cfg).unwrap() {
            if let Some((_, v)) = c.tracked {
                assert!(v.is_finite() && v >= 0.0, "{suite}/{}: {v}", c.name);
            }
        }
    }
}

#[test]
fn unknown_suite_and_bad_config_are_config_errors() {
    assert!(matches!(run_suite("plots", &small(0)), Err(SuiteError::Config(_))));
    let cfg = ExperimentConfig { l: 2.5, ..small(0) };
    assert!(matches!(run_suite("carleson", &cfg), Err(SuiteError::Config(_))));
}
