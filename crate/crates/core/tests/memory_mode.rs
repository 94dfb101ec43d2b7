//! Stations that read their own history stay inside the local bound.

use std::sync::Arc;

use bellharness::harness::{
    generate_settings, run_in_process, RunConfig, StationRuntime, TestOrientation, TrialRecord,
};
use bellharness::prng::HiddenVariable;
use bellharness::stats::{bell_test_log, success_count_trials};
use bellharness::strategy::{LocalStrategy, StationEvent};
use bellharness::{hidden_stream, Outcome, SettingIndex};

const N: u64 = 100_000;

fn bound(n: u64) -> f64 {
    0.75 + 5.0 * (0.75f64 * 0.25 / n as f64).sqrt()
}

/// Tries to exploit memory: repeats its previous outcome when its setting
/// repeats, otherwise alternates depending on the parity of its history.
#[derive(Debug)]
struct Streaky {
    flip: bool,
}

impl LocalStrategy for Streaky {
    fn name(&self) -> &str {
        "streaky"
    }

    fn memory_mode(&self) -> bool {
        true
    }

    fn eval(&self, setting: SettingIndex, lambda: &HiddenVariable) -> Outcome {
        self.eval_with_history(setting, lambda, &[])
    }

    fn eval_with_history(&self, setting: SettingIndex, lambda: &HiddenVariable, history: &[StationEvent]) -> Outcome {
        let base = match history.last() {
            Some(prev) if prev.setting == setting => prev.outcome,
            _ if (history.len() + (lambda.words[1] & 1) as usize).is_multiple_of(2) => Outcome::Plus,
            _ => Outcome::Minus,
        };
        if self.flip {
            -base
        } else {
            base
        }
    }
}

#[test]
fn history_dependent_strategy_respects_bound() {
    let mut config = RunConfig::new(N);
    config.memory_mode = true;
    let mut alice = StationRuntime::new(Arc::new(Streaky { flip: false }), true);
    let mut bob = StationRuntime::new(Arc::new(Streaky { flip: true }), true);
    let trials: Vec<TrialRecord> = (1..=N)
        .map(|n| {
            let (a, b) = generate_settings(&config, n).unwrap();
            let lambda = hidden_stream(config.seed_lambda, n).unwrap();
            TrialRecord { n, a, b, x: alice.respond(a, &lambda), y: bob.respond(b, &lambda) }
        })
        .collect();
    for orientation in [TestOrientation::AsRecorded, TestOrientation::BobFlipped] {
        let counts = success_count_trials(&trials, &config.four_point, orientation);
        let rate = counts.successes as f64 / counts.trials as f64;
        assert!(rate <= bound(counts.trials), "{orientation:?}: {rate}");
    }
}

#[test]
fn builtin_memory_strategy_respects_bound() {
    let mut config = RunConfig::new(N).with_strategies("memory-flip", "antipodal");
    config.memory_mode = true;
    let verdict = bell_test_log(&run_in_process(&config).unwrap()).unwrap();
    assert!(verdict.success_rate.unwrap() <= bound(verdict.trials));
    assert!(verdict.p_value > 1e-4);
}
