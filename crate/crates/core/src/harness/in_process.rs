use std::sync::Arc;

use crate::grid::{Outcome, SettingIndex};
use crate::prng::{hidden_stream, HiddenVariable};
use crate::singlet::singlet_sample;
use crate::strategy::{builtin, LocalStrategy, StationEvent};

use super::{generate_settings, HarnessError, Oracle, RunConfig, RunLog, TrialRecord};

/// One station's evaluator. It holds the strategy and, in memory mode, this
/// station's own history; nothing else is reachable from it.
#[derive(Debug)]
pub struct StationRuntime {
    strategy: Arc<dyn LocalStrategy>,
    memory_mode: bool,
    history: Vec<StationEvent>,
}

impl StationRuntime {
    pub fn new(strategy: Arc<dyn LocalStrategy>, memory_mode: bool) -> Self {
        StationRuntime { strategy, memory_mode, history: Vec::new() }
    }

    pub fn from_name(name: &str, config: &RunConfig) -> Result<Self, HarnessError> {
        Ok(Self::new(Arc::from(builtin(name, config.grid)?), config.memory_mode))
    }

    pub fn respond(&mut self, setting: SettingIndex, lambda: &HiddenVariable) -> Outcome {
        if !self.memory_mode {
            return self.strategy.eval(setting, lambda);
        }
        let outcome = self.strategy.eval_with_history(setting, lambda, &self.history);
        self.history.push(StationEvent { setting, outcome });
        outcome
    }
}

/// Runs all trials in this process.
pub fn run_in_process(config: &RunConfig) -> Result<RunLog, HarnessError> {
    config.validate()?;
    let mut trials = Vec::with_capacity(config.n_trials as usize);
    match config.oracle {
        Some(Oracle::Singlet) => {
            for n in 1..=config.n_trials {
                let (a, b) = generate_settings(config, n)?;
                let lambda = hidden_stream(config.seed_lambda, n)?;
                let (x, y) = singlet_sample(&config.grid, a, b, &mut lambda.expand());
                trials.push(TrialRecord { n, a, b, x, y });
            }
            Ok(RunLog::new(config.clone(), trials, true))
        }
        None => {
            let mut alice = StationRuntime::from_name(&config.alice, config)?;
            let mut bob = StationRuntime::from_name(&config.bob, config)?;
            for n in 1..=config.n_trials {
                let (a, b) = generate_settings(config, n)?;
                let lambda = hidden_stream(config.seed_lambda, n)?;
                let x = alice.respond(a, &lambda);
                let y = bob.respond(b, &lambda);
                trials.push(TrialRecord { n, a, b, x, y });
            }
            Ok(RunLog::new(config.clone(), trials, false))
        }
    }
}
