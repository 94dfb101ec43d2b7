//! Success counting and the exact binomial bound.
//!
//! A trial succeeds when the outcomes are equal and the labels are not both
//! 2, or the outcomes differ and both labels are 2. With labels drawn as
//! fair independent coins each trial, any local strategy (memory included)
//! succeeds with conditional probability at most 3/4 given the past, so the
//! success count `S_N` is dominated by `Bin(N, 3/4)`.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::grid::Outcome;
use crate::harness::{FourPointSettings, RunLog, SettingMode, TestOrientation, TrialRecord};

use super::chsh::{cell_index, CELL_LABELS};
use super::StatsError;

pub const LOCAL_SUCCESS_BOUND: f64 = 0.75;

/// Terms this far below the peak (in natural log) no longer change the sum
/// at double precision.
const LN_CUTOFF: f64 = 45.0;

fn check_args(n: u64, p: f64, x: u64) -> Result<(), StatsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StatsError::InvalidProbability(p));
    }
    if x > n + 1 {
        return Err(StatsError::InvalidThreshold { x, limit: n + 1 });
    }
    Ok(())
}

fn ln_term(n: u64, p: f64, k: u64) -> f64 {
    let mut t = ln_binomial(n, k);
    if k > 0 {
        t += k as f64 * p.ln();
    }
    if k < n {
        t += (n - k) as f64 * (-p).ln_1p();
    }
    t
}

/// `ln P(Bin(n, p) >= x)`, summed in log space outward from the largest
/// term of the tail.
pub fn ln_binomial_tail(n: u64, p: f64, x: u64) -> Result<f64, StatsError> {
    check_args(n, p, x)?;
    if x == 0 {
        return Ok(0.0);
    }
    if x > n || p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let mode = (((n + 1) as f64 * p).floor() as u64).min(n);
    let peak = mode.max(x);
    let ln_peak = ln_term(n, p, peak);
    let mut sum = 1.0;
    let mut k = peak + 1;
    while k <= n {
        let d = ln_term(n, p, k) - ln_peak;
        if d < -LN_CUTOFF {
            break;
        }
        sum += d.exp();
        k += 1;
    }
    let mut k = peak;
    while k > x {
        k -= 1;
        let d = ln_term(n, p, k) - ln_peak;
        if d < -LN_CUTOFF {
            break;
        }
        sum += d.exp();
    }
    Ok((ln_peak + sum.ln()).min(0.0))
}

/// `P(Bin(n, p) >= x)`. Underflows to zero below about `1e-308`; use
/// [`log10_binomial_tail`] for the magnitude.
pub fn binomial_tail(n: u64, p: f64, x: u64) -> Result<f64, StatsError> {
    ln_binomial_tail(n, p, x).map(f64::exp)
}

pub fn log10_binomial_tail(n: u64, p: f64, x: u64) -> Result<f64, StatsError> {
    ln_binomial_tail(n, p, x).map(|l| l / std::f64::consts::LN_10)
}

/// `P(Bin(n, p) <= x)`, as the upper tail of the mirrored variable.
pub fn binomial_lower_tail(n: u64, p: f64, x: u64) -> Result<f64, StatsError> {
    check_args(n, p, x)?;
    if x >= n {
        return Ok(1.0);
    }
    binomial_tail(n, 1.0 - p, n - x)
}

/// The success rule on the outcomes as given.
pub fn is_success(alice_label: u8, bob_label: u8, x: Outcome, y: Outcome) -> bool {
    let both_two = alice_label == 2 && bob_label == 2;
    (x == y) != both_two
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellTally {
    pub alice_label: u8,
    pub bob_label: u8,
    pub trials: u64,
    pub successes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuccessCounts {
    pub trials: u64,
    pub successes: u64,
    pub cells: [CellTally; 4],
    /// Trials outside the four configured pairs; not counted.
    pub unmatched: u64,
    pub orientation: TestOrientation,
}

pub fn success_count_trials(
    trials: &[TrialRecord],
    settings: &FourPointSettings,
    orientation: TestOrientation,
) -> SuccessCounts {
    let mut cells =
        CELL_LABELS.map(|(alice_label, bob_label)| CellTally { alice_label, bob_label, trials: 0, successes: 0 });
    let mut unmatched = 0;
    for t in trials {
        let Some((la, lb)) = settings.labels(t.a, t.b) else {
            unmatched += 1;
            continue;
        };
        let y = match orientation {
            TestOrientation::AsRecorded => t.y,
            TestOrientation::BobFlipped => -t.y,
        };
        let cell = &mut cells[cell_index(la, lb)];
        cell.trials += 1;
        cell.successes += is_success(la, lb, t.x, y) as u64;
    }
    SuccessCounts {
        trials: cells.iter().map(|c| c.trials).sum(),
        successes: cells.iter().map(|c| c.successes).sum(),
        cells,
        unmatched,
        orientation,
    }
}

/// Counts successes under the run's pre-registered orientation.
pub fn success_count(log: &RunLog) -> SuccessCounts {
    success_count_trials(&log.trials, &log.config.four_point, log.config.orientation)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub successes: u64,
    pub trials: u64,
    pub success_rate: Option<f64>,
    /// The threshold the tail is evaluated at (the observed `S_N`).
    pub threshold: u64,
    pub null_p: f64,
    pub p_value: f64,
    pub log10_p_value: f64,
    pub cells: [CellTally; 4],
    pub unmatched: u64,
    pub orientation: TestOrientation,
}

/// `p_value = P(Bin(N, null_p) >= S_N)`.
pub fn bell_test(counts: &SuccessCounts, null_p: f64) -> Result<TestVerdict, StatsError> {
    let ln = ln_binomial_tail(counts.trials, null_p, counts.successes)?;
    Ok(TestVerdict {
        successes: counts.successes,
        trials: counts.trials,
        success_rate: (counts.trials > 0).then(|| counts.successes as f64 / counts.trials as f64),
        threshold: counts.successes,
        null_p,
        p_value: ln.exp(),
        log10_p_value: ln / std::f64::consts::LN_10,
        cells: counts.cells,
        unmatched: counts.unmatched,
        orientation: counts.orientation,
    })
}

/// The test for a logged run at the local bound. Four-point and uniform
/// runs qualify (in the latter, labels of the matching trials are still
/// fair independent coins); fixed-delta runs tie Bob's setting to Alice's
/// and are refused.
pub fn bell_test_log(log: &RunLog) -> Result<TestVerdict, StatsError> {
    if matches!(log.config.setting_mode, SettingMode::FixedDelta { .. }) {
        return Err(StatsError::NoRandomizedDesign);
    }
    bell_test(&success_count(log), LOCAL_SUCCESS_BOUND)
}
