use serde::Serialize;

use crate::prng::word_to_hex;

use super::{run_in_process, HarnessError, RunLog, Transport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub matches: bool,
    pub stored_digest: String,
    /// Digest of the trial lines as stored; differs from the header if the
    /// file was edited.
    pub recomputed_digest: String,
    pub replayed_digest: String,
    /// First trial number whose record differs from the replay.
    pub first_mismatch: Option<u64>,
}

/// Re-executes a logged run in-process from its configuration and compares
/// every trial.
pub fn replay_verify(log: &RunLog) -> Result<ReplayReport, HarnessError> {
    let mut config = log.config.clone();
    config.transport = Transport::InProcess;
    let replay = run_in_process(&config)?;
    let first_mismatch = log.trials.iter().zip(&replay.trials).find(|(a, b)| a != b).map(|(a, _)| a.n).or_else(|| {
        (log.trials.len() != replay.trials.len()).then(|| log.trials.len().min(replay.trials.len()) as u64 + 1)
    });
    let recomputed = log.recompute_digest();
    Ok(ReplayReport {
        matches: first_mismatch.is_none() && recomputed == log.digest && replay.digest == log.digest,
        stored_digest: word_to_hex(log.digest),
        recomputed_digest: word_to_hex(recomputed),
        replayed_digest: word_to_hex(replay.digest),
        first_mismatch,
    })
}
