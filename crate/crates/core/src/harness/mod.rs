//! The distributed experiment: run configuration, the referee/station/source
//! protocol, in-process and TCP transports, run logs and replay.
//!
//! Locality is structural. A station only ever sees its own setting, the
//! shared hidden variable for the trial and (in memory mode) its own
//! history. The referee sends no frame for trial `n + 1` until both outcomes
//! for trial `n` are in.
//!
//! The harness cannot rule out covert channels between adversarial external
//! station processes on one host (shared clock, filesystem); run them on
//! separate machines when that matters.

mod config;
mod in_process;
mod referee;
mod replay;
mod runlog;
mod settings;
mod station;
pub mod wire;

pub use config::{
    FourPointSettings, Oracle, RunConfig, SettingMode, TestOrientation, Transport, DEFAULT_SEED_LAMBDA,
    DEFAULT_SEED_SETTINGS,
};
pub use in_process::{run_in_process, StationRuntime};
pub use referee::{run_loopback, run_sockets, CapturedFrame, Direction, Referee, SocketRun, DEFAULT_TRIAL_TIMEOUT};
pub use replay::{replay_verify, ReplayReport};
pub use runlog::{digest_trials, Fnv1a, RunLog, TrialRecord, RUNLOG_FORMAT};
pub use settings::generate_settings;
pub use station::{run_source, run_station, StationSummary};
pub use wire::{Role, WireMessage, PROTOCOL_VERSION};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Model(#[from] crate::ModelError),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("timed out waiting for trial {n}")]
    Timeout { n: u64 },

    #[error("peer reported error `{code}`: {text}")]
    Remote { code: String, text: String },

    #[error("run log: {0}")]
    Log(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Convenience: run a configuration over its configured transport.
pub fn run(config: &RunConfig) -> Result<RunLog, HarnessError> {
    match config.transport {
        Transport::InProcess => run_in_process(config),
        Transport::Sockets => run_loopback(config).map(|r| r.log),
    }
}
