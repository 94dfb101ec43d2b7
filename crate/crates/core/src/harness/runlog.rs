//! Persistent run logs.
//!
//! File layout (JSON lines, UTF-8):
//!
//! ```text
//! {"format":"bellharness-runlog/1","config":{…},"nonlocal":false,"digest":"…"}
//! {"n":1,"a":134,"b":179,"x":1,"y":-1}
//! …
//! ```
//!
//! Trial lines are written in exactly that field order with no spaces. The
//! digest is 64-bit FNV-1a over the concatenated trial lines, each including
//! its trailing `\n`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::grid::{Outcome, SettingIndex};
use crate::prng::{word_from_hex, word_to_hex};

use super::{HarnessError, RunConfig};

pub const RUNLOG_FORMAT: &str = "bellharness-runlog/1";

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: u64,
    pub a: SettingIndex,
    pub b: SettingIndex,
    pub x: Outcome,
    pub y: Outcome,
}

impl TrialRecord {
    /// Canonical line, newline included.
    pub fn line(&self) -> String {
        format!(
            "{{\"n\":{},\"a\":{},\"b\":{},\"x\":{},\"y\":{}}}\n",
            self.n,
            self.a,
            self.b,
            self.x.value(),
            self.y.value()
        )
    }
}

/// Incremental FNV-1a.
#[derive(Debug, Clone, Copy)]
pub struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Fnv1a(FNV_OFFSET)
    }
}

impl Fnv1a {
    pub fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

pub fn digest_trials(trials: &[TrialRecord]) -> u64 {
    let mut h = Fnv1a::default();
    for t in trials {
        h.update(t.line().as_bytes());
    }
    h.finish()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub config: RunConfig,
    pub trials: Vec<TrialRecord>,
    pub digest: u64,
    /// Outcomes came from the singlet oracle rather than two local stations.
    pub nonlocal: bool,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    config: RunConfig,
    nonlocal: bool,
    digest: String,
}

impl RunLog {
    pub fn new(config: RunConfig, trials: Vec<TrialRecord>, nonlocal: bool) -> Self {
        let digest = digest_trials(&trials);
        RunLog { config, trials, digest, nonlocal }
    }

    pub fn recompute_digest(&self) -> u64 {
        digest_trials(&self.trials)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), HarnessError> {
        let header = Header {
            format: RUNLOG_FORMAT.to_string(),
            config: self.config.clone(),
            nonlocal: self.nonlocal,
            digest: word_to_hex(self.digest),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for t in &self.trials {
            out.write_all(t.line().as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a log. The stored digest is kept as written; compare it with
    /// [`RunLog::recompute_digest`] to detect edits.
    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self, HarnessError> {
        let mut lines = input.lines();
        let first = lines.next().ok_or_else(|| HarnessError::Log("empty run log".into()))??;
        let header: Header = serde_json::from_str(&first)?;
        if header.format != RUNLOG_FORMAT {
            return Err(HarnessError::Log(format!("unsupported format `{}`", header.format)));
        }
        let digest = word_from_hex(&header.digest)
            .ok_or_else(|| HarnessError::Log(format!("bad digest `{}`", header.digest)))?;
        let mut trials = Vec::new();
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            trials.push(serde_json::from_str::<TrialRecord>(&line)?);
        }
        Ok(RunLog { config: header.config, trials, digest, nonlocal: header.nonlocal })
    }
}
