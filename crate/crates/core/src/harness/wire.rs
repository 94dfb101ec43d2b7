//! Newline-delimited JSON frames exchanged between the referee, the two
//! stations and the hidden-variable source.
//!
//! Each frame is one JSON object on one line with a `type` tag:
//!
//! ```text
//! {"type":"HELLO","role":"alice","version":"bellharness/1"}
//! {"type":"CONFIG","n_trials":1000,"grid":360,"strategy":"sign",...}
//! {"type":"LAMBDA","n":1,"words":["…","…","…","…"]}
//! {"type":"TRIAL","n":1,"setting":269}
//! {"type":"OUTCOME","n":1,"value":-1}
//! {"type":"SYNC","n":1}
//! {"type":"END"}
//! {"type":"ERROR","code":"protocol","text":"…"}
//! ```

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::grid::SettingGrid;
use crate::prng::{word_from_hex, word_to_hex, HiddenVariable, HIDDEN_WORDS};

use super::HarnessError;

pub const PROTOCOL_VERSION: &str = "bellharness/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Referee,
    Alice,
    Bob,
    Source,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Role::Referee => "referee",
            Role::Alice => "alice",
            Role::Bob => "bob",
            Role::Source => "source",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Role {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "alice" => Ok(Role::Alice),
            "bob" => Ok(Role::Bob),
            "source" => Ok(Role::Source),
            "referee" => Ok(Role::Referee),
            other => Err(HarnessError::InvalidConfig(format!("unknown role `{other}`"))),
        }
    }
}

/// What a peer learns about the run. Stations never see the settings seed
/// or the other station's strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationConfig {
    pub n_trials: u64,
    pub grid: SettingGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default)]
    pub memory_mode: bool,
    #[serde(default)]
    pub virtual_source: bool,
    /// Present when stations or the source derive `λ_n` themselves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_lambda: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WireMessage {
    Hello { role: Role, version: String },
    Config(StationConfig),
    Lambda { n: u64, words: [String; HIDDEN_WORDS] },
    Trial { n: u64, setting: u32 },
    Outcome { n: u64, value: i64 },
    Sync { n: u64 },
    End {},
    Error { code: String, text: String },
}

impl WireMessage {
    pub fn hello(role: Role) -> Self {
        WireMessage::Hello { role, version: PROTOCOL_VERSION.to_string() }
    }

    pub fn lambda(lambda: &HiddenVariable) -> Self {
        WireMessage::Lambda { n: lambda.n, words: lambda.words.map(word_to_hex) }
    }

    pub fn error(code: &str, text: impl Into<String>) -> Self {
        WireMessage::Error { code: code.to_string(), text: text.into() }
    }

    /// Decodes the words of a `LAMBDA` frame.
    pub fn parse_lambda(n: u64, words: &[String; HIDDEN_WORDS]) -> Result<HiddenVariable, HarnessError> {
        let mut out = [0u64; HIDDEN_WORDS];
        for (slot, text) in out.iter_mut().zip(words) {
            *slot = word_from_hex(text)
                .ok_or_else(|| HarnessError::Protocol(format!("LAMBDA {n}: malformed word `{text}`")))?;
        }
        Ok(HiddenVariable::new(n, out))
    }

    pub fn to_line(&self) -> String {
        let mut line = serde_json::to_string(self).expect("wire messages always serialize");
        line.push('\n');
        line
    }

    pub fn from_line(line: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(line.trim_end())
            .map_err(|e| HarnessError::Protocol(format!("malformed frame `{}`: {e}", line.trim_end())))
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<(), HarnessError> {
        out.write_all(self.to_line().as_bytes())?;
        out.flush()?;
        Ok(())
    }

    /// Reads the next frame; `None` at end of stream.
    pub fn read_from<R: BufRead>(input: &mut R) -> Result<Option<Self>, HarnessError> {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        Self::from_line(&line).map(Some)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WireMessage::Hello { .. } => "HELLO",
            WireMessage::Config(_) => "CONFIG",
            WireMessage::Lambda { .. } => "LAMBDA",
            WireMessage::Trial { .. } => "TRIAL",
            WireMessage::Outcome { .. } => "OUTCOME",
            WireMessage::Sync { .. } => "SYNC",
            WireMessage::End {} => "END",
            WireMessage::Error { .. } => "ERROR",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_are_tagged() {
        assert_eq!(WireMessage::End {}.to_line(), "{\"type\":\"END\"}\n");
        assert_eq!(
            WireMessage::Trial { n: 3, setting: 269 }.to_line(),
            "{\"type\":\"TRIAL\",\"n\":3,\"setting\":269}\n"
        );
        assert_eq!(
            WireMessage::hello(Role::Alice).to_line(),
            "{\"type\":\"HELLO\",\"role\":\"alice\",\"version\":\"bellharness/1\"}\n"
        );
    }

    #[test]
    fn round_trip() {
        let lambda = HiddenVariable::new(9, [1, u64::MAX, 3, 4]);
        let msgs = vec![
            WireMessage::lambda(&lambda),
            WireMessage::Outcome { n: 9, value: -1 },
            WireMessage::Sync { n: 9 },
            WireMessage::error("timeout", "late"),
            WireMessage::Config(StationConfig {
                n_trials: 5,
                grid: SettingGrid::default(),
                strategy: Some("sign".into()),
                memory_mode: false,
                virtual_source: true,
                seed_lambda: Some(word_to_hex(42)),
            }),
        ];
        for m in msgs {
            assert_eq!(WireMessage::from_line(&m.to_line()).unwrap(), m);
        }
        if let WireMessage::Lambda { n, words } = WireMessage::lambda(&lambda) {
            assert_eq!(WireMessage::parse_lambda(n, &words).unwrap(), lambda);
        }
    }

    #[test]
    fn malformed_frames() {
        assert!(WireMessage::from_line("{\"type\":\"OUTCOME\",\"n\":1,\"value\":0.5}").is_err());
        assert!(WireMessage::from_line("not json").is_err());
        assert!(WireMessage::from_line("{\"type\":\"WHAT\"}").is_err());
        let bad = ["zz".to_string(), "0".repeat(16), "0".repeat(16), "0".repeat(16)];
        assert!(WireMessage::parse_lambda(1, &bad).is_err());
    }
}
