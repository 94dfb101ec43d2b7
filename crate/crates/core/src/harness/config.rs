use serde::{Deserialize, Serialize};

use crate::grid::{SettingGrid, SettingIndex};
use crate::strategy::{builtin, resolve_bob_name};

use super::HarnessError;

pub const DEFAULT_SEED_LAMBDA: u64 = 42;
pub const DEFAULT_SEED_SETTINGS: u64 = 43;

/// How setting pairs are drawn each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SettingMode {
    /// One of the four configured pairs, uniformly.
    FourPoint,
    /// Alice uniform on the grid, Bob `delta_steps` clockwise of her.
    FixedDelta { delta_steps: usize },
    /// Both uniform and independent.
    UniformIndependent,
}

/// The two settings per side, label 1 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourPointSettings {
    pub alice: [SettingIndex; 2],
    pub bob: [SettingIndex; 2],
}

impl FourPointSettings {
    /// Alice 90° (label 1) and 0° (label 2); Bob 45° and 135°. The singlet
    /// then has correlations `(-1, -1, -1, +1)/√2` in cells 11, 12, 21, 22.
    pub fn figure_one(grid: SettingGrid) -> Result<Self, HarnessError> {
        Self::from_degrees(grid, [90.0, 0.0], [45.0, 135.0])
    }

    pub fn from_degrees(grid: SettingGrid, alice: [f64; 2], bob: [f64; 2]) -> Result<Self, HarnessError> {
        let idx = |d: f64| grid.index_from_degrees(d).map_err(HarnessError::from);
        Ok(FourPointSettings { alice: [idx(alice[0])?, idx(alice[1])?], bob: [idx(bob[0])?, idx(bob[1])?] })
    }

    /// `(alice_label, bob_label)` in `{1, 2}` for a setting pair.
    pub fn labels(&self, a: SettingIndex, b: SettingIndex) -> Option<(u8, u8)> {
        let la = self.alice.iter().position(|&s| s == a)? as u8 + 1;
        let lb = self.bob.iter().position(|&s| s == b)? as u8 + 1;
        Some((la, lb))
    }

    /// Pair for labels `(i, j)`, counting from zero.
    pub fn pair(&self, alice_label: usize, bob_label: usize) -> (SettingIndex, SettingIndex) {
        (self.alice[alice_label], self.bob[bob_label])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    Singlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transport {
    #[default]
    InProcess,
    Sockets,
}

/// Sign convention fixed before the run for the success-count test.
///
/// The success rule rewards equal outcomes except on the `22` cell. For
/// experiments aiming at `-cos θ` the natural pre-registered statistic
/// flips Bob's outcome first; both choices keep the `Bin(N, 3/4)` bound,
/// since a local relabelling of one station's outputs is itself local.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestOrientation {
    AsRecorded,
    #[default]
    BobFlipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_trials: u64,
    #[serde(with = "hex_word")]
    pub seed_lambda: u64,
    #[serde(with = "hex_word")]
    pub seed_settings: u64,
    pub grid: SettingGrid,
    pub setting_mode: SettingMode,
    pub four_point: FourPointSettings,
    pub alice: String,
    pub bob: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Oracle>,
    pub memory_mode: bool,
    pub transport: Transport,
    /// Stations derive `λ_n` from the shared seed instead of receiving it
    /// from a source process.
    pub virtual_source: bool,
    pub orientation: TestOrientation,
}

impl RunConfig {
    /// Defaults: Figure-1 four-point settings on a 360-point grid, sign
    /// strategy against its antipode, seeds 42/43.
    pub fn new(n_trials: u64) -> Self {
        let grid = SettingGrid::default();
        RunConfig {
            n_trials,
            seed_lambda: DEFAULT_SEED_LAMBDA,
            seed_settings: DEFAULT_SEED_SETTINGS,
            grid,
            setting_mode: SettingMode::FourPoint,
            four_point: FourPointSettings::figure_one(grid).expect("360-point grid holds the standard angles"),
            alice: "sign".to_string(),
            bob: "neg:sign".to_string(),
            oracle: None,
            memory_mode: false,
            transport: Transport::InProcess,
            virtual_source: false,
            orientation: TestOrientation::default(),
        }
    }

    /// Sets both strategies; `antipodal` for Bob resolves against Alice.
    pub fn with_strategies(mut self, alice: &str, bob: &str) -> Self {
        self.bob = resolve_bob_name(alice, bob);
        self.alice = alice.to_string();
        self.oracle = None;
        self
    }

    pub fn with_oracle(mut self, oracle: Oracle) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn with_mode(mut self, mode: SettingMode) -> Self {
        self.setting_mode = mode;
        self
    }

    pub fn with_seeds(mut self, seed_lambda: u64, seed_settings: u64) -> Self {
        self.seed_lambda = seed_lambda;
        self.seed_settings = seed_settings;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        if self.n_trials == 0 {
            return bad("n_trials must be at least 1".into());
        }
        let m = self.grid.points();
        let fp = &self.four_point;
        if fp.alice.iter().chain(&fp.bob).any(|s| s.get() >= m) {
            return bad("four-point settings lie outside the grid".into());
        }
        if fp.alice[0] == fp.alice[1] || fp.bob[0] == fp.bob[1] {
            return bad("the two settings of a station must differ".into());
        }
        if let SettingMode::FixedDelta { delta_steps } = self.setting_mode {
            if delta_steps >= m {
                return bad(format!("delta of {delta_steps} steps exceeds the {m}-point grid"));
            }
        }
        match self.oracle {
            Some(Oracle::Singlet) => {
                if self.transport == Transport::Sockets {
                    return bad("the singlet oracle is nonlocal and only runs in-process".into());
                }
            }
            None => {
                builtin(&self.alice, self.grid)?;
                builtin(&self.bob, self.grid)?;
            }
        }
        Ok(())
    }
}

/// Seeds travel as 16-digit lowercase hex strings so that JSON readers
/// without 64-bit integers keep every bit.
pub(crate) mod hex_word {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::prng::{word_from_hex, word_to_hex};

    pub fn serialize<S: Serializer>(word: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&word_to_hex(*word))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let text = String::deserialize(d)?;
        word_from_hex(&text).ok_or_else(|| D::Error::custom(format!("`{text}` is not a 16-digit lowercase hex word")))
    }
}
