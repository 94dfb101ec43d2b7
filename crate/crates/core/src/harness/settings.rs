use crate::grid::SettingIndex;
use crate::prng::{scale_word, stream_words, SETTINGS_DOMAIN};

use super::{HarnessError, RunConfig, SettingMode};

/// Setting pair for trial `n`, a pure function of `(seed_settings, n)`.
///
/// Four-point mode takes Alice's label from bit 63 and Bob's from bit 62 of
/// the first settings word; the other modes scale words onto the grid.
pub fn generate_settings(config: &RunConfig, n: u64) -> Result<(SettingIndex, SettingIndex), HarnessError> {
    if n == 0 || n > config.n_trials {
        return Err(HarnessError::InvalidConfig(format!("trial {n} outside 1..={}", config.n_trials)));
    }
    let words = stream_words(config.seed_settings, SETTINGS_DOMAIN, n);
    let grid = config.grid;
    let m = grid.points();
    Ok(match config.setting_mode {
        SettingMode::FourPoint => {
            let la = (words[0] >> 63) as usize;
            let lb = (words[0] >> 62 & 1) as usize;
            config.four_point.pair(la, lb)
        }
        SettingMode::FixedDelta { delta_steps } => {
            let a = scale_word(words[0], m);
            (grid.index(a)?, grid.wrap(a as i64 - delta_steps as i64))
        }
        SettingMode::UniformIndependent => (grid.index(scale_word(words[0], m))?, grid.index(scale_word(words[1], m))?),
    })
}
