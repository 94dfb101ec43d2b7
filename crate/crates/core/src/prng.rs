//! The shared pseudo-random stream.
//!
//! Everything random in a run comes from splitmix64 with fixed constants, so
//! any implementation (including external stations written in other
//! languages) can reproduce the hidden-variable and settings streams from the
//! seed alone. Per-trial state is derived by mixing `(seed, domain, n)`, which
//! gives random access into both streams.

use serde::{Deserialize, Serialize};

use crate::ModelError;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;

/// Number of 64-bit words in one hidden-variable draw.
pub const HIDDEN_WORDS: usize = 4;

/// Domain tags keep the settings stream independent of the hidden-variable
/// stream even when both use the same seed.
pub const LAMBDA_DOMAIN: u64 = 0;
pub const SETTINGS_DOMAIN: u64 = 0x5345_5454_494E_4753; // "SETTINGS"

/// One splitmix64 step: returns `(new_state, output)`.
#[inline]
pub fn prng_next(state: u64) -> (u64, u64) {
    let state = state.wrapping_add(GAMMA);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(MIX1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX2);
    (state, z ^ (z >> 31))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let (state, out) = prng_next(self.state);
        self.state = state;
        out
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }

    /// Uniform in `0..bound` by multiply-high.
    pub fn next_below(&mut self, bound: usize) -> usize {
        scale_word(self.next_u64(), bound)
    }
}

/// Maps a word onto `0..bound` as `⌊word · bound / 2^64⌋`.
#[inline]
pub fn scale_word(word: u64, bound: usize) -> usize {
    ((word as u128 * bound as u128) >> 64) as usize
}

#[inline]
pub fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Starting state for trial `n` of the stream identified by `(seed, domain)`.
///
/// Both mixing steps are bijections of their input, so distinct `n` give
/// distinct trial states for a fixed seed.
pub fn trial_state(seed: u64, domain: u64, n: u64) -> u64 {
    let (_, key) = prng_next(seed ^ domain);
    prng_next(key ^ n).1
}

/// The words for trial `n` of a stream.
pub fn stream_words(seed: u64, domain: u64, n: u64) -> [u64; HIDDEN_WORDS] {
    let mut rng = SplitMix64::new(trial_state(seed, domain, n));
    std::array::from_fn(|_| rng.next_u64())
}

/// One draw `λ_n` of the shared randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HiddenVariable {
    pub n: u64,
    pub words: [u64; HIDDEN_WORDS],
}

impl HiddenVariable {
    pub fn new(n: u64, words: [u64; HIDDEN_WORDS]) -> Self {
        HiddenVariable { n, words }
    }

    /// A generator seeded from the draw, for strategies that need more than
    /// the four words.
    pub fn expand(&self) -> SplitMix64 {
        SplitMix64::new(self.words[0] ^ self.words[3].rotate_left(17))
    }
}

/// `λ_n` for the run seeded with `seed`. Computed directly from `(seed, n)`.
pub fn hidden_stream(seed: u64, n: u64) -> Result<HiddenVariable, ModelError> {
    if n == 0 {
        return Err(ModelError::ZeroTrial);
    }
    Ok(HiddenVariable::new(n, stream_words(seed, LAMBDA_DOMAIN, n)))
}

/// Lowercase, zero-padded 16-digit hex as used in golden files and on the wire.
pub fn word_to_hex(word: u64) -> String {
    format!("{word:016x}")
}

pub fn word_from_hex(text: &str) -> Option<u64> {
    if text.len() != 16 || !text.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        return None;
    }
    u64::from_str_radix(text, 16).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_outputs_seed_zero() {
        let (s1, o1) = prng_next(0);
        assert_eq!(o1, 0xE220_A839_7B1D_CDAF);
        let (_, o2) = prng_next(s1);
        assert_eq!(o2, 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn zero_trial_rejected() {
        assert_eq!(hidden_stream(1, 0), Err(ModelError::ZeroTrial));
    }

    #[test]
    fn domains_are_separated() {
        for n in 1..100 {
            assert_ne!(stream_words(42, LAMBDA_DOMAIN, n), stream_words(42, SETTINGS_DOMAIN, n));
        }
    }

    #[test]
    fn hex_words() {
        assert_eq!(word_to_hex(42), "000000000000002a");
        assert_eq!(word_from_hex("000000000000002a"), Some(42));
        assert_eq!(word_from_hex("000000000000002A"), None);
        assert_eq!(word_from_hex("2a"), None);
    }

    proptest! {
        #[test]
        fn prng_is_pure(state in any::<u64>()) {
            prop_assert_eq!(prng_next(state), prng_next(state));
        }

        #[test]
        fn hidden_stream_is_deterministic(seed in any::<u64>(), n in 1u64..u64::MAX) {
            prop_assert_eq!(hidden_stream(seed, n).unwrap(), hidden_stream(seed, n).unwrap());
        }

        #[test]
        fn scale_word_in_range(word in any::<u64>(), bound in 1usize..100_000) {
            prop_assert!(scale_word(word, bound) < bound);
        }
    }
}
