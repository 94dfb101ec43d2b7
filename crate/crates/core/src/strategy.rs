//! Local hidden-variable strategies.
//!
//! A strategy is a deterministic measurement function `A(setting, λ) → ±1`.
//! Stations only ever call it with their own setting, the shared draw `λ_n`
//! and, when memory is enabled for the run, their own past settings and
//! outcomes.
//!
//! Built-in names: `sign`, `const-plus`, `const-minus`, `cos-coin` and the
//! history-dependent `memory-flip`. Any name may be prefixed with `neg:` to
//! negate its output; `antipodal` as Bob's strategy means `neg:<alice>`.

use std::fmt;
use std::sync::Arc;

use crate::grid::{Outcome, SettingGrid, SettingIndex};
use crate::prng::{prng_next, scale_word, unit_f64, HiddenVariable, SplitMix64};
use crate::ModelError;

pub const BUILTIN_STRATEGIES: &[&str] = &["sign", "const-plus", "const-minus", "cos-coin", "memory-flip"];

pub const ANTIPODAL: &str = "antipodal";
const NEG_PREFIX: &str = "neg:";

/// One entry of a station's own history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StationEvent {
    pub setting: SettingIndex,
    pub outcome: Outcome,
}

pub trait LocalStrategy: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Whether the strategy reads its station's history when given one.
    fn memory_mode(&self) -> bool {
        false
    }

    fn eval(&self, setting: SettingIndex, lambda: &HiddenVariable) -> Outcome;

    /// Evaluation with the station's own history. Memoryless strategies
    /// ignore it.
    fn eval_with_history(&self, setting: SettingIndex, lambda: &HiddenVariable, _history: &[StationEvent]) -> Outcome {
        self.eval(setting, lambda)
    }
}

/// Grid offset `φ(λ)` selected uniformly by the first hidden word.
pub fn phase_index(grid: &SettingGrid, lambda: &HiddenVariable) -> usize {
    scale_word(lambda.words[0], grid.points())
}

/// A hidden variable whose first word selects grid offset `shift`; lets the
/// phase-driven built-ins be enumerated exactly over all offsets.
pub fn lambda_for_shift(grid: &SettingGrid, shift: usize, n: u64) -> HiddenVariable {
    let m = grid.points() as u128;
    let word = ((shift as u128) << 64).div_ceil(m) as u64;
    HiddenVariable::new(n, [word, 0, 0, 0])
}

/// `sign(cos(u - φ))` with ties resolved to `+1`, where `u` is the grid
/// angle of `setting` and `φ` the grid angle at `phase`.
pub fn sign_outcome(grid: &SettingGrid, setting: SettingIndex, phase: usize) -> Outcome {
    let d = (setting.get() + grid.points() - phase % grid.points()) % grid.points();
    Outcome::from_sign(grid.cos_sign(d))
}

#[derive(Debug, Clone)]
pub struct SignStrategy {
    grid: SettingGrid,
}

impl SignStrategy {
    pub fn new(grid: SettingGrid) -> Self {
        SignStrategy { grid }
    }
}

impl LocalStrategy for SignStrategy {
    fn name(&self) -> &str {
        "sign"
    }

    fn eval(&self, setting: SettingIndex, lambda: &HiddenVariable) -> Outcome {
        sign_outcome(&self.grid, setting, phase_index(&self.grid, lambda))
    }
}

#[derive(Debug, Clone)]
pub struct ConstStrategy {
    outcome: Outcome,
}

impl ConstStrategy {
    pub fn new(outcome: Outcome) -> Self {
        ConstStrategy { outcome }
    }
}

impl LocalStrategy for ConstStrategy {
    fn name(&self) -> &str {
        match self.outcome {
            Outcome::Plus => "const-plus",
            Outcome::Minus => "const-minus",
        }
    }

    fn eval(&self, _setting: SettingIndex, _lambda: &HiddenVariable) -> Outcome {
        self.outcome
    }
}

/// `+1` with probability `(1 + cos(u - φ))/2`, the coin being a hash of the
/// second hidden word and the setting. Antipodal pairs reach only about
/// `-cos(θ)/2` off the diagonal.
#[derive(Debug, Clone)]
pub struct CosCoinStrategy {
    grid: SettingGrid,
}

impl CosCoinStrategy {
    pub fn new(grid: SettingGrid) -> Self {
        CosCoinStrategy { grid }
    }
}

impl LocalStrategy for CosCoinStrategy {
    fn name(&self) -> &str {
        "cos-coin"
    }

    fn eval(&self, setting: SettingIndex, lambda: &HiddenVariable) -> Outcome {
        let m = self.grid.points();
        let d = (setting.get() + m - phase_index(&self.grid, lambda)) % m;
        let (_, coin) = prng_next(lambda.words[1] ^ (setting.get() as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
        if unit_f64(coin) < 0.5 * (1.0 + self.grid.cos_steps(d)) {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

/// The sign model, flipped whenever the station's previous outcome was
/// `+1`. Used to exercise memory-mode runs.
#[derive(Debug, Clone)]
pub struct MemoryFlipStrategy {
    sign: SignStrategy,
}

impl MemoryFlipStrategy {
    pub fn new(grid: SettingGrid) -> Self {
        MemoryFlipStrategy { sign: SignStrategy::new(grid) }
    }
}

impl LocalStrategy for MemoryFlipStrategy {
    fn name(&self) -> &str {
        "memory-flip"
    }

    fn memory_mode(&self) -> bool {
        true
    }

    fn eval(&self, setting: SettingIndex, lambda: &HiddenVariable) -> Outcome {
        self.sign.eval(setting, lambda)
    }

    fn eval_with_history(&self, setting: SettingIndex, lambda: &HiddenVariable, history: &[StationEvent]) -> Outcome {
        let base = self.sign.eval(setting, lambda);
        if history.last().is_some_and(|e| e.outcome == Outcome::Plus) {
            -base
        } else {
            base
        }
    }
}

#[derive(Debug)]
pub struct Negated {
    name: String,
    inner: Box<dyn LocalStrategy>,
}

impl LocalStrategy for Negated {
    fn name(&self) -> &str {
        &self.name
    }

    fn memory_mode(&self) -> bool {
        self.inner.memory_mode()
    }

    fn eval(&self, setting: SettingIndex, lambda: &HiddenVariable) -> Outcome {
        -self.inner.eval(setting, lambda)
    }

    fn eval_with_history(&self, setting: SettingIndex, lambda: &HiddenVariable, history: &[StationEvent]) -> Outcome {
        -self.inner.eval_with_history(setting, lambda, history)
    }
}

/// Looks up a strategy by registry name.
pub fn builtin(name: &str, grid: SettingGrid) -> Result<Box<dyn LocalStrategy>, ModelError> {
    if let Some(inner) = name.strip_prefix(NEG_PREFIX) {
        return Ok(Box::new(Negated { name: name.to_string(), inner: builtin(inner, grid)? }));
    }
    Ok(match name {
        "sign" => Box::new(SignStrategy::new(grid)),
        "const-plus" => Box::new(ConstStrategy::new(Outcome::Plus)),
        "const-minus" => Box::new(ConstStrategy::new(Outcome::Minus)),
        "cos-coin" => Box::new(CosCoinStrategy::new(grid)),
        "memory-flip" => Box::new(MemoryFlipStrategy::new(grid)),
        other => return Err(ModelError::UnknownStrategy(other.to_string())),
    })
}

/// Canonical form of a strategy name: double negations removed and
/// `neg:const-plus` written as `const-minus` (and vice versa).
pub fn canonical_name(name: &str) -> String {
    let mut negations = 0;
    let mut base = name;
    while let Some(rest) = base.strip_prefix(NEG_PREFIX) {
        negations += 1;
        base = rest;
    }
    let flip = |b: &str| match b {
        "const-plus" => "const-minus".to_string(),
        "const-minus" => "const-plus".to_string(),
        other => format!("{NEG_PREFIX}{other}"),
    };
    if negations % 2 == 0 {
        base.to_string()
    } else {
        flip(base)
    }
}

/// Resolves Bob's strategy name against Alice's (`antipodal` → `neg:alice`).
pub fn resolve_bob_name(alice: &str, bob: &str) -> String {
    if bob == ANTIPODAL {
        canonical_name(&format!("{NEG_PREFIX}{alice}"))
    } else {
        bob.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct StrategyPair {
    pub alice: Arc<dyn LocalStrategy>,
    pub bob: Arc<dyn LocalStrategy>,
    /// Bob's strategy is the pointwise negation of Alice's.
    pub antipodal: bool,
}

impl StrategyPair {
    pub fn from_names(alice: &str, bob: &str, grid: SettingGrid) -> Result<Self, ModelError> {
        let bob = resolve_bob_name(alice, bob);
        let antipodal = canonical_name(&format!("{NEG_PREFIX}{alice}")) == canonical_name(&bob);
        Ok(StrategyPair { alice: Arc::from(builtin(alice, grid)?), bob: Arc::from(builtin(&bob, grid)?), antipodal })
    }

    /// Checks `bob = -alice` on the full grid for `lambdas`; returns the
    /// first counterexample.
    pub fn check_antipodal<'a>(
        &self,
        grid: &SettingGrid,
        lambdas: impl IntoIterator<Item = &'a HiddenVariable>,
    ) -> Option<(SettingIndex, HiddenVariable)> {
        for lambda in lambdas {
            for j in grid.indices() {
                if self.bob.eval(j, lambda) != -self.alice.eval(j, lambda) {
                    return Some((j, *lambda));
                }
            }
        }
        None
    }
}

/// Draws `count` hidden variables from a plain generator; test and
/// diagnostic helper.
pub fn sample_lambdas(seed: u64, count: usize) -> Vec<HiddenVariable> {
    let mut rng = SplitMix64::new(seed);
    (1..=count as u64).map(|n| HiddenVariable::new(n, std::array::from_fn(|_| rng.next_u64()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> SettingGrid {
        SettingGrid::default()
    }

    #[test]
    fn sign_examples() {
        let g = grid();
        let zero = g.index_from_degrees(0.0).unwrap();
        let pi = g.index_from_degrees(180.0).unwrap();
        let phase_zero = zero.get();
        assert_eq!(sign_outcome(&g, zero, phase_zero), Outcome::Plus);
        assert_eq!(sign_outcome(&g, pi, phase_zero), Outcome::Minus);
        // quarter turn is a tie
        let quarter = g.index_from_degrees(90.0).unwrap();
        assert_eq!(sign_outcome(&g, quarter, phase_zero), Outcome::Plus);
    }

    #[test]
    fn lambda_for_shift_hits_every_offset() {
        let g = grid();
        for shift in 0..g.points() {
            assert_eq!(phase_index(&g, &lambda_for_shift(&g, shift, 1)), shift);
        }
        let small = SettingGrid::new(6).unwrap();
        for shift in 0..6 {
            assert_eq!(phase_index(&small, &lambda_for_shift(&small, shift, 1)), shift);
        }
    }

    #[test]
    fn registry() {
        for name in BUILTIN_STRATEGIES {
            assert_eq!(builtin(name, grid()).unwrap().name(), *name);
        }
        assert!(matches!(builtin("nope", grid()), Err(ModelError::UnknownStrategy(_))));
        assert_eq!(builtin("neg:sign", grid()).unwrap().name(), "neg:sign");
        assert!(builtin("memory-flip", grid()).unwrap().memory_mode());
        assert!(builtin("neg:memory-flip", grid()).unwrap().memory_mode());
    }

    #[test]
    fn names_resolve() {
        assert_eq!(resolve_bob_name("sign", "antipodal"), "neg:sign");
        assert_eq!(resolve_bob_name("neg:sign", "antipodal"), "sign");
        assert_eq!(resolve_bob_name("const-plus", "antipodal"), "const-minus");
        assert_eq!(resolve_bob_name("sign", "cos-coin"), "cos-coin");
        assert!(StrategyPair::from_names("const-plus", "const-minus", grid()).unwrap().antipodal);
        assert!(!StrategyPair::from_names("sign", "sign", grid()).unwrap().antipodal);
    }

    #[test]
    fn antipodal_pairs_hold_on_full_sweep() {
        let g = grid();
        let lambdas = sample_lambdas(9, 100);
        for name in BUILTIN_STRATEGIES {
            let pair = StrategyPair::from_names(name, ANTIPODAL, g).unwrap();
            assert!(pair.antipodal);
            assert_eq!(pair.check_antipodal(&g, &lambdas), None, "{name}");
        }
        let not = StrategyPair::from_names("sign", "sign", g).unwrap();
        assert!(not.check_antipodal(&g, &lambdas).is_some());
    }

    #[test]
    fn memory_flip_reads_history() {
        let g = grid();
        let s = MemoryFlipStrategy::new(g);
        let lambda = sample_lambdas(3, 1)[0];
        let j = g.index(10).unwrap();
        let base = s.eval(j, &lambda);
        let one_plus = [StationEvent { setting: j, outcome: Outcome::Plus }];
        assert_eq!(s.eval_with_history(j, &lambda, &one_plus), -base);
        assert_eq!(s.eval_with_history(j, &lambda, &[]), base);
    }

    proptest! {
        #[test]
        fn builtins_are_deterministic(j in 0usize..360, words in any::<[u64; 4]>(), which in 0usize..5) {
            let g = grid();
            let s = builtin(BUILTIN_STRATEGIES[which], g).unwrap();
            let lambda = HiddenVariable::new(1, words);
            let j = g.index(j).unwrap();
            prop_assert_eq!(s.eval(j, &lambda), s.eval(j, &lambda));
        }
    }
}
