//! The nonlocal singlet reference oracle.
//!
//! Not a local strategy: the sampler sees both settings at once. It is the
//! ground truth the harness compares local strategies against, with uniform
//! marginals and `E[xy] = -cos(a - b)`.

use crate::grid::{Outcome, SettingGrid, SettingIndex};
use crate::prng::SplitMix64;

/// `cos(a - b)` for two grid settings.
pub fn setting_cos(grid: &SettingGrid, a: SettingIndex, b: SettingIndex) -> f64 {
    grid.cos_steps(grid.offset(b, a))
}

/// Draws one outcome pair: `x` is a fair coin and `y = -x` with probability
/// `(1 + cos(a - b))/2`, otherwise `y = x`.
pub fn singlet_sample(
    grid: &SettingGrid,
    a: SettingIndex,
    b: SettingIndex,
    rng: &mut SplitMix64,
) -> (Outcome, Outcome) {
    let x = if rng.next_u64() >> 63 == 0 { Outcome::Plus } else { Outcome::Minus };
    let opposite = rng.next_f64() < 0.5 * (1.0 + setting_cos(grid, a, b));
    (x, if opposite { -x } else { x })
}

/// Exact `p(x, y | a, b) = (1 - xy·cos(a - b))/4`.
pub fn singlet_probability(grid: &SettingGrid, a: SettingIndex, b: SettingIndex, x: Outcome, y: Outcome) -> f64 {
    0.25 * (1.0 - (x * y) as f64 * setting_cos(grid, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(grid: &SettingGrid, deg: f64) -> SettingIndex {
        grid.index_from_degrees(deg).unwrap()
    }

    #[test]
    fn equal_settings_always_opposite() {
        let g = SettingGrid::default();
        let mut rng = SplitMix64::new(5);
        for _ in 0..10_000 {
            let (x, y) = singlet_sample(&g, at(&g, 30.0), at(&g, 30.0), &mut rng);
            assert_eq!(y, -x);
        }
    }

    #[test]
    fn opposite_settings_always_equal() {
        let g = SettingGrid::default();
        let mut rng = SplitMix64::new(6);
        for _ in 0..10_000 {
            let (x, y) = singlet_sample(&g, at(&g, 0.0), at(&g, 180.0), &mut rng);
            assert_eq!(y, x);
        }
    }

    #[test]
    fn quarter_turn_probability() {
        let g = SettingGrid::default();
        let (x, y) = (Outcome::Plus, Outcome::Plus);
        let equal = singlet_probability(&g, at(&g, 0.0), at(&g, 45.0), x, y)
            + singlet_probability(&g, at(&g, 0.0), at(&g, 45.0), -x, -y);
        assert!((equal - 0.146_446_609_406_726_2).abs() < 1e-12);
        let total: f64 = [Outcome::Plus, Outcome::Minus]
            .iter()
            .flat_map(|&x| [Outcome::Plus, Outcome::Minus].map(move |y| (x, y)))
            .map(|(x, y)| singlet_probability(&g, at(&g, 10.0), at(&g, 77.0), x, y))
            .sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn independent_at_right_angle() {
        let g = SettingGrid::default();
        let mut rng = SplitMix64::new(11);
        let n = 200_000;
        let mut sum = 0i64;
        for _ in 0..n {
            let (x, y) = singlet_sample(&g, at(&g, 0.0), at(&g, 90.0), &mut rng);
            sum += (x * y) as i64;
        }
        assert!((sum as f64 / n as f64).abs() < 0.012);
    }
}
