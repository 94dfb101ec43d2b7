//! The discrete setting circle and the `±1` outcome type.
//!
//! A grid of `M` points stands for the half-open circle `(-π, π]`; index `j`
//! maps to the angle `u_j = -π + 2π(j+1)/M`, so the last index is `π` and
//! index `M/2 - 1` is the zero angle. Angle differences are handled as whole
//! grid steps so that sign decisions never depend on floating-point `cos`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::ModelError;

pub const DEFAULT_GRID_POINTS: usize = 360;

/// A point on the setting grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SettingIndex(u32);

impl SettingIndex {
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SettingIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct SettingGrid {
    points: usize,
}

impl TryFrom<usize> for SettingGrid {
    type Error = ModelError;

    fn try_from(points: usize) -> Result<Self, ModelError> {
        SettingGrid::new(points)
    }
}

impl From<SettingGrid> for usize {
    fn from(grid: SettingGrid) -> usize {
        grid.points
    }
}

impl Default for SettingGrid {
    fn default() -> Self {
        SettingGrid { points: DEFAULT_GRID_POINTS }
    }
}

impl SettingGrid {
    pub fn new(points: usize) -> Result<Self, ModelError> {
        if points < 4 || !points.is_multiple_of(2) || points > u32::MAX as usize {
            return Err(ModelError::InvalidGrid(points));
        }
        Ok(SettingGrid { points })
    }

    /// Number of grid points `M`.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn index(&self, j: usize) -> Result<SettingIndex, ModelError> {
        if j >= self.points {
            return Err(ModelError::IndexOutOfRange { index: j, points: self.points });
        }
        Ok(SettingIndex(j as u32))
    }

    /// Index reduced modulo `M`; always valid.
    pub fn wrap(&self, j: i64) -> SettingIndex {
        SettingIndex(j.rem_euclid(self.points as i64) as u32)
    }

    pub fn indices(&self) -> impl Iterator<Item = SettingIndex> {
        (0..self.points as u32).map(SettingIndex)
    }

    /// The angle `u_j` in radians, in `(-π, π]`.
    pub fn angle(&self, j: SettingIndex) -> f64 {
        -PI + 2.0 * PI * (j.get() as f64 + 1.0) / self.points as f64
    }

    pub fn degrees(&self, j: SettingIndex) -> f64 {
        -180.0 + 360.0 * (j.get() as f64 + 1.0) / self.points as f64
    }

    /// Grid index of an angle given in degrees. The angle is reduced to
    /// `(-180, 180]` first and must land exactly on a grid point.
    pub fn index_from_degrees(&self, degrees: f64) -> Result<SettingIndex, ModelError> {
        let off = ModelError::OffGrid { degrees, points: self.points };
        if !degrees.is_finite() {
            return Err(off);
        }
        let mut reduced = degrees.rem_euclid(360.0);
        if reduced > 180.0 {
            reduced -= 360.0;
        }
        if reduced == -180.0 {
            reduced = 180.0;
        }
        let steps = (reduced + 180.0) * self.points as f64 / 360.0;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 || rounded < 1.0 {
            return Err(off);
        }
        self.index(rounded as usize - 1)
    }

    /// Number of whole steps in a difference of degrees; must be exact.
    pub fn steps_from_degrees(&self, degrees: f64) -> Result<usize, ModelError> {
        let steps = degrees * self.points as f64 / 360.0;
        let rounded = steps.round();
        if !steps.is_finite() || (steps - rounded).abs() > 1e-9 {
            return Err(ModelError::OffGrid { degrees, points: self.points });
        }
        Ok((rounded as i64).rem_euclid(self.points as i64) as usize)
    }

    /// Counter-clockwise step count from `from` to `to`, in `0..M`.
    pub fn offset(&self, from: SettingIndex, to: SettingIndex) -> usize {
        (to.get() + self.points - from.get()) % self.points
    }

    /// `θ_t = 2πt/M`, the angle spanned by `t` steps.
    pub fn theta(&self, steps: usize) -> f64 {
        2.0 * PI * steps as f64 / self.points as f64
    }

    /// Sign of `cos(2π d/M)` decided in integer arithmetic: `0` exactly at
    /// the quarter points.
    pub fn cos_sign(&self, steps: usize) -> i8 {
        let d = steps % self.points;
        let (q, m) = (4 * d, self.points);
        if q < m || q > 3 * m {
            1
        } else if q == m || q == 3 * m {
            0
        } else {
            -1
        }
    }

    /// `cos(2π d/M)`, exact at multiples of a quarter turn.
    pub fn cos_steps(&self, steps: usize) -> f64 {
        let d = steps % self.points;
        let m = self.points;
        if d == 0 {
            1.0
        } else if 2 * d == m {
            -1.0
        } else if 4 * d == m || 4 * d == 3 * m {
            0.0
        } else {
            let folded = d.min(m - d);
            (2.0 * PI * folded as f64 / m as f64).cos()
        }
    }
}

/// A measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Outcome {
    Minus,
    Plus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Minus => -1,
            Outcome::Plus => 1,
        }
    }

    /// `+1` for non-negative input, `-1` otherwise.
    pub fn from_sign(sign: i8) -> Self {
        if sign >= 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

impl TryFrom<i64> for Outcome {
    type Error = ModelError;

    fn try_from(value: i64) -> Result<Self, ModelError> {
        match value {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            other => Err(ModelError::InvalidOutcome(other)),
        }
    }
}

impl From<Outcome> for i64 {
    fn from(o: Outcome) -> i64 {
        o.value() as i64
    }
}

impl Neg for Outcome {
    type Output = Outcome;

    fn neg(self) -> Outcome {
        match self {
            Outcome::Minus => Outcome::Plus,
            Outcome::Plus => Outcome::Minus,
        }
    }
}

impl std::ops::Mul for Outcome {
    type Output = i8;

    fn mul(self, rhs: Outcome) -> i8 {
        self.value() * rhs.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(SettingGrid::new(2).is_err());
        assert!(SettingGrid::new(7).is_err());
        assert!(SettingGrid::new(4).is_ok());
        assert_eq!(SettingGrid::default().points(), 360);
    }

    #[test]
    fn angles_cover_half_open_circle() {
        let g = SettingGrid::new(360).unwrap();
        let last = g.index(359).unwrap();
        assert_eq!(g.angle(last), PI);
        let mut prev = f64::NEG_INFINITY;
        for j in g.indices() {
            let a = g.angle(j);
            assert!(a > prev && a > -PI && a <= PI);
            prev = a;
        }
        assert!(g.index(360).is_err());
    }

    #[test]
    fn degree_lookup() {
        let g = SettingGrid::default();
        assert_eq!(g.index_from_degrees(0.0).unwrap().get(), 179);
        assert_eq!(g.index_from_degrees(180.0).unwrap().get(), 359);
        assert_eq!(g.index_from_degrees(-180.0).unwrap().get(), 359);
        assert_eq!(g.index_from_degrees(-90.0).unwrap().get(), 89);
        assert_eq!(g.index_from_degrees(450.0).unwrap().get(), 269);
        assert!(g.index_from_degrees(0.5).is_err());
        for j in g.indices() {
            assert_eq!(g.index_from_degrees(g.degrees(j)).unwrap(), j);
        }
        let coarse = SettingGrid::new(8).unwrap();
        assert!(coarse.index_from_degrees(30.0).is_err());
        assert_eq!(coarse.index_from_degrees(45.0).unwrap().get(), 4);
    }

    #[test]
    fn cos_sign_matches_float_away_from_ties() {
        let g = SettingGrid::new(360).unwrap();
        for d in 0..360 {
            let s = g.cos_sign(d);
            if d == 90 || d == 270 {
                assert_eq!(s, 0);
                assert_eq!(g.cos_steps(d), 0.0);
            } else {
                assert_eq!(s as f64, g.theta(d).cos().signum());
            }
            assert!((g.cos_steps(d) - g.theta(d).cos()).abs() < 1e-12);
        }
        assert_eq!(g.cos_steps(180), -1.0);
    }

    #[test]
    fn outcome_algebra() {
        assert_eq!(-Outcome::Plus, Outcome::Minus);
        assert_eq!(Outcome::Plus * Outcome::Minus, -1);
        assert!(Outcome::try_from(0).is_err());
        assert_eq!(Outcome::from_sign(0), Outcome::Plus);
        let json = serde_json::to_string(&Outcome::Minus).unwrap();
        assert_eq!(json, "-1");
        assert!(serde_json::from_str::<Outcome>("2").is_err());
    }
}
