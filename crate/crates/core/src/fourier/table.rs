use crate::grid::{Outcome, SettingGrid};
use crate::prng::HiddenVariable;
use crate::strategy::{sign_outcome, LocalStrategy};

use super::FourierError;

/// A `±1` function on the setting grid, `values[j] = A(u_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    grid: SettingGrid,
    values: Vec<i8>,
}

impl FunctionTable {
    pub fn new(grid: SettingGrid, values: Vec<i8>) -> Result<Self, FourierError> {
        if values.len() != grid.points() {
            return Err(FourierError::LengthMismatch { expected: grid.points(), got: values.len() });
        }
        if let Some((index, &v)) = values.iter().enumerate().find(|(_, v)| v.abs() != 1) {
            return Err(FourierError::NotPlusMinusOne { index, value: v as i64 });
        }
        Ok(FunctionTable { grid, values })
    }

    pub fn constant(grid: SettingGrid, outcome: Outcome) -> Self {
        FunctionTable { grid, values: vec![outcome.value(); grid.points()] }
    }

    /// Table of `strategy(·, λ)`.
    pub fn from_strategy(grid: SettingGrid, strategy: &dyn LocalStrategy, lambda: &HiddenVariable) -> Self {
        let values = grid.indices().map(|j| strategy.eval(j, lambda).value()).collect();
        FunctionTable { grid, values }
    }

    /// `sign(cos u_j)` with ties at `±π/2` resolved to `+1`.
    pub fn sign_cos(grid: SettingGrid) -> Self {
        let zero = grid.points() / 2 - 1;
        let values = grid.indices().map(|j| sign_outcome(&grid, j, zero).value()).collect();
        FunctionTable { grid, values }
    }

    /// The balanced half-plane: `+1` for `u_j ∈ [-π/2, π/2)`, i.e. `sign(cos)`
    /// with the two ties split. Exactly half the grid is `+1`; this is the
    /// table that maximizes `|Ã(1)|`.
    pub fn half_plane(grid: SettingGrid) -> Self {
        let zero = grid.points() / 2 - 1;
        let m = grid.points();
        let values = grid
            .indices()
            .map(|j| {
                let d = (j.get() + m - zero) % m;
                if 4 * d < m || 4 * d >= 3 * m {
                    1
                } else {
                    -1
                }
            })
            .collect();
        FunctionTable { grid, values }
    }

    /// Cyclic shift: `values'[j] = values[j - shift]`.
    pub fn shifted(&self, shift: usize) -> Self {
        let m = self.values.len();
        let values = (0..m).map(|j| self.values[(j + m - shift % m) % m]).collect();
        FunctionTable { grid: self.grid, values }
    }

    pub fn negated(&self) -> Self {
        FunctionTable { grid: self.grid, values: self.values.iter().map(|v| -v).collect() }
    }

    pub fn grid(&self) -> SettingGrid {
        self.grid
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_tables() {
        let g = SettingGrid::new(4).unwrap();
        assert!(matches!(FunctionTable::new(g, vec![1, 1, 1]), Err(FourierError::LengthMismatch { .. })));
        assert!(matches!(
            FunctionTable::new(g, vec![1, 0, 1, 1]),
            Err(FourierError::NotPlusMinusOne { index: 1, value: 0 })
        ));
    }

    #[test]
    fn half_plane_is_balanced() {
        for m in [4, 8, 16, 360] {
            let g = SettingGrid::new(m).unwrap();
            let t = FunctionTable::half_plane(g);
            assert_eq!(t.values().iter().map(|&v| v as i64).sum::<i64>(), 0);
            // sign_cos has one extra +1 when M is a multiple of four
            let s: i64 = FunctionTable::sign_cos(g).values().iter().map(|&v| v as i64).sum();
            assert_eq!(s, if m % 4 == 0 { 2 } else { 0 });
        }
    }

    #[test]
    fn shift_roundtrip() {
        let g = SettingGrid::new(8).unwrap();
        let t = FunctionTable::new(g, vec![1, -1, -1, 1, 1, 1, -1, 1]).unwrap();
        assert_eq!(t.shifted(3).shifted(5), t);
        assert_eq!(t.shifted(1).values()[1], t.values()[0]);
    }
}
