use serde::{Deserialize, Serialize};

use crate::grid::SettingGrid;
use crate::harness::{FourPointSettings, RunLog, TrialRecord};

use super::StatsError;

/// Cells in reporting order, Alice's label first.
pub const CELL_LABELS: [(u8, u8); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

/// The canonical score flips cell 22.
pub const CHSH_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellCorrelation {
    pub alice_label: u8,
    pub bob_label: u8,
    pub count: u64,
    pub sum_xy: i64,
    /// Mean of `x·y`; absent when the cell is empty.
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshCorrelations {
    pub cells: [CellCorrelation; 4],
    /// Trials whose settings are not one of the four configured pairs.
    pub unmatched: u64,
}

impl ChshCorrelations {
    /// `(rho11, rho12, rho21, rho22)`, failing on the first empty cell.
    pub fn rho(&self) -> Result<[f64; 4], StatsError> {
        let mut out = [0.0; 4];
        for (slot, cell) in out.iter_mut().zip(&self.cells) {
            *slot = cell.rho.ok_or(StatsError::MissingCell(cell.alice_label, cell.bob_label))?;
        }
        Ok(out)
    }
}

/// Cell index `0..4` for labels in `{1, 2}`.
pub(crate) fn cell_index(alice_label: u8, bob_label: u8) -> usize {
    (alice_label as usize - 1) * 2 + bob_label as usize - 1
}

pub fn estimate_from_trials(
    trials: &[TrialRecord],
    settings: &FourPointSettings,
) -> Result<ChshCorrelations, StatsError> {
    if trials.is_empty() {
        return Err(StatsError::EmptyLog);
    }
    let mut counts = [0u64; 4];
    let mut sums = [0i64; 4];
    let mut unmatched = 0;
    for t in trials {
        match settings.labels(t.a, t.b) {
            Some((la, lb)) => {
                let i = cell_index(la, lb);
                counts[i] += 1;
                sums[i] += (t.x * t.y) as i64;
            }
            None => unmatched += 1,
        }
    }
    let cells = std::array::from_fn(|i| {
        let (alice_label, bob_label) = CELL_LABELS[i];
        CellCorrelation {
            alice_label,
            bob_label,
            count: counts[i],
            sum_xy: sums[i],
            rho: (counts[i] > 0).then(|| sums[i] as f64 / counts[i] as f64),
        }
    });
    Ok(ChshCorrelations { cells, unmatched })
}

/// Per-cell mean of `x·y` over every trial of the log. No trial is dropped
/// or reweighted.
pub fn estimate_correlations(log: &RunLog) -> Result<ChshCorrelations, StatsError> {
    estimate_from_trials(&log.trials, &log.config.four_point)
}

pub fn chsh_from_rho(rho: [f64; 4]) -> f64 {
    rho.iter().zip(CHSH_SIGNS).map(|(r, s)| r * s).sum()
}

/// `S = rho11 + rho12 + rho21 - rho22`.
pub fn chsh_score(c: &ChshCorrelations) -> Result<f64, StatsError> {
    c.rho().map(chsh_from_rho)
}

/// Mean of `x·y` among trials whose settings are `offset` steps apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetCorrelation {
    pub offset: usize,
    pub degrees: f64,
    pub count: u64,
    pub mean_xy: f64,
}

/// Empirical correlation grouped by the offset from Bob's to Alice's
/// setting; empty offsets are omitted.
pub fn correlation_by_offset(trials: &[TrialRecord], grid: &SettingGrid) -> Vec<OffsetCorrelation> {
    let m = grid.points();
    let mut counts = vec![0u64; m];
    let mut sums = vec![0i64; m];
    for t in trials {
        let d = grid.offset(t.b, t.a);
        counts[d] += 1;
        sums[d] += (t.x * t.y) as i64;
    }
    (0..m)
        .filter(|&d| counts[d] > 0)
        .map(|d| OffsetCorrelation {
            offset: d,
            degrees: 360.0 * d as f64 / m as f64,
            count: counts[d],
            mean_xy: sums[d] as f64 / counts[d] as f64,
        })
        .collect()
}

/// Writes a curve as CSV with header `offset,degrees,count,mean_xy`.
pub fn write_offset_csv<W: std::io::Write>(curve: &[OffsetCorrelation], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in curve {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_offset_csv<R: std::io::Read>(input: R) -> Result<Vec<OffsetCorrelation>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Outcome;

    fn settings() -> FourPointSettings {
        FourPointSettings::figure_one(SettingGrid::default()).unwrap()
    }

    #[test]
    fn equal_outcomes_give_unit_correlations() {
        let fp = settings();
        let trials: Vec<_> = (0..40u64)
            .map(|n| {
                let (a, b) = fp.pair((n % 2) as usize, (n / 2 % 2) as usize);
                let x = if n % 3 == 0 { Outcome::Plus } else { Outcome::Minus };
                TrialRecord { n: n + 1, a, b, x, y: x }
            })
            .collect();
        let c = estimate_from_trials(&trials, &fp).unwrap();
        assert_eq!(c.rho().unwrap(), [1.0; 4]);
        assert_eq!(c.unmatched, 0);
    }

    #[test]
    fn score_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((chsh_from_rho([-r, -r, -r, r]) + 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(chsh_from_rho([-0.5, -0.5, -0.5, 0.5]), -2.0);
        assert_eq!(chsh_from_rho([-1.0, -1.0, -1.0, 1.0]), -4.0);
    }

    #[test]
    fn offset_curve_round_trip() {
        let curve = vec![
            OffsetCorrelation { offset: 45, degrees: 45.0, count: 3, mean_xy: -1.0 / 3.0 },
            OffsetCorrelation { offset: 90, degrees: 90.0, count: 7, mean_xy: 0.1 + 0.2 },
        ];
        let mut buf = Vec::new();
        write_offset_csv(&curve, &mut buf).unwrap();
        assert!(buf.starts_with(b"offset,degrees,count,mean_xy\n"));
        assert_eq!(read_offset_csv(buf.as_slice()).unwrap(), curve);
    }

    #[test]
    fn empty_and_missing() {
        let fp = settings();
        assert_eq!(estimate_from_trials(&[], &fp), Err(StatsError::EmptyLog));
        let (a, b) = fp.pair(0, 0);
        let t = TrialRecord { n: 1, a, b, x: Outcome::Plus, y: Outcome::Plus };
        let c = estimate_from_trials(&[t], &fp).unwrap();
        assert_eq!(c.cells[1].rho, None);
        assert_eq!(chsh_score(&c), Err(StatsError::MissingCell(1, 2)));
    }
}
