//! Spectral impossibility certificate for an exact `-k·cos θ` correlation.
//!
//! For antipodal strategies `C[t] = -Σ_k E|Ã(k)|² cos(2πkt/M)`. Matching
//! `-k·cos θ` exactly pins `E|Ã(±1)|² = k/2` and every other mode to zero,
//! so the total mass is `k`. Parseval fixes the total at 1, ruling out every
//! `k < 1`; for `k = 1` each side needs mass `1/2`, more than the largest
//! `|Ã(1)|²` any `±1` table has.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::SettingGrid;

use super::dft::{dft, twiddles};
use super::{FourierError, FunctionTable};

/// Largest grid searched exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 20;

const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ExtremumSearch {
    /// Every `±1` table was evaluated.
    Exhaustive {
        tables: u64,
        argmax_count: usize,
        /// All maximizers are cyclic shifts or negations of the balanced
        /// half-plane table.
        argmax_are_half_planes: bool,
    },
    /// Grid too large; the half-plane value is reported without proof.
    HalfPlaneCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum InfeasibilityReason {
    /// `C[0] = -1` for every antipodal pair, but the target has `C[0] = -k`.
    PerfectAnticorrelation { required_c0: f64, forced_c0: f64 },
    /// The target needs total spectral mass `k`; Parseval gives exactly 1.
    ParsevalDeficit { required_total: f64, available_total: f64, deficit: f64 },
    /// The target needs `k/2` at `k = ±1`; no table reaches it.
    FirstCoefficientBound { required_per_side: f64, max_per_side: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub target_amplitude: f64,
    pub grid_points: usize,
    pub required_mass_per_side: f64,
    pub parseval_deficit: f64,
    pub max_first_coefficient: f64,
    pub max_mass_per_side: f64,
    pub search: ExtremumSearch,
    pub binding: InfeasibilityReason,
    pub reasons: Vec<InfeasibilityReason>,
    pub feasible: bool,
}

/// Largest `|Ã(1)|` over all `±1` tables on `grid`: exhaustive up to
/// [`EXHAUSTIVE_LIMIT`] points, otherwise the half-plane value.
pub fn max_first_coefficient(grid: SettingGrid) -> (f64, ExtremumSearch) {
    let half_plane = FunctionTable::half_plane(grid);
    let candidate = dft(&half_plane).coeffs()[1].norm();
    let m = grid.points();
    if m > EXHAUSTIVE_LIMIT {
        return (candidate, ExtremumSearch::HalfPlaneCandidate);
    }

    // meet in the middle: Σ_j v_j ω^j split into low and high index halves
    let w = twiddles(m);
    let h = m / 2;
    let partial = |offset: usize, len: usize| -> Vec<Complex64> {
        (0..1u64 << len)
            .map(|bits| {
                (0..len).fold(Complex64::new(0.0, 0.0), |acc, i| {
                    let sign = if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
                    acc + w[offset + i] * sign
                })
            })
            .collect()
    };
    let low = partial(0, h);
    let high = partial(h, m - h);

    let mut best = 0.0f64;
    let mut argmax: Vec<u64> = Vec::new();
    for (hi_bits, hi) in high.iter().enumerate() {
        for (lo_bits, lo) in low.iter().enumerate() {
            let value = (lo + hi).norm() / m as f64;
            let bits = (hi_bits as u64) << h | lo_bits as u64;
            if value > best + TIE_TOL {
                best = value;
                argmax.clear();
                argmax.push(bits);
            } else if (value - best).abs() <= TIE_TOL {
                argmax.push(bits);
            }
        }
    }

    let to_bits = |t: &FunctionTable| -> u64 {
        t.values().iter().enumerate().fold(0u64, |acc, (j, &v)| if v > 0 { acc | 1 << j } else { acc })
    };
    let family: HashSet<u64> = (0..m)
        .flat_map(|s| {
            let shifted = half_plane.shifted(s);
            [to_bits(&shifted), to_bits(&shifted.negated())]
        })
        .collect();
    let argmax_are_half_planes = argmax.iter().all(|b| family.contains(b));
    (best, ExtremumSearch::Exhaustive { tables: 1u64 << m, argmax_count: argmax.len(), argmax_are_half_planes })
}

/// Closed form of the half-plane coefficient, `2/(M sin(π/M))`.
pub fn half_plane_first_coefficient(m: usize) -> f64 {
    2.0 / (m as f64 * (PI / m as f64).sin())
}

/// Certifies that no antipodal local strategy yields exactly `-k·cos θ`.
pub fn impossibility_certificate(k: f64, grid: SettingGrid) -> Result<CertificateReport, FourierError> {
    if !(0.0..=1.0).contains(&k) {
        return Err(FourierError::AmplitudeOutOfRange(k));
    }
    let (max_c1, search) = max_first_coefficient(grid);
    let max_mass = max_c1 * max_c1;
    let required = k / 2.0;

    let mut reasons = Vec::new();
    if k < 1.0 {
        reasons.push(InfeasibilityReason::PerfectAnticorrelation { required_c0: -k, forced_c0: -1.0 });
        reasons.push(InfeasibilityReason::ParsevalDeficit {
            required_total: k,
            available_total: 1.0,
            deficit: 1.0 - k,
        });
    }
    if required > max_mass {
        reasons
            .push(InfeasibilityReason::FirstCoefficientBound { required_per_side: required, max_per_side: max_mass });
    }
    let binding = if k == 0.0 {
        reasons[0]
    } else if k < 1.0 {
        reasons[1]
    } else {
        *reasons.last().expect("k = 1 always exceeds the first-coefficient bound")
    };
    Ok(CertificateReport {
        target_amplitude: k,
        grid_points: grid.points(),
        required_mass_per_side: required,
        parseval_deficit: 1.0 - k,
        max_first_coefficient: max_c1,
        max_mass_per_side: max_mass,
        search,
        binding,
        reasons,
        feasible: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_dft() {
        for m in [4, 8, 16, 20, 360] {
            let g = SettingGrid::new(m).unwrap();
            let direct = dft(&FunctionTable::half_plane(g)).coeffs()[1].norm();
            assert!((direct - half_plane_first_coefficient(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn exhaustive_small_grid() {
        let (best, search) = max_first_coefficient(SettingGrid::new(8).unwrap());
        assert!((best - half_plane_first_coefficient(8)).abs() < 1e-12);
        assert_eq!(search, ExtremumSearch::Exhaustive { tables: 256, argmax_count: 8, argmax_are_half_planes: true });
    }

    #[test]
    fn binding_reasons() {
        let g = SettingGrid::new(16).unwrap();
        let full = impossibility_certificate(1.0, g).unwrap();
        assert!(!full.feasible);
        assert!(matches!(full.binding, InfeasibilityReason::FirstCoefficientBound { .. }));
        assert!(full.max_mass_per_side < 0.5);

        let half = impossibility_certificate(0.5, g).unwrap();
        assert!(matches!(half.binding, InfeasibilityReason::ParsevalDeficit { deficit, .. } if deficit == 0.5));

        let zero = impossibility_certificate(0.0, g).unwrap();
        assert!(matches!(zero.binding, InfeasibilityReason::PerfectAnticorrelation { .. }));

        assert!(impossibility_certificate(1.5, g).is_err());
        assert!(impossibility_certificate(-0.1, g).is_err());
    }

    #[test]
    fn large_grid_is_flagged() {
        let r = impossibility_certificate(1.0, SettingGrid::default()).unwrap();
        assert_eq!(r.search, ExtremumSearch::HalfPlaneCandidate);
        assert!((r.max_first_coefficient - 2.0 / PI).abs() < 1e-4);
    }
}
