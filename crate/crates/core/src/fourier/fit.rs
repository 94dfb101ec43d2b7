use serde::{Deserialize, Serialize};

use super::CorrelationFunction;

/// Least-squares amplitude of a negative cosine in a correlation curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineFit {
    pub k_hat: f64,
    /// Root-mean-square of `C[t] + k_hat·cos θ_t`.
    pub residual: f64,
}

/// Projects `C` onto `-cos θ`: `k_hat = -(2/M) Σ_t C[t] cos θ_t`.
pub fn cosine_fit(c: &CorrelationFunction) -> CosineFit {
    let m = c.values.len();
    let cosines: Vec<f64> = (0..m).map(|t| c.grid.cos_steps(t)).collect();
    let k_hat = -2.0 / m as f64 * c.values.iter().zip(&cosines).map(|(v, cs)| v * cs).sum::<f64>();
    let mse = c.values.iter().zip(&cosines).map(|(v, cs)| (v + k_hat * cs).powi(2)).sum::<f64>() / m as f64;
    CosineFit { k_hat, residual: mse.sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{autocorrelation_direct, FunctionTable};
    use crate::grid::SettingGrid;

    #[test]
    fn recovers_planted_amplitudes() {
        let g = SettingGrid::default();
        for k in [0.0, 0.25, 0.5, std::f64::consts::FRAC_1_SQRT_2, 1.0] {
            let fit = cosine_fit(&CorrelationFunction::negative_cosine(g, k));
            assert!((fit.k_hat - k).abs() < 1e-12);
            assert!(fit.residual < 1e-12);
        }
    }

    #[test]
    fn non_round_amplitude() {
        let g = SettingGrid::default();
        let fit = cosine_fit(&CorrelationFunction::negative_cosine(g, 0.7));
        assert!((fit.k_hat - 0.7).abs() < 1e-12);
    }

    #[test]
    fn triangle_wave_first_harmonic() {
        let g = SettingGrid::default();
        let c = autocorrelation_direct(&FunctionTable::sign_cos(g));
        // brute-force projection of the continuous triangle wave's first harmonic: 8/π²
        let fit = cosine_fit(&c);
        assert!((fit.k_hat - 8.0 / std::f64::consts::PI.powi(2)).abs() < 1e-3);
        assert!(fit.residual > 0.05);
    }
}
