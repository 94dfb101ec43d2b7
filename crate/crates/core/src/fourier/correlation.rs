use serde::{Deserialize, Serialize};

use crate::grid::SettingGrid;

use super::dft::{dft, twiddles};
use super::{FourierError, FunctionTable, Spectrum};

/// Correlation `C[t]` of the outcome product at setting offset
/// `θ_t = 2πt/M`, `t in 0..M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFunction {
    pub grid: SettingGrid,
    pub values: Vec<f64>,
}

impl CorrelationFunction {
    pub fn new(grid: SettingGrid, values: Vec<f64>) -> Result<Self, FourierError> {
        if values.len() != grid.points() {
            return Err(FourierError::LengthMismatch { expected: grid.points(), got: values.len() });
        }
        Ok(CorrelationFunction { grid, values })
    }

    /// `-k·cos θ_t` sampled on the grid.
    pub fn negative_cosine(grid: SettingGrid, amplitude: f64) -> Self {
        let values = (0..grid.points()).map(|t| -amplitude * grid.cos_steps(t)).collect();
        CorrelationFunction { grid, values }
    }

    pub fn theta(&self, t: usize) -> f64 {
        self.grid.theta(t)
    }

    /// Largest pointwise difference.
    pub fn max_abs_diff(&self, other: &CorrelationFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn check_grids(a: &FunctionTable, b: &FunctionTable) -> Result<(), FourierError> {
    if a.grid() != b.grid() {
        return Err(FourierError::GridMismatch { left: a.grid().points(), right: b.grid().points() });
    }
    Ok(())
}

/// `C[t] = -(1/M) Σ_j A[j]·A[(j-t) mod M]`: the antipodal pair `B = -A`.
pub fn autocorrelation_direct(table: &FunctionTable) -> CorrelationFunction {
    let mut c = correlate_direct(table, table);
    c.values.iter_mut().for_each(|v| *v = -*v);
    c
}

/// `C[t] = (1/M) Σ_j A[j]·B[(j-t) mod M]` for an arbitrary pair.
pub fn cross_spectrum(a: &FunctionTable, b: &FunctionTable) -> Result<CorrelationFunction, FourierError> {
    check_grids(a, b)?;
    Ok(correlate_direct(a, b))
}

fn correlate_direct(a: &FunctionTable, b: &FunctionTable) -> CorrelationFunction {
    let m = a.len();
    let (av, bv) = (a.values(), b.values());
    let values = (0..m)
        .map(|t| {
            let sum: i64 = (0..m).map(|j| (av[j] * bv[(j + m - t) % m]) as i64).sum();
            sum as f64 / m as f64
        })
        .collect();
    CorrelationFunction { grid: a.grid(), values }
}

/// `C[t] = -Σ_k |Ã(k)|² e^{-ikθ_t}` from the power spectrum alone. Rejects
/// spectra that are not conjugate-symmetric.
pub fn autocorrelation_spectral(grid: SettingGrid, spectrum: &Spectrum) -> Result<CorrelationFunction, FourierError> {
    if spectrum.len() != grid.points() {
        return Err(FourierError::LengthMismatch { expected: grid.points(), got: spectrum.len() });
    }
    let asym = spectrum.conjugate_asymmetry();
    if asym > 1e-9 {
        return Err(FourierError::NotRealSource(asym));
    }
    Ok(correlation_from_power(grid, spectrum.power()))
}

/// `-Σ_k power[k] cos(2πkt/M)`; the imaginary part vanishes for symmetric
/// power spectra.
pub(crate) fn correlation_from_power(grid: SettingGrid, power: &[f64]) -> CorrelationFunction {
    let m = grid.points();
    let values = (0..m).map(|t| -(0..m).map(|k| power[k] * grid.cos_steps(k * t % m)).sum::<f64>()).collect();
    CorrelationFunction { grid, values }
}

/// `C[t] = Re Σ_k Ã(k)·conj(B̃(k))·e^{ikθ_t}`, the spectral route of
/// [`cross_spectrum`].
pub fn cross_correlation_spectral(a: &FunctionTable, b: &FunctionTable) -> Result<CorrelationFunction, FourierError> {
    check_grids(a, b)?;
    let m = a.len();
    let (sa, sb) = (dft(a), dft(b));
    let w = twiddles(m);
    let products: Vec<_> = sa.coeffs().iter().zip(sb.coeffs()).map(|(x, y)| x * y.conj()).collect();
    let values = (0..m).map(|t| products.iter().enumerate().map(|(k, p)| (p * w[k * t % m].conj()).re).sum()).collect();
    Ok(CorrelationFunction { grid: a.grid(), values })
}
