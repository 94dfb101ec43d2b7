use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::SettingGrid;
use crate::prng::hidden_stream;
use crate::strategy::LocalStrategy;

use super::correlation::correlation_from_power;
use super::dft::{dft, pairwise_sum, PowerPlan};
use super::{cosine_fit, CorrelationFunction, CosineFit, FourierError, FunctionTable};

/// λ-draws handled per work unit; fixed so the summation order does not
/// depend on the thread count.
const CHUNK: usize = 256;

/// Tolerance used when judging whether a spectrum reproduces `-cos θ`.
const EXACT_TOL: f64 = 1e-9;

/// Whether a (possibly averaged) power spectrum could produce exactly
/// `-cos θ` for an antipodal pair: that needs `power[±1] = 1/2` and nothing
/// anywhere else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactCosineCheck {
    pub required_mass_per_side: f64,
    pub observed_mass_plus1: f64,
    pub observed_mass_minus1: f64,
    /// Power outside `k = ±1`.
    pub mass_elsewhere: f64,
    /// `0.5 - min(power[1], power[M-1])`; positive means short of target.
    pub shortfall: f64,
    pub reproduces_negative_cosine: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub grid_points: usize,
    /// Number of tables averaged (1 for a single function).
    pub tables: usize,
    pub power: Vec<f64>,
    /// `[re, im]` pairs; only present for a single table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<[f64; 2]>>,
    pub parseval_residual: f64,
    /// `power[1] + power[M-1]`.
    pub mass_pm1: f64,
    pub cosine_fit: CosineFit,
    pub exact_cosine: ExactCosineCheck,
}

impl SpectrumReport {
    fn from_power(grid: SettingGrid, tables: usize, power: Vec<f64>, c: &CorrelationFunction) -> Self {
        let m = grid.points();
        let total = pairwise_sum(&power);
        let (p1, pm1) = (power[1], power[m - 1]);
        let elsewhere: f64 = power.iter().enumerate().filter(|&(k, _)| k != 1 && k != m - 1).map(|(_, p)| p).sum();
        let shortfall = 0.5 - p1.min(pm1);
        SpectrumReport {
            grid_points: m,
            tables,
            parseval_residual: (total - 1.0).abs(),
            mass_pm1: p1 + pm1,
            cosine_fit: cosine_fit(c),
            exact_cosine: ExactCosineCheck {
                required_mass_per_side: 0.5,
                observed_mass_plus1: p1,
                observed_mass_minus1: pm1,
                mass_elsewhere: elsewhere,
                shortfall,
                reproduces_negative_cosine: elsewhere < EXACT_TOL && shortfall.abs() < EXACT_TOL,
            },
            power,
            coeffs: None,
        }
    }

    /// Report for one function; the correlation is the antipodal one.
    pub fn for_table(table: &FunctionTable) -> (CorrelationFunction, Self) {
        let spectrum = dft(table);
        let c = correlation_from_power(table.grid(), spectrum.power());
        let mut report = Self::from_power(table.grid(), 1, spectrum.power().to_vec(), &c);
        report.coeffs = Some(spectrum.coeffs().iter().map(|z| [z.re, z.im]).collect());
        (c, report)
    }

    pub fn power_zero(&self) -> f64 {
        self.power[0]
    }
}

/// Averages the power spectra of `strategy(·, λ_n)` over `λ_1 … λ_{n_lambda}`
/// and returns the antipodal correlation `C(θ) = -Σ_k avg_power[k] e^{-ikθ}`
/// with its report.
pub fn expected_correlation(
    strategy: &dyn LocalStrategy,
    grid: SettingGrid,
    seed: u64,
    n_lambda: usize,
) -> Result<(CorrelationFunction, SpectrumReport), FourierError> {
    if strategy.memory_mode() {
        return Err(FourierError::MemoryStrategy(strategy.name().to_string()));
    }
    if n_lambda == 0 {
        return Err(FourierError::NoDraws);
    }
    let m = grid.points();
    let plan = PowerPlan::new(m);
    let chunks = n_lambda.div_ceil(CHUNK);
    let partials: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; m];
            let mut buffer = Vec::with_capacity(m);
            let start = c * CHUNK + 1;
            let end = ((c + 1) * CHUNK).min(n_lambda);
            for n in start..=end {
                let lambda = hidden_stream(seed, n as u64)?;
                let table = FunctionTable::from_strategy(grid, strategy, &lambda);
                plan.accumulate(&table, &mut buffer, &mut acc)?;
            }
            Ok(acc)
        })
        .collect::<Result<_, FourierError>>()?;

    let scale = 1.0 / n_lambda as f64;
    let power: Vec<f64> = (0..m)
        .map(|k| {
            let column: Vec<f64> = partials.iter().map(|p| p[k]).collect();
            pairwise_sum(&column) * scale
        })
        .collect();
    let c = correlation_from_power(grid, &power);
    let report = SpectrumReport::from_power(grid, n_lambda, power, &c);
    Ok((c, report))
}
