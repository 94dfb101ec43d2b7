use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{FourierError, FunctionTable};

/// DFT coefficients `coeffs[k] = (1/M) Σ_j e^{-2πi·kj/M} values[j]` and the
/// power spectrum `|coeffs[k]|²`. Index `M - k` holds the `-k` coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
    power: Vec<f64>,
}

impl Spectrum {
    /// Wraps arbitrary coefficients; these need not come from a real table.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        let power = coeffs.iter().map(|c| c.norm_sqr()).collect();
        Spectrum { coeffs, power }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ_k |coeffs[k]|²`.
    pub fn total_power(&self) -> f64 {
        pairwise_sum(&self.power)
    }

    /// Largest `|coeffs[M-k] - conj(coeffs[k])|`.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let m = self.coeffs.len();
        (0..m).map(|k| (self.coeffs[(m - k) % m] - self.coeffs[k].conj()).norm()).fold(0.0, f64::max)
    }
}

/// `e^{-2πi·r/M}` for `r in 0..M`, built from exact index residues so every
/// twiddle carries a single rounding.
pub(crate) fn twiddles(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|r| {
            let phase = -2.0 * PI * r as f64 / m as f64;
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect()
}

/// Direct `O(M²)` transform.
pub fn dft(table: &FunctionTable) -> Spectrum {
    let m = table.len();
    let w = twiddles(m);
    let values = table.values();
    let scale = 1.0 / m as f64;
    let coeffs = (0..m)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in values.iter().enumerate() {
                acc += w[(k * j) % m] * v as f64;
            }
            acc * scale
        })
        .collect();
    Spectrum::from_coeffs(coeffs)
}

/// `values[j] = Σ_k coeffs[k] e^{2πi·kj/M}`.
pub fn inverse_dft(spectrum: &Spectrum) -> Vec<Complex64> {
    let m = spectrum.len();
    let w = twiddles(m);
    (0..m)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, c) in spectrum.coeffs().iter().enumerate() {
                acc += c * w[(k * j) % m].conj();
            }
            acc
        })
        .collect()
}

/// Reusable FFT plan for computing many power spectra of one grid size.
pub struct PowerPlan {
    fft: Arc<dyn Fft<f64>>,
    m: usize,
}

impl PowerPlan {
    pub fn new(m: usize) -> Self {
        PowerPlan { fft: FftPlanner::new().plan_fft_forward(m), m }
    }

    /// Power spectrum of `table`, accumulated into `out`.
    pub fn accumulate(
        &self,
        table: &FunctionTable,
        buffer: &mut Vec<Complex64>,
        out: &mut [f64],
    ) -> Result<(), FourierError> {
        if table.len() != self.m {
            return Err(FourierError::LengthMismatch { expected: self.m, got: table.len() });
        }
        buffer.clear();
        buffer.extend(table.values().iter().map(|&v| Complex64::new(v as f64, 0.0)));
        self.fft.process(buffer);
        let scale = 1.0 / (self.m * self.m) as f64;
        for (o, c) in out.iter_mut().zip(buffer.iter()) {
            *o += c.norm_sqr() * scale;
        }
        Ok(())
    }
}

/// Order-fixed pairwise summation.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Outcome, SettingGrid};
    use proptest::prelude::*;

    fn random_table(m: usize, bits: &[bool]) -> FunctionTable {
        let g = SettingGrid::new(m).unwrap();
        FunctionTable::new(g, bits.iter().take(m).map(|&b| if b { 1 } else { -1 }).collect()).unwrap()
    }

    #[test]
    fn constant_table() {
        let g = SettingGrid::new(12).unwrap();
        let s = dft(&FunctionTable::constant(g, Outcome::Plus));
        assert!((s.coeffs()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for c in &s.coeffs()[1..] {
            assert!(c.norm() < 1e-15);
        }
    }

    #[test]
    fn sign_cos_first_coefficient() {
        let g = SettingGrid::new(360).unwrap();
        let s = dft(&FunctionTable::sign_cos(g));
        // brute-force sum of the same series in a different order
        let brute: f64 = {
            let t = FunctionTable::sign_cos(g);
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &v) in t.values().iter().enumerate().rev() {
                let ph = 2.0 * PI * j as f64 / 360.0;
                re += v as f64 * ph.cos();
                im -= v as f64 * ph.sin();
            }
            (re * re + im * im).sqrt() / 360.0
        };
        assert!((s.coeffs()[1].norm() - 2.0 / PI).abs() < 1e-3);
        assert!((s.coeffs()[1].norm() - brute).abs() < 1e-12);
    }

    #[test]
    fn fft_power_matches_direct() {
        let g = SettingGrid::new(360).unwrap();
        let t = FunctionTable::sign_cos(g).shifted(17);
        let plan = PowerPlan::new(360);
        let mut out = vec![0.0; 360];
        plan.accumulate(&t, &mut Vec::new(), &mut out).unwrap();
        for (a, b) in out.iter().zip(dft(&t).power()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn parseval_m16(bits in proptest::collection::vec(any::<bool>(), 16)) {
            let s = dft(&random_table(16, &bits));
            prop_assert!((s.total_power() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn round_trip_and_symmetry(bits in proptest::collection::vec(any::<bool>(), 8)) {
            let t = random_table(8, &bits);
            let s = dft(&t);
            prop_assert!(s.conjugate_asymmetry() < 1e-12);
            for (r, &v) in inverse_dft(&s).iter().zip(t.values()) {
                prop_assert!((r.re - v as f64).abs() < 1e-10 && r.im.abs() < 1e-10);
            }
        }
    }
}
