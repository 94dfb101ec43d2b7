//! Binomial tails against exact integer arithmetic.

use bellharness::stats::{binomial_lower_tail, binomial_tail, log10_binomial_tail};
use num_bigint::BigUint;

/// `ln(num / den)` for large integers, from their leading bits.
fn ln_ratio(num: &BigUint, den: &BigUint) -> f64 {
    fn ln_big(v: &BigUint) -> f64 {
        let bits = v.bits();
        let shift = bits.saturating_sub(64);
        let top = (v >> shift).iter_u64_digits().next().unwrap_or(0) as f64;
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_big(num) - ln_big(den)
}

/// `P(Bin(n, s/d) >= x)` as an exact ratio of integers.
fn exact_upper(n: u64, s: u64, d: u64, x: u64) -> (BigUint, BigUint) {
    let f = d - s;
    // term_k = C(n, k) s^k f^(n-k)
    let mut term = BigUint::from(f).pow(n as u32);
    let mut sum = BigUint::from(0u32);
    for k in 0..=n {
        if k >= x {
            sum += &term;
        }
        if k < n {
            term = term * (n - k) * s / ((k + 1) * f);
        }
    }
    (sum, BigUint::from(d).pow(n as u32))
}

#[test]
fn relative_error_on_spot_grid() {
    for &(n, s, d) in &[(200u64, 3u64, 4u64), (1000, 3, 4), (1000, 1, 2), (2000, 17, 20)] {
        for frac in [0.3, 0.5, 0.75, 0.8, 0.9, 0.95] {
            let x = (n as f64 * frac) as u64;
            let (num, den) = exact_upper(n, s, d, x);
            if num == BigUint::from(0u32) {
                continue;
            }
            let exact_ln = ln_ratio(&num, &den);
            if exact_ln < -50.0 * std::f64::consts::LN_10 {
                continue;
            }
            let got = log10_binomial_tail(n, s as f64 / d as f64, x).unwrap() * std::f64::consts::LN_10;
            assert!((got - exact_ln).abs() < 1e-6, "n={n} p={s}/{d} x={x}: {got} vs {exact_ln}");
        }
    }
}

#[test]
fn ten_thousand_trial_magnitudes() {
    let (num, den) = exact_upper(10_000, 3, 4, 8000);
    let exact = ln_ratio(&num, &den) / std::f64::consts::LN_10;
    let got = log10_binomial_tail(10_000, 0.75, 8000).unwrap();
    assert!((got - exact).abs() < 1e-6, "{got} vs {exact}");
    assert!((-33.0..=-27.0).contains(&got));

    // P(Bin(n, 17/20) <= 8000) = P(Bin(n, 3/20) >= 2000).
    let (num, den) = exact_upper(10_000, 3, 20, 2000);
    let exact = ln_ratio(&num, &den) / std::f64::consts::LN_10;
    let got = binomial_lower_tail(10_000, 0.85, 8000).unwrap().log10();
    assert!((got - exact).abs() < 1e-6, "{got} vs {exact}");
    assert!((-43.0..=-37.0).contains(&got));
}

#[test]
fn median_and_whole_support() {
    let p = binomial_tail(10_000, 0.75, 7500).unwrap();
    assert!(p > 0.4 && p < 0.6);
    assert_eq!(binomial_tail(10_000, 0.75, 0).unwrap(), 1.0);
}
