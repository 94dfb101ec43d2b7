use bellharness::harness::FourPointSettings;
use bellharness::singlet::{setting_cos, singlet_sample};
use bellharness::{SettingGrid, SplitMix64};

const SAMPLES: usize = 1_000_000;

fn moments(
    grid: &SettingGrid,
    a: bellharness::SettingIndex,
    b: bellharness::SettingIndex,
    seed: u64,
) -> (f64, f64, f64) {
    let mut rng = SplitMix64::new(seed);
    let (mut sx, mut sy, mut sxy) = (0i64, 0i64, 0i64);
    for _ in 0..SAMPLES {
        let (x, y) = singlet_sample(grid, a, b, &mut rng);
        sx += x.value() as i64;
        sy += y.value() as i64;
        sxy += (x * y) as i64;
    }
    let n = SAMPLES as f64;
    (sx as f64 / n, sy as f64 / n, sxy as f64 / n)
}

#[test]
fn figure_one_pairs() {
    let g = SettingGrid::default();
    let fp = FourPointSettings::figure_one(g).unwrap();
    for (i, seed) in [11u64, 12, 13, 14].into_iter().enumerate() {
        let (a, b) = fp.pair(i / 2, i % 2);
        let (mx, my, mxy) = moments(&g, a, b, seed);
        assert!(mx.abs() < 5e-3 && my.abs() < 5e-3, "marginals {mx} {my}");
        assert!((mxy + setting_cos(&g, a, b)).abs() < 5e-3, "cell {i}: {mxy}");
    }
}
