//! Fine's criterion against a direct search for a mixture of the sixteen
//! deterministic local strategies.

use bellharness::stats::{fine_check, ProbabilityTable};
use bellharness::SplitMix64;
use minilp::{ComparisonOp, OptimizationDirection, Problem};

/// Response functions of one side: outcome for label 1 and label 2.
const RESPONSES: [[i8; 2]; 4] = [[1, 1], [1, -1], [-1, 1], [-1, -1]];
const PAIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Minimum total L1 deviation between the table and any mixture of
/// deterministic strategies.
fn local_distance(t: &ProbabilityTable) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let q: Vec<_> = (0..16).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    lp.add_constraint(q.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    for (cell, row) in t.rows().iter().enumerate() {
        let (la, lb) = (cell / 2, cell % 2);
        for (col, &(x, y)) in PAIRS.iter().enumerate() {
            let up = lp.add_var(1.0, (0.0, f64::INFINITY));
            let down = lp.add_var(1.0, (0.0, f64::INFINITY));
            let mut terms = vec![(up, 1.0), (down, -1.0)];
            for (i, f) in RESPONSES.iter().enumerate() {
                for (j, g) in RESPONSES.iter().enumerate() {
                    if f[la] == x && g[lb] == y {
                        terms.push((q[i * 4 + j], 1.0));
                    }
                }
            }
            lp.add_constraint(terms, ComparisonOp::Eq, row[col]);
        }
    }
    lp.solve().expect("the relaxed problem is always feasible").objective()
}

fn table_from_correlators(e: [f64; 4], alice_bias: [f64; 2], bob_bias: [f64; 2]) -> Option<ProbabilityTable> {
    let rows = std::array::from_fn(|cell| {
        let (ma, mb) = (alice_bias[cell / 2], bob_bias[cell % 2]);
        PAIRS.map(|(x, y)| (1.0 + x as f64 * ma + y as f64 * mb + (x * y) as f64 * e[cell]) / 4.0)
    });
    ProbabilityTable::new(rows).ok()
}

fn random_table(rng: &mut SplitMix64, kind: usize) -> Option<ProbabilityTable> {
    match kind {
        0 => {
            let rows = std::array::from_fn(|_| {
                let w: [f64; 4] = std::array::from_fn(|_| rng.next_f64() + 1e-3);
                let s: f64 = w.iter().sum();
                w.map(|v| v / s)
            });
            ProbabilityTable::new(rows).ok()
        }
        1 => {
            let w: [f64; 16] = std::array::from_fn(|_| rng.next_f64());
            let s: f64 = w.iter().sum();
            let rows = std::array::from_fn(|cell| {
                let (la, lb) = (cell / 2, cell % 2);
                PAIRS.map(|(x, y)| {
                    let mut p = 0.0;
                    for (i, f) in RESPONSES.iter().enumerate() {
                        for (j, g) in RESPONSES.iter().enumerate() {
                            if f[la] == x && g[lb] == y {
                                p += w[i * 4 + j] / s;
                            }
                        }
                    }
                    p
                })
            });
            ProbabilityTable::new(rows).ok()
        }
        2 => {
            let flip = rng.next_below(4);
            let sign = if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
            let w = rng.next_f64();
            let e = std::array::from_fn(|c| w * sign * if c == flip { -1.0 } else { 1.0 });
            table_from_correlators(e, [0.0; 2], [0.0; 2])
        }
        _ => {
            let alpha: [f64; 2] = std::array::from_fn(|_| rng.next_f64() * std::f64::consts::TAU);
            let beta: [f64; 2] = std::array::from_fn(|_| rng.next_f64() * std::f64::consts::TAU);
            let vis = rng.next_f64();
            let e = std::array::from_fn(|c| -vis * (alpha[c / 2] - beta[c % 2]).cos());
            table_from_correlators(e, [0.0; 2], [0.0; 2])
        }
    }
}

/// Largest one-sided CHSH value, for skipping tables within rounding of
/// the boundary.
fn chsh_margin(t: &ProbabilityTable) -> f64 {
    let e = t.correlations();
    (0..4)
        .map(|flip| {
            let s: f64 = (0..4).map(|c| if c == flip { -e[c] } else { e[c] }).sum();
            (s.abs() - 2.0).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn fine_agrees_with_deterministic_strategy_search() {
    let mut rng = SplitMix64::new(2024);
    let (mut checked, mut local, mut nonlocal) = (0, 0, 0);
    while checked < 1000 {
        let kind = checked % 4;
        let Some(t) = random_table(&mut rng, kind) else { continue };
        if chsh_margin(&t) < 1e-6 {
            continue;
        }
        let oracle = local_distance(&t) < 1e-7;
        let report = fine_check(&t);
        assert_eq!(report.lhv_representable, oracle, "table {:?} report {:?}", t.rows(), report);
        if oracle {
            local += 1;
        } else {
            nonlocal += 1;
        }
        checked += 1;
    }
    assert!(local > 200 && nonlocal > 200, "local {local}, nonlocal {nonlocal}");
}
