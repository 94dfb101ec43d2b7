//! Boole feasibility against exact vertex enumeration over the eight atoms.

use bellharness::stats::{agreement_probabilities, boole_check, BOOLE_ATOMS};
use num_rational::Rational64;

type Q = Rational64;

fn column(atom: &[i8; 3]) -> [Q; 4] {
    let ind = |b: bool| Q::from_integer(b as i64);
    [Q::from_integer(1), ind(atom[0] == atom[1]), ind(atom[1] == atom[2]), ind(atom[2] == atom[0])]
}

/// Solves the square system by Gaussian elimination; `None` if singular.
fn solve(mut m: [[Q; 5]; 4]) -> Option<[Q; 4]> {
    for col in 0..4 {
        let pivot = (col..4).find(|&r| m[r][col] != Q::from_integer(0))?;
        m.swap(col, pivot);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..4 {
            if r != col {
                let f = m[r][col];
                let pivot_row = m[col];
                for (v, pv) in m[r].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    Some([m[0][4], m[1][4], m[2][4], m[3][4]])
}

/// Feasible iff some basic solution (four atoms) is non-negative.
fn vertex_feasible(p: Q, q: Q, r: Q) -> bool {
    let rhs = [Q::from_integer(1), p, q, r];
    let cols: Vec<[Q; 4]> = BOOLE_ATOMS.iter().map(column).collect();
    for a in 0..8 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                for d in c + 1..8 {
                    let chosen = [a, b, c, d];
                    let m = std::array::from_fn(|row| {
                        std::array::from_fn(|k| if k < 4 { cols[chosen[k]][row] } else { rhs[row] })
                    });
                    if let Some(x) = solve(m) {
                        if x.iter().all(|v| *v >= Q::from_integer(0)) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

#[test]
fn derived_inequalities_match_enumeration_on_grid() {
    let mut feasible = 0;
    for i in 0..=20i64 {
        for j in 0..=20i64 {
            for k in 0..=20i64 {
                let (p, q, r) = (Q::new(i, 20), Q::new(j, 20), Q::new(k, 20));
                let exact = vertex_feasible(p, q, r);
                let report = boole_check(i as f64 / 20.0, j as f64 / 20.0, k as f64 / 20.0).unwrap();
                assert_eq!(report.feasible, exact, "({i}, {j}, {k})/20");
                if let Some(w) = report.witness {
                    let (a, b, c) = agreement_probabilities(&w);
                    assert!((a - i as f64 / 20.0).abs() < 1e-12);
                    assert!((b - j as f64 / 20.0).abs() < 1e-12);
                    assert!((c - k as f64 / 20.0).abs() < 1e-12);
                    feasible += 1;
                } else {
                    assert!(!report.violated.is_empty());
                }
            }
        }
    }
    assert!(feasible > 0 && feasible < 21 * 21 * 21);
}
