//! Feasibility of three pairwise-agreement probabilities.
//!
//! For `X, Y, Z ∈ {±1}` let `p = P(X=Y)`, `q = P(Y=Z)`, `r = P(Z=X)`. No
//! atom makes exactly two of the three events true, so every atom falls in
//! one of four classes: all three equal (weight `t`), or exactly one event
//! true (weights `p - t`, `q - t`, `r - t`). Normalization forces
//! `t = (p + q + r - 1) / 2`, and the four weights being non-negative gives
//! the full description inside the unit cube:
//!
//! ```text
//! p + q + r >= 1
//! p + q - r <= 1
//! p - q + r <= 1
//! -p + q + r <= 1
//! ```

use serde::{Deserialize, Serialize};

use super::StatsError;

const TOLERANCE: f64 = 1e-12;

/// Atom order used by witnesses, as `(X, Y, Z)`.
pub const BOOLE_ATOMS: [[i8; 3]; 8] =
    [[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1], [-1, 1, 1], [-1, 1, -1], [-1, -1, 1], [-1, -1, -1]];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BooleConstraint {
    pub name: String,
    /// Left-hand side; the constraint reads `value <= 1` except for
    /// `p+q+r >= 1`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BooleReport {
    pub feasible: bool,
    /// Probabilities of the atoms in [`BOOLE_ATOMS`] order.
    pub witness: Option<[f64; 8]>,
    pub violated: Vec<BooleConstraint>,
}

pub fn boole_check(p: f64, q: f64, r: f64) -> Result<BooleReport, StatsError> {
    for v in [p, q, r] {
        if !(0.0..=1.0).contains(&v) {
            return Err(StatsError::InvalidProbability(v));
        }
    }
    let mut violated = Vec::new();
    if p + q + r < 1.0 - TOLERANCE {
        violated.push(BooleConstraint { name: "p+q+r >= 1".into(), value: p + q + r });
    }
    for (name, value) in [("p+q-r <= 1", p + q - r), ("p-q+r <= 1", p - q + r), ("-p+q+r <= 1", -p + q + r)] {
        if value > 1.0 + TOLERANCE {
            violated.push(BooleConstraint { name: name.into(), value });
        }
    }
    if !violated.is_empty() {
        return Ok(BooleReport { feasible: false, witness: None, violated });
    }
    let t = ((p + q + r - 1.0) / 2.0).max(0.0);
    let only = |v: f64| (v - t).max(0.0) / 2.0;
    let (wa, wb, wc) = (only(p), only(q), only(r));
    // Each class is split evenly over its two atoms (related by a global flip).
    let mut w = [0.0; 8];
    for (i, atom) in BOOLE_ATOMS.iter().enumerate() {
        let (x, y, z) = (atom[0], atom[1], atom[2]);
        w[i] = match (x == y, y == z, z == x) {
            (true, true, true) => t / 2.0,
            (true, false, false) => wa,
            (false, true, false) => wb,
            (false, false, true) => wc,
            _ => unreachable!("two agreements force the third"),
        };
    }
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|v| *v /= total);
    }
    Ok(BooleReport { feasible: true, witness: Some(w), violated })
}

/// `(P(X=Y), P(Y=Z), P(Z=X))` of a distribution over the atoms.
pub fn agreement_probabilities(w: &[f64; 8]) -> (f64, f64, f64) {
    let mut out = (0.0, 0.0, 0.0);
    for (atom, &wi) in BOOLE_ATOMS.iter().zip(w) {
        if atom[0] == atom[1] {
            out.0 += wi;
        }
        if atom[1] == atom[2] {
            out.1 += wi;
        }
        if atom[2] == atom[0] {
            out.2 += wi;
        }
    }
    out
}
