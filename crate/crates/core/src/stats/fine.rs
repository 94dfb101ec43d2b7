//! Fine's criterion for the two-setting, two-outcome scenario.
//!
//! A table `p(x, y | a, b)` has a local hidden-variable model exactly when
//! the four no-signalling equalities hold and every one-sided CHSH
//! inequality `±Σ ε_ab E_ab <= 2` holds for the four sign patterns with
//! `ε11·ε12·ε21·ε22 = -1`.
//!
//! File format: `{"pxy_ab": [[p++, p+-, p-+, p--], …]}` with rows for the
//! setting labels `11, 12, 21, 22` in that order.

use serde::{Deserialize, Serialize};

use crate::grid::{Outcome, SettingGrid};
use crate::harness::{FourPointSettings, TrialRecord};
use crate::prng::HiddenVariable;
use crate::singlet::singlet_probability;
use crate::strategy::{lambda_for_shift, LocalStrategy};

use super::chsh::{cell_index, CELL_LABELS};
use super::StatsError;

pub const FINE_TOLERANCE: f64 = 1e-9;
const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Outcome pairs in column order.
const OUTCOME_PAIRS: [(Outcome, Outcome); 4] = [
    (Outcome::Plus, Outcome::Plus),
    (Outcome::Plus, Outcome::Minus),
    (Outcome::Minus, Outcome::Plus),
    (Outcome::Minus, Outcome::Minus),
];

fn outcome_column(x: Outcome, y: Outcome) -> usize {
    match (x, y) {
        (Outcome::Plus, Outcome::Plus) => 0,
        (Outcome::Plus, Outcome::Minus) => 1,
        (Outcome::Minus, Outcome::Plus) => 2,
        (Outcome::Minus, Outcome::Minus) => 3,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct ProbabilityTable {
    rows: [[f64; 4]; 4],
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    pxy_ab: [[f64; 4]; 4],
}

impl TryFrom<RawTable> for ProbabilityTable {
    type Error = StatsError;

    fn try_from(raw: RawTable) -> Result<Self, StatsError> {
        ProbabilityTable::new(raw.pxy_ab)
    }
}

impl From<ProbabilityTable> for RawTable {
    fn from(t: ProbabilityTable) -> Self {
        RawTable { pxy_ab: t.rows }
    }
}

impl ProbabilityTable {
    pub fn new(rows: [[f64; 4]; 4]) -> Result<Self, StatsError> {
        for (i, row) in rows.iter().enumerate() {
            let (a, b) = CELL_LABELS[i];
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(StatsError::InvalidTable(format!("row {a}{b} has a negative or non-finite entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(StatsError::InvalidTable(format!("row {a}{b} sums to {sum}")));
            }
        }
        Ok(ProbabilityTable { rows })
    }

    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.rows
    }

    pub fn get(&self, alice_label: u8, bob_label: u8, x: Outcome, y: Outcome) -> f64 {
        self.rows[cell_index(alice_label, bob_label)][outcome_column(x, y)]
    }

    /// The singlet's exact table at the given settings.
    pub fn singlet(grid: &SettingGrid, settings: &FourPointSettings) -> Self {
        let rows = std::array::from_fn(|i| {
            let (a, b) = settings.pair(i / 2, i % 2);
            OUTCOME_PAIRS.map(|(x, y)| singlet_probability(grid, a, b, x, y))
        });
        ProbabilityTable { rows }
    }

    /// Table of a strategy pair averaged over the given draws.
    pub fn from_strategies(
        alice: &dyn LocalStrategy,
        bob: &dyn LocalStrategy,
        settings: &FourPointSettings,
        lambdas: &[HiddenVariable],
    ) -> Result<Self, StatsError> {
        if lambdas.is_empty() {
            return Err(StatsError::InvalidTable("no hidden-variable draws".into()));
        }
        let mut counts = [[0u64; 4]; 4];
        for lambda in lambdas {
            for (i, row) in counts.iter_mut().enumerate() {
                let (a, b) = settings.pair(i / 2, i % 2);
                row[outcome_column(alice.eval(a, lambda), bob.eval(b, lambda))] += 1;
            }
        }
        let total = lambdas.len() as f64;
        Ok(ProbabilityTable { rows: counts.map(|row| row.map(|c| c as f64 / total)) })
    }

    /// Exact table for strategies driven by the grid phase alone, by
    /// enumerating every phase offset once.
    pub fn from_phase_shifts(
        alice: &dyn LocalStrategy,
        bob: &dyn LocalStrategy,
        grid: &SettingGrid,
        settings: &FourPointSettings,
    ) -> Self {
        let lambdas: Vec<_> = (0..grid.points()).map(|s| lambda_for_shift(grid, s, 1)).collect();
        Self::from_strategies(alice, bob, settings, &lambdas).expect("grid has points")
    }

    /// `E_ab = Σ x·y·p(x, y | a, b)` in cell order.
    pub fn correlations(&self) -> [f64; 4] {
        self.rows.map(|r| r[0] - r[1] - r[2] + r[3])
    }

    /// `P(x = +1 | a, b)` per cell.
    pub fn alice_plus(&self) -> [f64; 4] {
        self.rows.map(|r| r[0] + r[1])
    }

    pub fn bob_plus(&self) -> [f64; 4] {
        self.rows.map(|r| r[0] + r[2])
    }

    /// Uniform mixture `w·self + (1 - w)·other`.
    pub fn mix(&self, w: f64, other: &ProbabilityTable) -> Self {
        let rows = std::array::from_fn(|i| std::array::from_fn(|j| w * self.rows[i][j] + (1.0 - w) * other.rows[i][j]));
        ProbabilityTable { rows }
    }
}

/// Outcome counts per cell, for tables estimated from runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub counts: [[u64; 4]; 4],
}

impl CountTable {
    pub fn from_trials(trials: &[TrialRecord], settings: &FourPointSettings) -> Self {
        let mut counts = [[0u64; 4]; 4];
        for t in trials {
            if let Some((la, lb)) = settings.labels(t.a, t.b) {
                counts[cell_index(la, lb)][outcome_column(t.x, t.y)] += 1;
            }
        }
        CountTable { counts }
    }

    pub fn cell_totals(&self) -> [u64; 4] {
        self.counts.map(|r| r.iter().sum())
    }

    pub fn to_table(&self) -> Result<ProbabilityTable, StatsError> {
        let totals = self.cell_totals();
        if let Some(i) = totals.iter().position(|&n| n == 0) {
            let (a, b) = CELL_LABELS[i];
            return Err(StatsError::MissingCell(a, b));
        }
        let rows = std::array::from_fn(|i| self.counts[i].map(|c| c as f64 / totals[i] as f64));
        ProbabilityTable::new(rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Inequality,
    Equality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FineConstraint {
    pub name: String,
    pub kind: ConstraintKind,
    /// The constrained quantity: a signed CHSH sum, or a marginal difference.
    pub value: f64,
    /// Distance to violation; negative when violated. In empirical mode
    /// this is measured in standard errors.
    pub slack: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FineReport {
    pub constraints: Vec<FineConstraint>,
    pub lhv_representable: bool,
    /// The constraint with the least slack.
    pub binding: String,
}

impl FineReport {
    pub fn violations(&self) -> impl Iterator<Item = &FineConstraint> {
        self.constraints.iter().filter(|c| !c.satisfied)
    }

    fn from_constraints(constraints: Vec<FineConstraint>) -> Self {
        let binding =
            constraints.iter().min_by(|a, b| a.slack.total_cmp(&b.slack)).map(|c| c.name.clone()).unwrap_or_default();
        FineReport { lhv_representable: constraints.iter().all(|c| c.satisfied), constraints, binding }
    }
}

/// The four sign patterns with product `-1`: one entry flipped.
fn sign_patterns() -> [[f64; 4]; 4] {
    std::array::from_fn(|flip| std::array::from_fn(|i| if i == flip { -1.0 } else { 1.0 }))
}

fn pattern_name(eps: &[f64; 4]) -> String {
    let signs: String = eps.iter().map(|&e| if e > 0.0 { '+' } else { '-' }).collect();
    format!("chsh[{signs}]")
}

/// Marginal pairs that must agree: Alice's for each of her settings, then
/// Bob's for each of his. Cells are indices into the table rows.
const NO_SIGNALLING: [(&str, usize, usize, bool); 4] = [
    ("alice marginal, a=1", 0, 1, true),
    ("alice marginal, a=2", 2, 3, true),
    ("bob marginal, b=1", 0, 2, false),
    ("bob marginal, b=2", 1, 3, false),
];

/// Exact check with equalities to within [`FINE_TOLERANCE`].
pub fn fine_check(t: &ProbabilityTable) -> FineReport {
    let e = t.correlations();
    let mut constraints = Vec::with_capacity(12);
    for eps in sign_patterns() {
        let s: f64 = eps.iter().zip(&e).map(|(a, b)| a * b).sum();
        for (dir, value) in [("<= 2", s), (">= -2", -s)] {
            let slack = 2.0 - value;
            constraints.push(FineConstraint {
                name: format!("{} {dir}", pattern_name(&eps)),
                kind: ConstraintKind::Inequality,
                value: s,
                slack,
                satisfied: slack >= -FINE_TOLERANCE,
            });
        }
    }
    let (alice, bob) = (t.alice_plus(), t.bob_plus());
    for (name, i, j, is_alice) in NO_SIGNALLING {
        let m = if is_alice { &alice } else { &bob };
        let diff = m[i] - m[j];
        constraints.push(FineConstraint {
            name: name.to_string(),
            kind: ConstraintKind::Equality,
            value: diff,
            slack: FINE_TOLERANCE - diff.abs(),
            satisfied: diff.abs() <= FINE_TOLERANCE,
        });
    }
    FineReport::from_constraints(constraints)
}

/// Statistical check for sampled tables: every constraint is judged by its
/// z-score, and a constraint fails only when it is violated by more than
/// `z_crit` standard errors.
pub fn fine_check_counts(counts: &CountTable, z_crit: f64) -> Result<FineReport, StatsError> {
    let t = counts.to_table()?;
    let n = counts.cell_totals().map(|c| c as f64);
    let e = t.correlations();
    let var_e: [f64; 4] = std::array::from_fn(|i| (1.0 - e[i] * e[i]).max(0.0) / n[i]);
    let mut constraints = Vec::with_capacity(12);
    for eps in sign_patterns() {
        let s: f64 = eps.iter().zip(&e).map(|(a, b)| a * b).sum();
        let se = var_e.iter().sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        for (dir, value) in [("<= 2", s), (">= -2", -s)] {
            let z = (2.0 - value) / se;
            constraints.push(FineConstraint {
                name: format!("{} {dir}", pattern_name(&eps)),
                kind: ConstraintKind::Inequality,
                value: s,
                slack: z,
                satisfied: z >= -z_crit,
            });
        }
    }
    let (alice, bob) = (t.alice_plus(), t.bob_plus());
    for (name, i, j, is_alice) in NO_SIGNALLING {
        let m = if is_alice { &alice } else { &bob };
        let diff = m[i] - m[j];
        let pooled = (m[i] * n[i] + m[j] * n[j]) / (n[i] + n[j]);
        let se = (pooled * (1.0 - pooled) * (1.0 / n[i] + 1.0 / n[j])).sqrt();
        let z = if se > 0.0 {
            diff.abs() / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        constraints.push(FineConstraint {
            name: name.to_string(),
            kind: ConstraintKind::Equality,
            value: diff,
            slack: z_crit - z,
            satisfied: z <= z_crit,
        });
    }
    Ok(FineReport::from_constraints(constraints))
}
