//! Dense two-phase simplex for small equality-form linear programs.
//!
//! Solves `min cᵀx  s.t.  E·x = b, x ≥ 0` with `b ≥ 0`, using Bland's rule
//! so the iteration is deterministic and provably finite. The weight-search
//! problems this serves have a few dozen rows and under a hundred columns;
//! a dense tableau is the simplest correct tool at that size.

use crate::error::{Error, Result};
use crate::tolerances::{LP_FEASIBILITY, LP_PIVOT};

/// An equality-form linear program with nonnegative variables.
pub struct StandardLp {
    /// m×k constraint matrix.
    pub constraints: Vec<Vec<f64>>,
    /// Right-hand side, length m, every entry ≥ 0.
    pub rhs: Vec<f64>,
    /// Cost vector, length k.
    pub cost: Vec<f64>,
}

pub enum LpOutcome {
    /// Optimal primal solution (length k).
    Optimal(Vec<f64>),
    /// The feasible region is empty.
    Infeasible,
}

/// Simplex tableau: body columns are the structural variables, then one
/// artificial per row, then the right-hand side.
struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Basis variable of each row.
    basis: Vec<usize>,
    /// Number of structural columns.
    k: usize,
    /// Rows still active (redundant rows get disabled after phase 1).
    active: Vec<bool>,
}

impl Tableau {
    fn new(lp: &StandardLp) -> Result<Self> {
        let m = lp.constraints.len();
        let k = lp.cost.len();
        if lp.rhs.len() != m || lp.constraints.iter().any(|r| r.len() != k) {
            return Err(Error::Input("linear program dimensions disagree".into()));
        }
        if lp.rhs.iter().any(|&b| b < 0.0) {
            return Err(Error::Input(
                "linear program right-hand side must be nonnegative".into(),
            ));
        }
        let mut rows = Vec::with_capacity(m);
        for (i, cons) in lp.constraints.iter().enumerate() {
            let mut row = vec![0.0; k + m + 1];
            row[..k].copy_from_slice(cons);
            row[k + i] = 1.0;
            row[k + m] = lp.rhs[i];
            rows.push(row);
        }
        Ok(Self {
            rows,
            basis: (0..m).map(|i| k + i).collect(),
            k,
            active: vec![true; m],
        })
    }

    fn rhs_col(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len() - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f == 0.0 {
                continue;
            }
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            r[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Reduced cost of column `col` under cost vector `cost` (indexed over
    /// all tableau columns).
    fn reduced_cost(&self, cost: &[f64], col: usize) -> f64 {
        let mut r = cost[col];
        for (i, row) in self.rows.iter().enumerate() {
            if self.active[i] {
                r -= cost[self.basis[i]] * row[col];
            }
        }
        r
    }

    /// One simplex run under `cost` over the columns `0..col_limit`.
    /// Entering and leaving variables follow Bland's rule.
    fn optimize(&mut self, cost: &[f64], col_limit: usize) -> Result<()> {
        let rhs = self.rhs_col();
        // Generous cap: Bland's rule terminates, this guards against bugs.
        for _ in 0..100_000 {
            let entering = (0..col_limit)
                .filter(|&j| !self.basis.contains(&j))
                .find(|&j| self.reduced_cost(cost, j) < -LP_PIVOT);
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !self.active[i] || row[col] <= LP_PIVOT {
                    continue;
                }
                let ratio = row[rhs] / row[col];
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - 1e-15
                            || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Construction(
                    "linear program is unbounded below".into(),
                ));
            };
            self.pivot(row, col);
        }
        Err(Error::Construction(
            "simplex iteration cap exceeded".into(),
        ))
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        let rhs = self.rhs_col();
        self.rows
            .iter()
            .enumerate()
            .filter(|(i, _)| self.active[*i])
            .map(|(i, row)| cost[self.basis[i]] * row[rhs])
            .sum()
    }
}

/// Solves the program; `Infeasible` is a result, not an error.
pub fn solve(lp: &StandardLp) -> Result<LpOutcome> {
    let mut t = Tableau::new(lp)?;
    let m = lp.constraints.len();
    let k = t.k;
    let total_cols = k + m;

    // Phase 1: minimize the sum of artificials over all columns.
    let mut phase1_cost = vec![0.0; total_cols + 1];
    for c in phase1_cost.iter_mut().take(total_cols).skip(k) {
        *c = 1.0;
    }
    t.optimize(&phase1_cost, total_cols)?;
    if t.objective(&phase1_cost) > LP_FEASIBILITY * (m as f64).max(1.0) {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive leftover artificials out of the basis; rows that cannot pivot
    // on any structural column are redundant and get disabled.
    for i in 0..m {
        if t.basis[i] < k || !t.active[i] {
            continue;
        }
        let col = (0..k).find(|&j| t.rows[i][j].abs() > LP_PIVOT);
        match col {
            Some(j) => t.pivot(i, j),
            None => t.active[i] = false,
        }
    }

    // Phase 2: original cost over the structural columns only.
    let mut phase2_cost = vec![0.0; total_cols + 1];
    phase2_cost[..k].copy_from_slice(&lp.cost);
    t.optimize(&phase2_cost, k)?;

    let mut x = vec![0.0; k];
    let rhs = t.rhs_col();
    for i in 0..m {
        if t.active[i] && t.basis[i] < k {
            x[t.basis[i]] = t.rows[i][rhs];
        }
    }
    Ok(LpOutcome::Optimal(x))
}
