//! Small dense linear programs: minimize `c·x` subject to `A x >= b`,
//! `x >= 0`.
//!
//! The cut-set programs have few variables (one per link) but up to
//! `2 (2^m - 2)` rows, so the solver runs the tableau simplex on the dual
//! `max b·y, A^T y <= c, y >= 0`, whose tableau has one row per variable.
//! The primal optimum is read off the reduced costs of the dual slacks.

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Pivot tolerance.
pub const PIVOT_TOL: f64 = 1e-9;

/// Tolerance for reporting a solution as satisfying its constraints.
pub const FEASIBILITY_TOL: f64 = 1e-7;

const MAX_PIVOTS: usize = 200_000;

/// One `>=` row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpConstraint {
    pub label: String,
    pub coefficients: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpProblem {
    pub variables: Vec<String>,
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
}

impl LpProblem {
    /// Minimize the sum of the variables.
    pub fn sum_objective(variables: Vec<String>) -> Self {
        let objective = vec![1.0; variables.len()];
        LpProblem {
            variables,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn push(&mut self, label: impl Into<String>, coefficients: Vec<f64>, rhs: f64) {
        self.constraints.push(LpConstraint {
            label: label.into(),
            coefficients,
            rhs,
        });
    }

    fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        if self.objective.len() != n {
            return Err(Error::Shape(format!(
                "objective has {} entries for {n} variables",
                self.objective.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(domain("objective coefficients must be finite"));
        }
        for c in &self.constraints {
            if c.coefficients.len() != n {
                return Err(Error::Shape(format!(
                    "constraint '{}' has {} coefficients for {n} variables",
                    c.label,
                    c.coefficients.len()
                )));
            }
            if !c.rhs.is_finite() || c.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(domain(format!(
                    "constraint '{}' has a non-finite entry",
                    c.label
                )));
            }
        }
        Ok(())
    }

    /// Largest violation of `A x >= b` and `x >= 0`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.rhs - dot(&c.coefficients, x));
        let signs = x.iter().map(|&v| -v);
        rows.chain(signs).fold(0.0, f64::max)
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point; empty unless the status is optimal.
    pub values: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Dense simplex tableau for `min cost·z, T z = rhs, z >= 0`.
struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs of the current basis.
    reduced: Vec<f64>,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn price(&mut self, cost: &[f64]) {
        self.reduced = cost.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (r, a) in self.reduced.iter_mut().zip(row) {
                    *r -= cb * a;
                }
            }
        }
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, r)| cost[b] * r)
            .sum()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = 1.0 / self.rows[r][c];
        for a in self.rows[r].iter_mut() {
            *a *= inv;
        }
        self.rhs[r] *= inv;
        self.rows[r][c] = 1.0;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (a, p) in self.rows[i].iter_mut().zip(&prow) {
                    *a -= f * p;
                }
                self.rows[i][c] = 0.0;
                self.rhs[i] -= f * prhs;
            }
        }
        let f = self.reduced[c];
        if f != 0.0 {
            for (a, p) in self.reduced.iter_mut().zip(&prow) {
                *a -= f * p;
            }
            self.reduced[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Primal simplex with Bland's rule over the columns in `allowed`.
    fn run(&mut self, allowed: &[bool]) -> Result<Outcome> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Capacity("simplex exceeded its pivot budget".into()));
            }
            let Some(c) =
                (0..self.reduced.len()).find(|&j| allowed[j] && self.reduced[j] < -PIVOT_TOL)
            else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((j, best)) => {
                            if ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[i] < self.basis[j])
                            {
                                Some((i, ratio))
                            } else {
                                Some((j, best))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(Outcome::Unbounded),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

enum DualResult {
    /// Dual optimum found; primal point recovered.
    Solved {
        x: Vec<f64>,
        pivots: usize,
    },
    DualUnbounded {
        pivots: usize,
    },
    DualInfeasible {
        pivots: usize,
    },
}

/// Solves `max b·y, A^T y <= c, y >= 0` by the two-phase tableau method.
fn solve_dual(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<DualResult> {
    let (r, n) = (a.len(), c.len());
    let flipped: Vec<usize> = (0..n).filter(|&j| c[j] < 0.0).collect();
    // Columns: y (r), slacks (n), artificials (one per row with c_j < 0).
    let cols = r + n + flipped.len();
    let mut rows = vec![vec![0.0; cols]; n];
    let mut rhs = vec![0.0; n];
    let mut basis = vec![0; n];
    for j in 0..n {
        let sign = if c[j] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..r {
            rows[j][i] = sign * a[i][j];
        }
        rows[j][r + j] = sign;
        rhs[j] = sign * c[j];
        basis[j] = r + j;
    }
    for (k, &j) in flipped.iter().enumerate() {
        rows[j][r + n + k] = 1.0;
        basis[j] = r + n + k;
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis,
        reduced: Vec::new(),
        pivots: 0,
    };
    let is_art = |col: usize| col >= r + n;

    if !flipped.is_empty() {
        let cost1: Vec<f64> = (0..cols)
            .map(|col| if is_art(col) { 1.0 } else { 0.0 })
            .collect();
        t.price(&cost1);
        let all = vec![true; cols];
        t.run(&all)?;
        if t.objective(&cost1) > PIVOT_TOL {
            return Ok(DualResult::DualInfeasible { pivots: t.pivots });
        }
        for i in 0..n {
            if is_art(t.basis[i]) {
                if let Some(col) = (0..r + n).find(|&col| t.rows[i][col].abs() > PIVOT_TOL) {
                    t.pivot(i, col);
                }
            }
        }
    }

    let cost2: Vec<f64> = (0..cols)
        .map(|col| if col < r { -b[col] } else { 0.0 })
        .collect();
    t.price(&cost2);
    let allowed: Vec<bool> = (0..cols).map(|col| !is_art(col)).collect();
    match t.run(&allowed)? {
        Outcome::Unbounded => Ok(DualResult::DualUnbounded { pivots: t.pivots }),
        Outcome::Optimal => {
            // Reduced costs are unchanged by row scaling, so the slack of
            // row j prices the primal variable x_j directly.
            let x = (0..n).map(|j| t.reduced[r + j].max(0.0)).collect();
            Ok(DualResult::Solved {
                x,
                pivots: t.pivots,
            })
        }
    }
}

/// Optimal basic solution of `min c·x, A x >= b, x >= 0`.
pub fn solve_lp(lp: &LpProblem) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_variables();
    // Rows with nonnegative coefficients and rhs <= 0 hold for every x >= 0.
    let kept: Vec<&LpConstraint> = lp
        .constraints
        .iter()
        .filter(|c| !(c.rhs <= 0.0 && c.coefficients.iter().all(|&a| a >= 0.0)))
        .collect();
    let a: Vec<Vec<f64>> = kept.iter().map(|c| c.coefficients.clone()).collect();
    let b: Vec<f64> = kept.iter().map(|c| c.rhs).collect();
    let infeasible = |pivots| LpSolution {
        status: LpStatus::Infeasible,
        values: Vec::new(),
        objective: f64::INFINITY,
        pivots,
    };
    match solve_dual(&a, &b, &lp.objective)? {
        DualResult::Solved { x, pivots } => {
            let objective = lp.objective_at(&x);
            Ok(LpSolution {
                status: LpStatus::Optimal,
                values: x,
                objective,
                pivots,
            })
        }
        DualResult::DualUnbounded { pivots } => Ok(infeasible(pivots)),
        DualResult::DualInfeasible { pivots } => {
            // The primal is unbounded if feasible, which the zero-cost dual
            // decides.
            match solve_dual(&a, &b, &vec![0.0; n])? {
                DualResult::DualUnbounded { pivots: p2 } => Ok(infeasible(pivots + p2)),
                DualResult::Solved { pivots: p2, .. }
                | DualResult::DualInfeasible { pivots: p2 } => Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    values: Vec::new(),
                    objective: f64::NEG_INFINITY,
                    pivots: pivots + p2,
                }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(objective: Vec<f64>, rows: &[(&[f64], f64)]) -> LpProblem {
        let variables = (0..objective.len()).map(|i| format!("x{i}")).collect();
        let mut p = LpProblem {
            variables,
            objective,
            constraints: Vec::new(),
        };
        for (i, (a, b)) in rows.iter().enumerate() {
            p.push(format!("r{i}"), a.to_vec(), *b);
        }
        p
    }

    #[test]
    fn two_lower_bounds() {
        let p = lp(vec![1.0, 1.0], &[(&[1.0, 0.0], 1.0), (&[0.0, 1.0], 2.0)]);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-12);
        assert!(p.max_violation(&s.values) < 1e-9);
    }

    #[test]
    fn shared_constraint() {
        let p = lp(vec![1.0, 2.0], &[(&[1.0, 1.0], 1.0), (&[-1.0, 1.0], 0.5)]);
        let s = solve_lp(&p).unwrap();
        // y >= x + 0.5 and x + y >= 1 → x = 0.25, y = 0.75, cost 1.75.
        assert!((s.objective - 1.75).abs() < 1e-12, "{s:?}");
        assert!((s.values[0] - 0.25).abs() < 1e-12 && (s.values[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(vec![1.0], &[(&[-1.0], 1.0)]);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
        let p = lp(vec![-1.0], &[(&[1.0], 1.0)]);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
        let p = lp(vec![-1.0], &[(&[-1.0], 1.0)]);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
        let p = lp(
            vec![-1.0, 1.0],
            &[(&[-1.0, 1.0], 0.0), (&[-1.0, 0.0], -2.0)],
        );
        let s = solve_lp(&p).unwrap();
        // x0 <= 2 and x1 >= x0: min x1 - x0 = 0.
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(s.objective.abs() < 1e-12);
    }

    #[test]
    fn no_constraints() {
        let p = lp(vec![1.0, 3.0], &[]);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.objective, 0.0);
        assert!(solve_lp(&lp(vec![1.0], &[(&[1.0, 2.0], 1.0)])).is_err());
    }
}
