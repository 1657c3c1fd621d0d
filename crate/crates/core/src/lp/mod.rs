//! Linear programming kernel: optimal primal/dual solutions for bounded
//! LPs, with a Farkas certificate ray whenever the program is infeasible.
//!
//! One solver context is single-threaded; programs and results are plain
//! data and move freely between threads.

mod lu;
mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Row sense of a linear constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn slack_bounds(self) -> (f64, f64) {
        match self {
            Relation::Le => (0.0, f64::INFINITY),
            Relation::Ge => (f64::NEG_INFINITY, 0.0),
            Relation::Eq => (0.0, 0.0),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization LP over bounded variables. Rows are stored sparsely;
/// variable bounds may be infinite on either side.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Row>,
    bounds: Vec<(f64, f64)>,
}

#[derive(Error, Debug)]
pub enum LpError {
    #[error("malformed program: {0}")]
    InvalidProgram(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Snapshot of a basis for warm starting a related solve.
#[derive(Clone, Debug)]
pub struct Basis {
    /// per-column state: 0 basic, 1 at lower, 2 at upper, 3 free-at-zero
    state: Vec<u8>,
    basic: Vec<BasisEntry>,
}

#[derive(Clone, Copy, Debug)]
enum BasisEntry {
    Var(usize),
    /// an artificial column pinned to zero, kept for the named row
    Art(usize),
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// one multiplier per row; sign follows shadow-price convention for a
    /// minimization (<= rows yield nonpositive, >= rows nonnegative duals)
    pub dual: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    /// row multipliers certifying infeasibility (present iff infeasible)
    pub farkas_ray: Option<Vec<f64>>,
    pub iterations: usize,
    pub basis: Basis,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn set_objective(&mut self, var: usize, coef: f64) {
        self.objective[var] = coef;
    }

    pub fn add_objective(&mut self, var: usize, coef: f64) {
        self.objective[var] += coef;
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }

    /// Append a row; duplicate column references are merged, zeros dropped.
    pub fn add_row(&mut self, coeffs: &[(usize, f64)], relation: Relation, rhs: f64) -> usize {
        let mut cs: Vec<(usize, f64)> = coeffs.to_vec();
        cs.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(cs.len());
        for (j, v) in cs {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += v,
                _ => merged.push((j, v)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        self.rows.push(Row { coeffs: merged, relation, rhs });
        self.rows.len() - 1
    }

    pub fn add_dense_row(&mut self, coeffs: &[f64], relation: Relation, rhs: f64) -> usize {
        let sparse: Vec<(usize, f64)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(j, &v)| (j, v))
            .collect();
        self.add_row(&sparse, relation, rhs)
    }

    pub fn set_row_rhs(&mut self, row: usize, rhs: f64) {
        self.rows[row].rhs = rhs;
    }

    fn validate(&self) -> Result<(), LpError> {
        for (j, &c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(LpError::InvalidProgram(format!(
                    "objective coefficient of variable {j} is not finite"
                )));
            }
        }
        for (j, &(l, u)) in self.bounds.iter().enumerate() {
            if l > u {
                return Err(LpError::InvalidProgram(format!(
                    "variable {j} has lower bound {l} above upper bound {u}"
                )));
            }
            if l.is_nan() || u.is_nan() {
                return Err(LpError::InvalidProgram(format!("variable {j} has NaN bound")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::InvalidProgram(format!("row {i} rhs is not finite")));
            }
            for &(j, v) in &row.coeffs {
                if j >= self.num_vars() {
                    return Err(LpError::InvalidProgram(format!(
                        "row {i} references variable {j} out of range"
                    )));
                }
                if !v.is_finite() {
                    return Err(LpError::InvalidProgram(format!(
                        "row {i} has non-finite coefficient on variable {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Textual dump in LP interchange layout (see docs/lp-format.md), for
    /// cross-checking individual programs against third-party solvers.
    pub fn to_interchange_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        s.push_str("Minimize\n obj:");
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(s, " {}{} x{}", if c >= 0.0 && !first { "+ " } else { "" }, c, j);
                first = false;
            }
        }
        if first {
            s.push_str(" 0 x0");
        }
        s.push_str("\nSubject To\n");
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(s, " r{i}:");
            for &(j, v) in &row.coeffs {
                let _ = write!(s, " {}{} x{}", if v >= 0.0 { "+ " } else { "" }, v, j);
            }
            let _ = writeln!(s, " {} {}", row.relation.symbol(), row.rhs);
        }
        s.push_str("Bounds\n");
        for (j, &(l, u)) in self.bounds.iter().enumerate() {
            if l == f64::NEG_INFINITY && u == f64::INFINITY {
                let _ = writeln!(s, " x{j} free");
            } else if u == f64::INFINITY {
                let _ = writeln!(s, " {l} <= x{j}");
            } else if l == f64::NEG_INFINITY {
                let _ = writeln!(s, " x{j} <= {u}");
            } else {
                let _ = writeln!(s, " {l} <= x{j} <= {u}");
            }
        }
        s.push_str("End\n");
        s
    }
}

/// Solve to optimality with a deterministic pivot rule.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpResult, LpError> {
    lp.validate()?;
    simplex::Solver::new(lp).solve_cold()
}

/// Re-solve starting from a previous basis, falling back to a cold start
/// whenever the basis is incompatible or the repair loop stalls.
pub fn warm_start_resolve(lp: &LinearProgram, previous: &Basis) -> Result<LpResult, LpError> {
    lp.validate()?;
    match simplex::Solver::new(lp).solve_warm(previous)? {
        Ok(res) => Ok(res),
        Err(_) => simplex::Solver::new(lp).solve_cold(),
    }
}

/// Dual objective value implied by a result, used by tests to confirm
/// strong duality: pi'b plus reduced-cost contributions of finite bounds.
pub fn dual_objective(lp: &LinearProgram, res: &LpResult) -> f64 {
    let mut g = 0.0;
    for (i, row) in lp.rows().iter().enumerate() {
        g += res.dual[i] * row.rhs;
    }
    for (j, &d) in res.reduced_costs.iter().enumerate() {
        let (l, u) = lp.bounds()[j];
        if d > 0.0 && l.is_finite() {
            g += d * l;
        } else if d < 0.0 && u.is_finite() {
            g += d * u;
        }
    }
    g
}

/// Violation achieved by a Farkas ray: positive means the ray certifies
/// that no point within the bounds satisfies all rows.
pub fn farkas_violation(lp: &LinearProgram, ray: &[f64]) -> f64 {
    let n = lp.num_vars();
    let mut w = vec![0.0; n];
    let mut value = 0.0;
    for (i, row) in lp.rows().iter().enumerate() {
        value += ray[i] * row.rhs;
        for &(j, v) in &row.coeffs {
            w[j] += ray[i] * v;
        }
    }
    let mut sup = 0.0;
    for j in 0..n {
        let wj = w[j];
        if wj.abs() <= 1e-9 {
            continue;
        }
        let (l, u) = lp.bounds()[j];
        let bound = if wj > 0.0 { u } else { l };
        if !bound.is_finite() {
            return f64::NEG_INFINITY;
        }
        sup += wj * bound;
    }
    // Slack contribution per row sense.
    for (i, row) in lp.rows().iter().enumerate() {
        let (sl, su) = row.relation.slack_bounds();
        let wj = ray[i];
        if wj.abs() <= 1e-9 {
            continue;
        }
        let bound = if wj > 0.0 { su } else { sl };
        if !bound.is_finite() {
            return f64::NEG_INFINITY;
        }
        sup += wj * bound;
    }
    value - sup
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp_1d_ge() -> LinearProgram {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1.0);
        lp.add_row(&[(0, 1.0)], Relation::Ge, 3.0);
        lp
    }

    #[test]
    fn min_x_at_least_three() {
        let lp = lp_1d_ge();
        let res = solve_lp(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert!((res.primal[0] - 3.0).abs() < 1e-9);
        assert!((res.objective - 3.0).abs() < 1e-9);
        assert!((res.dual[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_bounds_give_farkas_ray() {
        let mut lp = LinearProgram::new(1);
        lp.add_row(&[(0, 1.0)], Relation::Le, -1.0);
        let res = solve_lp(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Infeasible);
        let ray = res.farkas_ray.expect("ray present on infeasible result");
        assert!(farkas_violation(&lp, &ray) >= 1e-7);
    }

    #[test]
    fn bounded_above_variables_and_equalities() {
        // min -x - 2y  s.t. x + y = 1.5, 0 <= x <= 1, 0 <= y <= 1
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, -1.0);
        lp.set_objective(1, -2.0);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        lp.add_row(&[(0, 1.0), (1, 1.0)], Relation::Eq, 1.5);
        let res = solve_lp(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert!((res.primal[1] - 1.0).abs() < 1e-9);
        assert!((res.primal[0] - 0.5).abs() < 1e-9);
        assert!((res.objective - (-2.5)).abs() < 1e-9);
    }

    #[test]
    fn free_variable_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1.0);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        let res = solve_lp(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Unbounded);
    }

    #[test]
    fn warm_resolve_unchanged_is_immediate() {
        let lp = lp_1d_ge();
        let cold = solve_lp(&lp).unwrap();
        let warm = warm_start_resolve(&lp, &cold.basis).unwrap();
        assert_eq!(warm.status, LpStatus::Optimal);
        assert!((warm.objective - cold.objective).abs() < 1e-12);
        assert!(warm.iterations <= 1);
    }

    #[test]
    fn warm_resolve_after_rhs_perturbation() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 2.0);
        lp.set_objective(1, 3.0);
        lp.add_row(&[(0, 1.0), (1, 1.0)], Relation::Ge, 4.0);
        lp.add_row(&[(0, 1.0)], Relation::Le, 3.0);
        let cold = solve_lp(&lp).unwrap();
        let mut nudged = lp.clone();
        nudged.set_row_rhs(0, 4.0 + 1e-3);
        let warm = warm_start_resolve(&nudged, &cold.basis).unwrap();
        let cold2 = solve_lp(&nudged).unwrap();
        assert!((warm.objective - cold2.objective).abs() < 1e-9);
        assert!((warm.objective - cold.objective).abs() < 1e-2);
    }

    #[test]
    fn warm_resolve_after_objective_flip() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, -1.0);
        lp.set_bounds(0, 0.0, 2.0);
        lp.set_bounds(1, 0.0, 2.0);
        lp.add_row(&[(0, 1.0), (1, 1.0)], Relation::Le, 3.0);
        let cold = solve_lp(&lp).unwrap();
        let mut flipped = lp.clone();
        flipped.set_objective(0, -1.0);
        flipped.set_objective(1, 1.0);
        let warm = warm_start_resolve(&flipped, &cold.basis).unwrap();
        let cold2 = solve_lp(&flipped).unwrap();
        assert!((warm.objective - cold2.objective).abs() < 1e-9);
    }

    #[test]
    fn determinism_bit_identical() {
        let mut lp = LinearProgram::new(3);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 2.0);
        lp.set_objective(2, 0.5);
        lp.add_row(&[(0, 1.0), (1, 1.0), (2, 1.0)], Relation::Ge, 2.0);
        lp.add_row(&[(0, 1.0), (1, -1.0)], Relation::Le, 0.5);
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.primal, b.primal);
    }

    #[test]
    fn interchange_dump_layout() {
        let lp = lp_1d_ge();
        let text = lp.to_interchange_text();
        assert!(text.starts_with("Minimize"));
        assert!(text.contains("r0: + 1 x0 >= 3"));
        assert!(text.ends_with("End\n"));
    }
}
