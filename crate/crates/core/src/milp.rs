//! Branch and bound over binary variables, layered on the LP engine.
//!
//! Node selection is best-bound with FIFO tie-break; branching picks the
//! most fractional binary (ties to the lowest index) and explores the
//! down-branch first. Child LPs warm start from the parent basis, and a
//! round-up probe seeds the incumbent early. All rules are fixed, so node
//! counts are reproducible.

use crate::lp::{self, Basis, LinearProgram, LpError, LpResult, LpStatus};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;
use thiserror::Error;

pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct MixedIntegerProgram {
    pub lp: LinearProgram,
    pub binary_vars: Vec<usize>,
}

#[derive(Error, Debug)]
pub enum MilpError {
    #[error("binary variable {var} has bounds outside [0, 1]")]
    BadBinaryBounds { var: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    NodeLimit,
}

#[derive(Clone, Debug)]
pub struct MilpResult {
    pub status: MilpStatus,
    pub incumbent: Vec<f64>,
    pub objective: f64,
    pub nodes_explored: usize,
    /// final (incumbent - bound) / max(1, |incumbent|)
    pub gap: f64,
    /// global lower bound after each processed node; non-decreasing
    pub lb_history: Vec<f64>,
    /// basis of the LP at the incumbent, for downstream warm starts
    pub incumbent_basis: Option<Basis>,
}

struct Node {
    /// (var, lower, upper) overrides relative to the root bounds
    fixings: Vec<(usize, f64, f64)>,
    bound: f64,
    seq: usize,
    warm: Option<Arc<Basis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap: prefer the smallest bound, then FIFO.
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(other.seq.cmp(&self.seq))
    }
}

/// Solve min c'x with the named variables binary. `rel_gap_tol` is the
/// relative incumbent-bound gap at which nodes are fathomed; `node_limit`
/// caps the enumeration and downgrades the status when hit.
pub fn solve_milp(
    mip: &MixedIntegerProgram,
    rel_gap_tol: f64,
    node_limit: usize,
) -> Result<MilpResult, MilpError> {
    for &v in &mip.binary_vars {
        let (l, u) = mip.lp.bounds()[v];
        if l < -INTEGRALITY_TOL || u > 1.0 + INTEGRALITY_TOL {
            return Err(MilpError::BadBinaryBounds { var: v });
        }
    }
    let mut lp = mip.lp.clone();
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    heap.push(Node { fixings: Vec::new(), bound: f64::NEG_INFINITY, seq: 0, warm: None });
    let mut seq = 1usize;
    let mut nodes = 0usize;
    let mut best_obj = f64::INFINITY;
    let mut best_x: Option<Vec<f64>> = None;
    let mut best_basis: Option<Basis> = None;
    let mut lb_history = Vec::new();
    let mut status = MilpStatus::Optimal;

    while let Some(node) = heap.pop() {
        lb_history.push(node.bound.min(best_obj));
        let fathom_cut = if best_obj.is_finite() {
            best_obj - rel_gap_tol * best_obj.abs().max(1.0)
        } else {
            f64::INFINITY
        };
        if node.bound >= fathom_cut {
            continue;
        }
        if nodes >= node_limit {
            status = MilpStatus::NodeLimit;
            break;
        }
        nodes += 1;

        for &(v, l, u) in &node.fixings {
            lp.set_bounds(v, l, u);
        }
        let relax = solve_node(&lp, node.warm.as_deref())?;
        if relax.status == LpStatus::Optimal && relax.objective < fathom_cut {
            match most_fractional(&mip.binary_vars, &relax.primal) {
                None => {
                    if relax.objective < best_obj {
                        best_obj = relax.objective;
                        let mut x = relax.primal.clone();
                        for &v in &mip.binary_vars {
                            x[v] = x[v].round();
                        }
                        best_x = Some(x);
                        best_basis = Some(relax.basis.clone());
                    }
                }
                Some((var, _)) => {
                    // Round-up probe: activating binaries only relaxes
                    // capacity-style rows, so this usually lands feasible
                    // and gives the search an early incumbent.
                    if best_x.is_none() {
                        if let Some((obj, x, basis)) = round_up_probe(&lp, mip, &relax.primal)? {
                            if obj < best_obj {
                                best_obj = obj;
                                best_x = Some(x);
                                best_basis = Some(basis);
                            }
                        }
                    }
                    let warm = Arc::new(relax.basis.clone());
                    let mut down = node.fixings.clone();
                    down.push((var, 0.0, 0.0));
                    let mut up = node.fixings.clone();
                    up.push((var, 1.0, 1.0));
                    heap.push(Node {
                        fixings: down,
                        bound: relax.objective,
                        seq,
                        warm: Some(warm.clone()),
                    });
                    seq += 1;
                    heap.push(Node { fixings: up, bound: relax.objective, seq, warm: Some(warm) });
                    seq += 1;
                }
            }
        }
        for &(v, _, _) in &node.fixings {
            let (l, u) = mip.lp.bounds()[v];
            lp.set_bounds(v, l, u);
        }
    }

    let bound_floor = heap.iter().map(|n| n.bound).fold(best_obj, f64::min);
    match best_x {
        Some(x) => Ok(MilpResult {
            status,
            incumbent: x,
            objective: best_obj,
            nodes_explored: nodes,
            gap: ((best_obj - bound_floor) / best_obj.abs().max(1.0)).max(0.0),
            lb_history,
            incumbent_basis: best_basis,
        }),
        None => Ok(MilpResult {
            status: if status == MilpStatus::NodeLimit { status } else { MilpStatus::Infeasible },
            incumbent: Vec::new(),
            objective: f64::INFINITY,
            nodes_explored: nodes,
            gap: f64::INFINITY,
            lb_history,
            incumbent_basis: None,
        }),
    }
}

fn solve_node(lp: &LinearProgram, warm: Option<&Basis>) -> Result<LpResult, LpError> {
    match warm {
        Some(basis) => match lp::warm_start_resolve(lp, basis) {
            Ok(res) => Ok(res),
            // A degraded warm basis is never worth failing a node over.
            Err(LpError::NumericFailure(_)) => lp::solve_lp(lp),
            Err(e) => Err(e),
        },
        None => lp::solve_lp(lp),
    }
}

fn most_fractional(binaries: &[usize], x: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for &v in binaries {
        let frac = x[v] - x[v].floor();
        let dist = frac.min(1.0 - frac);
        if dist > INTEGRALITY_TOL {
            match best {
                Some((_, d)) if d >= dist => {}
                _ => best = Some((v, dist)),
            }
        }
    }
    best
}

fn round_up_probe(
    lp: &LinearProgram,
    mip: &MixedIntegerProgram,
    relax_x: &[f64],
) -> Result<Option<(f64, Vec<f64>, Basis)>, LpError> {
    let mut probe = lp.clone();
    for &v in &mip.binary_vars {
        let (l, u) = lp.bounds()[v];
        let val = if relax_x[v] > INTEGRALITY_TOL { u.min(1.0) } else { l.max(0.0) };
        probe.set_bounds(v, val, val);
    }
    let res = lp::solve_lp(&probe)?;
    if res.status == LpStatus::Optimal {
        let mut x = res.primal.clone();
        for &v in &mip.binary_vars {
            x[v] = x[v].round();
        }
        Ok(Some((res.objective, x, res.basis)))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Relation;

    fn knapsack_mip(values: &[f64], weights: &[f64], budget: f64) -> MixedIntegerProgram {
        let n = values.len();
        let mut lp = LinearProgram::new(n);
        for j in 0..n {
            lp.set_objective(j, -values[j]);
            lp.set_bounds(j, 0.0, 1.0);
        }
        let coeffs: Vec<(usize, f64)> = weights.iter().cloned().enumerate().collect();
        lp.add_row(&coeffs, Relation::Le, budget);
        MixedIntegerProgram { lp, binary_vars: (0..n).collect() }
    }

    #[test]
    fn fixed_binaries_reduce_to_single_lp() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 1.0);
        lp.set_bounds(0, 1.0, 1.0);
        lp.set_bounds(1, 0.0, 0.0);
        lp.add_row(&[(0, 1.0), (1, 1.0)], Relation::Ge, 1.0);
        let mip = MixedIntegerProgram { lp, binary_vars: vec![0, 1] };
        let res = solve_milp(&mip, 1e-9, 1000).unwrap();
        assert_eq!(res.status, MilpStatus::Optimal);
        assert_eq!(res.nodes_explored, 1);
        assert!((res.objective - 1.0).abs() < 1e-9);
    }

    /// 8-item knapsack-style toy cross-checked against full enumeration.
    #[test]
    fn knapsack_matches_enumeration() {
        let values = [9.0, 7.0, 6.5, 4.0, 3.0, 2.5, 1.5, 1.0];
        let weights = [5.0, 4.0, 4.0, 3.0, 2.0, 2.0, 1.0, 1.0];
        let budget = 10.0;
        let mip = knapsack_mip(&values, &weights, budget);
        let res = solve_milp(&mip, 1e-9, 100_000).unwrap();

        let mut best = 0.0f64;
        for mask in 0u32..256 {
            let w: f64 = (0..8).filter(|&j| mask & (1 << j) != 0).map(|j| weights[j]).sum();
            if w <= budget {
                let v: f64 = (0..8).filter(|&j| mask & (1 << j) != 0).map(|j| values[j]).sum();
                best = best.max(v);
            }
        }
        assert!((res.objective + best).abs() < 1e-9, "milp {} vs brute {}", res.objective, best);
    }

    #[test]
    fn lower_bound_history_is_monotone() {
        let mip = knapsack_mip(&[3.0, 5.0, 4.0, 2.0, 6.0, 1.0], &[2.0, 4.0, 3.0, 1.0, 5.0, 1.0], 7.0);
        let res = solve_milp(&mip, 1e-9, 100_000).unwrap();
        for w in res.lb_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "lb history decreased: {:?}", res.lb_history);
        }
        assert_eq!(res.status, MilpStatus::Optimal);
    }

    #[test]
    fn infeasible_integer_program() {
        let mut lp = LinearProgram::new(2);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        lp.add_row(&[(0, 1.0), (1, 1.0)], Relation::Ge, 3.0);
        let mip = MixedIntegerProgram { lp, binary_vars: vec![0, 1] };
        let res = solve_milp(&mip, 1e-9, 1000).unwrap();
        assert_eq!(res.status, MilpStatus::Infeasible);
    }

    #[test]
    fn node_limit_reports_best_effort() {
        let mut lp = LinearProgram::new(4);
        for j in 0..4 {
            lp.set_objective(j, -1.0);
            lp.set_bounds(j, 0.0, 1.0);
        }
        lp.add_row(&[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)], Relation::Le, 2.5);
        let mip = MixedIntegerProgram { lp, binary_vars: (0..4).collect() };
        let res = solve_milp(&mip, 1e-9, 1).unwrap();
        assert_eq!(res.status, MilpStatus::NodeLimit);
    }

    #[test]
    fn deterministic_node_counts() {
        let mip = knapsack_mip(
            &[9.0, 7.0, 6.5, 4.0, 3.0, 2.5, 1.5, 1.0],
            &[5.0, 4.0, 4.0, 3.0, 2.0, 2.0, 1.0, 1.0],
            10.0,
        );
        let a = solve_milp(&mip, 1e-9, 100_000).unwrap();
        let b = solve_milp(&mip, 1e-9, 100_000).unwrap();
        assert_eq!(a.nodes_explored, b.nodes_explored);
        assert_eq!(a.objective, b.objective);
    }
}
