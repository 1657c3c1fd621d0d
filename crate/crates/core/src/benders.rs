//! Decomposition loop: a master MILP over the first-stage design carrying
//! scenario-wise recourse underestimators (with the activation-probability
//! products linearized exactly), scenario subproblem fan-out, optimality
//! and feasibility cut accumulation, corridor group-failure cuts, and a
//! lower/upper bound trace with convergence certification.

use crate::ef::{big_m_bounds, EfOptions, EfSolution, MilpSummary};
use crate::lp::{self, LinearProgram, LpStatus, Relation};
use crate::milp::{self, MilpStatus, MixedIntegerProgram};
use crate::model::{
    cvar_of_costs, ddu_probability, FirstStageDesign, Instance, RecourseStatus,
};
use crate::recourse::{
    make_feasibility_cut, make_optimality_cut, FeasibilityCut, OptimalityCut, ScenarioSubproblem,
};
use std::time::Instant;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum BendersError {
    #[error("master problem infeasible: accumulated cuts exclude every design")]
    MasterInfeasible,
    #[error("no feasible incumbent found within the iteration limit")]
    NoIncumbent,
    #[error(transparent)]
    Milp(#[from] milp::MilpError),
    #[error(transparent)]
    Recourse(#[from] crate::recourse::RecourseError),
    #[error(transparent)]
    Lp(#[from] lp::LpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupCutMode {
    /// Constant lower bound from the fully-activated, inventory-relaxed
    /// subproblem; provably valid for every design.
    Safe,
    /// Adds single-arc deactivation margins; validated empirically on
    /// enumerable instances and flagged as heuristic elsewhere.
    Heuristic,
}

#[derive(Clone, Debug)]
pub enum CutRetention {
    KeepAll,
    /// Drop a cut after it has been slack for `age` consecutive iterations.
    PruneSlack { age: usize },
}

#[derive(Clone, Debug)]
pub struct BendersOptions {
    pub epsilon: f64,
    pub max_iter: usize,
    pub group_cuts: bool,
    pub group_cut_mode: GroupCutMode,
    pub cut_retention: CutRetention,
    pub mode: EfOptions,
    pub master_rel_gap: f64,
    pub master_node_limit: usize,
}

impl Default for BendersOptions {
    fn default() -> Self {
        BendersOptions {
            epsilon: 1e-6,
            max_iter: 200,
            group_cuts: false,
            group_cut_mode: GroupCutMode::Safe,
            cut_retention: CutRetention::KeepAll,
            mode: EfOptions::default(),
            master_rel_gap: 1e-9,
            master_node_limit: 500_000,
        }
    }
}

/// Corridor group-failure inequality: for a scenario in which the corridor
/// is disrupted, phi_s >= base_bound + sum_{a in corridor} margin_a (1 - y_a).
#[derive(Clone, Debug)]
pub struct GroupCut {
    pub corridor: usize,
    pub scenario: usize,
    pub base_bound: f64,
    /// (arc, margin) for the corridor's arcs
    pub margins: Vec<(usize, f64)>,
    pub heuristic: bool,
}

#[derive(Clone, Debug)]
pub struct TraceRow {
    pub iteration: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub gap_abs: f64,
    pub gap_pct: f64,
    pub cuts_added: usize,
    pub runtime_sec: f64,
}

#[derive(Debug, Default)]
pub struct BendersState {
    pub iterations: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub incumbent: Option<FirstStageDesign>,
    pub trace: Vec<TraceRow>,
    pub opt_cuts: Vec<OptimalityCut>,
    pub feas_cuts: Vec<FeasibilityCut>,
    pub group_cuts: Vec<GroupCut>,
    pub converged: bool,
    /// binding cuts at the final master solution
    pub active_cuts: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct CutPoolStats {
    pub total_cuts: usize,
    pub active_cuts: usize,
}

pub fn cut_pool_stats(state: &BendersState) -> (CutPoolStats, Vec<usize>) {
    let total = state.opt_cuts.len() + state.feas_cuts.len() + state.group_cuts.len();
    let per_iteration: Vec<usize> = state.trace.iter().map(|t| t.cuts_added).collect();
    (CutPoolStats { total_cuts: total, active_cuts: state.active_cuts }, per_iteration)
}

/// Scenario LP with every arc active and the pre-positioned inventory left
/// free inside its bounds: a global lower bound on the scenario recourse
/// cost over all designs, since activation only relaxes capacity rows.
fn relaxed_scenario_floor(
    instance: &Instance,
    scenario: usize,
    zeroed_arc: Option<usize>,
) -> Result<f64, BendersError> {
    let nn = instance.num_nodes();
    let nc = instance.num_commodities();
    let na = instance.num_arcs();
    let mut next = 0usize;
    let mut alloc = |n: usize| {
        let b = next;
        next += n;
        b
    };
    let mut x = vec![vec![None; nc]; na];
    for (a, lane) in x.iter_mut().enumerate() {
        for (c, slot) in lane.iter_mut().enumerate() {
            if instance.effective_capacity(a, c, scenario) > 0.0 && zeroed_arc != Some(a) {
                *slot = Some(alloc(1));
            }
        }
    }
    let w: Vec<Vec<usize>> = (0..nn).map(|_| (0..nc).map(|_| alloc(1)).collect()).collect();
    let inv: Vec<Vec<usize>> = (0..nn).map(|_| (0..nc).map(|_| alloc(1)).collect()).collect();
    let mut short = vec![vec![None; nc]; nn];
    for (i, node) in instance.nodes.iter().enumerate() {
        for c in 0..nc {
            if node.demand[c] > 0.0 {
                short[i][c] = Some(alloc(1));
            }
        }
    }
    let mut lp = LinearProgram::new(next);
    for a in 0..na {
        for c in 0..nc {
            if let Some(j) = x[a][c] {
                lp.set_objective(j, instance.unit_cost(a, c, scenario));
                lp.set_bounds(j, 0.0, instance.effective_capacity(a, c, scenario));
            }
        }
    }
    for i in 0..nn {
        for c in 0..nc {
            lp.set_bounds(w[i][c], 0.0, instance.nodes[i].storage_cap[c]);
            lp.set_bounds(inv[i][c], 0.0, instance.nodes[i].storage_cap[c]);
            lp.set_objective(inv[i][c], instance.commodities[c].holding_cost);
            if let Some(j) = short[i][c] {
                lp.set_bounds(j, 0.0, instance.nodes[i].demand[c]);
                lp.set_objective(j, instance.commodities[c].shortage_penalty);
            }
            let mut coeffs: Vec<(usize, f64)> = vec![(w[i][c], 1.0), (inv[i][c], -1.0)];
            if let Some(u) = short[i][c] {
                coeffs.push((u, 1.0));
            }
            for (a, arc) in instance.arcs.iter().enumerate() {
                if let Some(j) = x[a][c] {
                    if arc.head == i {
                        coeffs.push((j, 1.0));
                    }
                    if arc.tail == i {
                        coeffs.push((j, -1.0));
                    }
                }
            }
            let rhs = instance.nodes[i].demand[c] - instance.nodes[i].supply[c];
            lp.add_row(&coeffs, Relation::Eq, rhs);
        }
    }
    for (l, corridor) in instance.corridors.iter().enumerate() {
        let phi = corridor.dependence_cap;
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        for (a, arc) in instance.arcs.iter().enumerate() {
            for c in 0..nc {
                if let Some(j) = x[a][c] {
                    coeffs.push((j, if arc.corridor == l { 1.0 - phi } else { -phi }));
                }
            }
        }
        lp.add_row(&coeffs, Relation::Le, 0.0);
    }
    let res = lp::solve_lp(&lp)?;
    match res.status {
        LpStatus::Optimal => Ok(res.objective),
        // No feasible recourse even fully relaxed: any bound is vacuous.
        LpStatus::Infeasible => Ok(f64::INFINITY),
        LpStatus::Unbounded => Err(BendersError::Lp(lp::LpError::NumericFailure(
            "relaxed scenario floor cannot be unbounded".into(),
        ))),
    }
}

/// Corridor group-failure cuts for every (corridor, disrupted-scenario)
/// pair. Safe mode keeps margins at zero; heuristic mode prices single-arc
/// deactivations.
pub fn make_group_cuts(
    instance: &Instance,
    mode: GroupCutMode,
) -> Result<Vec<GroupCut>, BendersError> {
    let mut cuts = Vec::new();
    for (l, _) in instance.corridors.iter().enumerate() {
        let arcs_in: Vec<usize> = instance
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.corridor == l)
            .map(|(i, _)| i)
            .collect();
        if arcs_in.is_empty() {
            continue;
        }
        for (s, scen) in instance.scenarios.iter().enumerate() {
            if scen.capacity_mult[l] >= 1.0 {
                continue;
            }
            let base = relaxed_scenario_floor(instance, s, None)?;
            if !base.is_finite() {
                continue;
            }
            let margins = match mode {
                GroupCutMode::Safe => arcs_in.iter().map(|&a| (a, 0.0)).collect(),
                GroupCutMode::Heuristic => {
                    let mut m = Vec::with_capacity(arcs_in.len());
                    for &a in &arcs_in {
                        let without = relaxed_scenario_floor(instance, s, Some(a))?;
                        let margin = if without.is_finite() { (without - base).max(0.0) } else { 0.0 };
                        m.push((a, margin));
                    }
                    m
                }
            };
            cuts.push(GroupCut {
                corridor: l,
                scenario: s,
                base_bound: base,
                margins,
                heuristic: mode == GroupCutMode::Heuristic,
            });
        }
    }
    Ok(cuts)
}

/// Master variable layout for one rebuild.
struct MasterLayout {
    y: Vec<usize>,
    w_inv: Vec<Vec<usize>>,
    phi: Vec<usize>,
}

fn build_master(
    instance: &Instance,
    options: &BendersOptions,
    fixed_probs: &[f64],
    opt_cuts: &[OptimalityCut],
    feas_cuts: &[FeasibilityCut],
    group_cuts: &[GroupCut],
    big_m: f64,
) -> (MixedIntegerProgram, MasterLayout) {
    let na = instance.num_arcs();
    let nn = instance.num_nodes();
    let nc = instance.num_commodities();
    let ns = instance.num_scenarios();
    let ddu_on = options.mode.ddu_on;
    let risk_on = options.mode.risk_on;
    let lambda = if risk_on { instance.risk.lambda } else { 0.0 };
    let alpha = instance.risk.alpha;
    let k = instance.ddu.k;

    let mut next = 0usize;
    let mut alloc = |n: usize| {
        let b = next;
        next += n;
        b
    };
    let y0 = alloc(na);
    let y: Vec<usize> = (y0..y0 + na).collect();
    let w_inv: Vec<Vec<usize>> = (0..nn).map(|_| (0..nc).map(|_| alloc(1)).collect()).collect();
    let phi: Vec<usize> = (0..ns).map(|_| alloc(1)).collect();
    let mut wprod = vec![vec![None; na]; ns];
    if ddu_on {
        for s in 0..ns {
            for a in 0..na {
                if instance.ddu.delta[s][a] != 0.0 {
                    wprod[s][a] = Some(alloc(1));
                }
            }
        }
    }
    let mut eta = vec![None; ns];
    let mut vprod = vec![vec![None; na]; ns];
    let nu = if risk_on { Some(alloc(1)) } else { None };
    if risk_on {
        for s in 0..ns {
            eta[s] = Some(alloc(1));
            if ddu_on {
                for a in 0..na {
                    if instance.ddu.delta[s][a] != 0.0 {
                        vprod[s][a] = Some(alloc(1));
                    }
                }
            }
        }
    }

    let mut lp = LinearProgram::new(next);
    for a in 0..na {
        lp.set_bounds(y[a], 0.0, 1.0);
        lp.set_objective(y[a], instance.arcs[a].fixed_cost);
    }
    for i in 0..nn {
        for c in 0..nc {
            lp.set_bounds(w_inv[i][c], 0.0, instance.nodes[i].storage_cap[c]);
            lp.set_objective(w_inv[i][c], instance.commodities[c].holding_cost);
        }
    }
    for s in 0..ns {
        lp.set_bounds(phi[s], 0.0, big_m);
        let p_bar = instance.scenarios[s].base_prob;
        if ddu_on {
            lp.add_objective(phi[s], (1.0 - lambda) * p_bar);
            for a in 0..na {
                if let Some(wv) = wprod[s][a] {
                    lp.set_bounds(wv, 0.0, big_m);
                    lp.add_row(&[(wv, 1.0), (phi[s], -1.0), (y[a], -big_m)], Relation::Ge, -big_m);
                    lp.add_row(&[(wv, 1.0), (phi[s], -1.0)], Relation::Le, 0.0);
                    lp.add_row(&[(wv, 1.0), (y[a], -big_m)], Relation::Le, 0.0);
                    lp.add_objective(wv, (1.0 - lambda) * k * instance.ddu.delta[s][a]);
                }
            }
            // probability validity under the current activation pattern
            let coeffs: Vec<(usize, f64)> = (0..na)
                .filter(|&a| instance.ddu.delta[s][a] != 0.0)
                .map(|a| (y[a], k * instance.ddu.delta[s][a]))
                .collect();
            if !coeffs.is_empty() {
                lp.add_row(&coeffs, Relation::Ge, -p_bar);
            }
        } else {
            lp.add_objective(phi[s], (1.0 - lambda) * fixed_probs[s]);
        }
        if let Some(ev) = eta[s] {
            let nuv = nu.expect("nu present under risk");
            lp.set_bounds(ev, 0.0, big_m);
            lp.add_row(&[(ev, 1.0), (nuv, 1.0), (phi[s], -1.0)], Relation::Ge, 0.0);
            let tail = lambda / (1.0 - alpha);
            if ddu_on {
                lp.add_objective(ev, tail * p_bar);
                for a in 0..na {
                    if let Some(vv) = vprod[s][a] {
                        lp.set_bounds(vv, 0.0, big_m);
                        lp.add_row(&[(vv, 1.0), (ev, -1.0), (y[a], -big_m)], Relation::Ge, -big_m);
                        lp.add_row(&[(vv, 1.0), (ev, -1.0)], Relation::Le, 0.0);
                        lp.add_row(&[(vv, 1.0), (y[a], -big_m)], Relation::Le, 0.0);
                        lp.add_objective(vv, tail * k * instance.ddu.delta[s][a]);
                    }
                }
            } else {
                lp.add_objective(ev, tail * fixed_probs[s]);
            }
        }
    }
    if let Some(nuv) = nu {
        lp.set_bounds(nuv, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_objective(nuv, lambda);
    }

    for cut in opt_cuts {
        let mut coeffs: Vec<(usize, f64)> = vec![(phi[cut.scenario], 1.0)];
        for (a, &g) in cut.arc_coef.iter().enumerate() {
            if g != 0.0 {
                coeffs.push((y[a], -g));
            }
        }
        for i in 0..nn {
            for c in 0..nc {
                let l = cut.inventory_coef[i][c];
                if l != 0.0 {
                    coeffs.push((w_inv[i][c], -l));
                }
            }
        }
        lp.add_row(&coeffs, Relation::Ge, cut.constant);
    }
    for cut in feas_cuts {
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        for (a, &g) in cut.arc_coef.iter().enumerate() {
            if g != 0.0 {
                coeffs.push((y[a], g));
            }
        }
        for i in 0..nn {
            for c in 0..nc {
                let l = cut.inventory_coef[i][c];
                if l != 0.0 {
                    coeffs.push((w_inv[i][c], l));
                }
            }
        }
        lp.add_row(&coeffs, Relation::Le, -cut.constant);
    }
    for cut in group_cuts {
        // phi_s >= base + sum mu_a (1 - y_a)
        let mut coeffs: Vec<(usize, f64)> = vec![(phi[cut.scenario], 1.0)];
        let mut rhs = cut.base_bound;
        for &(a, mu) in &cut.margins {
            if mu != 0.0 {
                coeffs.push((y[a], mu));
                rhs += mu;
            }
        }
        lp.add_row(&coeffs, Relation::Ge, rhs);
    }

    let binary_vars = y.clone();
    (MixedIntegerProgram { lp, binary_vars }, MasterLayout { y, w_inv, phi })
}

pub struct BendersRun {
    pub solution: EfSolution,
    pub state: BendersState,
}

/// Full decomposition: iterate master relaxations against scenario
/// subproblems until the incumbent evaluation meets the master bound.
pub fn run_benders(instance: &Instance, options: &BendersOptions) -> Result<BendersRun, BendersError> {
    let start = Instant::now();
    let ns = instance.num_scenarios();
    let lambda = if options.mode.risk_on { instance.risk.lambda } else { 0.0 };
    let fixed_probs = match (&options.mode.fixed_probs, options.mode.ddu_on) {
        (Some(p), false) => p.clone(),
        _ => instance.base_probs(),
    };
    let (big_m, _) = big_m_bounds(instance);

    let mut state = BendersState {
        lower_bound: f64::NEG_INFINITY,
        upper_bound: f64::INFINITY,
        ..BendersState::default()
    };
    if options.group_cuts {
        state.group_cuts = make_group_cuts(instance, options.group_cut_mode)?;
    }
    let mut subproblems: Vec<ScenarioSubproblem> =
        (0..ns).map(|s| ScenarioSubproblem::new(instance, s)).collect();
    let mut opt_cut_slack_age: Vec<usize> = Vec::new();
    let mut best: Option<(FirstStageDesign, Vec<crate::model::RecourseSolution>, Vec<f64>)> = None;

    for iteration in 1..=options.max_iter {
        let (mip, layout) = build_master(
            instance,
            options,
            &fixed_probs,
            &state.opt_cuts,
            &state.feas_cuts,
            &state.group_cuts,
            big_m,
        );
        let master = milp::solve_milp(&mip, options.master_rel_gap, options.master_node_limit)?;
        if master.status == MilpStatus::Infeasible {
            return Err(BendersError::MasterInfeasible);
        }
        state.lower_bound = state.lower_bound.max(master.objective);
        let design = FirstStageDesign {
            arcs_on: layout.y.iter().map(|&j| master.incumbent[j] > 0.5).collect(),
            inventory: layout
                .w_inv
                .iter()
                .map(|row| row.iter().map(|&j| master.incumbent[j]).collect())
                .collect(),
        };
        let phi_hat: Vec<f64> = layout.phi.iter().map(|&j| master.incumbent[j]).collect();

        // Scenario fan-out.
        let mut cuts_added = 0usize;
        let mut q_vals = Vec::with_capacity(ns);
        let mut solutions = Vec::with_capacity(ns);
        let mut feasible = true;
        for (s, sub) in subproblems.iter_mut().enumerate() {
            let sol = sub.solve(instance, &design)?;
            match sol.status {
                RecourseStatus::Optimal => {
                    if sol.objective > phi_hat[s] + options.epsilon * sol.objective.abs().max(1.0) {
                        state.opt_cuts.push(make_optimality_cut(&sol, instance, &design)?);
                        opt_cut_slack_age.push(0);
                        cuts_added += 1;
                    }
                    q_vals.push(sol.objective);
                    solutions.push(sol);
                }
                RecourseStatus::InfeasibleWithRay => {
                    state.feas_cuts.push(make_feasibility_cut(instance, &sol)?);
                    cuts_added += 1;
                    feasible = false;
                }
            }
        }

        // Incumbent evaluation with the true recourse values.
        if feasible {
            let probs = if options.mode.ddu_on {
                ddu_probability(instance, &design).expect("master enforces validity")
            } else {
                fixed_probs.clone()
            };
            let expected: f64 = probs.iter().zip(&q_vals).map(|(p, q)| p * q).sum();
            let (cvar, _) = cvar_of_costs(&probs, &q_vals, instance.risk.alpha);
            let total =
                instance.first_stage_cost(&design) + (1.0 - lambda) * expected + lambda * cvar;
            if total < state.upper_bound {
                state.upper_bound = total;
                state.incumbent = Some(design.clone());
                best = Some((design.clone(), solutions, q_vals));
            }
        }

        // Cut aging against the current master point.
        if let CutRetention::PruneSlack { age } = options.cut_retention {
            let mut keep = Vec::with_capacity(state.opt_cuts.len());
            for (idx, cut) in state.opt_cuts.iter().enumerate() {
                let slack = phi_hat[cut.scenario] - cut.rhs_at(&design);
                if slack > 1e-6 * phi_hat[cut.scenario].abs().max(1.0) {
                    opt_cut_slack_age[idx] += 1;
                } else {
                    opt_cut_slack_age[idx] = 0;
                }
                keep.push(opt_cut_slack_age[idx] < age);
            }
            let mut it = keep.iter();
            state.opt_cuts.retain(|_| *it.next().unwrap());
            let mut it = keep.iter();
            opt_cut_slack_age.retain(|_| *it.next().unwrap());
        }
        state.active_cuts = state
            .opt_cuts
            .iter()
            .filter(|cut| {
                (phi_hat[cut.scenario] - cut.rhs_at(&design)).abs()
                    <= 1e-6 * phi_hat[cut.scenario].abs().max(1.0)
            })
            .count();

        let gap_abs = state.upper_bound - state.lower_bound;
        let gap_rel = gap_abs / state.upper_bound.abs().max(1.0);
        state.trace.push(TraceRow {
            iteration,
            lower_bound: state.lower_bound,
            upper_bound: state.upper_bound,
            gap_abs,
            gap_pct: gap_rel * 100.0,
            cuts_added,
            runtime_sec: start.elapsed().as_secs_f64(),
        });
        state.iterations = iteration;
        if state.upper_bound.is_finite() && gap_rel < options.epsilon {
            state.converged = true;
            break;
        }
        if cuts_added == 0 {
            // No violated cut and no bound movement left: stop rather than
            // loop idle.
            break;
        }
    }

    let (design, solutions, q_vals) = best.ok_or(BendersError::NoIncumbent)?;
    let probs = if options.mode.ddu_on {
        ddu_probability(instance, &design).expect("validated above")
    } else {
        fixed_probs
    };
    let fixed_cost = instance.first_stage_cost(&design);
    let expected: f64 = probs.iter().zip(&q_vals).map(|(p, q)| p * q).sum();
    let (cvar, var_threshold) = cvar_of_costs(&probs, &q_vals, instance.risk.alpha);
    let solution = EfSolution {
        design,
        per_scenario: solutions,
        objective: state.upper_bound,
        fixed_cost,
        expected_recourse: expected,
        cvar,
        var_threshold,
        ddu_probs: probs,
        milp: MilpSummary {
            nodes_explored: state.iterations,
            gap: (state.upper_bound - state.lower_bound) / state.upper_bound.abs().max(1.0),
            objective: state.upper_bound,
        },
        mccormick_max_err: 0.0,
    };
    Ok(BendersRun { solution, state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ef::{build_extensive_form, solve_extensive_form};
    use crate::io::gen;

    #[test]
    fn single_scenario_converges_fast() {
        let mut inst = gen::trapped_toy_instance();
        inst.scenarios.truncate(1);
        inst.scenarios[0].base_prob = 1.0;
        inst.ddu.delta.truncate(1);
        let opts = BendersOptions {
            mode: EfOptions::risk_neutral_fixed_probs(),
            ..BendersOptions::default()
        };
        let run = run_benders(&inst, &opts).unwrap();
        assert!(run.state.converged);
        assert!(run.state.iterations <= 3, "iterations {}", run.state.iterations);
    }

    #[test]
    fn matches_extensive_form_on_toy() {
        let inst = gen::toy_instance();
        let art = build_extensive_form(&inst, EfOptions::default()).unwrap();
        let ef = solve_extensive_form(&inst, &art).unwrap();
        let run = run_benders(&inst, &BendersOptions::default()).unwrap();
        assert!(run.state.converged, "trace: {:?}", run.state.trace);
        let diff = (run.solution.objective - ef.objective).abs();
        assert!(
            diff <= 1e-6 * ef.objective.abs().max(1.0),
            "benders {} vs ef {}",
            run.solution.objective,
            ef.objective
        );
    }

    #[test]
    fn trapped_toy_needs_feasibility_cuts() {
        let inst = gen::trapped_toy_instance();
        let opts = BendersOptions {
            mode: EfOptions::risk_neutral_fixed_probs(),
            ..BendersOptions::default()
        };
        let run = run_benders(&inst, &opts).unwrap();
        assert!(run.state.converged);
        assert!(!run.state.feas_cuts.is_empty(), "expected feasibility cuts");
        // Both lanes must be open to survive the slump scenario.
        assert_eq!(run.solution.design.arcs_on, vec![true, true]);
    }

    #[test]
    fn bounds_are_monotone_and_ordered() {
        let inst = gen::toy_instance();
        let run = run_benders(&inst, &BendersOptions::default()).unwrap();
        let mut prev_lb = f64::NEG_INFINITY;
        let mut prev_ub = f64::INFINITY;
        for row in &run.state.trace {
            assert!(row.lower_bound >= prev_lb - 1e-9);
            assert!(row.upper_bound <= prev_ub + 1e-9);
            assert!(row.lower_bound <= row.upper_bound + 1e-6);
            prev_lb = row.lower_bound;
            prev_ub = row.upper_bound;
        }
    }

    #[test]
    fn safe_group_cuts_leave_optimum_unchanged() {
        let inst = gen::toy_instance();
        let plain = run_benders(&inst, &BendersOptions::default()).unwrap();
        let with_cuts = run_benders(
            &inst,
            &BendersOptions { group_cuts: true, ..BendersOptions::default() },
        )
        .unwrap();
        assert!(!with_cuts.state.group_cuts.is_empty());
        let diff = (plain.solution.objective - with_cuts.solution.objective).abs();
        assert!(diff <= 1e-9 * plain.solution.objective.abs().max(1.0), "diff {diff}");
    }

    #[test]
    fn no_group_cuts_for_undisrupted_corridor() {
        let inst = gen::toy_instance();
        let cuts = make_group_cuts(&inst, GroupCutMode::Safe).unwrap();
        // the "local" corridor never loses capacity
        assert!(cuts.iter().all(|c| inst.corridors[c.corridor].id != "local"));
        assert!(!cuts.is_empty());
    }
}
