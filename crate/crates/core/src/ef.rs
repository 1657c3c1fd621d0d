//! Deterministic-equivalent (extensive form) MILP: first-stage design,
//! every scenario recourse block, activation-dependent probabilities, and
//! the CVaR bracket, with each bilinear activation product linearized
//! exactly through big-M envelopes.

use crate::lp::{LinearProgram, Relation};
use crate::milp::{self, MilpResult, MilpStatus, MixedIntegerProgram};
use crate::model::{
    cvar_of_costs, ddu_probability, FirstStageDesign, Instance, ModelError, RecourseDuals,
    RecourseSolution, RecourseStatus,
};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum EfError {
    #[error("fixed probabilities sum to {0}, expected 1")]
    BadFixedProbs(f64),
    #[error("fixed probabilities cannot be combined with activation-dependent mode")]
    FixedProbsWithDdu,
    #[error("extensive form is infeasible: every design leaves some scenario unservable")]
    Infeasible,
    #[error(transparent)]
    Milp(#[from] milp::MilpError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Pin for cross-evaluating a given design inside the extensive form.
#[derive(Clone, Debug)]
pub struct DesignPin {
    pub arcs_on: Vec<bool>,
    /// if absent, inventory stays free
    pub inventory: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug)]
pub struct EfOptions {
    pub ddu_on: bool,
    pub risk_on: bool,
    pub fixed_probs: Option<Vec<f64>>,
    pub fixed_design: Option<DesignPin>,
    /// tighten the product envelopes with per-scenario transport terms
    pub per_scenario_big_m: bool,
}

impl Default for EfOptions {
    fn default() -> Self {
        EfOptions {
            ddu_on: true,
            risk_on: true,
            fixed_probs: None,
            fixed_design: None,
            per_scenario_big_m: false,
        }
    }
}

impl EfOptions {
    pub fn risk_neutral_fixed_probs() -> EfOptions {
        EfOptions { ddu_on: false, risk_on: false, ..EfOptions::default() }
    }
}

/// Variable index maps for every symbol family in the extensive form.
#[derive(Clone, Debug, Default)]
pub struct EfIndexMap {
    pub y: Vec<usize>,
    /// w_inv[node][commodity]
    pub w_inv: Vec<Vec<usize>>,
    /// x[scenario][arc][commodity]
    pub x: Vec<Vec<Vec<usize>>>,
    /// inv[scenario][node][commodity]
    pub inv: Vec<Vec<Vec<usize>>>,
    /// shortage[scenario][node][commodity]; only demand pairs carry one
    pub short: Vec<Vec<Vec<Option<usize>>>>,
    /// recourse-cost variable per scenario (activation-dependent mode only)
    pub q: Vec<Option<usize>>,
    pub nu: Option<usize>,
    pub xi: Vec<Option<usize>>,
    /// product y_a * Q_s per (scenario, arc) with a probability shift
    pub wprod: Vec<Vec<Option<usize>>>,
    /// product y_a * xi_s per (scenario, arc) with a probability shift
    pub vprod: Vec<Vec<Option<usize>>>,
}

#[derive(Clone, Debug)]
pub struct EfArtifacts {
    pub mip: MixedIntegerProgram,
    pub index: EfIndexMap,
    /// recourse-cost envelope bound per scenario
    pub big_m_q: Vec<f64>,
    /// excess-variable envelope bound per scenario
    pub big_m_xi: Vec<f64>,
    pub options: EfOptions,
    /// probabilities used when activation dependence is off
    pub fixed_probs: Vec<f64>,
    /// effective risk weight (0 when risk is off)
    pub lambda: f64,
}

#[derive(Clone, Debug)]
pub struct EfSolution {
    pub design: FirstStageDesign,
    pub per_scenario: Vec<RecourseSolution>,
    pub objective: f64,
    pub fixed_cost: f64,
    pub expected_recourse: f64,
    pub cvar: f64,
    pub var_threshold: f64,
    pub ddu_probs: Vec<f64>,
    pub milp: MilpSummary,
    /// worst deviation |w - y*Q| or |v - y*xi| observed at the incumbent
    pub mccormick_max_err: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct MilpSummary {
    pub nodes_explored: usize,
    pub gap: f64,
    pub objective: f64,
}

/// Valid envelope bounds on the scenario recourse cost and CVaR excess.
///
/// Shortage is bounded by demand, inventory by storage, and flow by the
/// admissible scenario capacity, so transport + holding + penalty at those
/// caps dominates any feasible recourse cost. The uniform bound takes the
/// worst scenario's transport term; the per-scenario variant keeps each
/// scenario's own.
pub fn big_m_bounds(instance: &Instance) -> (f64, f64) {
    let (q, _) = big_m_bounds_per_scenario(instance);
    let m = q.iter().cloned().fold(0.0f64, f64::max);
    (m, m)
}

pub fn big_m_bounds_per_scenario(instance: &Instance) -> (Vec<f64>, Vec<f64>) {
    let nc = instance.num_commodities();
    let penalty_term: f64 = instance
        .nodes
        .iter()
        .map(|n| {
            (0..nc).map(|c| n.demand[c] * instance.commodities[c].shortage_penalty).sum::<f64>()
        })
        .sum();
    let holding_term: f64 = instance
        .nodes
        .iter()
        .map(|n| (0..nc).map(|c| n.storage_cap[c] * instance.commodities[c].holding_cost).sum::<f64>())
        .sum();
    let mut q = Vec::with_capacity(instance.num_scenarios());
    for s in 0..instance.num_scenarios() {
        let transport: f64 = (0..instance.num_arcs())
            .map(|a| {
                (0..nc)
                    .map(|c| instance.effective_capacity(a, c, s) * instance.unit_cost(a, c, s))
                    .sum::<f64>()
            })
            .sum();
        q.push(penalty_term + holding_term + transport);
    }
    let xi = q.clone();
    (q, xi)
}

/// Assemble the extensive-form MILP for an instance under the given options.
pub fn build_extensive_form(instance: &Instance, options: EfOptions) -> Result<EfArtifacts, EfError> {
    let ns = instance.num_scenarios();
    let na = instance.num_arcs();
    let nn = instance.num_nodes();
    let nc = instance.num_commodities();
    let lambda = if options.risk_on { instance.risk.lambda } else { 0.0 };
    let alpha = instance.risk.alpha;

    let fixed_probs = match (&options.fixed_probs, options.ddu_on) {
        (Some(_), true) => return Err(EfError::FixedProbsWithDdu),
        (Some(p), false) => {
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(EfError::BadFixedProbs(sum));
            }
            p.clone()
        }
        (None, _) => instance.base_probs(),
    };

    let (mq_all, mxi_all) = if options.per_scenario_big_m {
        big_m_bounds_per_scenario(instance)
    } else {
        let (q, xi) = big_m_bounds(instance);
        (vec![q; ns], vec![xi; ns])
    };

    let mut index = EfIndexMap::default();
    let mut next = 0usize;
    let mut alloc = |n: usize| {
        let base = next;
        next += n;
        base
    };

    // First stage.
    let y0 = alloc(na);
    index.y = (y0..y0 + na).collect();
    index.w_inv = (0..nn).map(|_| (0..nc).map(|_| alloc(1)).collect()).collect();

    // Scenario blocks.
    index.x = vec![vec![vec![usize::MAX; nc]; na]; ns];
    index.inv = vec![vec![vec![usize::MAX; nc]; nn]; ns];
    index.short = vec![vec![vec![None; nc]; nn]; ns];
    for s in 0..ns {
        for a in 0..na {
            for c in 0..nc {
                index.x[s][a][c] = alloc(1);
            }
        }
        for i in 0..nn {
            for c in 0..nc {
                index.inv[s][i][c] = alloc(1);
                if instance.nodes[i].demand[c] > 0.0 {
                    index.short[s][i][c] = Some(alloc(1));
                }
            }
        }
    }
    index.q = vec![None; ns];
    index.wprod = vec![vec![None; na]; ns];
    index.vprod = vec![vec![None; na]; ns];
    if options.ddu_on {
        for s in 0..ns {
            index.q[s] = Some(alloc(1));
            for a in 0..na {
                if instance.ddu.delta[s][a] != 0.0 {
                    index.wprod[s][a] = Some(alloc(1));
                }
            }
        }
    }
    index.xi = vec![None; ns];
    if options.risk_on {
        index.nu = Some(alloc(1));
        for s in 0..ns {
            index.xi[s] = Some(alloc(1));
            if options.ddu_on {
                for a in 0..na {
                    if instance.ddu.delta[s][a] != 0.0 {
                        index.vprod[s][a] = Some(alloc(1));
                    }
                }
            }
        }
    }

    let mut lp = LinearProgram::new(next);

    // Bounds and first-stage objective.
    for a in 0..na {
        lp.set_bounds(index.y[a], 0.0, 1.0);
        lp.set_objective(index.y[a], instance.arcs[a].fixed_cost);
    }
    for i in 0..nn {
        for c in 0..nc {
            lp.set_bounds(index.w_inv[i][c], 0.0, instance.nodes[i].storage_cap[c]);
            lp.set_objective(index.w_inv[i][c], instance.commodities[c].holding_cost);
        }
    }
    if let Some(pin) = &options.fixed_design {
        for a in 0..na {
            let v = if pin.arcs_on[a] { 1.0 } else { 0.0 };
            lp.set_bounds(index.y[a], v, v);
        }
        if let Some(inv) = &pin.inventory {
            for i in 0..nn {
                for c in 0..nc {
                    lp.set_bounds(index.w_inv[i][c], inv[i][c], inv[i][c]);
                }
            }
        }
    }

    let k = instance.ddu.k;
    for s in 0..ns {
        let p_bar = instance.scenarios[s].base_prob;
        // Per-unit objective weight of the scenario cost expression when the
        // cost enters the objective directly (activation dependence off).
        let direct_weight = if options.ddu_on {
            0.0
        } else {
            (1.0 - lambda) * fixed_probs[s]
        };
        for a in 0..na {
            for c in 0..nc {
                let xj = index.x[s][a][c];
                let cap = instance.effective_capacity(a, c, s);
                lp.set_bounds(xj, 0.0, cap);
                if cap > 0.0 {
                    // capacity-admissibility linking row
                    lp.add_row(&[(xj, 1.0), (index.y[a], -cap)], Relation::Le, 0.0);
                }
                if direct_weight != 0.0 {
                    lp.set_objective(xj, direct_weight * instance.unit_cost(a, c, s));
                }
            }
        }
        for i in 0..nn {
            for c in 0..nc {
                let inv = index.inv[s][i][c];
                lp.set_bounds(inv, 0.0, instance.nodes[i].storage_cap[c]);
                if direct_weight != 0.0 {
                    lp.set_objective(inv, direct_weight * instance.commodities[c].holding_cost);
                }
                if let Some(u) = index.short[s][i][c] {
                    lp.set_bounds(u, 0.0, instance.nodes[i].demand[c]);
                    if direct_weight != 0.0 {
                        lp.set_objective(u, direct_weight * instance.commodities[c].shortage_penalty);
                    }
                }
                // Flow balance: W + r + in - out - d + u = I.
                let mut coeffs: Vec<(usize, f64)> = vec![(index.w_inv[i][c], 1.0), (inv, -1.0)];
                if let Some(u) = index.short[s][i][c] {
                    coeffs.push((u, 1.0));
                }
                for (a, arc) in instance.arcs.iter().enumerate() {
                    if instance.effective_capacity(a, c, s) <= 0.0 {
                        continue;
                    }
                    if arc.head == i {
                        coeffs.push((index.x[s][a][c], 1.0));
                    }
                    if arc.tail == i {
                        coeffs.push((index.x[s][a][c], -1.0));
                    }
                }
                let rhs = instance.nodes[i].demand[c] - instance.nodes[i].supply[c];
                lp.add_row(&coeffs, Relation::Eq, rhs);
            }
        }
        // Corridor-dependence caps, kept in every scenario.
        for (l, corridor) in instance.corridors.iter().enumerate() {
            let phi = corridor.dependence_cap;
            let mut coeffs: Vec<(usize, f64)> = Vec::new();
            for (a, arc) in instance.arcs.iter().enumerate() {
                for c in 0..nc {
                    if instance.effective_capacity(a, c, s) <= 0.0 {
                        continue;
                    }
                    let w = if arc.corridor == l { 1.0 - phi } else { -phi };
                    coeffs.push((index.x[s][a][c], w));
                }
            }
            lp.add_row(&coeffs, Relation::Le, 0.0);
        }
        // Scenario cost variable and product envelopes.
        if let Some(qv) = index.q[s] {
            lp.set_bounds(qv, 0.0, mq_all[s]);
            let mut defn: Vec<(usize, f64)> = vec![(qv, 1.0)];
            for a in 0..na {
                for c in 0..nc {
                    if instance.effective_capacity(a, c, s) > 0.0 {
                        defn.push((index.x[s][a][c], -instance.unit_cost(a, c, s)));
                    }
                }
            }
            for i in 0..nn {
                for c in 0..nc {
                    defn.push((index.inv[s][i][c], -instance.commodities[c].holding_cost));
                    if let Some(u) = index.short[s][i][c] {
                        defn.push((u, -instance.commodities[c].shortage_penalty));
                    }
                }
            }
            lp.add_row(&defn, Relation::Eq, 0.0);
            lp.add_objective(qv, (1.0 - lambda) * p_bar);
            for a in 0..na {
                if let Some(wv) = index.wprod[s][a] {
                    let m = mq_all[s];
                    lp.set_bounds(wv, 0.0, m);
                    lp.add_row(&[(wv, 1.0), (qv, -1.0), (index.y[a], -m)], Relation::Ge, -m);
                    lp.add_row(&[(wv, 1.0), (qv, -1.0)], Relation::Le, 0.0);
                    lp.add_row(&[(wv, 1.0), (index.y[a], -m)], Relation::Le, 0.0);
                    lp.add_objective(wv, (1.0 - lambda) * k * instance.ddu.delta[s][a]);
                }
            }
        }
        if let Some(xiv) = index.xi[s] {
            let nu = index.nu.expect("nu exists whenever xi does");
            let has_products = options.ddu_on;
            let xi_ub = if has_products { mxi_all[s] } else { f64::INFINITY };
            lp.set_bounds(xiv, 0.0, xi_ub);
            // xi >= Q - nu
            if let Some(qv) = index.q[s] {
                lp.add_row(&[(xiv, 1.0), (nu, 1.0), (qv, -1.0)], Relation::Ge, 0.0);
            } else {
                let mut coeffs: Vec<(usize, f64)> = vec![(xiv, 1.0), (nu, 1.0)];
                for a in 0..na {
                    for c in 0..nc {
                        if instance.effective_capacity(a, c, s) > 0.0 {
                            coeffs.push((index.x[s][a][c], -instance.unit_cost(a, c, s)));
                        }
                    }
                }
                for i in 0..nn {
                    for c in 0..nc {
                        coeffs.push((index.inv[s][i][c], -instance.commodities[c].holding_cost));
                        if let Some(u) = index.short[s][i][c] {
                            coeffs.push((u, -instance.commodities[c].shortage_penalty));
                        }
                    }
                }
                lp.add_row(&coeffs, Relation::Ge, 0.0);
            }
            let tail_weight = lambda / (1.0 - alpha);
            if options.ddu_on {
                lp.add_objective(xiv, tail_weight * p_bar);
                for a in 0..na {
                    if let Some(vv) = index.vprod[s][a] {
                        let m = mxi_all[s];
                        lp.set_bounds(vv, 0.0, m);
                        lp.add_row(&[(vv, 1.0), (xiv, -1.0), (index.y[a], -m)], Relation::Ge, -m);
                        lp.add_row(&[(vv, 1.0), (xiv, -1.0)], Relation::Le, 0.0);
                        lp.add_row(&[(vv, 1.0), (index.y[a], -m)], Relation::Le, 0.0);
                        lp.add_objective(vv, tail_weight * k * instance.ddu.delta[s][a]);
                    }
                }
            } else {
                lp.add_objective(xiv, tail_weight * fixed_probs[s]);
            }
        }
    }
    if let Some(nu) = index.nu {
        lp.set_bounds(nu, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_objective(nu, lambda);
    }

    let binary_vars = index.y.clone();
    Ok(EfArtifacts {
        mip: MixedIntegerProgram { lp, binary_vars },
        index,
        big_m_q: mq_all,
        big_m_xi: mxi_all,
        options,
        fixed_probs,
        lambda,
    })
}

pub const DEFAULT_REL_GAP: f64 = 1e-9;
pub const DEFAULT_NODE_LIMIT: usize = 2_000_000;

pub fn solve_extensive_form(instance: &Instance, artifacts: &EfArtifacts) -> Result<EfSolution, EfError> {
    solve_extensive_form_with(instance, artifacts, DEFAULT_REL_GAP, DEFAULT_NODE_LIMIT)
}

pub fn solve_extensive_form_with(
    instance: &Instance,
    artifacts: &EfArtifacts,
    rel_gap: f64,
    node_limit: usize,
) -> Result<EfSolution, EfError> {
    let res = milp::solve_milp(&artifacts.mip, rel_gap, node_limit)?;
    if res.status == MilpStatus::Infeasible {
        return Err(EfError::Infeasible);
    }
    Ok(extract_solution(instance, artifacts, &res))
}

fn extract_solution(instance: &Instance, artifacts: &EfArtifacts, res: &MilpResult) -> EfSolution {
    let ns = instance.num_scenarios();
    let na = instance.num_arcs();
    let nn = instance.num_nodes();
    let nc = instance.num_commodities();
    let index = &artifacts.index;
    let x = &res.incumbent;

    let design = FirstStageDesign {
        arcs_on: (0..na).map(|a| x[index.y[a]] > 0.5).collect(),
        inventory: (0..nn).map(|i| (0..nc).map(|c| x[index.w_inv[i][c]]).collect()).collect(),
    };
    let mut per_scenario = Vec::with_capacity(ns);
    let mut q_vals = Vec::with_capacity(ns);
    for s in 0..ns {
        let flows: Vec<Vec<f64>> =
            (0..na).map(|a| (0..nc).map(|c| x[index.x[s][a][c]]).collect()).collect();
        let inv: Vec<Vec<f64>> =
            (0..nn).map(|i| (0..nc).map(|c| x[index.inv[s][i][c]]).collect()).collect();
        let short: Vec<Vec<f64>> = (0..nn)
            .map(|i| (0..nc).map(|c| index.short[s][i][c].map_or(0.0, |u| x[u])).collect())
            .collect();
        let mut q = 0.0;
        for a in 0..na {
            for c in 0..nc {
                q += instance.unit_cost(a, c, s) * flows[a][c];
            }
        }
        for i in 0..nn {
            for c in 0..nc {
                q += instance.commodities[c].holding_cost * inv[i][c]
                    + instance.commodities[c].shortage_penalty * short[i][c];
            }
        }
        q_vals.push(q);
        per_scenario.push(RecourseSolution {
            scenario: s,
            flows,
            ending_inventory: inv,
            shortage: short,
            objective: q,
            duals: RecourseDuals::default(),
            status: RecourseStatus::Optimal,
        });
    }

    let probs = if artifacts.options.ddu_on {
        ddu_probability(instance, &design).expect("incumbent within the validity region")
    } else {
        artifacts.fixed_probs.clone()
    };
    let fixed_cost = instance.first_stage_cost(&design);
    let expected: f64 = probs.iter().zip(&q_vals).map(|(p, q)| p * q).sum();
    let (cvar, var_threshold) = cvar_of_costs(&probs, &q_vals, instance.risk.alpha);
    let lambda = artifacts.lambda;
    let objective = fixed_cost + (1.0 - lambda) * expected + lambda * cvar;

    // Post-hoc exactness of the product variables at the incumbent.
    let mut mc_err = 0.0f64;
    for s in 0..ns {
        if let Some(qv) = index.q[s] {
            for a in 0..na {
                if let Some(wv) = index.wprod[s][a] {
                    let yv = x[index.y[a]].round();
                    mc_err = mc_err.max((x[wv] - yv * x[qv]).abs());
                }
            }
        }
        if let Some(xiv) = index.xi[s] {
            for a in 0..na {
                if let Some(vv) = index.vprod[s][a] {
                    let yv = x[index.y[a]].round();
                    mc_err = mc_err.max((x[vv] - yv * x[xiv]).abs());
                }
            }
        }
    }

    EfSolution {
        design,
        per_scenario,
        objective,
        fixed_cost,
        expected_recourse: expected,
        cvar,
        var_threshold,
        ddu_probs: probs,
        milp: MilpSummary { nodes_explored: res.nodes_explored, gap: res.gap, objective: res.objective },
        mccormick_max_err: mc_err,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::gen;
    use crate::model::{Commodity, Corridor, CorridorKind, DduMatrix, Node, NodeKind, RiskParams, Scenario};

    /// One isolated demand node, no arcs: everything shorts.
    fn no_route_instance() -> Instance {
        Instance {
            commodities: vec![Commodity { id: "g".into(), holding_cost: 0.2, shortage_penalty: 50.0 }],
            nodes: vec![Node {
                id: "d".into(),
                kind: NodeKind::Demand,
                supply: vec![0.0],
                demand: vec![10.0],
                storage_cap: vec![0.0],
            }],
            arcs: vec![],
            corridors: vec![Corridor { id: "c".into(), dependence_cap: 1.0, kind: CorridorKind::Maritime }],
            scenarios: vec![Scenario {
                id: "only".into(),
                name: "Only".into(),
                base_prob: 1.0,
                capacity_mult: vec![1.0],
                cost_mult: vec![1.0],
                admissibility_override: vec![],
                capacity_scale: vec![],
            }],
            ddu: DduMatrix::zero(1, 0),
            risk: RiskParams { lambda: 0.0, alpha: 0.95 },
        }
    }

    #[test]
    fn no_routes_shorts_everything() {
        let inst = no_route_instance();
        let art = build_extensive_form(&inst, EfOptions::risk_neutral_fixed_probs()).unwrap();
        let sol = solve_extensive_form(&inst, &art).unwrap();
        assert!((sol.objective - 500.0).abs() < 1e-9, "objective {}", sol.objective);
        assert!((sol.per_scenario[0].shortage[0][0] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn big_m_matches_hand_arithmetic_without_arcs() {
        let inst = no_route_instance();
        let (mq, mxi) = big_m_bounds(&inst);
        assert!((mq - 500.0).abs() < 1e-12);
        assert_eq!(mq, mxi);
    }

    #[test]
    fn ddu_with_zero_delta_matches_ddu_off() {
        let mut inst = gen::toy_instance();
        for row in inst.ddu.delta.iter_mut() {
            for d in row.iter_mut() {
                *d = 0.0;
            }
        }
        let on = build_extensive_form(&inst, EfOptions::default()).unwrap();
        let off = build_extensive_form(
            &inst,
            EfOptions { ddu_on: false, ..EfOptions::default() },
        )
        .unwrap();
        let sol_on = solve_extensive_form(&inst, &on).unwrap();
        let sol_off = solve_extensive_form(&inst, &off).unwrap();
        assert!(
            (sol_on.objective - sol_off.objective).abs() <= 1e-9 * sol_off.objective.abs().max(1.0),
            "ddu-on {} vs ddu-off {}",
            sol_on.objective,
            sol_off.objective
        );
    }

    #[test]
    fn fixed_probs_must_sum_to_one() {
        let inst = gen::toy_instance();
        let opts = EfOptions {
            ddu_on: false,
            risk_on: false,
            fixed_probs: Some(vec![0.5, 0.2, 0.2, 0.2]),
            ..EfOptions::default()
        };
        assert!(matches!(build_extensive_form(&inst, opts), Err(EfError::BadFixedProbs(_))));
    }

    #[test]
    fn risk_neutral_lambda_zero_equals_risk_off() {
        let mut inst = gen::toy_instance();
        inst.risk.lambda = 0.0;
        let with_risk = build_extensive_form(&inst, EfOptions::default()).unwrap();
        let without = build_extensive_form(&inst, EfOptions { risk_on: false, ..EfOptions::default() }).unwrap();
        let a = solve_extensive_form(&inst, &with_risk).unwrap();
        let b = solve_extensive_form(&inst, &without).unwrap();
        assert!((a.objective - b.objective).abs() <= 1e-9 * b.objective.abs().max(1.0));
    }

    #[test]
    fn corridor_share_respected_in_solution() {
        let inst = gen::toy_instance();
        let art = build_extensive_form(&inst, EfOptions::default()).unwrap();
        let sol = solve_extensive_form(&inst, &art).unwrap();
        for (s, rec) in sol.per_scenario.iter().enumerate() {
            let total: f64 = rec.flows.iter().flatten().sum();
            if total <= 0.0 {
                continue;
            }
            for (l, corridor) in inst.corridors.iter().enumerate() {
                let corr_flow: f64 = inst
                    .arcs
                    .iter()
                    .enumerate()
                    .filter(|(_, arc)| arc.corridor == l)
                    .map(|(a, _)| rec.flows[a].iter().sum::<f64>())
                    .sum();
                assert!(
                    corr_flow / total <= corridor.dependence_cap + 1e-7,
                    "scenario {s} corridor {l}: share {} vs cap {}",
                    corr_flow / total,
                    corridor.dependence_cap
                );
            }
        }
    }
}
