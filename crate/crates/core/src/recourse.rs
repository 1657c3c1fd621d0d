//! Scenario subproblems for fixed first-stage decisions: solution with
//! dual extraction, optimality/feasibility cut generation, and evaluation
//! of a design across the whole scenario library.
//!
//! Subproblem construction here is deliberately independent of the
//! extensive-form builder so the two can cross-check each other.

use crate::lp::{self, Basis, LinearProgram, LpError, LpStatus, Relation};
use crate::model::{
    cvar_of_costs, FirstStageDesign, Instance, RecourseDuals, RecourseSolution, RecourseStatus,
    RiskParams,
};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum RecourseError {
    #[error("design is infeasible in scenario {scenario}")]
    InfeasibleDesign { scenario: usize },
    #[error("optimality cut requires duals from an optimal subproblem solve")]
    CutFromNonOptimal,
    #[error("feasibility cut requires a Farkas ray from an infeasible solve")]
    CutFromFeasible,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Supporting hyperplane on the scenario recourse function:
/// Q_s(y, W) >= constant + sum_a arc_coef[a] y_a + sum_ic inv_coef[i][c] W_ic.
#[derive(Clone, Debug)]
pub struct OptimalityCut {
    pub scenario: usize,
    pub constant: f64,
    pub arc_coef: Vec<f64>,
    pub inventory_coef: Vec<Vec<f64>>,
}

impl OptimalityCut {
    pub fn rhs_at(&self, design: &FirstStageDesign) -> f64 {
        let mut v = self.constant;
        for (a, &on) in design.arcs_on.iter().enumerate() {
            if on {
                v += self.arc_coef[a];
            }
        }
        for (i, row) in design.inventory.iter().enumerate() {
            for (c, &w) in row.iter().enumerate() {
                v += self.inventory_coef[i][c] * w;
            }
        }
        v
    }
}

/// Farkas-derived exclusion: designs with
/// constant + sum arc_coef y + sum inv_coef W > 0 have no feasible recourse
/// in the named scenario.
#[derive(Clone, Debug)]
pub struct FeasibilityCut {
    pub scenario: usize,
    pub constant: f64,
    pub arc_coef: Vec<f64>,
    pub inventory_coef: Vec<Vec<f64>>,
}

impl FeasibilityCut {
    pub fn violation_at(&self, design: &FirstStageDesign) -> f64 {
        let mut v = self.constant;
        for (a, &on) in design.arcs_on.iter().enumerate() {
            if on {
                v += self.arc_coef[a];
            }
        }
        for (i, row) in design.inventory.iter().enumerate() {
            for (c, &w) in row.iter().enumerate() {
                v += self.inventory_coef[i][c] * w;
            }
        }
        v
    }
}

/// Row/column bookkeeping for one scenario LP.
struct SubLayout {
    /// x[a][c] variable index for lanes with positive effective capacity
    x: Vec<Vec<Option<usize>>>,
    inv: Vec<Vec<usize>>,
    short: Vec<Vec<Option<usize>>>,
    flow_row: Vec<Vec<usize>>,
    cap_row: Vec<Vec<Option<usize>>>,
    corridor_row: Vec<usize>,
}

/// Reusable scenario subproblem: the matrix is fixed, only the right-hand
/// side moves with the design, so repeated solves warm start.
pub struct ScenarioSubproblem {
    pub scenario: usize,
    lp: LinearProgram,
    layout: SubLayout,
    last_basis: Option<Basis>,
}

impl ScenarioSubproblem {
    pub fn new(instance: &Instance, scenario: usize) -> ScenarioSubproblem {
        let na = instance.num_arcs();
        let nn = instance.num_nodes();
        let nc = instance.num_commodities();
        let mut next = 0usize;
        let mut alloc = |n: usize| {
            let b = next;
            next += n;
            b
        };
        let mut x = vec![vec![None; nc]; na];
        for (a, lane) in x.iter_mut().enumerate() {
            for (c, slot) in lane.iter_mut().enumerate() {
                if instance.effective_capacity(a, c, scenario) > 0.0 {
                    *slot = Some(alloc(1));
                }
            }
        }
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
                }
            }
        }
        for i in 0..nn {
            for c in 0..nc {
                lp.set_bounds(inv[i][c], 0.0, instance.nodes[i].storage_cap[c]);
                lp.set_objective(inv[i][c], instance.commodities[c].holding_cost);
                if let Some(j) = short[i][c] {
                    lp.set_bounds(j, 0.0, instance.nodes[i].demand[c]);
                    lp.set_objective(j, instance.commodities[c].shortage_penalty);
                }
            }
        }
        // Flow balance: in - out + u - I = d - r - W  (W lands in the rhs).
        let mut flow_row = vec![vec![usize::MAX; nc]; nn];
        for i in 0..nn {
            for c in 0..nc {
                let mut coeffs: Vec<(usize, f64)> = vec![(inv[i][c], -1.0)];
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
                flow_row[i][c] = lp.add_row(&coeffs, Relation::Eq, 0.0);
            }
        }
        // Capacity-admissibility rows: x <= theta ubar y (rhs set per design).
        let mut cap_row = vec![vec![None; nc]; na];
        for a in 0..na {
            for c in 0..nc {
                if let Some(j) = x[a][c] {
                    cap_row[a][c] = Some(lp.add_row(&[(j, 1.0)], Relation::Le, 0.0));
                }
            }
        }
        // Corridor-dependence caps.
        let mut corridor_row = Vec::with_capacity(instance.corridors.len());
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
            corridor_row.push(lp.add_row(&coeffs, Relation::Le, 0.0));
        }
        ScenarioSubproblem {
            scenario,
            lp,
            layout: SubLayout { x, inv, short, flow_row, cap_row, corridor_row },
            last_basis: None,
        }
    }

    fn set_design(&mut self, instance: &Instance, design: &FirstStageDesign) {
        let s = self.scenario;
        for (i, node) in instance.nodes.iter().enumerate() {
            for c in 0..node.demand.len() {
                let rhs = node.demand[c] - node.supply[c] - design.inventory[i][c];
                self.lp.set_row_rhs(self.layout.flow_row[i][c], rhs);
            }
        }
        for a in 0..instance.num_arcs() {
            for c in 0..instance.num_commodities() {
                if let Some(row) = self.layout.cap_row[a][c] {
                    let rhs = if design.arcs_on[a] {
                        instance.effective_capacity(a, c, s)
                    } else {
                        0.0
                    };
                    self.lp.set_row_rhs(row, rhs);
                }
            }
        }
    }

    pub fn solve(
        &mut self,
        instance: &Instance,
        design: &FirstStageDesign,
    ) -> Result<RecourseSolution, RecourseError> {
        self.set_design(instance, design);
        let res = match &self.last_basis {
            Some(b) => lp::warm_start_resolve(&self.lp, b)?,
            None => lp::solve_lp(&self.lp)?,
        };
        let s = self.scenario;
        let na = instance.num_arcs();
        let nn = instance.num_nodes();
        let nc = instance.num_commodities();
        match res.status {
            LpStatus::Optimal => {
                self.last_basis = Some(res.basis.clone());
                let flows: Vec<Vec<f64>> = (0..na)
                    .map(|a| {
                        (0..nc)
                            .map(|c| self.layout.x[a][c].map_or(0.0, |j| res.primal[j]))
                            .collect()
                    })
                    .collect();
                let inv: Vec<Vec<f64>> = (0..nn)
                    .map(|i| (0..nc).map(|c| res.primal[self.layout.inv[i][c]]).collect())
                    .collect();
                let short: Vec<Vec<f64>> = (0..nn)
                    .map(|i| {
                        (0..nc)
                            .map(|c| self.layout.short[i][c].map_or(0.0, |j| res.primal[j]))
                            .collect()
                    })
                    .collect();
                // Recompute the cost expression on the primal point.
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
                debug_assert!((q - res.objective).abs() <= 1e-9 * q.abs().max(1.0));
                let duals = self.collect_duals(&res.dual, na, nn, nc);
                Ok(RecourseSolution {
                    scenario: s,
                    flows,
                    ending_inventory: inv,
                    shortage: short,
                    objective: q,
                    duals,
                    status: RecourseStatus::Optimal,
                })
            }
            LpStatus::Infeasible => {
                self.last_basis = None;
                let ray = res.farkas_ray.expect("infeasible result carries a ray");
                let duals = self.collect_duals(&ray, na, nn, nc);
                Ok(RecourseSolution {
                    scenario: s,
                    flows: Vec::new(),
                    ending_inventory: Vec::new(),
                    shortage: Vec::new(),
                    objective: f64::INFINITY,
                    duals,
                    status: RecourseStatus::InfeasibleWithRay,
                })
            }
            LpStatus::Unbounded => Err(RecourseError::Lp(LpError::NumericFailure(
                "recourse subproblem cannot be unbounded".into(),
            ))),
        }
    }

    fn collect_duals(&self, row_duals: &[f64], na: usize, nn: usize, nc: usize) -> RecourseDuals {
        let mut flow = vec![0.0; nn * nc];
        for i in 0..nn {
            for c in 0..nc {
                flow[i * nc + c] = row_duals[self.layout.flow_row[i][c]];
            }
        }
        let mut cap = vec![0.0; na * nc];
        for a in 0..na {
            for c in 0..nc {
                if let Some(r) = self.layout.cap_row[a][c] {
                    cap[a * nc + c] = row_duals[r];
                }
            }
        }
        let corridor = self.layout.corridor_row.iter().map(|&r| row_duals[r]).collect();
        RecourseDuals { flow_balance: flow, capacity: cap, corridor }
    }

    /// Design-independent part of the Farkas certificate: the supremum of
    /// the ray-weighted matrix over the variable box.
    fn ray_box_supremum(&self, ray: &[f64]) -> f64 {
        let n = self.lp.num_vars();
        let mut w = vec![0.0; n];
        for (i, row) in self.lp.rows().iter().enumerate() {
            for &(j, v) in &row.coeffs {
                w[j] += ray[i] * v;
            }
        }
        let mut sup = 0.0;
        for (j, &wj) in w.iter().enumerate() {
            if wj.abs() <= 1e-9 {
                continue;
            }
            let (l, u) = self.lp.bounds()[j];
            let bound = if wj > 0.0 { u } else { l };
            debug_assert!(bound.is_finite(), "ray support must be bounded");
            sup += wj * bound;
        }
        sup
    }
}

/// Solve the scenario recourse LP for a fixed design.
pub fn solve_recourse(
    instance: &Instance,
    scenario: usize,
    design: &FirstStageDesign,
) -> Result<RecourseSolution, RecourseError> {
    ScenarioSubproblem::new(instance, scenario).solve(instance, design)
}

/// Optimality cut from the duals of an optimal subproblem solve, tight at
/// the generating design by construction.
pub fn make_optimality_cut(
    solution: &RecourseSolution,
    instance: &Instance,
    design: &FirstStageDesign,
) -> Result<OptimalityCut, RecourseError> {
    if solution.status != RecourseStatus::Optimal {
        return Err(RecourseError::CutFromNonOptimal);
    }
    let s = solution.scenario;
    let nc = instance.num_commodities();
    let mut arc_coef = vec![0.0; instance.num_arcs()];
    for a in 0..instance.num_arcs() {
        for c in 0..nc {
            let mu = solution.duals.capacity[a * nc + c];
            if mu != 0.0 {
                arc_coef[a] += mu * instance.effective_capacity(a, c, s);
            }
        }
    }
    let inventory_coef: Vec<Vec<f64>> = (0..instance.num_nodes())
        .map(|i| (0..nc).map(|c| -solution.duals.flow_balance[i * nc + c]).collect())
        .collect();
    let mut constant = solution.objective;
    for (a, &on) in design.arcs_on.iter().enumerate() {
        if on {
            constant -= arc_coef[a];
        }
    }
    for i in 0..instance.num_nodes() {
        for c in 0..nc {
            constant -= inventory_coef[i][c] * design.inventory[i][c];
        }
    }
    Ok(OptimalityCut { scenario: s, constant, arc_coef, inventory_coef })
}

/// Feasibility cut from a Farkas ray: excludes every design that keeps the
/// same certificate of infeasibility alive in the named scenario.
pub fn make_feasibility_cut(
    instance: &Instance,
    solution: &RecourseSolution,
) -> Result<FeasibilityCut, RecourseError> {
    if solution.status != RecourseStatus::InfeasibleWithRay {
        return Err(RecourseError::CutFromFeasible);
    }
    let s = solution.scenario;
    let nc = instance.num_commodities();
    let sub = ScenarioSubproblem::new(instance, s);
    // Reassemble the full row-multiplier vector in this layout's order.
    let mut ray = vec![0.0; sub.lp.num_rows()];
    for i in 0..instance.num_nodes() {
        for c in 0..nc {
            ray[sub.layout.flow_row[i][c]] = solution.duals.flow_balance[i * nc + c];
        }
    }
    for a in 0..instance.num_arcs() {
        for c in 0..nc {
            if let Some(r) = sub.layout.cap_row[a][c] {
                ray[r] = solution.duals.capacity[a * nc + c];
            }
        }
    }
    for (l, &r) in sub.layout.corridor_row.iter().enumerate() {
        ray[r] = solution.duals.corridor[l];
    }
    let sup = sub.ray_box_supremum(&ray);
    let mut arc_coef = vec![0.0; instance.num_arcs()];
    for a in 0..instance.num_arcs() {
        for c in 0..nc {
            let mu = solution.duals.capacity[a * nc + c];
            if mu != 0.0 {
                arc_coef[a] += mu * instance.effective_capacity(a, c, s);
            }
        }
    }
    let mut constant = -sup;
    let mut inventory_coef = vec![vec![0.0; nc]; instance.num_nodes()];
    for (i, node) in instance.nodes.iter().enumerate() {
        for c in 0..nc {
            let lam = solution.duals.flow_balance[i * nc + c];
            constant += lam * (node.demand[c] - node.supply[c]);
            inventory_coef[i][c] = -lam;
        }
    }
    Ok(FeasibilityCut { scenario: s, constant, arc_coef, inventory_coef })
}

#[derive(Clone, Debug)]
pub struct DesignEvaluation {
    pub per_scenario: Vec<f64>,
    pub solutions: Vec<RecourseSolution>,
    pub expected: f64,
    pub cvar: f64,
    pub var_threshold: f64,
    pub fixed_cost: f64,
    pub total_objective: f64,
}

/// Evaluate a design under explicit probabilities: per-scenario recourse,
/// expectation, tail risk, and the assembled total objective.
pub fn evaluate_design(
    instance: &Instance,
    design: &FirstStageDesign,
    probs: &[f64],
    risk: RiskParams,
) -> Result<DesignEvaluation, RecourseError> {
    let mut per_scenario = Vec::with_capacity(instance.num_scenarios());
    let mut solutions = Vec::with_capacity(instance.num_scenarios());
    for s in 0..instance.num_scenarios() {
        let sol = solve_recourse(instance, s, design)?;
        if sol.status != RecourseStatus::Optimal {
            return Err(RecourseError::InfeasibleDesign { scenario: s });
        }
        per_scenario.push(sol.objective);
        solutions.push(sol);
    }
    let expected: f64 = probs.iter().zip(&per_scenario).map(|(p, q)| p * q).sum();
    let (cvar, var_threshold) = cvar_of_costs(probs, &per_scenario, risk.alpha);
    let fixed_cost = instance.first_stage_cost(design);
    let total = fixed_cost + (1.0 - risk.lambda) * expected + risk.lambda * cvar;
    Ok(DesignEvaluation {
        per_scenario,
        solutions,
        expected,
        cvar,
        var_threshold,
        fixed_cost,
        total_objective: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::gen;
    use crate::model::RecourseStatus;

    #[test]
    fn ample_design_routes_everything() {
        let inst = gen::toy_instance();
        let design = FirstStageDesign::all_on_demand_side_storage(&inst);
        let sol = solve_recourse(&inst, 0, &design).unwrap();
        assert_eq!(sol.status, RecourseStatus::Optimal);
        let total_short: f64 = sol.shortage.iter().flatten().sum();
        assert!(total_short < 1e-9, "unexpected shortage {total_short}");
    }

    #[test]
    fn trapped_supply_yields_valid_ray() {
        let inst = gen::trapped_toy_instance();
        let design = FirstStageDesign::all_off(&inst);
        let sol = solve_recourse(&inst, 0, &design).unwrap();
        assert_eq!(sol.status, RecourseStatus::InfeasibleWithRay);
        let cut = make_feasibility_cut(&inst, &sol).unwrap();
        // Violated at the generator.
        assert!(cut.violation_at(&design) > 1e-7);
        // Satisfied at the fully-activated design, which is feasible.
        let full = FirstStageDesign {
            arcs_on: vec![true, true],
            inventory: vec![vec![0.0], vec![0.0]],
        };
        assert!(cut.violation_at(&full) <= 1e-7);
    }

    #[test]
    fn unused_arc_gets_zero_cut_coefficient() {
        let inst = gen::toy_instance();
        let mut design = FirstStageDesign::all_on_demand_side_storage(&inst);
        for row in design.inventory.iter_mut() {
            for w in row.iter_mut() {
                *w = 0.0;
            }
        }
        let sol = solve_recourse(&inst, 0, &design).unwrap();
        let cut = make_optimality_cut(&sol, &inst, &design).unwrap();
        // e8 (west-side backup lane) is priced above e5 and slack in the
        // calm scenario, so its capacity dual must vanish.
        let e8 = inst.arcs.iter().position(|a| a.id == "e8").unwrap();
        let flow_e8: f64 = sol.flows[e8].iter().sum();
        if flow_e8 < 1e-9 {
            assert!(cut.arc_coef[e8].abs() < 1e-9);
        }
        // Tightness at the generator.
        let rhs = cut.rhs_at(&design);
        assert!((rhs - sol.objective).abs() <= 1e-6 * sol.objective.abs().max(1.0));
    }

    #[test]
    fn cut_valid_across_enumerated_designs() {
        let inst = gen::toy_instance();
        let na = inst.num_arcs();
        let gen_design = FirstStageDesign::all_on_demand_side_storage(&inst);
        let s = 1; // east_down
        let sol = solve_recourse(&inst, s, &gen_design).unwrap();
        let cut = make_optimality_cut(&sol, &inst, &gen_design).unwrap();
        for mask in (0u32..(1 << na)).step_by(37) {
            let design = FirstStageDesign {
                arcs_on: (0..na).map(|a| mask & (1 << a) != 0).collect(),
                inventory: gen_design.inventory.clone(),
            };
            let direct = solve_recourse(&inst, s, &design).unwrap();
            if direct.status != RecourseStatus::Optimal {
                continue;
            }
            let bound = cut.rhs_at(&design);
            assert!(
                bound <= direct.objective + 1e-6 * direct.objective.abs().max(1.0),
                "mask {mask}: bound {bound} exceeds Q {}",
                direct.objective
            );
        }
    }

    #[test]
    fn inventory_sensitivity_matches_dual() {
        let inst = gen::toy_instance();
        let mut design = FirstStageDesign::all_on_demand_side_storage(&inst);
        // interior inventory point so the basis is stable under a unit bump
        for row in design.inventory.iter_mut() {
            for w in row.iter_mut() {
                *w *= 0.5;
            }
        }
        let s = 1;
        let sol = solve_recourse(&inst, s, &design).unwrap();
        let cut = make_optimality_cut(&sol, &inst, &design).unwrap();
        let (i, c) = (3usize, 0usize); // d1 / alpha
        let mut bumped = design.clone();
        bumped.inventory[i][c] += 1.0;
        let sol2 = solve_recourse(&inst, s, &bumped).unwrap();
        let fd = sol2.objective - sol.objective;
        assert!(
            (fd - cut.inventory_coef[i][c]).abs() < 1e-4,
            "finite difference {fd} vs dual coefficient {}",
            cut.inventory_coef[i][c]
        );
    }

    #[test]
    fn evaluate_design_composes_expected_and_tail() {
        let inst = gen::toy_instance();
        let design = FirstStageDesign::all_on_demand_side_storage(&inst);
        let probs = inst.base_probs();
        let eval = evaluate_design(&inst, &design, &probs, inst.risk).unwrap();
        let expected: f64 = probs.iter().zip(&eval.per_scenario).map(|(p, q)| p * q).sum();
        assert!((eval.expected - expected).abs() < 1e-9);
        assert!(eval.cvar >= eval.expected - 1e-9);
        let reassembled = eval.fixed_cost
            + (1.0 - inst.risk.lambda) * eval.expected
            + inst.risk.lambda * eval.cvar;
        assert!((eval.total_objective - reassembled).abs() < 1e-9);
    }

    #[test]
    fn single_scenario_library_cvar_equals_cost() {
        let mut inst = gen::trapped_toy_instance();
        inst.scenarios.truncate(1);
        inst.scenarios[0].base_prob = 1.0;
        inst.ddu.delta.truncate(1);
        let design = FirstStageDesign {
            arcs_on: vec![true, true],
            inventory: vec![vec![0.0], vec![0.0]],
        };
        let eval = evaluate_design(&inst, &design, &[1.0], inst.risk).unwrap();
        assert!((eval.expected - eval.cvar).abs() < 1e-9);
        assert!((eval.expected - eval.per_scenario[0]).abs() < 1e-9);
    }
}
