//! Domain types for the network-design problem: commodities, nodes, arcs,
//! corridors, disruption scenarios, the decision-dependent probability
//! matrix, and first/second-stage decision containers. All types are
//! immutable after construction and safe to share across threads.

mod cvar;
mod ddu;

pub use cvar::cvar_of_costs;
pub use ddu::{ddu_k_max, ddu_probability};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Commodity {
    pub id: String,
    /// holding cost per unit per period
    pub holding_cost: f64,
    /// penalty per unit of unmet demand; strictly positive so shortage is
    /// never free
    pub shortage_penalty: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Supply,
    Transshipment,
    Demand,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Supply => "supply",
            NodeKind::Transshipment => "transshipment",
            NodeKind::Demand => "demand",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// per-commodity scheduled supply
    pub supply: Vec<f64>,
    /// per-commodity demand
    pub demand: Vec<f64>,
    /// per-commodity storage capacity
    pub storage_cap: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorridorKind {
    Maritime,
    Pipeline,
    Direct,
}

impl CorridorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CorridorKind::Maritime => "maritime",
            CorridorKind::Pipeline => "pipeline",
            CorridorKind::Direct => "direct",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Corridor {
    pub id: String,
    /// maximum fraction of total system flow this corridor may carry
    pub dependence_cap: f64,
    pub kind: CorridorKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Arc {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub corridor: usize,
    pub fixed_cost: f64,
    /// per-commodity base capacity, scaled by the scenario corridor multiplier
    pub base_capacity: Vec<f64>,
    /// per-commodity base unit cost, scaled by the scenario corridor multiplier
    pub base_cost: Vec<f64>,
    /// per-commodity admissibility before any scenario override
    pub base_admissible: Vec<bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub name: String,
    pub base_prob: f64,
    /// per-corridor capacity multiplier
    pub capacity_mult: Vec<f64>,
    /// per-corridor cost multiplier
    pub cost_mult: Vec<f64>,
    /// sparse per-(arc, commodity) admissibility override
    pub admissibility_override: Vec<(usize, usize, bool)>,
    /// sparse per-(arc, commodity) capacity rescaling; used by derived
    /// scenarios (e.g. probability-weighted averages), never by bundles
    pub capacity_scale: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DduMatrix {
    /// delta[s][a]: probability shift of scenario s per activation of arc a
    pub delta: Vec<Vec<f64>>,
    /// magnitude multiplier applied to the whole matrix
    pub k: f64,
}

impl DduMatrix {
    pub fn zero(num_scenarios: usize, num_arcs: usize) -> DduMatrix {
        DduMatrix { delta: vec![vec![0.0; num_arcs]; num_scenarios], k: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.k == 0.0 || self.delta.iter().all(|r| r.iter().all(|&d| d == 0.0))
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RiskParams {
    pub lambda: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub commodities: Vec<Commodity>,
    pub nodes: Vec<Node>,
    pub arcs: Vec<Arc>,
    pub corridors: Vec<Corridor>,
    pub scenarios: Vec<Scenario>,
    pub ddu: DduMatrix,
    pub risk: RiskParams,
}

/// Binary arc activations plus pre-positioned inventory per node-commodity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstStageDesign {
    pub arcs_on: Vec<bool>,
    /// inventory[node][commodity]
    pub inventory: Vec<Vec<f64>>,
}

impl FirstStageDesign {
    pub fn all_off(instance: &Instance) -> FirstStageDesign {
        FirstStageDesign {
            arcs_on: vec![false; instance.arcs.len()],
            inventory: instance.nodes.iter().map(|n| vec![0.0; n.supply.len()]).collect(),
        }
    }

    pub fn all_on_full_storage(instance: &Instance) -> FirstStageDesign {
        FirstStageDesign {
            arcs_on: vec![true; instance.arcs.len()],
            inventory: instance.nodes.iter().map(|n| n.storage_cap.clone()).collect(),
        }
    }

    /// Every arc active, storage filled only where no scheduled supply
    /// lands; filling a buffer next to incoming supply can force outflow
    /// beyond disrupted capacity and render scenarios infeasible.
    pub fn all_on_demand_side_storage(instance: &Instance) -> FirstStageDesign {
        FirstStageDesign {
            arcs_on: vec![true; instance.arcs.len()],
            inventory: instance
                .nodes
                .iter()
                .map(|n| {
                    n.storage_cap
                        .iter()
                        .zip(&n.supply)
                        .map(|(&l, &r)| if r > 0.0 { 0.0 } else { l })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn active_arc_count(&self) -> usize {
        self.arcs_on.iter().filter(|&&b| b).count()
    }

    pub fn total_inventory(&self) -> f64 {
        self.inventory.iter().flatten().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecourseStatus {
    Optimal,
    InfeasibleWithRay,
}

/// Duals of a scenario subproblem, grouped by constraint family.
#[derive(Clone, Debug, Default)]
pub struct RecourseDuals {
    /// flow-balance dual per (node, commodity), flattened node-major
    pub flow_balance: Vec<f64>,
    /// capacity-row dual per (arc, commodity), flattened arc-major
    pub capacity: Vec<f64>,
    /// corridor-cap dual per corridor
    pub corridor: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RecourseSolution {
    pub scenario: usize,
    /// flows[arc][commodity]
    pub flows: Vec<Vec<f64>>,
    /// ending_inventory[node][commodity]
    pub ending_inventory: Vec<Vec<f64>>,
    /// shortage[node][commodity] (nonzero only where demand exists)
    pub shortage: Vec<Vec<f64>>,
    pub objective: f64,
    pub duals: RecourseDuals,
    pub status: RecourseStatus,
}

#[derive(Error, Debug)]
pub enum ModelError {
    #[error("scenario {scenario} probability {value} is negative beyond tolerance")]
    InvalidProbability { scenario: usize, value: f64 },
}

/// A named invariant breach found by [`validate_instance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} [{}]: {}", self.entity, self.rule, self.detail)
    }
}

impl Instance {
    pub fn num_commodities(&self) -> usize {
        self.commodities.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn num_scenarios(&self) -> usize {
        self.scenarios.len()
    }

    pub fn base_probs(&self) -> Vec<f64> {
        self.scenarios.iter().map(|s| s.base_prob).collect()
    }

    /// Scenario-adjusted capacity of (arc, commodity).
    pub fn capacity(&self, arc: usize, commodity: usize, scenario: usize) -> f64 {
        let a = &self.arcs[arc];
        let s = &self.scenarios[scenario];
        let mut cap = a.base_capacity[commodity] * s.capacity_mult[a.corridor];
        for &(oa, oc, f) in &s.capacity_scale {
            if oa == arc && oc == commodity {
                cap *= f;
            }
        }
        cap
    }

    /// Scenario-adjusted unit cost of (arc, commodity).
    pub fn unit_cost(&self, arc: usize, commodity: usize, scenario: usize) -> f64 {
        let a = &self.arcs[arc];
        self.arcs[arc].base_cost[commodity] * self.scenarios[scenario].cost_mult[a.corridor]
    }

    /// Scenario admissibility of (arc, commodity), override channel included.
    pub fn admissible(&self, arc: usize, commodity: usize, scenario: usize) -> bool {
        for &(oa, oc, theta) in &self.scenarios[scenario].admissibility_override {
            if oa == arc && oc == commodity {
                return theta;
            }
        }
        self.arcs[arc].base_admissible[commodity]
    }

    /// Capacity bound actually entering the flow constraints:
    /// admissibility times scenario capacity.
    pub fn effective_capacity(&self, arc: usize, commodity: usize, scenario: usize) -> f64 {
        if self.admissible(arc, commodity, scenario) {
            self.capacity(arc, commodity, scenario)
        } else {
            0.0
        }
    }

    /// First-stage cost of a design: activation plus holding of the
    /// pre-positioned inventory.
    pub fn first_stage_cost(&self, design: &FirstStageDesign) -> f64 {
        let activation: f64 = self
            .arcs
            .iter()
            .zip(&design.arcs_on)
            .filter(|(_, &on)| on)
            .map(|(a, _)| a.fixed_cost)
            .sum();
        let holding: f64 = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, _)| {
                design.inventory[i]
                    .iter()
                    .zip(&self.commodities)
                    .map(|(&w, c)| c.holding_cost * w)
                    .sum::<f64>()
            })
            .sum();
        activation + holding
    }

    pub fn activation_cost(&self, design: &FirstStageDesign) -> f64 {
        self.arcs
            .iter()
            .zip(&design.arcs_on)
            .filter(|(_, &on)| on)
            .map(|(a, _)| a.fixed_cost)
            .sum()
    }
}

/// Scenarios whose capacity multiplier is strictly below one on at least two
/// distinct maritime corridors (joint multi-corridor disruption states).
pub fn classify_joint_scenarios(instance: &Instance) -> Vec<usize> {
    let maritime: Vec<usize> = instance
        .corridors
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == CorridorKind::Maritime)
        .map(|(i, _)| i)
        .collect();
    let mut joint = Vec::new();
    for (s, scen) in instance.scenarios.iter().enumerate() {
        let disrupted = maritime
            .iter()
            .filter(|&&l| scen.capacity_mult[l] < 1.0)
            .count();
        if disrupted >= 2 {
            joint.push(s);
        }
    }
    joint
}

const MASS_TOL: f64 = 1e-12;
const PROB_SUM_TOL: f64 = 1e-9;

/// Check every type invariant; returns an empty list iff the instance is
/// valid. Diagnostics are returned, never thrown.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let nc = instance.num_commodities();
    let nl = instance.corridors.len();
    let mut push = |entity: &str, rule: &str, detail: String| {
        out.push(Violation { entity: entity.to_string(), rule: rule.to_string(), detail });
    };

    for c in &instance.commodities {
        if !(c.holding_cost >= 0.0) {
            push(&c.id, "holding-cost-domain", format!("holding cost {} < 0", c.holding_cost));
        }
        if !(c.shortage_penalty > 0.0) {
            push(
                &c.id,
                "shortage-penalty-domain",
                format!("shortage penalty {} must be strictly positive", c.shortage_penalty),
            );
        }
    }

    for n in &instance.nodes {
        if n.supply.len() != nc || n.demand.len() != nc || n.storage_cap.len() != nc {
            push(&n.id, "node-dimensions", "per-commodity vectors must match commodity count".into());
            continue;
        }
        for (v, label) in [(&n.supply, "supply"), (&n.demand, "demand"), (&n.storage_cap, "storage")] {
            for (ci, &x) in v.iter().enumerate() {
                if !(x >= 0.0) || !x.is_finite() {
                    push(
                        &n.id,
                        "node-nonnegative",
                        format!("{label} of {} is {x}", instance.commodities[ci].id),
                    );
                }
            }
        }
        match n.kind {
            NodeKind::Supply if !n.supply.iter().any(|&r| r > 0.0) => {
                push(&n.id, "supply-node-empty", "supply node has no positive supply".into())
            }
            NodeKind::Demand if !n.demand.iter().any(|&d| d > 0.0) => {
                push(&n.id, "demand-node-empty", "demand node has no positive demand".into())
            }
            _ => {}
        }
    }

    for a in &instance.arcs {
        if a.tail == a.head {
            push(&a.id, "arc-self-loop", format!("tail and head both {}", a.tail));
        }
        if a.tail >= instance.nodes.len() || a.head >= instance.nodes.len() {
            push(&a.id, "arc-endpoint-unresolved", "endpoint index out of range".into());
        }
        if a.corridor >= nl {
            push(&a.id, "arc-corridor-unresolved", format!("corridor index {}", a.corridor));
        }
        if !(a.fixed_cost >= 0.0) {
            push(&a.id, "arc-fixed-cost-domain", format!("fixed cost {}", a.fixed_cost));
        }
        if a.base_capacity.len() != nc || a.base_cost.len() != nc || a.base_admissible.len() != nc {
            push(&a.id, "arc-dimensions", "per-commodity vectors must match commodity count".into());
            continue;
        }
        for (ci, &u) in a.base_capacity.iter().enumerate() {
            if !(u >= 0.0) || !u.is_finite() {
                push(
                    &a.id,
                    "arc-capacity-domain",
                    format!("capacity of {} is {u}", instance.commodities[ci].id),
                );
            }
        }
    }

    for l in &instance.corridors {
        if !(l.dependence_cap > 0.0 && l.dependence_cap <= 1.0) {
            push(
                &l.id,
                "corridor-cap-domain",
                format!("dependence cap {} outside (0, 1]", l.dependence_cap),
            );
        }
    }

    let mut prob_sum = 0.0;
    for s in &instance.scenarios {
        prob_sum += s.base_prob;
        if !(s.base_prob >= 0.0) {
            push(&s.id, "scenario-prob-domain", format!("baseline probability {}", s.base_prob));
        }
        if s.capacity_mult.len() != nl || s.cost_mult.len() != nl {
            push(&s.id, "scenario-dimensions", "per-corridor multipliers must match corridor count".into());
            continue;
        }
        for (li, &m) in s.capacity_mult.iter().enumerate() {
            if !(m >= 0.0) || !m.is_finite() {
                push(
                    &s.id,
                    "scenario-capacity-mult-domain",
                    format!("capacity multiplier on {} is {m}", instance.corridors[li].id),
                );
            }
        }
        for (li, &m) in s.cost_mult.iter().enumerate() {
            if !(m > 0.0) || !m.is_finite() {
                push(
                    &s.id,
                    "scenario-cost-mult-domain",
                    format!("cost multiplier on {} is {m}", instance.corridors[li].id),
                );
            }
        }
        for &(a, c, _) in &s.admissibility_override {
            if a >= instance.arcs.len() || c >= nc {
                push(&s.id, "scenario-override-unresolved", format!("override on arc {a}, commodity {c}"));
            }
        }
    }
    if !instance.scenarios.is_empty() && (prob_sum - 1.0).abs() > PROB_SUM_TOL {
        push(
            "scenario_library",
            "probability-sum",
            format!("baseline probabilities sum to {prob_sum}, expected 1"),
        );
    }

    // Decision-dependent probability matrix.
    let ddu = &instance.ddu;
    if !(ddu.k >= 0.0) {
        push("ddu", "magnitude-multiplier-domain", format!("k = {}", ddu.k));
    }
    if ddu.delta.len() != instance.num_scenarios() {
        push("ddu", "ddu-dimensions", format!("{} rows for {} scenarios", ddu.delta.len(), instance.num_scenarios()));
    } else {
        for (s, row) in ddu.delta.iter().enumerate() {
            if row.len() != instance.num_arcs() {
                push(
                    &instance.scenarios[s].id,
                    "ddu-dimensions",
                    format!("{} columns for {} arcs", row.len(), instance.num_arcs()),
                );
            }
        }
        if ddu.delta.iter().all(|r| r.len() == instance.num_arcs()) {
            for a in 0..instance.num_arcs() {
                let col_sum: f64 = ddu.delta.iter().map(|r| r[a]).sum();
                if col_sum.abs() > MASS_TOL {
                    push(
                        &instance.arcs[a].id,
                        "ddu-mass-preservation",
                        format!("delta column sums to {col_sum:e}, expected 0"),
                    );
                }
            }
            for (s, scen) in instance.scenarios.iter().enumerate() {
                let worst: f64 = ddu.delta[s].iter().map(|&d| d.min(0.0)).sum();
                let floor = scen.base_prob + ddu.k * worst;
                if floor < -MASS_TOL {
                    push(
                        &scen.id,
                        "ddu-validity",
                        format!("probability can reach {floor} under full activation"),
                    );
                }
            }
        }
    }

    let r = &instance.risk;
    if !(r.lambda >= 0.0 && r.lambda <= 1.0) {
        push("risk", "lambda-domain", format!("lambda {} outside [0, 1]", r.lambda));
    }
    if !(r.alpha > 0.0 && r.alpha < 1.0) {
        push("risk", "alpha-domain", format!("alpha {} outside (0, 1)", r.alpha));
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::gen;

    #[test]
    fn appendix_probabilities_pass_sum_check() {
        let instance = gen::replica_instance();
        let violations = validate_instance(&instance);
        assert!(
            violations.is_empty(),
            "replica should validate cleanly: {violations:?}"
        );
    }

    #[test]
    fn broken_mass_preservation_is_reported() {
        let mut instance = gen::toy_instance();
        instance.ddu.delta[0][0] += 0.001;
        let violations = validate_instance(&instance);
        assert!(violations.iter().any(|v| v.rule == "ddu-mass-preservation"));
    }

    #[test]
    fn zero_dependence_cap_is_reported() {
        let mut instance = gen::toy_instance();
        instance.corridors[0].dependence_cap = 0.0;
        let violations = validate_instance(&instance);
        assert_eq!(
            violations.iter().filter(|v| v.rule == "corridor-cap-domain").count(),
            1
        );
    }

    #[test]
    fn joint_scenarios_on_replica_match_expected_mass() {
        let instance = gen::replica_instance();
        let joint = classify_joint_scenarios(&instance);
        let names: Vec<&str> = joint.iter().map(|&s| instance.scenarios[s].id.as_str()).collect();
        assert_eq!(
            names,
            vec!["dual_disruption", "insurance_spike", "closure_bypass", "delayed_recovery"]
        );
        let mass: f64 = joint.iter().map(|&s| instance.scenarios[s].base_prob).sum();
        assert!((mass - 0.30).abs() < 1e-12);
    }

    #[test]
    fn joint_scenarios_empty_when_single_corridor_disrupted() {
        let mut instance = gen::toy_instance();
        for scen in &mut instance.scenarios {
            // leave at most one maritime corridor below 1.0
            let mut seen = false;
            for m in scen.capacity_mult.iter_mut() {
                if *m < 1.0 {
                    if seen {
                        *m = 1.0;
                    }
                    seen = true;
                }
            }
        }
        assert!(classify_joint_scenarios(&instance).is_empty());
    }
}
