//! Bundled instance generators: the calibrated 16-node import-network
//! replica and three purpose-built toys (enumeration, correlation value,
//! trapped supply).

use crate::model::{
    Arc, Commodity, Corridor, CorridorKind, DduMatrix, Instance, Node, NodeKind, RiskParams,
    Scenario,
};

fn commodity(id: &str, holding: f64, penalty: f64) -> Commodity {
    Commodity { id: id.into(), holding_cost: holding, shortage_penalty: penalty }
}

fn node(id: &str, kind: NodeKind, supply: Vec<f64>, demand: Vec<f64>, storage: Vec<f64>) -> Node {
    Node { id: id.into(), kind, supply, demand, storage_cap: storage }
}

struct ArcSpec {
    id: &'static str,
    tail: usize,
    head: usize,
    corridor: usize,
    fixed_cost: f64,
    /// (commodity, capacity, unit cost)
    lanes: Vec<(usize, f64, f64)>,
}

fn build_arcs(specs: Vec<ArcSpec>, num_commodities: usize) -> Vec<Arc> {
    specs
        .into_iter()
        .map(|s| {
            let mut cap = vec![0.0; num_commodities];
            let mut cost = vec![0.0; num_commodities];
            let mut adm = vec![false; num_commodities];
            for (c, u, k) in s.lanes {
                cap[c] = u;
                cost[c] = k;
                adm[c] = true;
            }
            Arc {
                id: s.id.into(),
                tail: s.tail,
                head: s.head,
                corridor: s.corridor,
                fixed_cost: s.fixed_cost,
                base_capacity: cap,
                base_cost: cost,
                base_admissible: adm,
            }
        })
        .collect()
}

fn scenario(
    id: &str,
    name: &str,
    prob: f64,
    caps: Vec<f64>,
    costs: Vec<f64>,
) -> Scenario {
    Scenario {
        id: id.into(),
        name: name.into(),
        base_prob: prob,
        capacity_mult: caps,
        cost_mult: costs,
        admissibility_override: Vec::new(),
        capacity_scale: Vec::new(),
    }
}

/// Exposure-signed probability-shift matrix: activating an arc moves mass
/// toward the scenarios that disrupt its corridor and away from the rest.
/// Magnitudes are uniform and scaled so the validity boundary lands at
/// `target_k_max` (binding on the scenario with no disrupted corridors).
fn exposure_delta(
    scenarios: &[Scenario],
    arcs: &[Arc],
    corridors: &[Corridor],
    target_k_max: f64,
) -> Vec<Vec<f64>> {
    let ns = scenarios.len();
    let na = arcs.len();
    // A corridor counts as disrupted when its capacity drops or cost rises.
    let exposed = |s: &Scenario, l: usize| s.capacity_mult[l] < 1.0 || s.cost_mult[l] > 1.0;
    let mut exposure_count = vec![0usize; corridors.len()];
    for l in 0..corridors.len() {
        exposure_count[l] = scenarios.iter().filter(|s| exposed(s, l)).count();
    }
    // Worst-case negative shift per scenario for a unit magnitude.
    let mut unit_negsum = vec![0.0f64; ns];
    for (si, s) in scenarios.iter().enumerate() {
        for a in arcs {
            let l = a.corridor;
            if exposure_count[l] == 0 {
                continue;
            }
            let ebar = exposure_count[l] as f64 / ns as f64;
            if !exposed(s, l) {
                unit_negsum[si] += ebar;
            }
        }
    }
    let binding = (0..ns)
        .filter(|&si| unit_negsum[si] > 0.0)
        .map(|si| scenarios[si].base_prob / unit_negsum[si])
        .fold(f64::INFINITY, f64::min);
    let magnitude = if binding.is_finite() { binding / target_k_max } else { 0.0 };

    let mut delta = vec![vec![0.0; na]; ns];
    for (ai, a) in arcs.iter().enumerate() {
        let l = a.corridor;
        if exposure_count[l] == 0 {
            continue;
        }
        let ebar = exposure_count[l] as f64 / ns as f64;
        for (si, s) in scenarios.iter().enumerate() {
            let e = if exposed(s, l) { 1.0 } else { 0.0 };
            delta[si][ai] = magnitude * (e - ebar);
        }
    }
    delta
}

/// The calibrated replica: 16 nodes, 28 arcs, 4 commodities, 9 scenarios.
///
/// Storage totals are 2700/450/400/800 per commodity, corridor dependence
/// caps 0.7/0.5/0.8/1.0, activation cost 2.0 on every arc, and every supply
/// node carries a buffer equal to its scheduled supply so the empty design
/// remains feasible.
pub fn replica_instance() -> Instance {
    let commodities = vec![
        commodity("crude", 0.3, 25.0),
        commodity("lng", 0.8, 40.0),
        commodity("lpg", 0.5, 50.0),
        commodity("fertilizer", 0.2, 35.0),
    ];
    use NodeKind::*;
    let z4 = || vec![0.0; 4];
    let nodes = vec![
        node("gulf_crude", Supply, vec![1300.0, 0.0, 0.0, 0.0], z4(), vec![1300.0, 0.0, 0.0, 0.0]),
        node("gulf_lng", Supply, vec![0.0, 250.0, 0.0, 0.0], z4(), vec![0.0, 250.0, 0.0, 0.0]),
        node("gulf_lpg", Supply, vec![0.0, 0.0, 280.0, 0.0], z4(), vec![0.0, 0.0, 280.0, 0.0]),
        node("gulf_fert", Supply, vec![0.0, 0.0, 0.0, 350.0], z4(), vec![0.0, 0.0, 0.0, 350.0]),
        node("atl_west", Supply, vec![500.0, 0.0, 0.0, 150.0], z4(), vec![500.0, 0.0, 0.0, 150.0]),
        node("fujairah", Transshipment, z4(), z4(), z4()),
        node("yanbu", Transshipment, z4(), z4(), z4()),
        node("jamnagar", Demand, z4(), vec![700.0, 0.0, 0.0, 0.0], vec![400.0, 0.0, 0.0, 0.0]),
        node(
            "mumbai",
            Demand,
            z4(),
            vec![450.0, 0.0, 180.0, 150.0],
            vec![200.0, 0.0, 60.0, 100.0],
        ),
        node("vizag", Demand, z4(), vec![400.0, 0.0, 120.0, 0.0], vec![200.0, 0.0, 40.0, 0.0]),
        node("dahej", Demand, z4(), vec![0.0, 250.0, 0.0, 0.0], vec![0.0, 70.0, 0.0, 0.0]),
        node("kochi", Demand, z4(), vec![0.0, 100.0, 0.0, 0.0], vec![0.0, 30.0, 0.0, 0.0]),
        node("paradip", Demand, z4(), vec![0.0, 0.0, 0.0, 300.0], vec![0.0, 0.0, 0.0, 200.0]),
        node("mangalore", Demand, z4(), vec![150.0, 0.0, 0.0, 0.0], vec![100.0, 0.0, 0.0, 0.0]),
        node("pacific_lng", Supply, vec![0.0, 100.0, 0.0, 0.0], z4(), vec![0.0, 100.0, 0.0, 0.0]),
        node("us_lpg", Supply, vec![0.0, 0.0, 20.0, 0.0], z4(), vec![0.0, 0.0, 20.0, 0.0]),
    ];
    let corridors = vec![
        Corridor { id: "hormuz".into(), dependence_cap: 0.7, kind: CorridorKind::Maritime },
        Corridor { id: "bab_suez".into(), dependence_cap: 0.5, kind: CorridorKind::Maritime },
        Corridor { id: "cape".into(), dependence_cap: 0.8, kind: CorridorKind::Maritime },
        Corridor { id: "pipe".into(), dependence_cap: 1.0, kind: CorridorKind::Pipeline },
        Corridor { id: "direct".into(), dependence_cap: 1.0, kind: CorridorKind::Direct },
    ];
    const CR: usize = 0;
    const LNG: usize = 1;
    const LPG: usize = 2;
    const FERT: usize = 3;
    let specs = vec![
        // Hormuz transits
        ArcSpec { id: "h_cr_jam", tail: 0, head: 7, corridor: 0, fixed_cost: 2.0, lanes: vec![(CR, 700.0, 4.0)] },
        ArcSpec { id: "h_cr_mum", tail: 0, head: 8, corridor: 0, fixed_cost: 2.0, lanes: vec![(CR, 450.0, 4.5)] },
        ArcSpec { id: "h_cr_viz", tail: 0, head: 9, corridor: 0, fixed_cost: 2.0, lanes: vec![(CR, 400.0, 5.0)] },
        ArcSpec { id: "h_cr_man", tail: 0, head: 13, corridor: 0, fixed_cost: 2.0, lanes: vec![(CR, 250.0, 4.8)] },
        ArcSpec { id: "h_lng_dah", tail: 1, head: 10, corridor: 0, fixed_cost: 2.0, lanes: vec![(LNG, 250.0, 5.0)] },
        ArcSpec { id: "h_lng_koc", tail: 1, head: 11, corridor: 0, fixed_cost: 2.0, lanes: vec![(LNG, 100.0, 5.5)] },
        ArcSpec { id: "h_lpg_mum", tail: 2, head: 8, corridor: 0, fixed_cost: 2.0, lanes: vec![(LPG, 180.0, 5.0)] },
        ArcSpec { id: "h_lpg_viz", tail: 2, head: 9, corridor: 0, fixed_cost: 2.0, lanes: vec![(LPG, 120.0, 5.5)] },
        ArcSpec { id: "h_f_par", tail: 3, head: 12, corridor: 0, fixed_cost: 2.0, lanes: vec![(FERT, 280.0, 6.0)] },
        ArcSpec { id: "h_f_mum", tail: 3, head: 8, corridor: 0, fixed_cost: 2.0, lanes: vec![(FERT, 160.0, 5.5)] },
        // Pipeline bypasses
        ArcSpec { id: "p_adcop", tail: 0, head: 5, corridor: 3, fixed_cost: 2.0, lanes: vec![(CR, 500.0, 1.5)] },
        ArcSpec { id: "p_petro", tail: 0, head: 6, corridor: 3, fixed_cost: 2.0, lanes: vec![(CR, 700.0, 1.8)] },
        // Direct sea legs and coastal shuttles
        ArcSpec { id: "d_fuj_jam", tail: 5, head: 7, corridor: 4, fixed_cost: 2.0, lanes: vec![(CR, 450.0, 2.0)] },
        ArcSpec { id: "d_fuj_mum", tail: 5, head: 8, corridor: 4, fixed_cost: 2.0, lanes: vec![(CR, 350.0, 2.4)] },
        ArcSpec { id: "d_jam_man", tail: 7, head: 13, corridor: 4, fixed_cost: 2.0, lanes: vec![(CR, 150.0, 0.8)] },
        ArcSpec { id: "d_mum_viz", tail: 8, head: 9, corridor: 4, fixed_cost: 2.0, lanes: vec![(CR, 150.0, 1.0), (LPG, 120.0, 1.0)] },
        ArcSpec { id: "d_dah_koc", tail: 10, head: 11, corridor: 4, fixed_cost: 2.0, lanes: vec![(LNG, 120.0, 0.8)] },
        ArcSpec { id: "d_par_mum", tail: 12, head: 8, corridor: 4, fixed_cost: 2.0, lanes: vec![(FERT, 120.0, 1.0)] },
        ArcSpec { id: "d_pac_dah", tail: 14, head: 10, corridor: 4, fixed_cost: 2.0, lanes: vec![(LNG, 60.0, 6.5)] },
        ArcSpec { id: "d_pac_koc", tail: 14, head: 11, corridor: 4, fixed_cost: 2.0, lanes: vec![(LNG, 60.0, 6.0)] },
        // Red Sea transits
        ArcSpec { id: "b_yan_jam", tail: 6, head: 7, corridor: 1, fixed_cost: 2.0, lanes: vec![(CR, 550.0, 2.2)] },
        ArcSpec { id: "b_yan_mum", tail: 6, head: 8, corridor: 1, fixed_cost: 2.0, lanes: vec![(CR, 300.0, 2.5)] },
        ArcSpec { id: "b_atl_mum_c", tail: 4, head: 8, corridor: 1, fixed_cost: 2.0, lanes: vec![(CR, 300.0, 7.0)] },
        ArcSpec { id: "b_us_mum_p", tail: 15, head: 8, corridor: 1, fixed_cost: 2.0, lanes: vec![(LPG, 30.0, 7.5)] },
        ArcSpec { id: "b_atl_par_f", tail: 4, head: 12, corridor: 1, fixed_cost: 2.0, lanes: vec![(FERT, 150.0, 8.0)] },
        // Cape diversions
        ArcSpec { id: "c_atl_jam", tail: 4, head: 7, corridor: 2, fixed_cost: 2.0, lanes: vec![(CR, 350.0, 10.0)] },
        ArcSpec { id: "c_us_viz_p", tail: 15, head: 9, corridor: 2, fixed_cost: 2.0, lanes: vec![(LPG, 30.0, 11.5)] },
        ArcSpec { id: "c_atl_par_f", tail: 4, head: 12, corridor: 2, fixed_cost: 2.0, lanes: vec![(FERT, 180.0, 12.0)] },
    ];
    let arcs = build_arcs(specs, 4);
    let scenarios = vec![
        scenario("baseline_normal", "Baseline Normal", 0.15, vec![1.0, 1.0, 1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0, 1.0, 1.0]),
        scenario("hormuz_partial", "Hormuz Partial", 0.20, vec![0.20, 1.0, 1.0, 1.0, 1.0], vec![2.50, 1.0, 1.0, 1.0, 1.0]),
        scenario("hormuz_sev_sel", "Hormuz Severe/Sel.", 0.15, vec![0.10, 1.0, 1.0, 1.0, 1.0], vec![4.00, 1.20, 1.30, 1.0, 1.0]),
        scenario("hormuz_closure", "Hormuz Closure", 0.10, vec![0.05, 1.0, 1.0, 1.0, 1.0], vec![6.00, 1.30, 1.50, 1.0, 1.0]),
        scenario("bab_suez_severe", "Bab Suez Severe", 0.10, vec![1.0, 0.25, 1.0, 1.0, 1.0], vec![1.0, 3.00, 1.80, 1.0, 1.0]),
        scenario("dual_disruption", "Dual Disruption", 0.08, vec![0.15, 0.20, 1.0, 1.0, 1.0], vec![3.50, 3.50, 2.00, 1.0, 1.0]),
        scenario("insurance_spike", "Insurance Spike", 0.10, vec![0.60, 0.50, 1.0, 1.0, 1.0], vec![3.00, 2.50, 1.80, 1.0, 1.0]),
        scenario("closure_bypass", "Closure with Bypass", 0.07, vec![0.05, 0.80, 1.0, 1.50, 1.0], vec![6.00, 1.50, 1.60, 1.0, 1.0]),
        scenario("delayed_recovery", "Delayed Recovery", 0.05, vec![0.40, 0.60, 1.0, 1.0, 1.0], vec![2.00, 1.80, 1.40, 1.0, 1.0]),
    ];
    let delta = exposure_delta(&scenarios, &arcs, &corridors, 6.7);
    Instance {
        commodities,
        nodes,
        arcs,
        corridors,
        scenarios,
        ddu: DduMatrix { delta, k: 1.0 },
        risk: RiskParams { lambda: 0.5, alpha: 0.95 },
    }
}

/// Six-node toy small enough for full design enumeration (9 arcs).
pub fn toy_instance() -> Instance {
    let commodities = vec![commodity("alpha", 0.5, 20.0), commodity("beta", 0.4, 30.0)];
    use NodeKind::*;
    let nodes = vec![
        node("s1", Supply, vec![60.0, 0.0], vec![0.0, 0.0], vec![60.0, 0.0]),
        node("s2", Supply, vec![0.0, 40.0], vec![0.0, 0.0], vec![0.0, 40.0]),
        node("t1", Transshipment, vec![0.0, 0.0], vec![0.0, 0.0], vec![20.0, 0.0]),
        node("d1", Demand, vec![0.0, 0.0], vec![50.0, 0.0], vec![20.0, 0.0]),
        node("d2", Demand, vec![0.0, 0.0], vec![0.0, 30.0], vec![0.0, 10.0]),
        node("d3", Demand, vec![0.0, 0.0], vec![10.0, 10.0], vec![0.0, 0.0]),
    ];
    let corridors = vec![
        Corridor { id: "east".into(), dependence_cap: 0.7, kind: CorridorKind::Maritime },
        Corridor { id: "west".into(), dependence_cap: 0.8, kind: CorridorKind::Maritime },
        Corridor { id: "local".into(), dependence_cap: 1.0, kind: CorridorKind::Direct },
    ];
    const A: usize = 0;
    const B: usize = 1;
    let specs = vec![
        ArcSpec { id: "e1", tail: 0, head: 3, corridor: 0, fixed_cost: 2.0, lanes: vec![(A, 40.0, 2.0)] },
        ArcSpec { id: "e2", tail: 0, head: 2, corridor: 0, fixed_cost: 2.0, lanes: vec![(A, 30.0, 1.5)] },
        ArcSpec { id: "e3", tail: 2, head: 3, corridor: 2, fixed_cost: 2.0, lanes: vec![(A, 30.0, 1.0)] },
        ArcSpec { id: "e4", tail: 2, head: 5, corridor: 2, fixed_cost: 2.0, lanes: vec![(A, 15.0, 1.2)] },
        ArcSpec { id: "e5", tail: 1, head: 4, corridor: 0, fixed_cost: 2.0, lanes: vec![(B, 30.0, 2.2)] },
        ArcSpec { id: "e6", tail: 1, head: 5, corridor: 1, fixed_cost: 2.0, lanes: vec![(B, 15.0, 2.5)] },
        ArcSpec { id: "e7", tail: 0, head: 3, corridor: 1, fixed_cost: 2.0, lanes: vec![(A, 25.0, 3.5)] },
        ArcSpec { id: "e8", tail: 1, head: 4, corridor: 1, fixed_cost: 2.0, lanes: vec![(B, 20.0, 4.0)] },
        ArcSpec { id: "e9", tail: 3, head: 5, corridor: 2, fixed_cost: 2.0, lanes: vec![(A, 10.0, 0.9)] },
    ];
    let arcs = build_arcs(specs, 2);
    let scenarios = vec![
        scenario("calm", "Calm", 0.40, vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]),
        scenario("east_down", "East Down", 0.30, vec![0.20, 1.0, 1.0], vec![2.0, 1.1, 1.0]),
        scenario("west_down", "West Down", 0.20, vec![1.0, 0.30, 1.0], vec![1.1, 1.8, 1.0]),
        scenario("both_down", "Both Down", 0.10, vec![0.25, 0.40, 1.0], vec![1.8, 1.6, 1.0]),
    ];
    // Hand-set shifts: activating a corridor's arcs moves mass toward the
    // scenarios that disrupt that corridor.
    let east_pattern = [-0.004, 0.003, -0.001, 0.002];
    let west_pattern = [-0.003, -0.001, 0.003, 0.001];
    let mut delta = vec![vec![0.0; arcs.len()]; scenarios.len()];
    for (ai, arc) in arcs.iter().enumerate() {
        for si in 0..scenarios.len() {
            delta[si][ai] = match arc.corridor {
                0 => east_pattern[si],
                1 => west_pattern[si],
                _ => 0.0,
            };
        }
    }
    Instance {
        commodities,
        nodes,
        arcs,
        corridors,
        scenarios,
        ddu: DduMatrix { delta, k: 1.0 },
        risk: RiskParams { lambda: 0.5, alpha: 0.90 },
    }
}

/// Two-route toy engineered so that ignoring the joint-failure coupling
/// changes the optimal design: the backup route only pays off under the
/// correlated distribution.
pub fn vmc_toy_instance() -> Instance {
    let commodities = vec![commodity("good", 0.1, 100.0)];
    use NodeKind::*;
    let nodes = vec![
        node("src", Supply, vec![20.0], vec![0.0], vec![20.0]),
        node("dst", Demand, vec![0.0], vec![16.0], vec![4.0]),
    ];
    let corridors = vec![
        Corridor { id: "route_a".into(), dependence_cap: 1.0, kind: CorridorKind::Maritime },
        Corridor { id: "route_b".into(), dependence_cap: 1.0, kind: CorridorKind::Maritime },
        Corridor { id: "backup".into(), dependence_cap: 1.0, kind: CorridorKind::Direct },
    ];
    let specs = vec![
        ArcSpec { id: "via_a", tail: 0, head: 1, corridor: 0, fixed_cost: 1.0, lanes: vec![(0, 16.0, 1.0)] },
        ArcSpec { id: "via_b", tail: 0, head: 1, corridor: 1, fixed_cost: 1.0, lanes: vec![(0, 16.0, 1.2)] },
        ArcSpec { id: "via_backup", tail: 0, head: 1, corridor: 2, fixed_cost: 250.0, lanes: vec![(0, 16.0, 3.0)] },
    ];
    let arcs = build_arcs(specs, 1);
    let scenarios = vec![
        scenario("calm", "Calm", 0.50, vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]),
        scenario("a_down", "A Down", 0.25, vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]),
        scenario("both_down", "Both Down", 0.25, vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0]),
    ];
    let delta = vec![vec![0.0; arcs.len()]; scenarios.len()];
    Instance {
        commodities,
        nodes,
        arcs,
        corridors,
        scenarios,
        ddu: DduMatrix { delta, k: 0.0 },
        risk: RiskParams { lambda: 0.0, alpha: 0.95 },
    }
}

/// Supply exceeds storage at the source, so designs without enough outbound
/// capacity are infeasible and force feasibility cuts.
pub fn trapped_toy_instance() -> Instance {
    let commodities = vec![commodity("good", 0.3, 50.0)];
    use NodeKind::*;
    let nodes = vec![
        node("src", Supply, vec![10.0], vec![0.0], vec![2.0]),
        node("dst", Demand, vec![0.0], vec![8.0], vec![5.0]),
    ];
    let corridors = vec![Corridor {
        id: "main".into(),
        dependence_cap: 1.0,
        kind: CorridorKind::Maritime,
    }];
    let specs = vec![
        ArcSpec { id: "lane_a", tail: 0, head: 1, corridor: 0, fixed_cost: 2.0, lanes: vec![(0, 15.0, 1.5)] },
        ArcSpec { id: "lane_b", tail: 0, head: 1, corridor: 0, fixed_cost: 3.0, lanes: vec![(0, 12.0, 2.0)] },
    ];
    let arcs = build_arcs(specs, 1);
    let scenarios = vec![
        scenario("calm", "Calm", 0.7, vec![1.0], vec![1.0]),
        scenario("slump", "Slump", 0.3, vec![0.5], vec![1.4]),
    ];
    let delta = vec![vec![0.0; arcs.len()]; scenarios.len()];
    Instance {
        commodities,
        nodes,
        arcs,
        corridors,
        scenarios,
        ddu: DduMatrix { delta, k: 0.0 },
        risk: RiskParams { lambda: 0.5, alpha: 0.9 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ddu_k_max, validate_instance};

    #[test]
    fn all_bundled_instances_validate() {
        for (name, inst) in [
            ("replica", replica_instance()),
            ("toy", toy_instance()),
            ("vmc_toy", vmc_toy_instance()),
            ("trapped_toy", trapped_toy_instance()),
        ] {
            let v = validate_instance(&inst);
            assert!(v.is_empty(), "{name}: {v:?}");
        }
    }

    #[test]
    fn replica_shape_matches_calibration() {
        let r = replica_instance();
        assert_eq!(r.num_nodes(), 16);
        assert_eq!(r.num_arcs(), 28);
        assert_eq!(r.num_commodities(), 4);
        assert_eq!(r.num_scenarios(), 9);
        assert_eq!(r.corridors.len(), 5);
        let penalties: Vec<f64> = r.commodities.iter().map(|c| c.shortage_penalty).collect();
        assert_eq!(penalties, vec![25.0, 40.0, 50.0, 35.0]);
        // storage totals per commodity
        for (c, want) in [(0, 2700.0), (1, 450.0), (2, 400.0), (3, 800.0)] {
            let total: f64 = r.nodes.iter().map(|n| n.storage_cap[c]).sum();
            assert!((total - want).abs() < 1e-9, "commodity {c}: {total}");
        }
    }

    #[test]
    fn replica_k_max_lands_on_target() {
        let r = replica_instance();
        let k = ddu_k_max(&r);
        assert!((k - 6.7).abs() < 1e-9, "k_max = {k}");
    }

    #[test]
    fn replica_delta_magnitudes_capped() {
        let r = replica_instance();
        for row in &r.ddu.delta {
            for &d in row {
                assert!(d.abs() <= 0.005 + 1e-12);
            }
        }
    }
}
