//! Scratch calibration probe (temporary).
use corridors_core::benders::{run_benders, BendersOptions};
use corridors_core::ef::{build_extensive_form, solve_extensive_form, EfOptions};
use corridors_core::io::gen;

#[test]
#[ignore]
fn replica_probe() {
    let inst = gen::replica_instance();
    let t0 = std::time::Instant::now();
    let art = build_extensive_form(&inst, EfOptions::default()).unwrap();
    println!("EF vars {} rows {}", art.mip.lp.num_vars(), art.mip.lp.num_rows());
    let ef = solve_extensive_form(&inst, &art).unwrap();
    println!("EF solve: {:?}  obj {}  nodes {}  mc_err {:e}", t0.elapsed(), ef.objective, ef.milp.nodes_explored, ef.mccormick_max_err);
    println!("fixed {} expected {} cvar {} var {}", ef.fixed_cost, ef.expected_recourse, ef.cvar, ef.var_threshold);
    println!("arcs on: {}", ef.design.active_arc_count());
    println!("inventory total: {}", ef.design.total_inventory());
    for (c, com) in inst.commodities.iter().enumerate() {
        let exp_short: f64 = (0..inst.num_scenarios()).map(|s| ef.ddu_probs[s] * ef.per_scenario[s].shortage.iter().map(|r| r[c]).sum::<f64>()).sum();
        let w_tot: f64 = ef.design.inventory.iter().map(|r| r[c]).sum();
        println!("commodity {}: E[short] {:.2}  W {}", com.id, exp_short, w_tot);
    }
    for s in 0..inst.num_scenarios() {
        println!("scenario {} p={:.4} Q={:.2}", inst.scenarios[s].id, ef.ddu_probs[s], ef.per_scenario[s].objective);
    }
    let t1 = std::time::Instant::now();
    let run = run_benders(&inst, &BendersOptions::default()).unwrap();
    println!("Benders: {:?} obj {} iters {} cuts {} converged {}", t1.elapsed(), run.solution.objective, run.state.iterations, run.state.opt_cuts.len() + run.state.feas_cuts.len(), run.state.converged);
    println!("|BD - EF| = {:e}", (run.solution.objective - ef.objective).abs());
}
