//! Scratch B&B probe (temporary).
use corridors_core::ef::{build_extensive_form, EfOptions};
use corridors_core::io::gen;
use corridors_core::milp::{solve_milp, MixedIntegerProgram};

#[test]
#[ignore]
fn bnb_probe() {
    let inst = gen::replica_instance();
    let art = build_extensive_form(&inst, EfOptions::risk_neutral_fixed_probs()).unwrap();
    for cap in [500usize, 2000] {
        let t0 = std::time::Instant::now();
        let res = solve_milp(&art.mip, 1e-9, cap).unwrap();
        println!(
            "cap {cap}: status {:?} obj {:.6} nodes {} gap {:.3e} time {:?} ({:.1} ms/node)",
            res.status,
            res.objective,
            res.nodes_explored,
            res.gap,
            t0.elapsed(),
            t0.elapsed().as_secs_f64() * 1000.0 / res.nodes_explored.max(1) as f64
        );
        let lbs: Vec<f64> = res.lb_history.iter().step_by(res.lb_history.len().max(10) / 10).cloned().collect();
        println!("  lb trajectory: {:?}", lbs);
    }
    let _ = MixedIntegerProgram { lp: art.mip.lp.clone(), binary_vars: vec![] };
}
