//! Scratch B&B probe for the product-linearized mode (temporary).
use corridors_core::ef::{build_extensive_form, EfOptions};
use corridors_core::io::gen;
use corridors_core::milp::solve_milp;

#[test]
#[ignore]
fn bnb_full_probe() {
    let inst = gen::replica_instance();
    for (name, opts) in [
        ("ddu only", EfOptions { risk_on: false, ..EfOptions::default() }),
        ("cvar only", EfOptions { ddu_on: false, ..EfOptions::default() }),
        ("full", EfOptions::default()),
        ("full tightened", EfOptions { per_scenario_big_m: true, ..EfOptions::default() }),
    ] {
        for cap in [3000usize] {
            let t0 = std::time::Instant::now();
            let res = solve_milp(&art_for(&inst, &opts), 1e-9, cap).unwrap();
            println!(
                "{name} cap {cap}: {:?} obj {:.4} nodes {} gap {:.3e} time {:.1?}",
                res.status, res.objective, res.nodes_explored, res.gap, t0.elapsed()
            );
        }
    }
}

fn art_for(inst: &corridors_core::model::Instance, o: &EfOptions) -> corridors_core::milp::MixedIntegerProgram {
    build_extensive_form(inst, o.clone()).unwrap().mip
}
