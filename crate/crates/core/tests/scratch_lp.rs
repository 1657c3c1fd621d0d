//! Scratch LP probe (temporary).
use corridors_core::ef::{build_extensive_form, EfOptions};
use corridors_core::io::gen;
use corridors_core::lp;

#[test]
#[ignore]
fn root_lp_probe() {
    let inst = gen::replica_instance();
    for (name, opts) in [
        ("risk-neutral fixed-prob", EfOptions::risk_neutral_fixed_probs()),
        ("full ddu+cvar", EfOptions::default()),
    ] {
        let art = build_extensive_form(&inst, opts).unwrap();
        let t0 = std::time::Instant::now();
        let res = lp::solve_lp(&art.mip.lp).unwrap();
        println!(
            "{name}: vars {} rows {} -> {:?} obj {:.4} iters {} time {:?}",
            art.mip.lp.num_vars(),
            art.mip.lp.num_rows(),
            res.status,
            res.objective,
            res.iterations,
            t0.elapsed()
        );
    }
}
