//! Scratch singularity probe (temporary).
use corridors_core::ef::{build_extensive_form, EfOptions};
use corridors_core::io::gen;
use corridors_core::lp::{solve_lp, LinearProgram};

// binary-search the first failing y-fixing pattern by replaying B&B-ish bounds
#[test]
#[ignore]
fn find_failing_lp() {
    let inst = gen::replica_instance();
    let art = build_extensive_form(&inst, EfOptions { risk_on: false, ..EfOptions::default() }).unwrap();
    let lp0: &LinearProgram = &art.mip.lp;
    // root solve
    let root = solve_lp(lp0);
    println!("root: {:?}", root.as_ref().map(|r| (r.status, r.objective, r.iterations)));
    // try fixing each single binary down/up and solving cold
    for a in 0..inst.num_arcs() {
        for v in [0.0, 1.0] {
            let mut lp = lp0.clone();
            lp.set_bounds(art.index.y[a], v, v);
            match solve_lp(&lp) {
                Ok(r) => { let _ = r; }
                Err(e) => println!("arc {a} fix {v}: ERROR {e}"),
            }
        }
    }
    println!("single fixings done");
    // deeper: random multi-fixings
    let mut state = 0x12345678u64;
    let mut rng = move || { state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (state >> 33) as u32 };
    for trial in 0..60 {
        let mut lp = lp0.clone();
        let depth = 1 + (rng() % 20) as usize;
        let mut pat = vec![];
        for _ in 0..depth {
            let a = (rng() as usize) % inst.num_arcs();
            let v = if rng() % 2 == 0 { 0.0 } else { 1.0 };
            lp.set_bounds(art.index.y[a], v, v);
            pat.push((a, v));
        }
        if let Err(e) = solve_lp(&lp) {
            println!("trial {trial} pattern {pat:?}: ERROR {e}");
        }
    }
    println!("random fixings done");
}
