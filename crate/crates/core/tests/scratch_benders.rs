//! Scratch Benders probe (temporary).
use corridors_core::benders::{run_benders, BendersOptions};
use corridors_core::ef::EfOptions;
use corridors_core::io::gen;

#[test]
#[ignore]
fn benders_probe() {
    let inst = gen::replica_instance();
    for (name, mode) in [
        ("risk-neutral fixed-prob", EfOptions::risk_neutral_fixed_probs()),
        ("full", EfOptions::default()),
    ] {
        let t0 = std::time::Instant::now();
        let opts = BendersOptions { max_iter: 40, mode, ..BendersOptions::default() };
        match run_benders(&inst, &opts) {
            Ok(run) => {
                println!("{name}: converged={} iters={} time={:.1?}", run.state.converged, run.state.iterations, t0.elapsed());
                for row in &run.state.trace {
                    println!("  it {:>2}: LB {:>12.4} UB {:>12.4} gap {:.3}% cuts {} t={:.2}s",
                        row.iteration, row.lower_bound, row.upper_bound, row.gap_pct, row.cuts_added, row.runtime_sec);
                }
            }
            Err(e) => println!("{name}: ERROR {e} after {:.1?}", t0.elapsed()),
        }
    }
}
