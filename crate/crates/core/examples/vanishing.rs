//! Below threshold the infection dies out, the front stops and S returns
//! to b/mu1 near the origin.
//!
//!     cargo run --release --example vanishing

use sirfb::analysis::check_invariants;
use sirfb::{run, GridSpec, InitialData, ModelParams, TimeStepConfig};

fn main() -> sirfb::Result<()> {
    let p = ModelParams {
        b: 1.0,
        beta: 0.4,
        mu1: 0.5,
        mu2: 0.6,
        mu3: 0.7,
        alpha: 0.4,
        d1: 1.0,
        d2: 1.0,
        d3: 1.0,
        mu: 1.0,
        n: 1,
    };
    let init = InitialData::bump(2.0, 2.0, 0.8, 0.2);
    let grid = GridSpec { length: 40.0, n_l: 800, n_h: 200 };
    let cfg = TimeStepConfig::new(0.01, 200.0, 500);
    let out = run(&p, &init, &grid, &cfg)?;

    println!("R0 = {:.3}", sirfb::compute_r0(&p));
    println!("{:>8} {:>12} {:>12} {:>12}", "t", "h", "sup I", "sup R");
    for r in &out.series {
        println!("{:>8.1} {:>12.6} {:>12.3e} {:>12.3e}", r.t, r.h, r.sup_i, r.sup_r);
    }
    println!("S(0, t_end) = {:.8}  (b/mu1 = {})", out.final_frame.s_phys[0], p.s_free());
    println!("invariants hold: {}", check_invariants(&out, &p, &init, cfg.positivity_tol).all_hold());
    println!("classification = {}", out.classification);
    Ok(())
}
