//! Joint refinement of (ds, dr, dt): the defect of the discrete mass
//! identity shrinks by about 2 per level, and the front position settles.
//!
//!     cargo run --release --example convergence_study

use sirfb::analysis::convergence_study;
use sirfb::{GridSpec, InitialData, ModelParams, TimeStepConfig};

fn main() -> sirfb::Result<()> {
    let p = ModelParams {
        b: 1.0,
        beta: 1.0,
        mu1: 0.5,
        mu2: 0.6,
        mu3: 0.7,
        alpha: 0.4,
        d1: 1.0,
        d2: 1.0,
        d3: 1.0,
        mu: 0.25,
        n: 1,
    };
    let init = InitialData::bump(2.0, 2.0, 0.5, 0.1);
    let grid = GridSpec { length: 20.0, n_l: 2000, n_h: 400 };
    let cfg = TimeStepConfig::new(0.01, 10.0, 1);
    let probes = [1.0, 5.0, 10.0];
    let rep = convergence_study(&p, &init, &grid, &cfg, 3, &probes)?;

    println!("{:>6} {:>8} {:>16} {:>12} {:>12} {:>12}", "n_h", "dt", "h(10)", "res(1)", "res(5)", "res(10)");
    for row in &rep.rows {
        println!(
            "{:>6} {:>8.5} {:>16.10} {:>12.4e} {:>12.4e} {:>12.4e}",
            row.n_h, row.dt, row.h_end, row.residuals[0], row.residuals[1], row.residuals[2]
        );
    }
    for (k, r) in rep.residual_ratios.iter().enumerate() {
        println!("residual ratio level {k} -> {}: {:.3} {:.3} {:.3}", k + 1, r[0], r[1], r[2]);
    }
    Ok(())
}
