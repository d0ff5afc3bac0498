//! On a fixed ball with zero-flux boundary and spatially constant data the
//! PDE reduces to the ODE; the IMEX scheme tracks a fine RK4 reference to
//! first order in dt.
//!
//!     cargo run --release --example fixed_domain_vs_ode

use sirfb::model::integrate_ode;
use sirfb::{run_fixed_domain, GridSpec, InitialData, ModelParams, Profile, TimeStepConfig};

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
        mu: 1.0,
        n: 2,
    };
    let start = [1.5, 0.3, 0.1];
    let init = InitialData {
        h0: 1.0,
        s0: Profile::Constant { value: start[0] },
        i0: Profile::Constant { value: start[1] },
        r0: Profile::Constant { value: start[2] },
    };
    let grid = GridSpec { length: 5.0, n_l: 32, n_h: 16 };
    println!("{:>10} {:>14}", "dt", "sup error");
    for dt in [4e-3, 2e-3, 1e-3, 5e-4] {
        let out = run_fixed_domain(&p, &init, &grid, &TimeStepConfig::new(dt, 50.0, 10))?;
        let reference = integrate_ode(start, &p, 50.0, dt / 10.0, 10)?;
        let err = out
            .series
            .iter()
            .map(|r| {
                let x = reference.at(r.t);
                (r.sup_s - x[0]).abs().max((r.sup_i - x[1]).abs()).max((r.sup_r - x[2]).abs())
            })
            .fold(0.0, f64::max);
        println!("{dt:>10.0e} {err:>14.4e}");
    }
    Ok(())
}
