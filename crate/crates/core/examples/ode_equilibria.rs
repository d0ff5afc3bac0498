//! The spatially homogeneous model: decay below threshold, convergence to
//! the endemic state above it.
//!
//!     cargo run --example ode_equilibria

use sirfb::model::{disease_free_equilibrium, endemic_equilibrium, integrate_ode, ode_rhs};
use sirfb::{compute_r0, ModelParams};

fn main() -> sirfb::Result<()> {
    let base = ModelParams {
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
        n: 1,
    };
    for beta in [0.25, 1.0] {
        let p = ModelParams { beta, ..base };
        let traj = integrate_ode([1.5, 0.3, 0.1], &p, 500.0, 0.01, 1000)?;
        let end = traj.terminal();
        println!("R0 = {}", compute_r0(&p));
        for (t, x) in traj.times.iter().zip(&traj.states).step_by(10) {
            println!("  t = {t:6.1}  S = {:.6}  I = {:.3e}  R = {:.3e}", x[0], x[1], x[2]);
        }
        let target = endemic_equilibrium(&p).unwrap_or_else(|| disease_free_equilibrium(&p));
        let gap = (0..3).map(|k| (end[k] - target[k]).abs()).fold(0.0, f64::max);
        println!("  equilibrium {target:?}, distance {gap:.2e}, |rhs| there {:.2e}\n", {
            let f = ode_rhs(target, &p);
            f.iter().map(|v| v.abs()).fold(0.0, f64::max)
        });
    }
    Ok(())
}
