//! Locates the empirical critical initial radius by bisection and compares
//! it with the sufficient radius h0_star from the eigenvalue criterion.
//!
//!     cargo run --release --example critical_radius_bisection

use sirfb::analysis::sweep_critical_h0;
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
        mu: 2.0,
        n: 1,
    };
    let h0_star = std::f64::consts::FRAC_PI_2;
    let template = InitialData::bump(h0_star, 2.0, 0.5, 0.0);
    let grid = GridSpec { length: 60.0, n_l: 1200, n_h: 100 };
    let cfg = TimeStepConfig::new(0.01, 100.0, 20);
    let res = sweep_critical_h0(&p, &template, &grid, &cfg, (0.1 * h0_star, 2.0 * h0_star), 8)?;

    for pt in &res.points {
        println!("h0 = {:.6}  {:<10} h_end = {:8.3}  t_end = {}", pt.value, pt.classification, pt.h_end, pt.t_end);
    }
    println!("critical h0 in [{:.6}, {:.6}], h0_star = {:.6}", res.interval.0, res.interval.1, res.h0_star);
    Ok(())
}
