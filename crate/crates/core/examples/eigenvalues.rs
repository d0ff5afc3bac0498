//! Principal Dirichlet eigenvalue of -Δ on balls and the critical radius
//! that follows from it.
//!
//!     cargo run --example eigenvalues

use sirfb::eigen::{critical_radius, lambda1, principal_zero, EigenQuery};
use sirfb::ModelParams;

fn main() -> sirfb::Result<()> {
    println!("{:>3} {:>18} {:>18} {:>18}", "n", "j_(n/2-1),1", "lambda1(R=1)", "lambda1(R=2)");
    for n in 1..=3 {
        let j = principal_zero(n)?;
        let l1 = lambda1(EigenQuery::new(1.0, n)?)?;
        let l2 = lambda1(EigenQuery::new(2.0, n)?)?;
        println!("{n:>3} {j:>18.12} {l1:>18.12} {l2:>18.12}");
    }

    // λ₁(h₀*) = (μ₂ + α)(R₀ - 1)/d₂ picks out the critical radius.
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
        n: 3,
    };
    println!("\nR0 = {}, n = 3: h0_star = {:.12} (pi = {:.12})", sirfb::compute_r0(&p), critical_radius(&p)?, std::f64::consts::PI);
    Ok(())
}
