//! Threshold report for three parameter regimes: sub-threshold, a small
//! initial front with R0 > 1, and a large initial front.
//!
//!     cargo run --example thresholds

use sirfb::{thresholds, InitialData, ModelParams};

fn main() {
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
        mu: 0.15,
        n: 1,
    };
    let cases = [
        ("R0 < 1", ModelParams { beta: 0.4, ..base }, InitialData::bump(2.0, 2.0, 0.5, 0.0)),
        ("small front", base, InitialData::bump(0.2, 2.0, 0.5, 0.0)),
        ("large front", base, InitialData::bump(3.0, 2.0, 0.5, 0.0)),
    ];
    for (name, p, init) in cases {
        let rep = thresholds(&p, &init);
        println!("== {name}");
        println!("  R0              {:.6}", rep.r0);
        println!("  k0 = beta C1 - mu2 - alpha  {:.6}", rep.k0);
        println!("  h0 / h0_star    {:.6} / {:.6}", rep.h0, rep.h0_star);
        println!("  h0 bound        {:.6}  (alt {:.6})", rep.h0_vanish_bound, rep.vanish_alt.h0_bound);
        println!("  mu / mu bound   {:.6} / {:.6}", rep.mu, rep.mu_vanish_bound);
        println!("  regime          {}", rep.regime().describe());
    }
}
