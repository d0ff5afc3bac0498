//! With R0 > 1 but a small initial front and a slow Stefan coefficient, the
//! explicit upper solution caps the numerical solution: h stays below
//! 2 h0 (2 - e^{-gamma t}) and I below M e^{-gamma t}(1 - (r/h_bar)^2).
//!
//!     cargo run --release --example supersolution_comparison

use sirfb::analysis::comparison_check;
use sirfb::model::build_supersolution;
use sirfb::{run, thresholds, GridSpec, InitialData, ModelParams, TimeStepConfig};

fn main() -> sirfb::Result<()> {
    let mut p = ModelParams {
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
    let template = InitialData::bump(1.0, 2.0, 0.5, 0.25);
    let h0 = 0.9 * thresholds(&p, &template).h0_vanish_bound;
    let init = template.with_h0(h0);
    p.mu = 0.9 * thresholds(&p, &init).mu_vanish_bound;
    let rep = thresholds(&p, &init);
    let sup = build_supersolution(&p, &init, &rep);
    println!("R0 = {}, h0 = {h0:.4} (bound {:.4}), mu = {:.4} (bound {:.4})", rep.r0, rep.h0_vanish_bound, p.mu, rep.mu_vanish_bound);
    println!("M = {:.4}, gamma = {:.4}, hypotheses hold: {}", rep.big_m, rep.gamma, sup.is_verified());

    let grid = GridSpec { length: 10.0 * h0, n_l: 400, n_h: 100 };
    let cfg = TimeStepConfig::new(0.01, 200.0, 10).with_profiles(10);
    let out = run(&p, &init, &grid, &cfg)?;
    let report = comparison_check(&out, &sup, &init, 1e-3 * rep.big_m);
    let h_max = out.series.iter().map(|r| r.h).fold(0.0, f64::max);
    println!("max h = {h_max:.5} <= 4 h0 = {:.5}", 4.0 * h0);
    println!(
        "checked {} frames / {} nodes, min slack h: {:.3e}, fields: {:.3e}",
        report.frames_checked, report.nodes_checked, report.min_front_slack, report.min_field_slack
    );
    println!("comparison: {:?}", report.status);
    println!("classification = {}", out.classification);
    Ok(())
}
