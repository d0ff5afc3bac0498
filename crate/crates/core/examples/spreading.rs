//! Above the critical radius the front keeps advancing. Writes the time
//! series, profile snapshots and an SVG chart to a temporary directory.
//!
//!     cargo run --release --example spreading

use std::fs;

use sirfb::cli::{profile_csv, series_csv};
use sirfb::{run, svg, thresholds, GridSpec, InitialData, ModelParams, TimeStepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
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
    let h0_star = thresholds(&p, &InitialData::bump(1.0, 2.0, 0.5, 0.0)).h0_star;
    let init = InitialData::bump(2.0 * h0_star, 2.0, 0.5, 0.0);
    let grid = GridSpec { length: 100.0, n_l: 2000, n_h: 200 };
    let cfg = TimeStepConfig::new(0.01, 40.0, 20).with_profiles(1000);
    let out = run(&p, &init, &grid, &cfg)?;

    let dir = std::env::temp_dir().join("sirfb-spreading");
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("series.csv"), series_csv(&out.series))?;
    fs::write(dir.join("chart.svg"), svg::series_chart(&out.series))?;
    for (k, f) in out.frames.iter().enumerate() {
        fs::write(dir.join(format!("profile_{k:05}.csv")), profile_csv(f))?;
    }

    // Average front speed over the second half of the run.
    let mid = &out.series[out.series.len() / 2];
    let last = out.last();
    println!("h0 = {:.4} (h0_star = {h0_star:.4})", init.h0);
    println!("h(t_end) = {:.4}, mean speed over second half = {:.4}", last.h, (last.h - mid.h) / (last.t - mid.t));
    println!("sup I(t_end) = {:.4}", last.sup_i);
    println!("classification = {}", out.classification);
    println!("wrote {}", dir.display());
    Ok(())
}
