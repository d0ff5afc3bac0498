//! Drives the command-line front end on the bundled scenario files.
//!
//!     cargo run --release --example scenario_file [path/to/scenario.toml]

use std::path::PathBuf;

use sirfb::cli::main_with_args;

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios");
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| dir.join("vanishing.toml"));
    let out_dir = std::env::temp_dir().join("sirfb-scenario");
    let series = out_dir.join("series.csv");
    let args: Vec<String> = vec![
        "sirfb".into(),
        "run".into(),
        path.display().to_string(),
        "--series".into(),
        series.display().to_string(),
        "--svg".into(),
        out_dir.join("chart.svg").display().to_string(),
    ];
    let code = main_with_args(args, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit code {code}; series written to {}", series.display());
    std::process::exit(code);
}
