//! Command-line front end.
//!
//! Every command writes its report to the `out` writer and diagnostics to
//! `err`, and returns the process exit code: 0 on success, 1 for invalid
//! input, 2 when the solver fails, 3 for sweep or bracket errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::analysis::{bisect, classify_run, convergence_study, SweepPoint};
use crate::config::{Scenario, ScenarioConfig};
use crate::eigen::{lambda1, EigenQuery};
use crate::error::{Error, Result};
use crate::model::{
    compute_r0, disease_free_equilibrium, endemic_equilibrium, integrate_ode, thresholds, InitialData, ModelParams,
    ThresholdReport,
};
use crate::solver::{run, run_fixed_domain, Frame, RunOutcome, SeriesRecord, SERIES_HEADER};
use crate::svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_SWEEP: i32 = 3;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidBracket(_) | Error::Inconclusive { .. } => EXIT_SWEEP,
        e if e.is_solver_error() => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Parser)]
#[command(name = "sirfb", version, about = "Free-boundary SIR simulator and threshold calculator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and classify the outcome.
    Run(RunArgs),
    /// Print R0, the critical radius and the vanishing bounds.
    Thresholds(ConfigArg),
    /// Classify a family of scenarios varying one parameter.
    Sweep(SweepArgs),
    /// Principal Dirichlet eigenvalue of -Δ on a ball.
    Eig(EigArgs),
    /// Integrate the spatially homogeneous model.
    Ode(OdeArgs),
    /// Refinement study: front position and mass-balance residual.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Scenario file (TOML).
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub config: PathBuf,
    /// Solve on the ball of radius L with zero-flux boundary instead of a free boundary.
    #[arg(long)]
    pub fixed_domain: bool,
    /// Time-series CSV (overrides `output.series`).
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Directory for profile snapshots (overrides `output.profiles_dir`).
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// SVG chart of h(t) and sup I(t) (overrides `output.svg`).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Print the parsed scenario as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    H0,
    Mu,
    Beta,
    B,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    /// Number of evenly spaced values from `--from` to `--to`.
    #[arg(long, conflicts_with = "bisect", required_unless_present = "bisect")]
    pub steps: Option<usize>,
    /// Bisect between `--from` and `--to` instead of scanning.
    #[arg(long)]
    pub bisect: bool,
    #[arg(long, default_value_t = 8)]
    pub iterations: usize,
    /// CSV destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "R", allow_hyphen_values = true)]
    pub radius: f64,
}

#[derive(Debug, Args)]
pub struct OdeArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep every `stride`-th step.
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    /// Initial state `S,I,R` (default: the initial profiles at r = 0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub state: Option<Vec<f64>>,
    /// Trajectory CSV `t,S,I,R` (default: stdout summary only).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    pub config: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Probe times for the residual.
    #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
    pub probes: Vec<f64>,
}

/// Parses `args` (including the program name) and dispatches.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Thresholds(a) => cmd_thresholds(&a.config, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Eig(a) => cmd_eig(a, out),
        Command::Ode(a) => cmd_ode(a, out),
        Command::Convergence(a) => cmd_convergence(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load(path: &Path) -> Result<(ScenarioConfig, Scenario)> {
    let cfg = ScenarioConfig::load(path)?;
    let sc = cfg.scenario()?;
    Ok((cfg, sc))
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, body: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, body).map_err(|e| io_err(path, e))
}

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `x` with `digits` significant digits in positional notation when sensible.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // Take the exponent after rounding so 0.99999999999999 prints as 1.000...
    let sci = format!("{x:.prec$e}", prec = digits - 1);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

pub fn series_csv(series: &[SeriesRecord]) -> String {
    let mut s = String::from(SERIES_HEADER);
    s.push('\n');
    for r in series {
        let cols = [r.t, r.h, r.h_dot, r.sup_s, r.sup_i, r.sup_r, r.mass_i, r.balance_residual];
        let cols: Vec<String> = cols.iter().map(|&v| fmt17(v)).collect();
        s.push_str(&cols.join(","));
        s.push('\n');
    }
    s
}

pub fn profile_csv(frame: &Frame) -> String {
    let mut s = String::from("r,S,I,R\n");
    for row in frame.physical_profiles() {
        let cols: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        s.push_str(&cols.join(","));
        s.push('\n');
    }
    s
}

/// Writes `profile_NNNNN.csv` per frame plus an index `frame,t,h`.
pub fn write_profiles(dir: &Path, frames: &[Frame]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut index = String::from("frame,t,h\n");
    for (k, f) in frames.iter().enumerate() {
        write_file(&dir.join(format!("profile_{k:05}.csv")), profile_csv(f).as_bytes())?;
        index.push_str(&format!("{k},{},{}\n", fmt17(f.t), fmt17(f.h)));
    }
    write_file(&dir.join("index.csv"), index.as_bytes())
}

/// `key=value` lines of a threshold report.
pub fn threshold_lines(rep: &ThresholdReport) -> Vec<String> {
    let v = |x: f64| fmt_sig(x, 12);
    vec![
        format!("r0={}", v(rep.r0)),
        format!("k0={}", v(rep.k0)),
        format!("c1={}", v(rep.c1)),
        format!("big_m={}", v(rep.big_m)),
        format!("gamma={}", v(rep.gamma)),
        format!("h0={}", v(rep.h0)),
        format!("h0_star={}", v(rep.h0_star)),
        format!("h0_vanish_bound={}", v(rep.h0_vanish_bound)),
        format!("mu={}", v(rep.mu)),
        format!("mu_vanish_bound={}", v(rep.mu_vanish_bound)),
        format!("h0_vanish_bound_alt={}", v(rep.vanish_alt.h0_bound)),
        format!("mu_vanish_bound_alt={}", v(rep.vanish_alt.mu_bound)),
        format!("regime={}", rep.regime().describe()),
    ]
}

fn cmd_thresholds(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let (_, sc) = load(path)?;
    for line in threshold_lines(&thresholds(&sc.params, &sc.init)) {
        writeln!(out, "{line}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (cfg, sc) = load(&a.config)?;
    if a.dump_config {
        write!(out, "{}", cfg.to_toml())?;
        return Ok(EXIT_OK);
    }
    let pick = |flag: &Option<PathBuf>, conf: &Option<String>| flag.clone().or_else(|| conf.as_ref().map(PathBuf::from));
    let series_path = pick(&a.series, &sc.output.series);
    let profiles_dir = pick(&a.profiles, &sc.output.profiles_dir);
    let svg_path = pick(&a.svg, &sc.output.svg);

    let mut time = sc.time;
    if profiles_dir.is_some() && time.profile_stride.is_none() {
        time.profile_stride = Some(time.save_stride);
    }
    let outcome = if a.fixed_domain {
        run_fixed_domain(&sc.params, &sc.init, &sc.grid, &time)?
    } else {
        run(&sc.params, &sc.init, &sc.grid, &time)?
    };

    for line in threshold_lines(&outcome.diagnostics.thresholds) {
        writeln!(out, "{line}")?;
    }
    if let Some(w) = &outcome.diagnostics.grid_warning {
        writeln!(err, "warning: {w}")?;
    }
    write_run_artifacts(&outcome, series_path.as_deref(), profiles_dir.as_deref(), svg_path.as_deref())?;
    let last = outcome.last();
    let d = &outcome.diagnostics;
    writeln!(out, "steps={}", d.steps)?;
    writeln!(out, "t_end={}", fmt_sig(last.t, 12))?;
    writeln!(out, "h_end={}", fmt_sig(last.h, 12))?;
    writeln!(out, "sup_I_end={}", fmt_sig(last.sup_i, 12))?;
    writeln!(out, "sup_R_end={}", fmt_sig(last.sup_r, 12))?;
    writeln!(out, "front_monotone={}", d.front_monotone)?;
    writeln!(out, "min_pre_clamp={:e}", d.min_pre_clamp)?;
    writeln!(out, "classification={}", outcome.classification)?;
    Ok(EXIT_OK)
}

fn write_run_artifacts(o: &RunOutcome, series: Option<&Path>, profiles: Option<&Path>, chart: Option<&Path>) -> Result<()> {
    if let Some(p) = series {
        write_file(p, series_csv(&o.series).as_bytes())?;
    }
    if let Some(dir) = profiles {
        write_profiles(dir, &o.frames)?;
    }
    if let Some(p) = chart {
        write_file(p, svg::series_chart(&o.series).as_bytes())?;
    }
    Ok(())
}

fn with_param(sc: &Scenario, which: SweepParam, value: f64) -> (ModelParams, InitialData) {
    let mut p = sc.params;
    let mut init = sc.init.clone();
    match which {
        SweepParam::H0 => init = init.with_h0(value),
        SweepParam::Mu => p.mu = value,
        SweepParam::Beta => p.beta = value,
        SweepParam::B => p.b = value,
    }
    (p, init)
}

fn validated(p: &ModelParams, init: &InitialData, sc: &Scenario) -> Result<()> {
    p.validate()?;
    init.validate()?;
    crate::frontfix::Grids::new(sc.grid, init.h0, p.n)?;
    Ok(())
}

const SWEEP_HEADER: &str = "value,classification,h_end,sup_I_end";

fn sweep_row(value: f64, pt: &Result<SweepPoint>) -> String {
    match pt {
        Ok(pt) => format!(
            "{},{},{},{}",
            fmt17(value),
            pt.classification,
            fmt17(pt.h_end),
            fmt17(pt.sup_i_end)
        ),
        Err(_) => format!("{},ERROR,NaN,NaN", fmt17(value)),
    }
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (_, sc) = load(&a.config)?;
    let eval_plain = |v: f64| -> Result<SweepPoint> {
        let (p, init) = with_param(&sc, a.param, v);
        validated(&p, &init, &sc)?;
        let o = run(&p, &init, &sc.grid, &sc.time)?;
        let last = o.last();
        Ok(SweepPoint {
            value: v,
            classification: o.classification,
            h_end: last.h,
            sup_i_end: last.sup_i,
            t_end: last.t,
        })
    };
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');

    if a.bisect {
        let eval = |v: f64| {
            let (p, init) = with_param(&sc, a.param, v);
            validated(&p, &init, &sc)?;
            classify_run(&p, &init, &sc.grid, &sc.time, v)
        };
        let b = bisect((a.from, a.to), a.iterations, eval)?;
        for pt in &b.points {
            csv.push_str(&sweep_row(pt.value, &Ok(*pt)));
            csv.push('\n');
        }
        emit_csv(a.out.as_deref(), &csv, out)?;
        writeln!(out, "interval_lower={}", fmt17(b.interval.0))?;
        writeln!(out, "interval_upper={}", fmt17(b.interval.1))?;
        writeln!(out, "lower_label={}", b.lower_label)?;
        if a.param == SweepParam::H0 {
            writeln!(out, "h0_star={}", fmt17(thresholds(&sc.params, &sc.init).h0_star))?;
        }
        return Ok(EXIT_OK);
    }

    let steps = a.steps.unwrap_or(1);
    if steps == 0 {
        return Err(Error::Config("--steps must be >= 1".into()));
    }
    let values: Vec<f64> = if steps == 1 {
        vec![a.from]
    } else {
        (0..steps)
            .map(|k| a.from + (a.to - a.from) * k as f64 / (steps - 1) as f64)
            .collect()
    };
    let results: Vec<Result<SweepPoint>> = values.par_iter().map(|&v| eval_plain(v)).collect();
    let mut failed = 0;
    for (v, r) in values.iter().zip(&results) {
        if let Err(e) = r {
            failed += 1;
            writeln!(err, "row {}: {e}", fmt_sig(*v, 12))?;
        }
        csv.push_str(&sweep_row(*v, r));
        csv.push('\n');
    }
    emit_csv(a.out.as_deref(), &csv, out)?;
    let labels: Vec<_> = results.iter().filter_map(|r| r.as_ref().ok()).map(|p| p.classification).collect();
    let flips = labels.windows(2).filter(|w| w[0] != w[1]).count();
    if flips > 1 {
        writeln!(err, "warning: classification changes {flips} times along the sweep")?;
    }
    Ok(if failed > 0 { EXIT_SOLVER } else { EXIT_OK })
}

fn emit_csv(path: Option<&Path>, csv: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, csv.as_bytes()),
        None => Ok(out.write_all(csv.as_bytes())?),
    }
}

fn cmd_eig(a: &EigArgs, out: &mut dyn Write) -> Result<i32> {
    let q = EigenQuery::new(a.radius, a.n)?;
    writeln!(out, "{}", fmt_sig(lambda1(q)?, 12))?;
    Ok(EXIT_OK)
}

fn cmd_ode(a: &OdeArgs, out: &mut dyn Write) -> Result<i32> {
    let (cfg, sc) = load(&a.config)?;
    let p = sc.params;
    let start = match &a.state {
        Some(v) if v.len() == 3 => [v[0], v[1], v[2]],
        Some(v) => return Err(Error::Config(format!("--state takes S,I,R, got {} values", v.len()))),
        None => [sc.init.s0_at(0.0), sc.init.i0_at(0.0), sc.init.r0_at(0.0)],
    };
    if start.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Config(format!("initial state must be nonnegative, got {start:?}")));
    }
    let t_end = a.t_end.unwrap_or(cfg.time.t_end);
    let dt = a.dt.unwrap_or(cfg.time.dt);
    let traj = integrate_ode(start, &p, t_end, dt, a.stride.max(1))?;
    if let Some(path) = &a.out {
        let mut s = String::from("t,S,I,R\n");
        for (t, x) in traj.times.iter().zip(&traj.states) {
            s.push_str(&format!("{},{},{},{}\n", fmt17(*t), fmt17(x[0]), fmt17(x[1]), fmt17(x[2])));
        }
        write_file(path, s.as_bytes())?;
    }
    let [s, i, r] = traj.terminal();
    writeln!(out, "r0={}", fmt_sig(compute_r0(&p), 12))?;
    writeln!(out, "t_end={}", fmt_sig(*traj.times.last().unwrap(), 12))?;
    writeln!(out, "S_end={}", fmt_sig(s, 12))?;
    writeln!(out, "I_end={}", fmt_sig(i, 12))?;
    writeln!(out, "R_end={}", fmt_sig(r, 12))?;
    let dfe = disease_free_equilibrium(&p);
    writeln!(out, "disease_free={},{},{}", fmt_sig(dfe[0], 12), dfe[1], dfe[2])?;
    if let Some(e) = endemic_equilibrium(&p) {
        writeln!(out, "endemic={},{},{}", fmt_sig(e[0], 12), fmt_sig(e[1], 12), fmt_sig(e[2], 12))?;
    }
    Ok(EXIT_OK)
}

fn cmd_convergence(a: &ConvergenceArgs, out: &mut dyn Write) -> Result<i32> {
    let (_, sc) = load(&a.config)?;
    if a.levels < 2 {
        return Err(Error::Config("--levels must be >= 2".into()));
    }
    let rep = convergence_study(&sc.params, &sc.init, &sc.grid, &sc.time, a.levels, &a.probes)?;
    let probes: Vec<String> = a.probes.iter().map(|t| format!("res_t{t}")).collect();
    writeln!(out, "n_h,n_l,dt,h_end,{}", probes.join(","))?;
    for row in &rep.rows {
        let res: Vec<String> = row.residuals.iter().map(|&r| fmt17(r)).collect();
        writeln!(out, "{},{},{},{},{}", row.n_h, row.n_l, fmt17(row.dt), fmt17(row.h_end), res.join(","))?;
    }
    for (k, o) in rep.h_orders.iter().enumerate() {
        writeln!(out, "h_order[{k}]={}", fmt_sig(*o, 6))?;
    }
    for (k, ratios) in rep.residual_ratios.iter().enumerate() {
        let r: Vec<String> = ratios.iter().map(|&x| fmt_sig(x, 6)).collect();
        writeln!(out, "residual_ratio[{k}]={}", r.join(","))?;
    }
    Ok(EXIT_OK)
}
