//! Run classification, the integral mass identity, the comparison check
//! against the vanishing upper solution, invariant audits, refinement
//! studies and the critical-radius bisection.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frontfix::GridSpec;
use crate::model::{front_speed_bound, thresholds, InitialData, ModelParams, Supersolution};
use crate::solver::{run, Domain, Frame, RunOutcome, SeriesRecord, TimeStepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    Spreading,
    Vanishing,
    Undecided,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Spreading => "SPREADING",
            Classification::Vanishing => "VANISHING",
            Classification::Undecided => "UNDECIDED",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Finite-time surrogates for `h∞ < ∞` and `h∞ = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Terminal `sup I` below which infection counts as extinct.
    pub vanish_sup_i: f64,
    /// Allowed front growth over the trailing window, relative to `h₀`.
    pub stagnation: f64,
    /// `sup I` must stay above this over the trailing window when spreading.
    pub spread_sup_i: f64,
    /// Trailing window as a fraction of the run.
    pub trailing_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            vanish_sup_i: 1e-8,
            stagnation: 1e-4,
            spread_sup_i: 1e-6,
            trailing_fraction: 0.1,
        }
    }
}

/// Front growth over the trailing window and the smallest `sup I` inside it.
pub fn trailing_window(series: &[SeriesRecord], fraction: f64) -> (f64, f64) {
    let first = series[0].t;
    let last = series[series.len() - 1];
    let start = last.t - fraction * (last.t - first);
    let base = series.iter().rev().find(|r| r.t <= start).unwrap_or(&series[0]);
    let min_sup_i = series
        .iter()
        .filter(|r| r.t >= start)
        .map(|r| r.sup_i)
        .fold(f64::INFINITY, f64::min);
    (last.h - base.h, min_sup_i)
}

/// Labels a finished run.
pub fn classify(series: &[SeriesRecord], h0: f64, h0_star: Option<f64>, tol: &Tolerances) -> Classification {
    if series.len() < 2 {
        return Classification::Undecided;
    }
    let last = series[series.len() - 1];
    let (growth, min_sup_i) = trailing_window(series, tol.trailing_fraction);
    if last.sup_i < tol.vanish_sup_i && growth < tol.stagnation * h0 {
        return Classification::Vanishing;
    }
    let ceiling = (4.0 * h0).max(h0_star.map_or(0.0, |s| 2.0 * s));
    if last.h > ceiling && min_sup_i > tol.spread_sup_i {
        return Classification::Spreading;
    }
    Classification::Undecided
}

fn trapezoid(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..x.len())
        .map(|k| 0.5 * (x[k] - x[k - 1]) * (f(k - 1) + f(k)))
        .sum()
}

/// `∫ r^{n-1} I dr` and the right-hand side of its evolution law,
/// `-(d₂/μ) h^{n-1} h' + ∫ r^{n-1} I (βS - μ₂ - α) dr`.
pub fn mass_and_rhs(frame: &Frame, p: &ModelParams) -> (f64, f64) {
    let w = |k: usize| frame.nodes[k].powi(p.n as i32 - 1);
    let mass = trapezoid(&frame.nodes, |k| w(k) * frame.i[k]);
    let growth = trapezoid(&frame.nodes, |k| {
        w(k) * frame.i[k] * (p.beta * frame.s_at_nodes[k] - p.mu2 - p.alpha)
    });
    let flux = match frame.domain {
        Domain::Free => -(p.d2 / p.mu) * frame.h.powi(p.n as i32 - 1) * frame.h_dot,
        Domain::Fixed => 0.0,
    };
    (mass, flux + growth)
}

/// `|Δmass/Δt - (rhs₀ + rhs₁)/2|`.
pub fn balance_defect(t0: f64, m0: f64, rhs0: f64, t1: f64, m1: f64, rhs1: f64) -> f64 {
    ((m1 - m0) / (t1 - t0) - 0.5 * (rhs0 + rhs1)).abs()
}

/// Discrete defect of the mass identity between two frames of one run.
pub fn mass_balance_residual(a: &Frame, b: &Frame, p: &ModelParams) -> f64 {
    let (m0, r0) = mass_and_rhs(a, p);
    let (m1, r1) = mass_and_rhs(b, p);
    balance_defect(a.t, m0, r0, b.t, m1, r1)
}

/// Residual recorded at the first series entry with `t ≥ at`.
pub fn residual_at(series: &[SeriesRecord], at: f64) -> Option<f64> {
    series.iter().find(|r| r.t >= at - 1e-9).map(|r| r.balance_residual)
}

/// First point where the numerical solution exceeds the upper solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub r: f64,
    pub what: &'static str,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComparisonStatus {
    Pass,
    Violated(Violation),
    /// Preconditions failed; nothing was certified.
    Refused(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub status: ComparisonStatus,
    pub frames_checked: usize,
    pub nodes_checked: usize,
    /// `min(h̄ - h)` over the series.
    pub min_front_slack: f64,
    /// `min(Ī - I, R̄ - R)` over all checked nodes.
    pub min_field_slack: f64,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.status == ComparisonStatus::Pass
    }
}

/// Checks `h ≤ h̄ + tol` on every record and `I ≤ Ī + tol`, `R ≤ R̄ + tol` on
/// every node of every stored frame.
pub fn comparison_check(run: &RunOutcome, sup: &Supersolution, init: &InitialData, tol: f64) -> ComparisonReport {
    let refuse = |why: String| ComparisonReport {
        status: ComparisonStatus::Refused(why),
        frames_checked: 0,
        nodes_checked: 0,
        min_front_slack: f64::NAN,
        min_field_slack: f64::NAN,
    };
    if !sup.is_verified() {
        let names: Vec<&str> = sup.violations.iter().map(|v| v.name).collect();
        return refuse(format!("upper-solution hypotheses violated: {}", names.join(", ")));
    }
    if !(sup.h_bar(0.0) > init.h0) {
        return refuse(format!("h_bar(0) = {} does not exceed h0 = {}", sup.h_bar(0.0), init.h0));
    }
    if run.frames.is_empty() {
        return refuse("run has no stored profiles".into());
    }

    let mut status = ComparisonStatus::Pass;
    let mut min_front = f64::INFINITY;
    for rec in &run.series {
        let bound = sup.h_bar(rec.t);
        min_front = min_front.min(bound - rec.h);
        if rec.h > bound + tol && status == ComparisonStatus::Pass {
            status = ComparisonStatus::Violated(Violation {
                t: rec.t,
                r: rec.h,
                what: "h",
                value: rec.h,
                bound,
            });
        }
    }
    let mut min_field = f64::INFINITY;
    let mut nodes = 0;
    for frame in &run.frames {
        for (k, &r) in frame.nodes.iter().enumerate() {
            nodes += 1;
            for (what, value, bound) in [
                ("I", frame.i[k], sup.i_bar(r, frame.t)),
                ("R", frame.r[k], sup.r_bar(r, frame.t)),
            ] {
                min_field = min_field.min(bound - value);
                if value > bound + tol && status == ComparisonStatus::Pass {
                    status = ComparisonStatus::Violated(Violation {
                        t: frame.t,
                        r,
                        what,
                        value,
                        bound,
                    });
                }
            }
        }
    }
    ComparisonReport {
        status,
        frames_checked: run.frames.len(),
        nodes_checked: nodes,
        min_front_slack: min_front,
        min_field_slack: min_field,
    }
}

/// Numerical counterparts of the a priori bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantReport {
    pub front_monotone: bool,
    pub min_pre_clamp: f64,
    pub nonnegative: bool,
    pub sup_s_bound: f64,
    pub max_sup_s: f64,
    pub sup_s_ok: bool,
    /// Front-speed bound `C₃` built from the observed `C₂ = 1.1 max(sup I, sup R)`.
    pub c3: f64,
    pub max_h_dot: f64,
    pub front_speed_ok: bool,
}

impl InvariantReport {
    pub fn all_hold(&self) -> bool {
        self.front_monotone && self.nonnegative && self.sup_s_ok && self.front_speed_ok
    }
}

pub fn check_invariants(run: &RunOutcome, p: &ModelParams, init: &InitialData, positivity_tol: f64) -> InvariantReport {
    let d = &run.diagnostics;
    let monotone = d.front_monotone && run.series.windows(2).all(|w| w[1].h >= w[0].h);
    let bound = init.sup_s0().max(p.s_free()) * (1.0 + 1e-6);
    let max_sup_s = run.series.iter().map(|r| r.sup_s).fold(d.max_sup_s, f64::max);
    let c2 = 1.1 * d.max_sup_ir;
    let c3 = front_speed_bound(p, d.thresholds.c1, c2, init.i0_c1_norm());
    let max_h_dot = run.series.iter().map(|r| r.h_dot).fold(d.max_h_dot, f64::max);
    InvariantReport {
        front_monotone: monotone,
        min_pre_clamp: d.min_pre_clamp,
        nonnegative: d.min_pre_clamp >= -positivity_tol,
        sup_s_bound: bound,
        max_sup_s,
        sup_s_ok: max_sup_s <= bound,
        c3,
        max_h_dot,
        front_speed_ok: max_h_dot <= 1.1 * c3,
    }
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_h: usize,
    pub n_l: usize,
    pub dt: f64,
    pub h_end: f64,
    /// Balance residual at each probe time.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub probe_times: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
    /// `log₂(|h_k - h_{k+1}| / |h_{k+1} - h_{k+2}|)` for consecutive triples.
    pub h_orders: Vec<f64>,
    /// `residual_k / residual_{k+1}` per probe time, for consecutive levels.
    pub residual_ratios: Vec<Vec<f64>>,
}

/// Runs `levels` simultaneous refinements of `(Δs, Δr, dt)` by factors of 2.
///
/// The series stride is kept fixed so the frame spacing used by the
/// balance residual shrinks with `dt`.
pub fn convergence_study(
    p: &ModelParams,
    init: &InitialData,
    grid: &GridSpec,
    cfg: &TimeStepConfig,
    levels: usize,
    probe_times: &[f64],
) -> Result<ConvergenceReport> {
    let rows: Vec<Result<ConvergenceRow>> = (0..levels)
        .into_par_iter()
        .map(|k| {
            let f = 1usize << k;
            let g = GridSpec {
                length: grid.length,
                n_l: grid.n_l * f,
                n_h: grid.n_h * f,
            };
            let c = TimeStepConfig {
                dt: cfg.dt / f as f64,
                profile_stride: None,
                ..*cfg
            };
            let out = run(p, init, &g, &c)?;
            let residuals = probe_times
                .iter()
                .map(|&t| residual_at(&out.series, t).unwrap_or(f64::NAN))
                .collect();
            Ok(ConvergenceRow {
                n_h: g.n_h,
                n_l: g.n_l,
                dt: c.dt,
                h_end: out.last().h,
                residuals,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let h_orders = rows
        .windows(3)
        .map(|w| ((w[0].h_end - w[1].h_end).abs() / (w[1].h_end - w[2].h_end).abs()).log2())
        .collect();
    let residual_ratios = rows
        .windows(2)
        .map(|w| w[0].residuals.iter().zip(&w[1].residuals).map(|(a, b)| a / b).collect())
        .collect();
    Ok(ConvergenceReport {
        probe_times: probe_times.to_vec(),
        rows,
        h_orders,
        residual_ratios,
    })
}

/// Number of times an undecided run is repeated with a doubled horizon.
pub const HORIZON_DOUBLINGS: usize = 2;

/// One classified run inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    /// Value of the swept quantity.
    pub value: f64,
    pub classification: Classification,
    pub h_end: f64,
    pub sup_i_end: f64,
    pub t_end: f64,
}

/// Runs one scenario, stopping once the front nears the truncation radius
/// and doubling the horizon while the label stays undecided.
pub fn classify_run(
    p: &ModelParams,
    init: &InitialData,
    grid: &GridSpec,
    cfg: &TimeStepConfig,
    value: f64,
) -> Result<SweepPoint> {
    let limit = 0.9 * crate::frontfix::ESCAPE_FRACTION * grid.length;
    let mut c = TimeStepConfig {
        stop_radius: Some(cfg.stop_radius.map_or(limit, |r| r.min(limit))),
        profile_stride: None,
        ..*cfg
    };
    let mut attempt = 0;
    loop {
        let out = run(p, init, grid, &c)?;
        let last = *out.last();
        if out.classification != Classification::Undecided || attempt == HORIZON_DOUBLINGS {
            return Ok(SweepPoint {
                value,
                classification: out.classification,
                h_end: last.h,
                sup_i_end: last.sup_i,
                t_end: last.t,
            });
        }
        attempt += 1;
        c.t_end *= 2.0;
    }
}

/// [`classify_run`] with the initial radius moved to `h0`.
pub fn classify_h0(
    p: &ModelParams,
    template: &InitialData,
    grid: &GridSpec,
    cfg: &TimeStepConfig,
    h0: f64,
) -> Result<SweepPoint> {
    classify_run(p, &template.with_h0(h0), grid, cfg, h0)
}

/// Final bracket of a bisection and every point evaluated on the way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bisection {
    /// Final bracket `(lower, upper)`.
    pub interval: (f64, f64),
    /// Label at the lower end of the bracket.
    pub lower_label: Classification,
    pub points: Vec<SweepPoint>,
}

/// Bisection of a scalar parameter between two differently labelled ends.
///
/// The two ends are evaluated concurrently. The label is assumed to switch
/// once inside the bracket; an undecided point aborts the search.
pub fn bisect<F>(bracket: (f64, f64), iterations: usize, eval: F) -> Result<Bisection>
where
    F: Fn(f64) -> Result<SweepPoint> + Sync,
{
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Config(format!("bracket must satisfy lower < upper, got ({lo}, {hi})")));
    }
    if iterations == 0 {
        return Ok(Bisection {
            interval: bracket,
            lower_label: Classification::Undecided,
            points: Vec::new(),
        });
    }
    let (a, b) = rayon::join(|| eval(lo), || eval(hi));
    let (a, b) = (a?, b?);
    for pt in [&a, &b] {
        if pt.classification == Classification::Undecided {
            return Err(Error::Inconclusive { value: pt.value });
        }
    }
    if a.classification == b.classification {
        return Err(Error::InvalidBracket(a.classification.label().into()));
    }
    let lower_label = a.classification;
    let mut points = vec![a, b];
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let pt = eval(mid)?;
        if pt.classification == Classification::Undecided {
            return Err(Error::Inconclusive { value: mid });
        }
        if pt.classification == lower_label {
            lo = mid;
        } else {
            hi = mid;
        }
        points.push(pt);
    }
    Ok(Bisection {
        interval: (lo, hi),
        lower_label,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BisectionResult {
    /// Final bracket `(lower, upper)`.
    pub interval: (f64, f64),
    /// Label at the lower end of the bracket.
    pub lower_label: Classification,
    pub h0_star: f64,
    pub points: Vec<SweepPoint>,
}

/// Bisection on `h₀` between a vanishing and a spreading endpoint.
///
/// Returns the final bracket after `iterations` halvings together with the
/// theoretical `h₀*`.
pub fn sweep_critical_h0(
    p: &ModelParams,
    template: &InitialData,
    grid: &GridSpec,
    cfg: &TimeStepConfig,
    bracket: (f64, f64),
    iterations: usize,
) -> Result<BisectionResult> {
    if !(bracket.0 > 0.0) {
        return Err(Error::Config(format!("h0 bracket must be positive, got {:?}", bracket)));
    }
    let h0_star = thresholds(p, template).h0_star;
    let b = bisect(bracket, iterations, |h0| classify_h0(p, template, grid, cfg, h0))?;
    Ok(BisectionResult {
        interval: b.interval,
        lower_label: b.lower_label,
        h0_star,
        points: b.points,
    })
}
