//! IMEX time stepping for the free-boundary system and its fixed-domain
//! and homogeneous reference modes.
//!
//! Each step updates the front explicitly from the Stefan condition, then
//! advances every field with backward-Euler diffusion and explicit
//! reaction/advection, using coefficients frozen at the old front position.

use serde::{Deserialize, Serialize};

use crate::analysis::{self, Classification, Tolerances};
use crate::error::{Error, Result};
use crate::frontfix::{
    self, cross_interpolate, front_gradient, implicit_diffusion, implicit_diffusion_advection, GridSpec, Grids,
    OuterBoundary, SimState,
};
use crate::model::{thresholds, InitialData, ModelParams, ThresholdReport};

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeStepConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Record a series entry every `save_stride` steps.
    pub save_stride: usize,
    /// Negative values above `-positivity_tol` are clamped to zero.
    #[serde(default = "default_positivity_tol")]
    pub positivity_tol: f64,
    /// Safety factor applied to the admissible step.
    #[serde(default = "default_dt_safety")]
    pub dt_safety: f64,
    /// Keep a full profile snapshot every `profile_stride` steps.
    #[serde(default)]
    pub profile_stride: Option<usize>,
    /// End the run early once the front reaches this radius.
    #[serde(default)]
    pub stop_radius: Option<f64>,
}

fn default_positivity_tol() -> f64 {
    1e-10
}

fn default_dt_safety() -> f64 {
    0.5
}

impl TimeStepConfig {
    pub fn new(dt: f64, t_end: f64, save_stride: usize) -> Self {
        TimeStepConfig {
            dt,
            t_end,
            save_stride,
            positivity_tol: default_positivity_tol(),
            dt_safety: default_dt_safety(),
            profile_stride: None,
            stop_radius: None,
        }
    }

    pub fn with_profiles(mut self, stride: usize) -> Self {
        self.profile_stride = Some(stride.max(1));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidTimeStep(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end > self.dt && self.t_end.is_finite()) {
            return Err(Error::InvalidTimeStep(format!(
                "t_end must exceed dt, got t_end = {} and dt = {}",
                self.t_end, self.dt
            )));
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(Error::InvalidTimeStep(format!("dt_safety must lie in (0, 1], got {}", self.dt_safety)));
        }
        if self.save_stride == 0 {
            return Err(Error::InvalidTimeStep("save_stride must be >= 1".into()));
        }
        if !(self.positivity_tol >= 0.0) {
            return Err(Error::InvalidTimeStep("positivity_tol must be >= 0".into()));
        }
        Ok(())
    }
}

/// One entry of the recorded time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRecord {
    pub t: f64,
    pub h: f64,
    pub h_dot: f64,
    pub sup_s: f64,
    pub sup_i: f64,
    pub sup_r: f64,
    /// `∫₀^h r^{n-1} I dr`.
    pub mass_i: f64,
    /// Defect of the mass identity against the previous record (0 for the first).
    pub balance_residual: f64,
}

pub const SERIES_HEADER: &str = "t,h,dhdt,sup_S,sup_I,sup_R,mass_I,balance_residual";

/// Whether the infected region is bounded by a moving front or fills the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Free,
    Fixed,
}

/// Full profile snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub h: f64,
    /// `-μ I_r(h)` from the nodal gradient (not clamped).
    pub h_dot: f64,
    pub domain: Domain,
    /// Physical positions of the `I`/`R` samples.
    pub nodes: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
    /// `S` at `nodes`.
    pub s_at_nodes: Vec<f64>,
    /// `S` on the physical grid.
    pub s_phys: Vec<f64>,
    pub dr: f64,
}

impl Frame {
    fn free(state: &SimState, params: &ModelParams, grids: &Grids) -> Frame {
        let h_dot = front_speed(state, params, grids);
        Frame {
            t: state.t,
            h: state.h,
            h_dot,
            domain: Domain::Free,
            nodes: state.mapped_nodes(grids),
            i: state.v_comp.clone(),
            r: state.w_comp.clone(),
            s_at_nodes: frontfix::phys_to_comp(&state.s_phys, state.h, grids),
            s_phys: state.s_phys.clone(),
            dr: grids.dr,
        }
    }

    fn fixed(state: &FixedState, grids: &Grids) -> Frame {
        Frame {
            t: state.t,
            h: grids.spec.length,
            h_dot: 0.0,
            domain: Domain::Fixed,
            nodes: (0..=grids.spec.n_l).map(|i| grids.r_node(i)).collect(),
            i: state.i.clone(),
            r: state.r.clone(),
            s_at_nodes: state.s.clone(),
            s_phys: state.s.clone(),
            dr: grids.dr,
        }
    }

    /// `(r, S, I, R)` on the physical grid; `I` and `R` are zero beyond the front.
    pub fn physical_profiles(&self) -> Vec<[f64; 4]> {
        let spacing = self.nodes[1] - self.nodes[0];
        self.s_phys
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let r = k as f64 * self.dr;
                let (i, rr) = match self.domain {
                    Domain::Fixed => (self.i[k], self.r[k]),
                    Domain::Free if r >= self.h => (0.0, 0.0),
                    Domain::Free => (
                        frontfix::interp_uniform(&self.i, spacing, r),
                        frontfix::interp_uniform(&self.r, spacing, r),
                    ),
                };
                [r, s, i, rr]
            })
            .collect()
    }
}

/// Receives records and snapshots as a run progresses.
pub trait FrameSink {
    fn record(&mut self, _record: &SeriesRecord) {}
    fn profile(&mut self, _frame: &Frame) {}
}

/// Sink that discards everything.
pub struct NullSink;

impl FrameSink for NullSink {}

/// Running checks gathered during a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub thresholds: ThresholdReport,
    pub steps: usize,
    /// Smallest field value seen before clamping.
    pub min_pre_clamp: f64,
    pub clamped_values: usize,
    /// `h` never decreased between accepted steps.
    pub front_monotone: bool,
    /// Steps at which the raw Stefan speed came out negative and was set to 0.
    pub negative_speed_steps: usize,
    pub max_sup_s: f64,
    /// Largest of sup I and sup R over the run.
    pub max_sup_ir: f64,
    pub max_h_dot: f64,
    pub min_dt: f64,
    pub early_stop: bool,
    pub grid_warning: Option<String>,
}

impl Diagnostics {
    fn new(thresholds: ThresholdReport, grid_warning: Option<String>) -> Self {
        Diagnostics {
            thresholds,
            steps: 0,
            min_pre_clamp: f64::INFINITY,
            clamped_values: 0,
            front_monotone: true,
            negative_speed_steps: 0,
            max_sup_s: 0.0,
            max_sup_ir: 0.0,
            max_h_dot: 0.0,
            min_dt: f64::INFINITY,
            early_stop: false,
            grid_warning,
        }
    }

    fn observe(&mut self, rec: &SeriesRecord) {
        self.max_sup_s = self.max_sup_s.max(rec.sup_s);
        self.max_sup_ir = self.max_sup_ir.max(rec.sup_i).max(rec.sup_r);
        self.max_h_dot = self.max_h_dot.max(rec.h_dot);
    }
}

/// Result of a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub series: Vec<SeriesRecord>,
    pub classification: Classification,
    pub diagnostics: Diagnostics,
    /// Snapshots kept when `profile_stride` is set.
    pub frames: Vec<Frame>,
    /// Profiles at the last step, always kept.
    pub final_frame: Frame,
}

impl RunOutcome {
    pub fn last(&self) -> &SeriesRecord {
        self.series.last().expect("series is never empty")
    }
}

/// Raw Stefan speed `-μ (h₀/h) v_s(h₀)`.
pub fn front_speed(state: &SimState, params: &ModelParams, grids: &Grids) -> f64 {
    -params.mu * (grids.h0 / state.h) * front_gradient(&state.v_comp, grids.ds)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Largest admissible step: the front may cross at most one computational
/// cell and the explicit reaction must stay contractive.
pub fn stefan_cfl(state: &SimState, params: &ModelParams, grids: &Grids, cfg: &TimeStepConfig) -> f64 {
    let h_dot = front_speed(state, params, grids).abs();
    let front = if h_dot > 0.0 {
        grids.ds * state.h / (grids.h0 * h_dot)
    } else {
        f64::INFINITY
    };
    let reaction = 1.0 / (params.beta * sup(&state.s_phys) + params.mu2 + params.alpha);
    cfg.dt_safety * front.min(reaction)
}

/// Outcome of one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub state: SimState,
    /// Front speed used for the update.
    pub h_dot: f64,
    /// True if the raw Stefan speed was negative and replaced by 0.
    pub speed_clamped: bool,
    pub min_pre_clamp: f64,
    pub clamped_values: usize,
}

fn finalize_field(
    field: &mut [f64],
    name: &'static str,
    t: f64,
    tol: f64,
    min_seen: &mut f64,
    clamped: &mut usize,
) -> Result<()> {
    for x in field.iter_mut() {
        if !x.is_finite() {
            return Err(Error::NonFinite { t, field: name });
        }
        *min_seen = min_seen.min(*x);
        if *x < 0.0 {
            if *x < -tol {
                return Err(Error::Positivity { t, field: name, value: *x });
            }
            *x = 0.0;
            *clamped += 1;
        }
    }
    Ok(())
}

/// Advances the free-boundary state by `dt`.
pub fn advance(state: &SimState, params: &ModelParams, grids: &Grids, dt: f64, positivity_tol: f64) -> Result<StepReport> {
    let (u_comp, i_phys) = cross_interpolate(state, grids)?;
    let raw_speed = front_speed(state, params, grids);
    if !raw_speed.is_finite() {
        return Err(Error::NonFinite { t: state.t, field: "h" });
    }
    let h_dot = raw_speed.max(0.0);
    let h = state.h;
    let h_new = h + dt * h_dot;
    let t_new = state.t + dt;
    if h_new >= grids.escape_limit() {
        return Err(Error::FrontEscape {
            t: t_new,
            h: h_new,
            limit: grids.escape_limit(),
        });
    }
    let dim = grids.dim;
    let p = params;

    let mut s_new: Vec<f64> = state
        .s_phys
        .iter()
        .zip(&i_phys)
        .map(|(&s, &i)| s + dt * (p.b - p.beta * s * i - p.mu1 * s))
        .collect();
    implicit_diffusion(&mut s_new, grids.dr, dim, p.d1 * dt, OuterBoundary::Neumann);

    let shrink = (grids.h0 / h).powi(2);
    let c = h_dot / h;
    let mut v_new: Vec<f64> = state
        .v_comp
        .iter()
        .zip(&u_comp)
        .map(|(&v, &u)| v + dt * v * (p.beta * u - p.mu2 - p.alpha))
        .collect();
    let mut w_new: Vec<f64> = state
        .v_comp
        .iter()
        .zip(&state.w_comp)
        .map(|(&v, &w)| w + dt * (p.alpha * v - p.mu3 * w))
        .collect();
    // The front-induced drift `c s v_s` is taken implicitly with the diffusion.
    let c_dt = c * dt;
    implicit_diffusion_advection(&mut v_new, grids.ds, dim, p.d2 * shrink * dt, c_dt, OuterBoundary::Dirichlet);
    implicit_diffusion_advection(&mut w_new, grids.ds, dim, p.d3 * shrink * dt, c_dt, OuterBoundary::Dirichlet);

    let mut min_seen = f64::INFINITY;
    let mut clamped = 0;
    finalize_field(&mut s_new, "S", t_new, positivity_tol, &mut min_seen, &mut clamped)?;
    finalize_field(&mut v_new, "I", t_new, positivity_tol, &mut min_seen, &mut clamped)?;
    finalize_field(&mut w_new, "R", t_new, positivity_tol, &mut min_seen, &mut clamped)?;

    Ok(StepReport {
        state: SimState {
            t: t_new,
            h: h_new,
            s_phys: s_new,
            v_comp: v_new,
            w_comp: w_new,
        },
        h_dot,
        speed_clamped: raw_speed < 0.0,
        min_pre_clamp: min_seen,
        clamped_values: clamped,
    })
}

/// One step of size `cfg.dt`.
pub fn step(state: &SimState, params: &ModelParams, grids: &Grids, cfg: &TimeStepConfig) -> Result<SimState> {
    advance(state, params, grids, cfg.dt, cfg.positivity_tol).map(|r| r.state)
}

fn make_record(frame: &Frame, params: &ModelParams, prev: Option<&(f64, f64, f64)>) -> (SeriesRecord, (f64, f64, f64)) {
    let (mass, rhs) = analysis::mass_and_rhs(frame, params);
    let residual = prev.map_or(0.0, |&(t0, m0, r0)| analysis::balance_defect(t0, m0, r0, frame.t, mass, rhs));
    let rec = SeriesRecord {
        t: frame.t,
        h: frame.h,
        h_dot: frame.h_dot,
        sup_s: sup(&frame.s_phys),
        sup_i: sup(&frame.i),
        sup_r: sup(&frame.r),
        mass_i: mass,
        balance_residual: residual,
    };
    (rec, (frame.t, mass, rhs))
}

/// Whether `t` is `t_end` up to rounding accumulated over many steps.
fn reached(t: f64, cfg: &TimeStepConfig) -> bool {
    cfg.t_end - t <= 1e-6 * cfg.dt
}

/// Length of the next step so that the run lands on `t_end`.
fn next_dt(t: f64, t_end: f64, dt: f64) -> f64 {
    let remaining = t_end - t;
    if remaining <= dt * (1.0 + 1e-6) {
        remaining
    } else {
        dt
    }
}

struct Recorder<'a> {
    params: &'a ModelParams,
    series: Vec<SeriesRecord>,
    frames: Vec<Frame>,
    prev: Option<(f64, f64, f64)>,
    keep_frames: bool,
}

impl<'a> Recorder<'a> {
    fn push(&mut self, frame: Frame, with_profile: bool, diag: &mut Diagnostics, sink: &mut dyn FrameSink) {
        let (rec, sample) = make_record(&frame, self.params, self.prev.as_ref());
        self.prev = Some(sample);
        diag.observe(&rec);
        sink.record(&rec);
        self.series.push(rec);
        if with_profile {
            sink.profile(&frame);
            if self.keep_frames {
                self.frames.push(frame);
            }
        }
    }
}

/// Runs the free-boundary problem to `cfg.t_end`.
pub fn run(params: &ModelParams, init: &InitialData, grid: &GridSpec, cfg: &TimeStepConfig) -> Result<RunOutcome> {
    run_with_sink(params, init, grid, cfg, &mut NullSink)
}

/// As [`run`], streaming records and snapshots into `sink`.
pub fn run_with_sink(
    params: &ModelParams,
    init: &InitialData,
    grid: &GridSpec,
    cfg: &TimeStepConfig,
    sink: &mut dyn FrameSink,
) -> Result<RunOutcome> {
    params.validate()?;
    init.validate_shape()?;
    cfg.validate()?;
    let grids = Grids::new(*grid, init.h0, params.n)?;
    let report = thresholds(params, init);
    let mut diag = Diagnostics::new(report, grids.warning.clone());
    let mut rec = Recorder {
        params,
        series: Vec::new(),
        frames: Vec::new(),
        prev: None,
        keep_frames: true,
    };

    let mut state = SimState::initial(init, &grids);
    let profile_every = cfg.profile_stride;
    rec.push(Frame::free(&state, params, &grids), profile_every.is_some(), &mut diag, sink);

    let mut k = 0usize;
    while !reached(state.t, cfg) {
        let dt = next_dt(state.t, cfg.t_end, cfg.dt.min(stefan_cfl(&state, params, &grids, cfg)));
        let out = advance(&state, params, &grids, dt, cfg.positivity_tol)?;
        k += 1;
        diag.steps = k;
        diag.min_dt = diag.min_dt.min(dt);
        diag.min_pre_clamp = diag.min_pre_clamp.min(out.min_pre_clamp);
        diag.clamped_values += out.clamped_values;
        if out.speed_clamped {
            diag.negative_speed_steps += 1;
        }
        if out.state.h < state.h {
            diag.front_monotone = false;
        }
        state = out.state;

        let finished = reached(state.t, cfg);
        let stop = cfg.stop_radius.is_some_and(|r| state.h >= r);
        let want_profile = profile_every.is_some_and(|s| k % s == 0) || (profile_every.is_some() && (finished || stop));
        if k % cfg.save_stride == 0 || finished || stop || want_profile {
            rec.push(Frame::free(&state, params, &grids), want_profile, &mut diag, sink);
        }
        if stop {
            diag.early_stop = true;
            break;
        }
    }

    let classification = analysis::classify(&rec.series, init.h0, report.h0_star_finite(), &Tolerances::default());
    Ok(RunOutcome {
        series: rec.series,
        classification,
        diagnostics: diag,
        frames: rec.frames,
        final_frame: Frame::free(&state, params, &grids),
    })
}

/// All three fields on the physical grid (no front).
#[derive(Debug, Clone, PartialEq)]
pub struct FixedState {
    pub t: f64,
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
}

/// One IMEX step on the ball of radius `L` with zero-flux boundary.
pub fn advance_fixed(state: &FixedState, params: &ModelParams, grids: &Grids, dt: f64, tol: f64) -> Result<(FixedState, f64)> {
    let p = params;
    let t_new = state.t + dt;
    let n = state.s.len();
    let mut s_new = Vec::with_capacity(n);
    let mut i_new = Vec::with_capacity(n);
    let mut r_new = Vec::with_capacity(n);
    for k in 0..n {
        let (s, i, r) = (state.s[k], state.i[k], state.r[k]);
        let inf = p.beta * s * i;
        s_new.push(s + dt * (p.b - inf - p.mu1 * s));
        i_new.push(i + dt * (inf - (p.mu2 + p.alpha) * i));
        r_new.push(r + dt * (p.alpha * i - p.mu3 * r));
    }
    implicit_diffusion(&mut s_new, grids.dr, grids.dim, p.d1 * dt, OuterBoundary::Neumann);
    implicit_diffusion(&mut i_new, grids.dr, grids.dim, p.d2 * dt, OuterBoundary::Neumann);
    implicit_diffusion(&mut r_new, grids.dr, grids.dim, p.d3 * dt, OuterBoundary::Neumann);
    let mut min_seen = f64::INFINITY;
    let mut clamped = 0;
    finalize_field(&mut s_new, "S", t_new, tol, &mut min_seen, &mut clamped)?;
    finalize_field(&mut i_new, "I", t_new, tol, &mut min_seen, &mut clamped)?;
    finalize_field(&mut r_new, "R", t_new, tol, &mut min_seen, &mut clamped)?;
    Ok((
        FixedState {
            t: t_new,
            s: s_new,
            i: i_new,
            r: r_new,
        },
        min_seen,
    ))
}

/// Runs the fixed-domain Neumann problem on the ball of radius `grid.length`.
///
/// Initial profiles are evaluated on the whole ball without the cut-off at
/// `h₀`, so spatially constant data are allowed here.
pub fn run_fixed_domain(params: &ModelParams, init: &InitialData, grid: &GridSpec, cfg: &TimeStepConfig) -> Result<RunOutcome> {
    run_fixed_domain_with_sink(params, init, grid, cfg, &mut NullSink)
}

pub fn run_fixed_domain_with_sink(
    params: &ModelParams,
    init: &InitialData,
    grid: &GridSpec,
    cfg: &TimeStepConfig,
    sink: &mut dyn FrameSink,
) -> Result<RunOutcome> {
    params.validate()?;
    cfg.validate()?;
    for (what, p) in [("S0", &init.s0), ("I0", &init.i0), ("R0", &init.r0)] {
        if p.sup() < 0.0 || (0..=grid.n_l).any(|i| p.eval(i as f64 * grid.length / grid.n_l as f64) < 0.0) {
            return Err(Error::InvalidInitial(format!("{what} must be nonnegative")));
        }
    }
    let grids = Grids::new(*grid, 0.5 * grid.length, params.n)?;
    let report = thresholds(params, init);
    let mut diag = Diagnostics::new(report, None);
    let mut rec = Recorder {
        params,
        series: Vec::new(),
        frames: Vec::new(),
        prev: None,
        keep_frames: true,
    };
    let nodes: Vec<f64> = (0..=grid.n_l).map(|i| grids.r_node(i)).collect();
    let mut state = FixedState {
        t: 0.0,
        s: nodes.iter().map(|&r| init.s0.eval(r)).collect(),
        i: nodes.iter().map(|&r| init.i0.eval(r)).collect(),
        r: nodes.iter().map(|&r| init.r0.eval(r)).collect(),
    };
    let profile_every = cfg.profile_stride;
    rec.push(Frame::fixed(&state, &grids), profile_every.is_some(), &mut diag, sink);

    let mut k = 0usize;
    while !reached(state.t, cfg) {
        let reaction = 1.0 / (params.beta * sup(&state.s) + params.mu2 + params.alpha);
        let dt = next_dt(state.t, cfg.t_end, cfg.dt.min(cfg.dt_safety * reaction));
        let (next, min_seen) = advance_fixed(&state, params, &grids, dt, cfg.positivity_tol)?;
        k += 1;
        diag.steps = k;
        diag.min_dt = diag.min_dt.min(dt);
        diag.min_pre_clamp = diag.min_pre_clamp.min(min_seen);
        state = next;
        let finished = reached(state.t, cfg);
        let want_profile = profile_every.is_some_and(|s| k % s == 0) || (profile_every.is_some() && finished);
        if k % cfg.save_stride == 0 || finished || want_profile {
            rec.push(Frame::fixed(&state, &grids), want_profile, &mut diag, sink);
        }
    }
    // No front here: measuring against the ball radius leaves only the
    // extinction test meaningful, so persistent infection reads UNDECIDED.
    let classification = analysis::classify(&rec.series, grid.length, None, &Tolerances::default());
    Ok(RunOutcome {
        series: rec.series,
        classification,
        diagnostics: diag,
        frames: rec.frames,
        final_frame: Frame::fixed(&state, &grids),
    })
}
