//! Model constants, initial data, threshold quantities, the spatially
//! homogeneous ODE and the closed-form upper solution used to certify
//! vanishing.

use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};

/// Epidemiological and diffusion constants of the free-boundary system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Recruitment rate of susceptibles.
    pub b: f64,
    /// Contact rate.
    pub beta: f64,
    /// Death rate of S.
    pub mu1: f64,
    /// Death rate of I.
    pub mu2: f64,
    /// Death rate of R.
    pub mu3: f64,
    /// Recovery rate.
    pub alpha: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// Stefan expansion coefficient.
    pub mu: f64,
    /// Spatial dimension.
    pub n: usize,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("b", self.b),
            ("beta", self.beta),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
            ("mu3", self.mu3),
            ("alpha", self.alpha),
            ("d1", self.d1),
            ("d2", self.d2),
            ("d3", self.d3),
            ("mu", self.mu),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::param(field, format!("must be finite and > 0, got {value}")));
            }
        }
        if self.mu1 >= self.mu2.min(self.mu3) {
            return Err(Error::param(
                "mu1",
                format!(
                    "susceptible death rate must be below min(mu2, mu3) = {}, got {}",
                    self.mu2.min(self.mu3),
                    self.mu1
                ),
            ));
        }
        if !(1..=3).contains(&self.n) {
            return Err(Error::UnsupportedDimension(self.n));
        }
        Ok(())
    }

    /// Disease-free susceptible level `b/μ₁`.
    pub fn s_free(&self) -> f64 {
        self.b / self.mu1
    }
}

/// Basic reproduction number `bβ / (μ₁(μ₂ + α))`.
pub fn compute_r0(p: &ModelParams) -> f64 {
    p.b * p.beta / (p.mu1 * (p.mu2 + p.alpha))
}

/// Right-hand side of the homogeneous SIR system.
pub fn ode_rhs(state: [f64; 3], p: &ModelParams) -> [f64; 3] {
    let [s, i, r] = state;
    let infection = p.beta * s * i;
    [
        p.b - infection - p.mu1 * s,
        infection - (p.mu2 + p.alpha) * i,
        p.alpha * i - p.mu3 * r,
    ]
}

pub fn disease_free_equilibrium(p: &ModelParams) -> [f64; 3] {
    [p.s_free(), 0.0, 0.0]
}

/// Interior equilibrium, present only when `R₀ > 1`.
pub fn endemic_equilibrium(p: &ModelParams) -> Option<[f64; 3]> {
    let r0 = compute_r0(p);
    if r0 <= 1.0 {
        return None;
    }
    let s = (p.mu2 + p.alpha) / p.beta;
    let i = p.mu1 * (r0 - 1.0) / p.beta;
    Some([s, i, p.alpha * i / p.mu3])
}

/// Sampled ODE trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 3]>,
}

impl OdeTrajectory {
    pub fn terminal(&self) -> [f64; 3] {
        *self.states.last().expect("trajectory is never empty")
    }

    /// Linear interpolation of the trajectory at time `t`.
    pub fn at(&self, t: f64) -> [f64; 3] {
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return self.states[0];
        }
        if k >= self.times.len() {
            return self.terminal();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let theta = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        let (a, b) = (self.states[k - 1], self.states[k]);
        [0, 1, 2].map(|c| a[c] + theta * (b[c] - a[c]))
    }
}

const COMPONENTS: [&str; 3] = ["S", "I", "R"];

/// Classical fourth-order Runge-Kutta with fixed `dt`, sampled every
/// `stride` steps (the terminal state is always included).
pub fn integrate_ode(
    initial: [f64; 3],
    p: &ModelParams,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<OdeTrajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidTimeStep(format!("dt must be > 0, got {dt}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidTimeStep(format!("t_end must be > 0, got {t_end}")));
    }
    let stride = stride.max(1);
    let steps = (t_end / dt - 1e-9).ceil() as usize;
    let h = t_end / steps as f64;
    let axpy = |y: [f64; 3], k: [f64; 3], a: f64| [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]];

    let mut y = initial;
    let mut times = vec![0.0];
    let mut states = vec![y];
    for step in 1..=steps {
        let k1 = ode_rhs(y, p);
        let k2 = ode_rhs(axpy(y, k1, 0.5 * h), p);
        let k3 = ode_rhs(axpy(y, k2, 0.5 * h), p);
        let k4 = ode_rhs(axpy(y, k3, h), p);
        for c in 0..3 {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        let t = step as f64 * h;
        for c in 0..3 {
            if y[c] < -1e-12 || !y[c].is_finite() {
                return Err(Error::OdeStepRejected {
                    t,
                    component: COMPONENTS[c],
                    value: y[c],
                });
            }
        }
        if step % stride == 0 || step == steps {
            times.push(t);
            states.push(y);
        }
    }
    Ok(OdeTrajectory { times, states })
}

/// A radial initial profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    Constant { value: f64 },
    /// `amplitude · (1 - (r/radius)²)` on `[0, radius]`, zero beyond.
    Bump { amplitude: f64, radius: f64 },
    /// Piecewise-linear through `(r, value)` pairs; held constant past the last node.
    Table { r: Vec<f64>, values: Vec<f64> },
}

impl Profile {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Constant { value } => *value,
            Profile::Bump { amplitude, radius } => {
                if r >= *radius {
                    0.0
                } else {
                    amplitude * (1.0 - (r / radius).powi(2))
                }
            }
            Profile::Table { r: xs, values } => {
                let k = xs.partition_point(|&x| x <= r);
                if k == 0 {
                    values[0]
                } else if k >= xs.len() {
                    *values.last().unwrap()
                } else {
                    let th = (r - xs[k - 1]) / (xs[k] - xs[k - 1]);
                    values[k - 1] + th * (values[k] - values[k - 1])
                }
            }
        }
    }

    /// Supremum over `r ≥ 0`.
    pub fn sup(&self) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Constant { value } => *value,
            Profile::Bump { amplitude, .. } => amplitude.max(0.0),
            Profile::Table { values, .. } => values.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Supremum of `|f'|`.
    pub fn sup_slope(&self) -> f64 {
        match self {
            Profile::Zero | Profile::Constant { .. } => 0.0,
            Profile::Bump { amplitude, radius } => 2.0 * amplitude.abs() / radius,
            Profile::Table { r, values } => r
                .windows(2)
                .zip(values.windows(2))
                .map(|(x, v)| ((v[1] - v[0]) / (x[1] - x[0])).abs())
                .fold(0.0, f64::max),
        }
    }

    fn min_value(&self) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Constant { value } => *value,
            Profile::Bump { amplitude, .. } => amplitude.min(0.0),
            Profile::Table { values, .. } => values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Stretch the radial coordinate by `factor`.
    pub fn rescaled(&self, factor: f64) -> Profile {
        match self {
            Profile::Bump { amplitude, radius } => Profile::Bump {
                amplitude: *amplitude,
                radius: radius * factor,
            },
            Profile::Table { r, values } => Profile::Table {
                r: r.iter().map(|x| x * factor).collect(),
                values: values.clone(),
            },
            other => other.clone(),
        }
    }

    fn check_table(&self, what: &str) -> Result<()> {
        if let Profile::Table { r, values } = self {
            if r.len() < 2 || r.len() != values.len() {
                return Err(Error::InvalidInitial(format!(
                    "{what}: table needs >= 2 points and equal-length columns"
                )));
            }
            if r[0] != 0.0 {
                return Err(Error::InvalidInitial(format!("{what}: table must start at r = 0")));
            }
            if r.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidInitial(format!("{what}: table radii must increase strictly")));
            }
            if values.iter().chain(r.iter()).any(|v| !v.is_finite()) {
                return Err(Error::InvalidInitial(format!("{what}: table contains non-finite values")));
            }
        }
        Ok(())
    }
}

/// Initial profiles and the initial radius of the infected region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub h0: f64,
    pub s0: Profile,
    pub i0: Profile,
    pub r0: Profile,
}

const SLOPE_TOL: f64 = 1e-6;

impl InitialData {
    /// Parabolic bumps of the given amplitudes on `[0, h0]` and constant `S₀`.
    pub fn bump(h0: f64, s0: f64, i_amplitude: f64, r_amplitude: f64) -> Self {
        let bump = |a: f64| {
            if a == 0.0 {
                Profile::Zero
            } else {
                Profile::Bump {
                    amplitude: a,
                    radius: h0,
                }
            }
        };
        InitialData {
            h0,
            s0: Profile::Constant { value: s0 },
            i0: bump(i_amplitude),
            r0: bump(r_amplitude),
        }
    }

    pub fn s0_at(&self, r: f64) -> f64 {
        self.s0.eval(r)
    }

    pub fn i0_at(&self, r: f64) -> f64 {
        if r >= self.h0 {
            0.0
        } else {
            self.i0.eval(r)
        }
    }

    pub fn r0_at(&self, r: f64) -> f64 {
        if r >= self.h0 {
            0.0
        } else {
            self.r0.eval(r)
        }
    }

    pub fn sup_s0(&self) -> f64 {
        self.s0.sup()
    }

    pub fn sup_i0(&self) -> f64 {
        self.i0.sup()
    }

    pub fn sup_r0(&self) -> f64 {
        self.r0.sup()
    }

    /// `‖I₀‖_{C¹([0, h₀])}` = sup |I₀| + sup |I₀'|.
    pub fn i0_c1_norm(&self) -> f64 {
        self.i0.sup() + self.i0.sup_slope()
    }

    /// Same data with the initial radius moved to `h0`; bump and tabulated
    /// profiles of I and R are stretched to keep their shape.
    pub fn with_h0(&self, h0: f64) -> Self {
        let f = h0 / self.h0;
        InitialData {
            h0,
            s0: self.s0.clone(),
            i0: self.i0.rescaled(f),
            r0: self.r0.rescaled(f),
        }
    }

    /// Shape constraints that any admissible state satisfies: positive radius,
    /// nonnegative profiles, Dirichlet values at the front and a flat start.
    /// `I₀ ≡ 0` passes this check.
    pub fn validate_shape(&self) -> Result<()> {
        if !(self.h0.is_finite() && self.h0 > 0.0) {
            return Err(Error::InvalidInitial(format!("h0 must be finite and > 0, got {}", self.h0)));
        }
        for (what, p) in [("S0", &self.s0), ("I0", &self.i0), ("R0", &self.r0)] {
            p.check_table(what)?;
            if p.min_value() < 0.0 {
                return Err(Error::InvalidInitial(format!("{what} must be nonnegative")));
            }
            let slope0 = match p {
                Profile::Table { r, values } => (values[1] - values[0]) / (r[1] - r[0]),
                _ => 0.0,
            };
            if slope0.abs() > SLOPE_TOL {
                return Err(Error::InvalidInitial(format!(
                    "{what} must have zero slope at r = 0, got {slope0:e}"
                )));
            }
        }
        for (what, p) in [("I0", &self.i0), ("R0", &self.r0)] {
            match p {
                Profile::Constant { value } if *value != 0.0 => {
                    return Err(Error::InvalidInitial(format!("{what} must vanish at r = h0")));
                }
                Profile::Bump { radius, .. } if (radius - self.h0).abs() > 1e-12 * self.h0 => {
                    return Err(Error::InvalidInitial(format!(
                        "{what} bump radius {radius} differs from h0 = {}",
                        self.h0
                    )));
                }
                Profile::Table { .. } => {
                    let at_front = p.eval(self.h0);
                    if at_front.abs() > 1e-12 * p.sup().max(1.0) {
                        return Err(Error::InvalidInitial(format!(
                            "{what} must vanish at r = h0, got {at_front:e}"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Full admissibility: shape constraints plus `I₀ > 0` on `[0, h₀)`.
    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        let positive = match &self.i0 {
            Profile::Bump { amplitude, .. } => *amplitude > 0.0,
            Profile::Table { r, values } => r
                .iter()
                .zip(values)
                .filter(|(x, _)| **x < self.h0)
                .all(|(_, v)| *v > 0.0),
            _ => false,
        };
        if !positive {
            return Err(Error::InvalidInitial("I0 must be strictly positive on [0, h0)".into()));
        }
        Ok(())
    }
}

/// Constants fixing the vanishing upper solution for a chosen diffusion floor `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VanishBounds {
    pub d: f64,
    pub gamma: f64,
    pub h0_bound: f64,
    pub mu_bound: f64,
}

impl VanishBounds {
    fn new(d: f64, k0: f64, alpha: f64, h0: f64, big_m: f64) -> Self {
        let term = |k: f64| if k > 0.0 { (d / (16.0 * k)).sqrt() } else { f64::INFINITY };
        VanishBounds {
            d,
            gamma: d / (16.0 * h0 * h0),
            h0_bound: term(k0).min(term(alpha)),
            mu_bound: if big_m > 0.0 { d / (8.0 * big_m) } else { f64::INFINITY },
        }
    }
}

/// Every threshold quantity derived from the parameters and initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub r0: f64,
    /// `β C₁ - μ₂ - α`.
    pub k0: f64,
    /// `max(sup S₀, b/μ₁)`.
    pub c1: f64,
    /// Upper-solution amplitude `(4/3) max(sup I₀, sup R₀)`.
    pub big_m: f64,
    /// Upper-solution decay rate `d / (16 h₀²)`.
    pub gamma: f64,
    /// Critical radius; `+∞` when `R₀ ≤ 1`.
    pub h0_star: f64,
    pub h0_vanish_bound: f64,
    pub mu_vanish_bound: f64,
    /// Bounds with `d = min(d₂, d₃)`, the values used above.
    pub vanish: VanishBounds,
    /// Same bounds with `d = min(d₁, d₂)`, reported for comparison.
    pub vanish_alt: VanishBounds,
    pub h0: f64,
    pub mu: f64,
}

/// Which regime the parameters provably fall in, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `R₀ < 1`: vanishing for every initial radius.
    VanishingSubthreshold,
    /// `R₀ > 1` but `h₀` and `μ` below the upper-solution bounds.
    VanishingSmallFront,
    /// `R₀ > 1` and `h₀ > h₀*`.
    Spreading,
    Undetermined,
}

impl Regime {
    pub fn describe(&self) -> &'static str {
        match self {
            Regime::VanishingSubthreshold => "VANISHING (R0<1)",
            Regime::VanishingSmallFront => "VANISHING (R0>1, h0 and mu below vanishing bounds)",
            Regime::Spreading => "SPREADING (R0>1, h0>h0_star)",
            Regime::Undetermined => "UNDETERMINED",
        }
    }
}

impl ThresholdReport {
    pub fn regime(&self) -> Regime {
        if self.r0 < 1.0 {
            Regime::VanishingSubthreshold
        } else if self.r0 > 1.0 && self.h0 > self.h0_star {
            Regime::Spreading
        } else if self.r0 > 1.0
            && self.k0 > 0.0
            && self.h0 <= self.h0_vanish_bound
            && self.mu <= self.mu_vanish_bound
        {
            Regime::VanishingSmallFront
        } else {
            Regime::Undetermined
        }
    }

    /// `h₀*` if finite.
    pub fn h0_star_finite(&self) -> Option<f64> {
        self.h0_star.is_finite().then_some(self.h0_star)
    }
}

pub fn thresholds(p: &ModelParams, init: &InitialData) -> ThresholdReport {
    let r0 = compute_r0(p);
    let c1 = init.sup_s0().max(p.s_free());
    let k0 = p.beta * c1 - p.mu2 - p.alpha;
    let big_m = 4.0 / 3.0 * init.sup_i0().max(init.sup_r0());
    let h0_star = eigen::critical_radius(p).unwrap_or(f64::INFINITY);
    let vanish = VanishBounds::new(p.d2.min(p.d3), k0, p.alpha, init.h0, big_m);
    let vanish_alt = VanishBounds::new(p.d1.min(p.d2), k0, p.alpha, init.h0, big_m);
    ThresholdReport {
        r0,
        k0,
        c1,
        big_m,
        gamma: vanish.gamma,
        h0_star,
        h0_vanish_bound: vanish.h0_bound,
        mu_vanish_bound: vanish.mu_bound,
        vanish,
        vanish_alt,
        h0: init.h0,
        mu: p.mu,
    }
}

/// Bound `C₃ = 2 M C₂ μ` on the front speed, with
/// `M = max(√(βC₁/(2d₂)), 4‖I₀‖_{C¹}/(3C₂))`.
///
/// `i0_c1` is the `C¹` norm of `I₀` on `[0, h₀]`.
pub fn front_speed_bound(p: &ModelParams, c1: f64, c2: f64, i0_c1: f64) -> f64 {
    let m = front_speed_m(p, c1, c2, i0_c1);
    2.0 * m * c2 * p.mu
}

pub fn front_speed_m(p: &ModelParams, c1: f64, c2: f64, i0_c1: f64) -> f64 {
    let diffusive = (p.beta * c1 / (2.0 * p.d2)).max(0.0).sqrt();
    let initial = if c2 > 0.0 { 4.0 * i0_c1 / (3.0 * c2) } else { 0.0 };
    diffusive.max(initial)
}

/// One failed hypothesis of the upper-solution construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisViolation {
    pub name: &'static str,
    pub detail: String,
}

/// Closed-form upper solution
/// `h̄(t) = 2h₀(2 - e^{-γt})`, `S̄ ≡ C₁`, `Ī = R̄ = M e^{-γt}(1 - (r/h̄)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Supersolution {
    pub h0: f64,
    pub big_m: f64,
    pub gamma: f64,
    pub c1: f64,
    /// Empty when every hypothesis holds; otherwise the evaluators are
    /// still usable but nothing is certified.
    pub violations: Vec<HypothesisViolation>,
}

/// Pointwise defects of the upper-solution inequalities; each entry is
/// `lhs - rhs` and must be nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperResiduals {
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

impl Supersolution {
    pub fn is_verified(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn h_bar(&self, t: f64) -> f64 {
        2.0 * self.h0 * (2.0 - (-self.gamma * t).exp())
    }

    pub fn h_bar_dot(&self, t: f64) -> f64 {
        2.0 * self.h0 * self.gamma * (-self.gamma * t).exp()
    }

    pub fn s_bar(&self, _r: f64, _t: f64) -> f64 {
        self.c1
    }

    pub fn i_bar(&self, r: f64, t: f64) -> f64 {
        let hb = self.h_bar(t);
        if r >= hb {
            0.0
        } else {
            self.big_m * (-self.gamma * t).exp() * (1.0 - (r / hb).powi(2))
        }
    }

    pub fn r_bar(&self, r: f64, t: f64) -> f64 {
        self.i_bar(r, t)
    }

    /// `∂Ī/∂r` at the upper front.
    pub fn i_bar_front_slope(&self, t: f64) -> f64 {
        -2.0 * self.big_m * (-self.gamma * t).exp() / self.h_bar(t)
    }

    /// Defects of the three differential inequalities at `0 < r < h̄(t)`.
    pub fn residuals(&self, p: &ModelParams, r: f64, t: f64) -> SuperResiduals {
        let hb = self.h_bar(t);
        let hbd = self.h_bar_dot(t);
        let e = self.big_m * (-self.gamma * t).exp();
        let y = r / hb;
        let v = 1.0 - y * y;
        // ∂t Ī = e(-γV + 2 y² h̄'/h̄), ΔĪ = -2n e / h̄².
        let dt = e * (-self.gamma * v + 2.0 * y * y * hbd / hb);
        let lap = -2.0 * p.n as f64 * e / (hb * hb);
        let ib = e * v;
        SuperResiduals {
            s: -(p.b - p.mu1 * self.c1),
            i: dt - p.d2 * lap - (p.beta * self.c1 - p.mu2 - p.alpha) * ib,
            r: dt - p.d3 * lap - (p.alpha * ib - p.mu3 * ib),
        }
    }

    /// `h̄' + μ Ī_r(h̄)`, nonnegative when the Stefan inequality holds.
    pub fn stefan_residual(&self, p: &ModelParams, t: f64) -> f64 {
        self.h_bar_dot(t) + p.mu * self.i_bar_front_slope(t)
    }
}

/// Builds the vanishing upper solution and checks its hypotheses.
pub fn build_supersolution(
    p: &ModelParams,
    init: &InitialData,
    report: &ThresholdReport,
) -> Supersolution {
    let mut violations = Vec::new();
    let mut fail = |name: &'static str, detail: String| violations.push(HypothesisViolation { name, detail });
    if report.r0 <= 1.0 || report.k0 <= 0.0 {
        fail("r0", format!("requires R0 > 1 and k0 > 0, got R0 = {}, k0 = {}", report.r0, report.k0));
    }
    if init.h0 > report.h0_vanish_bound {
        fail("h0", format!("h0 = {} exceeds bound {}", init.h0, report.h0_vanish_bound));
    }
    if p.mu > report.mu_vanish_bound {
        fail("mu", format!("mu = {} exceeds bound {}", p.mu, report.mu_vanish_bound));
    }
    if report.big_m <= 0.0 {
        fail("amplitude", "M must be positive (I0 or R0 nontrivial)".into());
    }
    Supersolution {
        h0: init.h0,
        big_m: report.big_m,
        gamma: report.gamma,
        c1: report.c1,
        violations,
    }
}
