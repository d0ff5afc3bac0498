//! Scenario files.
//!
//! A scenario is a TOML document with five sections:
//!
//! ```toml
//! [model]    # b, beta, mu1, mu2, mu3, alpha, d1, d2, d3, mu, n
//! [initial]  # h0, s0, i0, r0 (profile descriptors)
//! [grid]     # length, n_l, n_h
//! [time]     # dt, t_end, save_stride, positivity_tol, dt_safety, profile_stride, stop_radius
//! [output]   # series, profiles_dir, svg
//! ```
//!
//! Profiles are inline tables tagged by `kind`: `{ kind = "constant", value = 2.0 }`,
//! `{ kind = "bump", amplitude = 0.5 }` (meaning `a (1 - (r/h0)²)`),
//! `{ kind = "table", r = [...], values = [...] }` or `{ kind = "zero" }`.
//! Unknown keys are rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontfix::{GridSpec, Grids};
use crate::model::{InitialData, ModelParams, Profile};
use crate::solver::TimeStepConfig;

/// Profile descriptor as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Zero,
    Constant { value: f64 },
    /// `amplitude · (1 - (r/h₀)²)` on `[0, h₀]`.
    Bump { amplitude: f64 },
    Table { r: Vec<f64>, values: Vec<f64> },
}

impl ProfileSpec {
    pub fn to_profile(&self, h0: f64) -> Profile {
        match self {
            ProfileSpec::Zero => Profile::Zero,
            ProfileSpec::Constant { value } => Profile::Constant { value: *value },
            ProfileSpec::Bump { amplitude } => Profile::Bump {
                amplitude: *amplitude,
                radius: h0,
            },
            ProfileSpec::Table { r, values } => Profile::Table {
                r: r.clone(),
                values: values.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub h0: f64,
    pub s0: ProfileSpec,
    pub i0: ProfileSpec,
    #[serde(default = "zero_profile")]
    pub r0: ProfileSpec,
}

fn zero_profile() -> ProfileSpec {
    ProfileSpec::Zero
}

/// Where `run` writes its artifacts. Relative paths resolve against the
/// working directory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Time-series CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    /// Directory for `profile_NNNNN.csv` snapshots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles_dir: Option<String>,
    /// SVG chart of `h(t)` and `sup I(t)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelParams,
    pub initial: InitialSpec,
    pub grid: GridSpec,
    pub time: TimeStepConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ModelParams,
    pub init: InitialData,
    pub grid: GridSpec,
    pub time: TimeStepConfig,
    pub output: OutputSpec,
}

fn in_section(section: &str, e: Error) -> Error {
    Error::Config(format!("[{section}] {e}"))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config is always serializable")
    }

    pub fn initial_data(&self) -> InitialData {
        let h0 = self.initial.h0;
        InitialData {
            h0,
            s0: self.initial.s0.to_profile(h0),
            i0: self.initial.i0.to_profile(h0),
            r0: self.initial.r0.to_profile(h0),
        }
    }

    /// Checks every section, reporting the first offending field.
    pub fn scenario(&self) -> Result<Scenario> {
        self.model.validate().map_err(|e| in_section("model", e))?;
        if matches!(self.initial.s0, ProfileSpec::Bump { .. }) {
            return Err(Error::Config("[initial] s0 must be `constant`, `table` or `zero`".into()));
        }
        let init = self.initial_data();
        init.validate().map_err(|e| in_section("initial", e))?;
        Grids::new(self.grid, init.h0, self.model.n).map_err(|e| in_section("grid", e))?;
        self.time.validate().map_err(|e| in_section("time", e))?;
        Ok(Scenario {
            params: self.model,
            init,
            grid: self.grid,
            time: self.time,
            output: self.output.clone(),
        })
    }

    /// A small spreading scenario used as a template.
    pub fn example() -> Self {
        ScenarioConfig {
            model: ModelParams {
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
            },
            initial: InitialSpec {
                h0: 2.0,
                s0: ProfileSpec::Constant { value: 2.0 },
                i0: ProfileSpec::Bump { amplitude: 0.5 },
                r0: ProfileSpec::Zero,
            },
            grid: GridSpec {
                length: 60.0,
                n_l: 1200,
                n_h: 100,
            },
            time: TimeStepConfig::new(0.01, 30.0, 10),
            output: OutputSpec {
                series: Some("series.csv".into()),
                profiles_dir: None,
                svg: None,
            },
        }
    }
}
