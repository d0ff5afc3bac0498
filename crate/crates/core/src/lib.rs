//! Numerical laboratory for the SIR reaction-diffusion system with a
//! Stefan-type free boundary.
//!
//! The crate simulates the radially symmetric free-boundary problem with a
//! front-fixing IMEX scheme, computes the threshold quantities that govern
//! spreading and vanishing (basic reproduction number, critical radius,
//! upper-solution bounds), and checks the qualitative behaviour of runs
//! against them.
//!
//! ```
//! use sirfb::eigen::{lambda1, EigenQuery};
//! let l = lambda1(EigenQuery::new(1.0, 3).unwrap()).unwrap();
//! assert!((l - std::f64::consts::PI.powi(2)).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod eigen;
pub mod error;
pub mod frontfix;
pub mod model;
pub mod solver;
pub mod svg;

pub use analysis::{classify, Classification};
pub use error::{Error, Result};
pub use frontfix::{GridSpec, SimState};
pub use model::{compute_r0, thresholds, InitialData, ModelParams, Profile, ThresholdReport};
pub use solver::{run, run_fixed_domain, RunOutcome, TimeStepConfig};
