//! Co-optimization of preemptive power-line shutoffs and post-event
//! restoration under wildfire risk.
//!
//! The crate is organized bottom-up:
//!
//! - [`grid`]: network data model, scenario files, peak-hour snapshots.
//! - [`risk`]: risk rasters, per-line sampling, forecast tables and windows.
//! - [`milp`]: MILP representation, LP relaxation, branch and bound, MPS.
//! - [`model`]: the multi-period shutoff and restoration program.
//! - [`horizon`]: the daily rolling-horizon loop, metrics and sweeps.
//! - [`report`]: CSV, JSON and SVG outputs.
//! - [`cli`]: the `gridshutoff` command line.

pub mod cli;
pub mod error;
pub mod grid;
pub mod horizon;
pub mod milp;
pub mod model;
pub mod report;
pub mod risk;
pub mod synth;

pub use error::{DataError, ModelError, SolveError};
