//! Command-line driver for the half-torus eigenfunction pipeline.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod sweep;

pub use config::{ModeSpec, RunConfig};
pub use error::{CliError, CliResult};
pub use pipeline::{run_pipeline, Stage, VerificationReport};
pub use sweep::{run_sweep, SweepOutcome, SweepRow};
