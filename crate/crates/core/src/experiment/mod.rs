//! Config-driven experiments: sweeps, tables and the validation suite.

pub mod cli;
pub mod config;
pub mod output;
pub mod presets;
pub mod sweep;
pub mod validate;

pub use config::{db_to_linear, linear_to_db, DistSpec, LinkName, RunConfig};
pub use output::{write_dist_csv, write_sweep, write_sweep_csv, SWEEP_COLUMNS};
pub use sweep::{run_sweep, Output, Row, SweepSpec, SweepTable, SweepVariable};
pub use validate::{validate, validate_with, Check, ValidateOptions, ValidationReport};
