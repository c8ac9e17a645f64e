//! Configured parameter scans and their CSV artifacts.

mod config;
mod run;

pub use config::{DeltaRule, Grid, MRule, ScenarioConfig, ScenarioKind, SolverConfig};
pub use run::{run_scenario, FileRecord, Manifest, RunOutcome, WEIGHTING_NOTE, WORKERS_ENV};
