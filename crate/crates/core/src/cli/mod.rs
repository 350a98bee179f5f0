//! Experiment configs, orchestration and report emission.
//!
//! A config is one JSON document; `tubelab run` executes it and writes a
//! CSV table, a JSON report or plot-ready blocks. Negative controls list
//! their quantities under `expect_fail`.

mod config;
mod functions;
mod report;
mod run;

pub use config::{
    apply_override, CurveSpec, ExperimentConfig, ExperimentKind, OneOrMany, OutputConfig,
    OutputFormat, QuadratureConfig, Radii, SpaceRef, DEFAULT_TIMESTAMP,
};
pub use report::{
    emit, from_json, to_csv, to_json, to_plot, Report, ReportMeta, ReportRow, Verdict, CSV_HEADER,
};
pub use run::{run, Outcome, EXIT_CHECK_FAILED, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

#[cfg(test)]
mod tests;
