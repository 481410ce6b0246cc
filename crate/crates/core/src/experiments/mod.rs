//! Experiment recipes: configuration, runs, predictions and verdicts.

mod compare;
mod config;
mod run;
mod theory;

pub use compare::{compare, CellVerdict, Observation, TolerancePolicy, VerdictTable};
pub use config::{ExperimentSpec, Recipe, Tolerance, SEED_ENV};
pub use run::{
    run_experiment, write_csv, write_summary, CellSummary, ExperimentResult, Row, Verdict, BOOTSTRAP_RESAMPLES,
    CSV_SCHEMA, SUMMARY_SCHEMA,
};
pub use theory::{theory, Formula, TheoryParams, TheoryPrediction, RHO_TERMS};
