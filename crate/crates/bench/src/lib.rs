//! Experiment harness for the entropic OT solvers.
//!
//! Builds benchmark inputs (random foreground squares on a pixel grid, or
//! images from an IDX file), sweeps algorithms and parameters under a shared
//! iteration budget, and writes per-checkpoint records plus competitive
//! ratio summaries as CSV.

pub mod error;
pub mod experiment;
pub mod idx;
pub mod metrics;
pub mod records;
pub mod synthetic;

pub use error::{BenchError, Result};
pub use experiment::{
    run_experiment, synthetic_instances, threads_from_env, ExperimentConfig, ExperimentOutput,
    ExperimentRecord, Instance, ParamMode, RatioSummary,
};
pub use idx::{load_idx_images, IdxImages};
pub use metrics::competitive_ratio;
pub use synthetic::{generate_synthetic_pair, pixel_grid_cost, GroundMetric, SyntheticImageSpec};
