//! Std companion to `qdeconv-core`: JSON and CSV formats, parallel restarts,
//! the experiment runner and the `qdeconv` command-line tool.

pub mod bench;
pub mod cli;
pub mod formats;
pub mod parallel;

pub use bench::{
    depth_scaling_sweep, qcv, run_experiment, DeconvPath, ExperimentConfig, Method, MethodReport,
    MetricsReport, SweepRow,
};
