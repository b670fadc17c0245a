//! Single runs and parameter sweeps with CSV, JSON and SVG output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{Axis, Model, Preset, RunConfig, SweepConfig, SweepFile};
pub use output::{fmt_sig, read_grid_csv, read_trace_csv, trace_csv, PointRecord, PointStatus};
pub use run::{
    emit_plots, execute, replay, run_single, run_sweep, Manifest, ManifestConfig, ReplayReport,
    SweepOptions, SweepOutcome,
};
