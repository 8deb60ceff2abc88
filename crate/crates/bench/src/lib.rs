//! Reproducible parameter sweeps over the holographic MIMO channel models.
//!
//! A [`SweepSpec`] (JSON) describes a distance sweep, a TX element-count
//! sweep or a single point. Each evaluated point yields a [`SweepResultRow`]
//! with the NMSE of every requested approximate model against the exact
//! model and the uniform-power capacity of every model; [`output`] writes
//! the rows as CSV or JSON.

pub mod error;
pub mod output;
pub mod spec;
pub mod sweep;

pub use error::BenchError;
pub use spec::{DistanceSpec, Experiment, OutputFormat, ResolvedSweep, SweepSpec};
pub use sweep::{
    evaluate_point, run, run_distance_sweep, run_element_sweep, run_single_point, SweepResultRow,
    VariantMetrics,
};
