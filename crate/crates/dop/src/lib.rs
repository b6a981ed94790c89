//! Validation harness for discrete orthogonal polynomial asymptotics: run configuration,
//! the end-to-end pipeline, convergence-slope fits and report emission.

pub mod config;
pub mod error;
pub mod fit;
pub mod pipeline;
pub mod report;

pub use config::RunConfig;
pub use error::{PipelineError, Stage};
pub use pipeline::{run_pipeline, Record, Region, ValidationReport};
