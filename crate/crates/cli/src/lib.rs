//! Configuration-driven pipeline over the nodal-atlas library: load or
//! generate a mesh, solve, analyze and write a self-describing bundle that
//! `verify_bundle` can re-check without the config.

pub mod config;
mod pipeline;
mod verify;

use thiserror::Error;

pub use config::{Analyses, CurveChoice, MeshSource, MetricChoice, Observable, PipelineConfig};
pub use pipeline::{
    run_pipeline, Bundle, CurveInfo, KuznecovReport, MeshInfo, OmegaOne, PairSummary, QerReport,
    Report, Summary, REPORT_FILE, SCHEMA_VERSION, SUMMARY_FILE,
};
pub use verify::{verify_bundle, Check, VerifyReport};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("mesh: {0}")]
    MeshLoadFailed(String),
    #[error("eigensolver: {0}")]
    SolverFailed(String),
    #[error("analysis: {0}")]
    AnalysisFailed(String),
    #[error("bundle corrupt: {0}")]
    BundleCorrupt(String),
    #[error(transparent)]
    Io(#[from] nodal_atlas::io::IoError),
}

/// Caps rayon's global pool at `NODAL_ATLAS_THREADS` when set. Returns the
/// thread count in effect.
pub fn init_threads() -> Result<usize, PipelineError> {
    if let Ok(v) = std::env::var("NODAL_ATLAS_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| PipelineError::ConfigInvalid(format!("NODAL_ATLAS_THREADS={v:?}")))?;
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}
