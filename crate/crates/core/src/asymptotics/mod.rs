//! Spectral asymptotics along a curve: Kuznecov sums of periods, the
//! exceptional-set density estimate, the density-one subsequence
//! construction, growth reports and restricted matrix elements (QER).

mod density;
mod kuznecov;
mod qer;

use thiserror::Error;

use crate::nodal::NodalError;
use crate::restriction::RestrictionError;
use crate::spectral::Parity;

pub use density::{
    chebyshev_density, density_one_extract, growth_report, DensityExtraction, DensityWindow,
    GrowthOutcome, GrowthReport, GROWTH_NOT_OBSERVED,
};
pub use kuznecov::{kuznecov, FitWindow, KuznecovSeries, PowerFit};
pub use qer::{
    omega, qer_statistic, weight_integral, windows_nonincreasing, CurveLabel, QerKind, QerSample,
    QerWindow, QER_WINDOW,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("need at least {need} eigenpairs, got {got}")]
    TooFewPairs { need: usize, got: usize },
    #[error("sequence of length {0} is too short (need at least 10)")]
    TooShort(usize),
    #[error("no threshold is certified on the prefix: the fraction of terms above 1 does not stay above 1/2")]
    HypothesisFailed,
    #[error("QER statistic requires even pairs (pair {index} is {parity:?})")]
    WrongParity { index: usize, parity: Parity },
    #[error("path vertex {0} is not fixed by the involution")]
    PathNotFixed(usize),
    #[error("the Cauchy combination is only defined on the fixed curve")]
    CauchyNeedsFixedCurve,
    #[error("periods and eigenvalues have different lengths")]
    LengthMismatch,
    #[error(transparent)]
    Restriction(#[from] RestrictionError),
    #[error(transparent)]
    Nodal(#[from] NodalError),
}
