use serde::{Deserialize, Serialize};

use super::kuznecov::line_integral;
use super::AsymptoticsError;
use crate::mesh::{Involution, SurfaceMesh};
use crate::restriction::{restrict, CurvePath, CurveTrace, TraceKind};
use crate::spectral::{EigenPair, Parity};
use crate::Real;

/// Number of consecutive pairs per variance window.
pub const QER_WINDOW: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QerKind {
    /// `\int f phi^2 ds`.
    Dirichlet,
    /// `\int f (lambda^{-1/2} d_nu phi)^2 ds`.
    Neumann,
    /// Neumann part plus `\int f ((1 + h^2 D^2) phi) phi ds`, `h^2 = 1/lambda`.
    Cauchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveLabel {
    /// Path lies in the fixed set; pairs must be even.
    Fixed,
    /// Any closed path, any parity. Dirichlet and Neumann only.
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QerWindow {
    pub start: usize,
    pub end: usize,
    pub mean_deviation: f64,
    /// Variance of `statistic - omega` about its window mean.
    pub variance: f64,
    /// Mean of `(statistic - omega)^2`.
    pub mean_square: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QerSample {
    pub kind: QerKind,
    pub label: CurveLabel,
    pub omega: f64,
    pub eigen_indices: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    pub statistics: Vec<f64>,
    pub windows: Vec<QerWindow>,
}

const QUADRATURE_NODES: usize = 64;

/// `\int_{-1}^{1} w(sigma) dsigma` by Gauss-Chebyshev quadrature, with
/// `w = (1 - sigma^2)^{-1/2}` for Dirichlet data (first kind) and
/// `w = (1 - sigma^2)^{1/2}` for Neumann and Cauchy data (second kind).
pub fn weight_integral(kind: QerKind) -> f64 {
    let n = QUADRATURE_NODES as f64;
    let pi = std::f64::consts::PI;
    match kind {
        QerKind::Dirichlet => (1..=QUADRATURE_NODES).map(|_| pi / n).sum(),
        QerKind::Neumann | QerKind::Cauchy => (1..=QUADRATURE_NODES)
            .map(|i| pi / (n + 1.0) * (i as f64 * pi / (n + 1.0)).sin().powi(2))
            .sum(),
    }
}

/// Limit `4 / (2 pi Area) \int_gamma f ds \int w(sigma) dsigma` of the
/// restricted matrix elements.
pub fn omega<T: Real>(
    f: &[T],
    path: &CurvePath<T>,
    area: T,
    kind: QerKind,
) -> Result<f64, AsymptoticsError> {
    let integral = line_integral(path, f)?.as_f64();
    Ok(4.0 / (2.0 * std::f64::consts::PI * area.as_f64()) * integral * weight_integral(kind))
}

fn weighted_square<T: Real>(trace: &CurveTrace<T>, f: &[T], other: &[T]) -> T {
    let n = trace.samples.len();
    let half = T::lit(0.5);
    (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            half * trace.edge_lengths[i]
                * (f[i] * trace.samples[i] * other[i] + f[j] * trace.samples[j] * other[j])
        })
        .sum()
}

/// Periodic second arc-length difference of the trace samples.
fn second_difference<T: Real>(trace: &CurveTrace<T>) -> Vec<T> {
    let n = trace.samples.len();
    let u = &trace.samples;
    let l = &trace.edge_lengths;
    let two = T::lit(2.0);
    (0..n)
        .map(|i| {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            let fwd = (u[next] - u[i]) / l[i];
            let back = (u[i] - u[prev]) / l[prev];
            two * (fwd - back) / (l[i] + l[prev])
        })
        .collect()
}

/// Restricted matrix elements of `f` for each pair, their limit and
/// windowed fluctuations. Pass nonconstant pairs only.
pub fn qer_statistic<T: Real>(
    pairs: &[EigenPair<T>],
    mesh: &SurfaceMesh<T>,
    involution: Option<&Involution>,
    path: &CurvePath<T>,
    f: &[T],
    kind: QerKind,
    label: CurveLabel,
) -> Result<QerSample, AsymptoticsError> {
    match label {
        CurveLabel::Fixed => {
            let inv = involution.ok_or(AsymptoticsError::PathNotFixed(path.vertices()[0]))?;
            if let Some(&v) = path.vertices().iter().find(|&&v| !inv.is_fixed(v)) {
                return Err(AsymptoticsError::PathNotFixed(v));
            }
            if let Some(p) = pairs.iter().find(|p| p.parity != Parity::Even) {
                return Err(AsymptoticsError::WrongParity {
                    index: p.index,
                    parity: p.parity,
                });
            }
        }
        CurveLabel::Asymmetric => {
            if kind == QerKind::Cauchy {
                return Err(AsymptoticsError::CauchyNeedsFixedCurve);
            }
        }
    }
    let target = omega(f, path, mesh.total_area(), kind)?;
    let mut statistics = Vec::with_capacity(pairs.len());
    for p in pairs {
        let value = match kind {
            QerKind::Dirichlet => {
                let tr = restrict(p, mesh, path, TraceKind::Dirichlet)?;
                weighted_square(&tr, f, &tr.samples)
            }
            QerKind::Neumann => {
                let tr = restrict(p, mesh, path, TraceKind::NeumannNormalized)?;
                weighted_square(&tr, f, &tr.samples)
            }
            QerKind::Cauchy => {
                let nt = restrict(p, mesh, path, TraceKind::NeumannNormalized)?;
                let dt = restrict(p, mesh, path, TraceKind::Dirichlet)?;
                let h2 = T::one() / p.eigenvalue;
                let renormalized: Vec<T> = second_difference(&dt)
                    .into_iter()
                    .zip(&dt.samples)
                    .map(|(d2, u)| *u + h2 * d2)
                    .collect();
                weighted_square(&nt, f, &nt.samples) + weighted_square(&dt, f, &renormalized)
            }
        };
        statistics.push(value.as_f64());
    }
    let windows = statistics
        .chunks_exact(QER_WINDOW)
        .enumerate()
        .map(|(w, chunk)| {
            let dev: Vec<f64> = chunk.iter().map(|s| s - target).collect();
            let m = dev.len() as f64;
            let mean = dev.iter().sum::<f64>() / m;
            QerWindow {
                start: w * QER_WINDOW,
                end: (w + 1) * QER_WINDOW,
                mean_deviation: mean,
                variance: dev.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / m,
                mean_square: dev.iter().map(|d| d * d).sum::<f64>() / m,
            }
        })
        .collect();
    Ok(QerSample {
        kind,
        label,
        omega: target,
        eigen_indices: pairs.iter().map(|p| p.index).collect(),
        eigenvalues: pairs.iter().map(|p| p.eigenvalue.as_f64()).collect(),
        statistics,
        windows,
    })
}

/// True when there are at least two windows and each window's variance is
/// no larger than the previous one.
pub fn windows_nonincreasing(windows: &[QerWindow]) -> bool {
    windows.len() >= 2 && windows.windows(2).all(|w| w[1].variance <= w[0].variance)
}
