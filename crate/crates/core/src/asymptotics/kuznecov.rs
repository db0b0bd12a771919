use serde::{Deserialize, Serialize};

use super::AsymptoticsError;
use crate::mesh::SurfaceMesh;
use crate::restriction::{period_integral, restrict, CurvePath, RestrictionError, TraceKind};
use crate::spectral::EigenPair;
use crate::Real;

/// Minimum number of eigenpairs for a Kuznecov series.
pub const MIN_PAIRS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitWindow {
    /// Upper half of the computed spectrum, never including the lowest 20.
    #[default]
    TopHalf,
    /// Eigenvalues in `[lo, hi]`.
    Range(f64, f64),
}

/// Least-squares fit `S ~ coefficient * lambda^exponent` in log-log scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KuznecovSeries<T> {
    pub eigenvalues: Vec<T>,
    /// `p_j = \int_gamma f phi_j ds`, or the normalized Neumann analogue.
    pub periods: Vec<T>,
    /// `partial_sums[j] = sum_{i <= j} p_i^2`.
    pub partial_sums: Vec<T>,
    pub f_integral: T,
    pub fit: Option<PowerFit>,
    /// True when `\int f ds` is negligible and no fit was attempted.
    pub flagged: bool,
}

impl<T: Real> KuznecovSeries<T> {
    /// Series from precomputed periods, e.g. a closed-form eigenbasis.
    /// `f_integral`, `length` and `f_max` decide whether the fit is flagged.
    pub fn from_periods(
        eigenvalues: Vec<T>,
        periods: Vec<T>,
        f_integral: T,
        length: T,
        f_max: T,
        window: FitWindow,
    ) -> Result<Self, AsymptoticsError> {
        if eigenvalues.len() != periods.len() {
            return Err(AsymptoticsError::LengthMismatch);
        }
        let mut partial_sums = Vec::with_capacity(periods.len());
        let mut acc = T::zero();
        for p in &periods {
            acc += *p * *p;
            partial_sums.push(acc);
        }
        let flagged = !(f_integral.abs() >= T::lit(1e-8) * length * f_max) || f_max == T::zero();
        let fit = if flagged {
            None
        } else {
            fit_power(&eigenvalues, &partial_sums, window)
        };
        Ok(Self {
            eigenvalues,
            periods,
            partial_sums,
            f_integral,
            fit,
            flagged,
        })
    }

    /// `S(lambda) = sum_{lambda_j < lambda} p_j^2`.
    pub fn sum_below(&self, lambda: T) -> T {
        let k = self.eigenvalues.partition_point(|&l| l < lambda);
        if k == 0 {
            T::zero()
        } else {
            self.partial_sums[k - 1]
        }
    }
}

/// Periods of `f` against each eigenfunction along `path` and their
/// cumulative squares.
pub fn kuznecov<T: Real>(
    pairs: &[EigenPair<T>],
    mesh: &SurfaceMesh<T>,
    path: &CurvePath<T>,
    f: &[T],
    kind: TraceKind,
    window: FitWindow,
) -> Result<KuznecovSeries<T>, AsymptoticsError> {
    if pairs.len() < MIN_PAIRS {
        return Err(AsymptoticsError::TooFewPairs {
            need: MIN_PAIRS,
            got: pairs.len(),
        });
    }
    let mut periods = Vec::with_capacity(pairs.len());
    for p in pairs {
        if kind == TraceKind::NeumannNormalized && p.eigenvalue <= T::zero() {
            periods.push(T::zero());
            continue;
        }
        let trace = restrict(p, mesh, path, kind)?;
        periods.push(period_integral(&trace, f)?);
    }
    let f_integral = line_integral(path, f)?;
    let f_max = f.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    KuznecovSeries::from_periods(
        pairs.iter().map(|p| p.eigenvalue).collect(),
        periods,
        f_integral,
        path.length(),
        f_max,
        window,
    )
}

/// Trapezoidal `\int_gamma f ds`.
pub(crate) fn line_integral<T: Real>(path: &CurvePath<T>, f: &[T]) -> Result<T, AsymptoticsError> {
    let n = path.len();
    if f.len() != n {
        return Err(RestrictionError::LengthMismatch {
            expected: n,
            got: f.len(),
        }
        .into());
    }
    let half = T::lit(0.5);
    Ok((0..n)
        .map(|i| half * path.edge_lengths()[i] * (f[i] + f[(i + 1) % n]))
        .sum())
}

fn fit_power<T: Real>(lambda: &[T], sums: &[T], window: FitWindow) -> Option<PowerFit> {
    let n = lambda.len();
    let keep = |i: usize| match window {
        FitWindow::TopHalf => i >= (n / 2).max(MIN_PAIRS),
        FitWindow::Range(lo, hi) => {
            let l = lambda[i].as_f64();
            l >= lo && l <= hi
        }
    };
    let pts: Vec<(f64, f64)> = (0..n)
        .filter(|&i| keep(i) && lambda[i] > T::zero() && sums[i] > T::zero())
        .map(|i| (lambda[i].as_f64().ln(), sums[i].as_f64().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    Some(PowerFit {
        exponent,
        coefficient: (my - exponent * mx).exp(),
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::gen_flat_torus;
    use crate::restriction::make_path;
    use crate::spectral::{assemble_operators, solve_eigenpairs};

    #[test]
    fn doubling_f_quadruples_every_partial_sum() {
        let tau = 2.0 * std::f64::consts::PI;
        let (mesh, _) = gen_flat_torus(12, tau, tau).unwrap();
        let ops = assemble_operators(&mesh).unwrap();
        let pairs = solve_eigenpairs(&ops, 30, 1e-9).unwrap();
        let path = make_path(&mesh, &(0..12).collect::<Vec<_>>()).unwrap();
        let f: Vec<f64> = (0..12).map(|i| 1.0 + 0.5 * (i as f64).cos()).collect();
        let f2: Vec<f64> = f.iter().map(|x| 2.0 * x).collect();
        for kind in [TraceKind::Dirichlet, TraceKind::NeumannNormalized] {
            let a = kuznecov(&pairs, &mesh, &path, &f, kind, FitWindow::TopHalf).unwrap();
            let b = kuznecov(&pairs, &mesh, &path, &f2, kind, FitWindow::TopHalf).unwrap();
            for (x, y) in a.partial_sums.iter().zip(&b.partial_sums) {
                assert_eq!(4.0 * x, *y);
            }
            assert!(a.partial_sums.windows(2).all(|w| w[0] <= w[1]));
        }
        let zero = vec![0.0; 12];
        let z = kuznecov(&pairs, &mesh, &path, &zero, TraceKind::Dirichlet, FitWindow::TopHalf).unwrap();
        assert!(z.flagged && z.fit.is_none());
        assert!(z.partial_sums.iter().all(|&s| s == 0.0));
        assert_eq!(
            kuznecov(&pairs[..19], &mesh, &path, &f, TraceKind::Dirichlet, FitWindow::TopHalf)
                .unwrap_err(),
            AsymptoticsError::TooFewPairs { need: 20, got: 19 }
        );
    }

    #[test]
    fn power_law_is_recovered() {
        let lambda: Vec<f64> = (1..20_000).map(|j| j as f64).collect();
        let periods: Vec<f64> = lambda.iter().map(|l| l.powf(-0.25)).collect();
        // Partial sums of l^{-1/2} grow like 2 sqrt(l).
        let s = KuznecovSeries::from_periods(lambda, periods, 1.0, 1.0, 1.0, FitWindow::TopHalf)
            .unwrap();
        let fit = s.fit.unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.02);
        assert_eq!(s.sum_below(1.0), 0.0);
        assert_eq!(s.sum_below(1.5), 1.0);
    }
}
