use serde::{Deserialize, Serialize};

use super::{AsymptoticsError, KuznecovSeries};
use crate::Real;

/// Eigenvalue window `[lo, hi)` and the share of its periods above the
/// threshold `C lambda^{-1/4} (log lambda)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityWindow {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub exceed: usize,
    pub fraction: f64,
}

/// Dyadic windows `[e 2^i, e 2^{i+1})` covering the computed spectrum.
pub fn chebyshev_density<T: Real>(series: &KuznecovSeries<T>, c: f64) -> Vec<DensityWindow> {
    let top = series
        .eigenvalues
        .iter()
        .fold(f64::NEG_INFINITY, |m, l| m.max(l.as_f64()));
    let mut windows = Vec::new();
    let mut lo = std::f64::consts::E;
    while lo <= top {
        let hi = 2.0 * lo;
        let mut count = 0;
        let mut exceed = 0;
        for (l, p) in series.eigenvalues.iter().zip(&series.periods) {
            let l = l.as_f64();
            if l >= lo && l < hi {
                count += 1;
                if p.as_f64().abs() > c * l.powf(-0.25) * l.ln().sqrt() {
                    exceed += 1;
                }
            }
        }
        let fraction = if count == 0 { 0.0 } else { exceed as f64 / count as f64 };
        windows.push(DensityWindow {
            lo,
            hi,
            count,
            exceed,
            fraction,
        });
        lo = hi;
    }
    windows
}

/// Density-one subsequence along which a sequence exceeds every integer
/// threshold, built from a finite prefix `a_1..a_X`.
///
/// Positions are 1-based. `cut_points[k-1]` is `n_k`, the least `n` such
/// that for every `m` in `[n, X]` more than `m (1 - 2^{-k})` of
/// `a_1..a_m` exceed `k`. Threshold `k` is certified when `n_k <= X`.
/// Block `k` holds the positions `j` in `[n_k, n_{k+1})` (the last block
/// runs to `X`) with `a_j > k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityExtraction {
    pub len: usize,
    pub cut_points: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    pub density: f64,
}

impl DensityExtraction {
    /// Largest certified threshold.
    pub fn certified(&self) -> usize {
        self.cut_points.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().flatten().copied()
    }
}

/// Least `n` for threshold `k`, or `None` when the condition fails at `m = X`.
fn cut_point(a: &[f64], k: u32) -> Option<usize> {
    let pow = 1u128 << k;
    let mut above = 0u128;
    let mut last_fail = 0usize;
    for (i, &x) in a.iter().enumerate() {
        if x > k as f64 {
            above += 1;
        }
        let m = (i + 1) as u128;
        // above > m (1 - 2^{-k})  <=>  above 2^k > m (2^k - 1)
        if above * pow <= m * (pow - 1) {
            last_fail = i + 1;
        }
    }
    (last_fail < a.len()).then_some(last_fail + 1)
}

pub fn density_one_extract(a: &[f64]) -> Result<DensityExtraction, AsymptoticsError> {
    let x = a.len();
    if x < 10 {
        return Err(AsymptoticsError::TooShort(x));
    }
    let mut cut_points = Vec::new();
    // 2^k must stay representable next to X in u128.
    for k in 1..=63u32 {
        match cut_point(a, k) {
            Some(n) => cut_points.push(n),
            None => break,
        }
    }
    if cut_points.is_empty() {
        return Err(AsymptoticsError::HypothesisFailed);
    }
    let kmax = cut_points.len();
    let mut blocks = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let start = cut_points[k - 1];
        let end = if k < kmax { cut_points[k] } else { x + 1 };
        blocks.push(
            (start..end)
                .filter(|&j| a[j - 1] > k as f64)
                .collect::<Vec<_>>(),
        );
    }
    let members: usize = blocks.iter().map(Vec::len).sum();
    Ok(DensityExtraction {
        len: x,
        cut_points,
        blocks,
        density: members as f64 / x as f64,
    })
}

pub const GROWTH_NOT_OBSERVED: &str = "growth not observed at this resolution";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GrowthOutcome {
    Extracted {
        density: f64,
        certified: usize,
        cut_points: Vec<usize>,
        /// Minimum of the sequence over each block.
        block_minima: Vec<f64>,
        /// Minimum over each block and every later one.
        tail_minima: Vec<f64>,
    },
    NotObserved {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub label: String,
    pub outcome: GrowthOutcome,
}

impl GrowthReport {
    /// True when the tail minima strictly increase from block to block.
    pub fn strictly_increasing(&self) -> bool {
        match &self.outcome {
            GrowthOutcome::Extracted { tail_minima, .. } => {
                tail_minima.windows(2).all(|w| w[0] < w[1])
            }
            GrowthOutcome::NotObserved { .. } => false,
        }
    }
}

/// Runs the extraction on a count sequence (nodal domains, intersections,
/// inert domains) and summarizes the minima along the subsequence.
pub fn growth_report(counts: &[f64], label: &str) -> GrowthReport {
    let outcome = match density_one_extract(counts) {
        Ok(ex) => {
            let block_minima: Vec<f64> = ex
                .blocks
                .iter()
                .map(|b| b.iter().map(|&j| counts[j - 1]).fold(f64::INFINITY, f64::min))
                .collect();
            let mut tail_minima = block_minima.clone();
            for i in (0..tail_minima.len().saturating_sub(1)).rev() {
                tail_minima[i] = tail_minima[i].min(tail_minima[i + 1]);
            }
            GrowthOutcome::Extracted {
                density: ex.density,
                certified: ex.certified(),
                cut_points: ex.cut_points,
                block_minima,
                tail_minima,
            }
        }
        Err(_) => GrowthOutcome::NotObserved {
            reason: GROWTH_NOT_OBSERVED.to_string(),
        },
    };
    GrowthReport {
        label: label.to_string(),
        outcome,
    }
}
