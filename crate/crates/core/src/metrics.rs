//! Quality indicator, run summaries and the paired significance test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::domination::PayoffVector;
use crate::error::{check_dim, Error, Result};

/// Average, extremes and sample standard deviation of a set of runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub avg: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
}

pub fn summarize_runs(values: &[f64]) -> Result<RunStatistics> {
    if values.is_empty() {
        return Err(Error::domain("cannot summarize an empty list of runs"));
    }
    let n = values.len() as f64;
    let avg = values.iter().sum::<f64>() / n;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok(RunStatistics { avg: min, min, max, std: 0.0 });
    }
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    // the mean of identical values can drift by an ulp
    let avg = avg.clamp(min, max);
    Ok(RunStatistics { avg, min, max, std })
}

/// Inverted generational distance: the mean, over reference points, of the
/// Euclidean distance to the nearest approximation point.
pub fn igd(reference: &[PayoffVector], approximation: &[PayoffVector]) -> Result<f64> {
    let k = reference
        .first()
        .ok_or_else(|| Error::domain("reference set must be non-empty"))?
        .len();
    if approximation.is_empty() {
        return Err(Error::domain("approximation set must be non-empty"));
    }
    for p in reference.iter().chain(approximation) {
        check_dim(k, p.len())?;
    }

    // Sweep outward from the closest first coordinate; once the gap in that
    // coordinate alone exceeds the best distance, nothing further can win.
    let mut sorted: Vec<&[f64]> = approximation.iter().map(|p| p.as_slice()).collect();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));

    let total: f64 = reference
        .iter()
        .map(|v| {
            let v = v.as_slice();
            let start = sorted.partition_point(|p| p[0] < v[0]);
            let mut best = f64::INFINITY;
            for p in &sorted[start..] {
                let dx = p[0] - v[0];
                if dx * dx >= best {
                    break;
                }
                best = best.min(squared_distance(v, p));
            }
            for p in sorted[..start].iter().rev() {
                let dx = v[0] - p[0];
                if dx * dx >= best {
                    break;
                }
                best = best.min(squared_distance(v, p));
            }
            best.sqrt()
        })
        .sum();
    Ok(total / reference.len() as f64)
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Outcome of a two-sided Wilcoxon signed-rank test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    /// Rank sum of the positive differences `a - b`.
    pub w_plus: f64,
    pub z: f64,
    pub p_value: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
}

impl WilcoxonResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

pub const WILCOXON_MIN_PAIRS: usize = 6;

/// Paired two-sided Wilcoxon signed-rank test using the normal
/// approximation with tie correction. Zero differences are discarded and
/// tied absolute differences share their average rank.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    check_dim(a.len(), b.len())?;
    let mut diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if let Some(d) = diffs.iter().find(|d| !d.is_finite()) {
        return Err(Error::domain(format!("non-finite paired difference {d}")));
    }
    let n = diffs.len();
    if n < WILCOXON_MIN_PAIRS {
        return Err(Error::InsufficientData(format!(
            "{n} non-zero paired differences, need at least {WILCOXON_MIN_PAIRS}"
        )));
    }
    diffs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));

    let mut w_plus = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[j + 1].abs() == diffs[i].abs() {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        // ranks i+1 ..= j+1 averaged
        let rank = (i + j + 2) as f64 / 2.0;
        w_plus += diffs[i..=j].iter().filter(|d| **d > 0.0).count() as f64 * rank;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let nf = n as f64;
    let total = nf * (nf + 1.0) / 2.0;
    let w_minus = total - w_plus;
    let mean = total / 2.0;
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = (w_plus - mean) / variance.sqrt();
    let normal = Normal::standard();
    let p_value = (2.0 * normal.sf(z.abs())).min(1.0);
    Ok(WilcoxonResult {
        statistic: w_plus.min(w_minus),
        w_plus,
        z,
        p_value,
        n,
    })
}
