//! Empirical densities on a fixed standardized grid, the overlap-deviation
//! metric between densities, and the one-sample Kolmogorov-Smirnov test
//! against the standard normal.
//!
//! The overlap deviation between two densities `p` and `q` is half the
//! integrated absolute difference — the non-overlapping area divided by the
//! sum of the areas (both 1). On a shared grid with tail accumulators this is
//! computed exactly from bin masses, so the metric is 0 for identical
//! densities and 1 for disjoint supports.

use crate::error::{Error, Result};
use crate::numeric::{mean, normal_cdf};
use serde::{Deserialize, Serialize};

/// Uniform binning over `[min, max)` with mass outside accumulated into two
/// tail fields. The default covers [-6, 6) in standardized units with bin
/// width 0.1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinGrid {
    pub min: f64,
    pub max: f64,
    pub bins: usize,
}

impl Default for BinGrid {
    fn default() -> Self {
        Self {
            min: -6.0,
            max: 6.0,
            bins: 120,
        }
    }
}

impl BinGrid {
    pub fn new(min: f64, max: f64, bins: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::invalid("grid", "need finite min < max"));
        }
        if bins == 0 {
            return Err(Error::invalid("grid", "need at least one bin"));
        }
        Ok(Self { min, max, bins })
    }

    pub fn width(&self) -> f64 {
        (self.max - self.min) / self.bins as f64
    }

    /// Left edge of bin `k` (edge `bins` is the grid maximum).
    pub fn edge(&self, k: usize) -> f64 {
        self.min + self.width() * k as f64
    }

    pub fn center(&self, k: usize) -> f64 {
        self.min + self.width() * (k as f64 + 0.5)
    }

    /// Bin index for `x`: `Ok(k)` for in-range values (bins are half-open
    /// `[edge_k, edge_{k+1})`), `Err(false)` left of the grid, `Err(true)`
    /// right of it (including `x == max`).
    pub fn locate(&self, x: f64) -> std::result::Result<usize, bool> {
        if x < self.min {
            return Err(false);
        }
        let k = ((x - self.min) / self.width()) as usize;
        if k >= self.bins {
            return Err(true);
        }
        Ok(k)
    }
}

/// Binned probability density with tail-overflow masses. Densities are
/// probability per unit; `sum(density * width) + tails = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pdf {
    pub grid: BinGrid,
    pub densities: Vec<f64>,
    pub left_tail_mass: f64,
    pub right_tail_mass: f64,
}

impl Pdf {
    /// Total probability mass (should be 1 up to rounding).
    pub fn total_mass(&self) -> f64 {
        let w = self.grid.width();
        self.densities.iter().map(|d| d * w).sum::<f64>()
            + self.left_tail_mass
            + self.right_tail_mass
    }

    /// Per-bin masses (density times width), used by the overlap metric.
    pub fn bin_masses(&self) -> impl Iterator<Item = f64> + '_ {
        let w = self.grid.width();
        self.densities.iter().map(move |d| d * w)
    }

    /// Plot rows `(bin center, density)`.
    pub fn plot_rows(&self) -> Vec<(f64, f64)> {
        self.densities
            .iter()
            .enumerate()
            .map(|(k, &d)| (self.grid.center(k), d))
            .collect()
    }
}

/// Shift samples to zero mean, then scale to unit standard deviation
/// (population convention, divisor `n`). For already-centered inputs the
/// scale factor equals the root mean square.
pub fn standardize(samples: &[f64]) -> Result<Vec<f64>> {
    let (m, sd) = standardize_params(samples)?;
    Ok(samples.iter().map(|x| (x - m) / sd).collect())
}

/// Mean and population standard deviation used by [`standardize`], rejecting
/// degenerate inputs.
pub fn standardize_params(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: samples.len(),
        });
    }
    let m = mean(samples);
    let var = samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / samples.len() as f64;
    let sd = var.sqrt();
    if sd <= 0.0 || !sd.is_finite() {
        return Err(Error::ZeroDispersion {
            context: "standardize",
        });
    }
    Ok((m, sd))
}

/// Histogram density of (standardized) samples on `grid`; out-of-range mass
/// goes to the tail accumulators.
pub fn estimate_pdf(samples: &[f64], grid: BinGrid) -> Result<Pdf> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut counts = vec![0u64; grid.bins];
    let mut left = 0u64;
    let mut right = 0u64;
    for &x in samples {
        match grid.locate(x) {
            Ok(k) => counts[k] += 1,
            Err(false) => left += 1,
            Err(true) => right += 1,
        }
    }
    let n = samples.len() as f64;
    let w = grid.width();
    Ok(Pdf {
        grid,
        densities: counts.iter().map(|&c| c as f64 / (n * w)).collect(),
        left_tail_mass: left as f64 / n,
        right_tail_mass: right as f64 / n,
    })
}

/// Standard normal density on `grid`, with exact bin masses from CDF
/// differences (not midpoint sampling) and analytic tail masses.
pub fn gaussian_reference(grid: BinGrid) -> Pdf {
    let w = grid.width();
    let mut densities = Vec::with_capacity(grid.bins);
    let mut prev_cdf = normal_cdf(grid.min);
    let left_tail_mass = prev_cdf;
    for k in 0..grid.bins {
        let hi = normal_cdf(grid.edge(k + 1));
        densities.push((hi - prev_cdf) / w);
        prev_cdf = hi;
    }
    Pdf {
        grid,
        densities,
        left_tail_mass,
        right_tail_mass: 1.0 - prev_cdf,
    }
}

/// Overlap deviation between two densities on the same grid: half the sum of
/// absolute bin-mass differences plus absolute tail-mass differences.
/// 0 means identical binned densities, 1 means disjoint support.
pub fn overlap_deviation(p: &Pdf, q: &Pdf) -> Result<f64> {
    if p.grid != q.grid {
        return Err(Error::GridMismatch);
    }
    let bins: f64 = p
        .bin_masses()
        .zip(q.bin_masses())
        .map(|(a, b)| (a - b).abs())
        .sum();
    let tails = (p.left_tail_mass - q.left_tail_mass).abs()
        + (p.right_tail_mass - q.right_tail_mass).abs();
    Ok(0.5 * (bins + tails))
}

/// One-sample Kolmogorov-Smirnov result against the standard normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    /// Supremum distance between the empirical CDF and the normal CDF.
    pub statistic_d: f64,
    /// Asymptotic p-value with the standard finite-n correction.
    pub p_value: f64,
    /// Significance level the decision was taken at.
    pub significance: f64,
    /// True iff `p_value < significance`.
    pub reject: bool,
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 * sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test of standardized samples against N(0,1).
///
/// The p-value uses the asymptotic Kolmogorov distribution evaluated at
/// `(sqrt(n) + 0.12 + 0.11/sqrt(n)) * D` (Stephens' finite-n correction).
/// No correction is made for the parameters having been estimated from the
/// same samples, so the test is conservative on standardized data.
pub fn ks_test(samples: &[f64], significance: f64) -> Result<KsResult> {
    if samples.len() < 10 {
        return Err(Error::TooShort {
            required: 10,
            actual: samples.len(),
        });
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::invalid("significance", "must lie in (0, 1)"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = normal_cdf(x);
        let lo = (cdf - i as f64 / n).abs();
        let hi = ((i + 1) as f64 / n - cdf).abs();
        d = d.max(lo).max(hi);
    }
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    let p_value = kolmogorov_q(lambda);
    Ok(KsResult {
        statistic_d: d,
        p_value,
        significance,
        reject: p_value < significance,
    })
}
