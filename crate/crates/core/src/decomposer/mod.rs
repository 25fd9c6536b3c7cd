//! Decomposition of demeaned log returns into a per-step local-volatility
//! path and residual noise increments.
//!
//! The model is `dlnS_i = mu + sigma_i * dW_i`. A moving-window average
//! seeds the volatility path; a genetic algorithm then searches per-step
//! log-volatility chromosomes for the path minimizing
//!
//! `F = c * dev(dW) + dev(dln sigma)`
//!
//! where `dev` is the overlap deviation of the standardized empirical density
//! from the standard normal. Both the noise increments and the log-volatility
//! increments are pushed toward Wiener behavior at once.

mod ga;

pub use ga::{ga_optimize, GaOutcome};

use crate::distributions::{
    estimate_pdf, gaussian_reference, ks_test, overlap_deviation, standardize, BinGrid, KsResult,
};
use crate::error::{Error, Result};
use crate::series::ReturnSeries;
use serde::{Deserialize, Serialize};

/// A local-volatility decomposition: per-step volatility, noise increments,
/// log-volatility increments and the removed mean.
///
/// Invariant: `sigma[i] * dw[i] + mu` reproduces the original return at every
/// step (to rounding), and `dln_sigma` is one shorter than `sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    sigma: Vec<f64>,
    dw: Vec<f64>,
    dln_sigma: Vec<f64>,
    mu: f64,
}

impl Decomposition {
    /// Build from a log-volatility path and demeaned returns;
    /// `dw = r / exp(log_sigma)` per step.
    pub fn from_log_sigma(log_sigma: &[f64], returns: &[f64], mu: f64) -> Result<Self> {
        if log_sigma.len() != returns.len() {
            return Err(Error::invalid(
                "log_sigma",
                "length must match the return series",
            ));
        }
        if log_sigma.len() < 2 {
            return Err(Error::TooShort {
                required: 2,
                actual: log_sigma.len(),
            });
        }
        if let Some(index) = log_sigma.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite {
                context: "log_sigma",
                index,
            });
        }
        let sigma: Vec<f64> = log_sigma.iter().map(|g| g.exp()).collect();
        let dw: Vec<f64> = returns
            .iter()
            .zip(&sigma)
            .map(|(r, s)| r / s)
            .collect();
        let dln_sigma = log_sigma.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self {
            sigma,
            dw,
            dln_sigma,
            mu,
        })
    }

    /// Build from explicit volatility and noise paths (generator ground truth,
    /// file ingestion). Validates positivity and computes `dln_sigma`.
    pub fn from_parts(sigma: Vec<f64>, dw: Vec<f64>, mu: f64) -> Result<Self> {
        if sigma.len() != dw.len() {
            return Err(Error::invalid("sigma", "length must match dw"));
        }
        if sigma.len() < 2 {
            return Err(Error::TooShort {
                required: 2,
                actual: sigma.len(),
            });
        }
        for (index, &s) in sigma.iter().enumerate() {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::invalid(
                    "sigma",
                    format!("entry {index} must be positive and finite (got {s})"),
                ));
            }
        }
        if let Some(index) = dw.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "dw", index });
        }
        let dln_sigma = sigma.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        Ok(Self {
            sigma,
            dw,
            dln_sigma,
            mu,
        })
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn dw(&self) -> &[f64] {
        &self.dw
    }

    pub fn dln_sigma(&self) -> &[f64] {
        &self.dln_sigma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Reconstructed raw returns `sigma[i] * dw[i] + mu`.
    pub fn reconstruct_dlns(&self) -> Vec<f64> {
        self.sigma
            .iter()
            .zip(&self.dw)
            .map(|(s, w)| s * w + self.mu)
            .collect()
    }
}

/// Genetic-algorithm configuration. Every knob that affects a result is here,
/// so a run manifest can echo the complete configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    /// Number of chromosomes kept each generation.
    pub population: usize,
    /// Maximum number of generations.
    pub generations: usize,
    /// Fraction of the population paired off for crossover each generation.
    pub crossover_fraction: f64,
    /// Per-site mutation probability.
    pub mutation_rate: f64,
    /// Weight of the noise-increment deviation in the cost function.
    pub cost_c: f64,
    /// Moving-window size for the volatility seed path.
    pub window: usize,
    /// Master seed; all genetic randomness derives from it.
    pub seed: u64,
    /// Standard deviation of a mutation step in log volatility.
    pub mutation_step: f64,
    /// Per-gene spread of the initial population around the seed path.
    pub init_spread: f64,
    /// Genes are clamped to the seed path plus/minus this log-space width.
    pub clamp_half_width: f64,
    /// Stop early when the best cost improves by less than
    /// `plateau_tolerance` over this many consecutive generations.
    pub plateau_generations: usize,
    pub plateau_tolerance: f64,
    /// Volatility floor as a fraction of the return RMS, guarding all-zero
    /// windows in halted-market data.
    pub sigma_floor_factor: f64,
    /// Binning used by the cost function and deviation metrics.
    pub grid: BinGrid,
    /// Significance level for the KS results attached to reports.
    pub significance: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 500,
            generations: 500,
            crossover_fraction: 0.20,
            mutation_rate: 0.02,
            cost_c: 1.5,
            window: 25,
            seed: 0,
            mutation_step: 0.05,
            init_spread: 0.1,
            clamp_half_width: 3.0,
            plateau_generations: 50,
            plateau_tolerance: 1e-5,
            sigma_floor_factor: 1e-8,
            grid: BinGrid::default(),
            significance: 0.01,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::invalid("population", "need at least 2 chromosomes"));
        }
        if self.generations == 0 {
            return Err(Error::invalid("generations", "need at least 1"));
        }
        if !(0.0..=1.0).contains(&self.crossover_fraction) {
            return Err(Error::invalid("crossover_fraction", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::invalid("mutation_rate", "must lie in [0, 1]"));
        }
        if !(self.cost_c.is_finite() && self.cost_c > 0.0) {
            return Err(Error::invalid("cost_c", "must be positive"));
        }
        if self.window < 2 {
            return Err(Error::invalid("window", "must be at least 2"));
        }
        if !(self.mutation_step > 0.0 && self.mutation_step.is_finite()) {
            return Err(Error::invalid("mutation_step", "must be positive"));
        }
        if !(self.init_spread >= 0.0 && self.init_spread.is_finite()) {
            return Err(Error::invalid("init_spread", "must be non-negative"));
        }
        if !(self.clamp_half_width > 0.0 && self.clamp_half_width.is_finite()) {
            return Err(Error::invalid("clamp_half_width", "must be positive"));
        }
        if !(self.sigma_floor_factor > 0.0) {
            return Err(Error::invalid("sigma_floor_factor", "must be positive"));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::invalid("significance", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Deviation metrics of a decomposition. The log-volatility entries are
/// `None` when the volatility path is constant (degenerate increments),
/// never silently zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    /// Overlap deviation of standardized `dW` from the standard normal.
    pub delta_w: f64,
    /// Overlap deviation of standardized `dln(sigma)`; `None` if degenerate.
    pub delta_dln_sigma: Option<f64>,
    pub ks_dw: KsResult,
    pub ks_dln_sigma: Option<KsResult>,
    /// Best cost reached by the optimizer; `None` for reports computed
    /// directly from a stored decomposition.
    pub final_cost: Option<f64>,
}

/// Moving-window volatility: `sigma_i = sqrt(mean(r_j^2))` over the window
/// anchored at `i` and extending forward, truncated to the available data
/// near the end. Entries can be zero when a window is all zeros; callers
/// that need strict positivity apply a floor (see [`seed_log_volatility`]).
pub fn moving_window_volatility(returns: &ReturnSeries, window: usize) -> Result<Vec<f64>> {
    if !returns.mean_removed() {
        return Err(Error::NotDemeaned);
    }
    let r = returns.values();
    if window < 1 || window > r.len() {
        return Err(Error::invalid(
            "window",
            format!("must lie in [1, {}]", r.len()),
        ));
    }
    // Prefix sums of squares; all terms non-negative so no cancellation.
    let mut prefix = Vec::with_capacity(r.len() + 1);
    prefix.push(0.0f64);
    for &v in r {
        prefix.push(prefix.last().unwrap() + v * v);
    }
    let n = r.len();
    Ok((0..n)
        .map(|i| {
            let end = (i + window).min(n);
            let len = (end - i) as f64;
            ((prefix[end] - prefix[i]) / len).sqrt()
        })
        .collect())
}

/// Moving-window seed in log space with the volatility floor applied.
/// Returns the log path and whether any window had to be floored.
pub fn seed_log_volatility(
    returns: &ReturnSeries,
    window: usize,
    sigma_floor: f64,
) -> Result<(Vec<f64>, bool)> {
    let raw = moving_window_volatility(returns, window)?;
    let mut floored = false;
    let log = raw
        .iter()
        .map(|&s| {
            if s < sigma_floor {
                floored = true;
                sigma_floor.ln()
            } else {
                s.ln()
            }
        })
        .collect();
    Ok((log, floored))
}

/// Cost of a candidate volatility path against demeaned returns:
/// `c * dev(dW) + dev(dln sigma)`.
///
/// Any non-positive or non-finite volatility entry, or a degenerate noise
/// path, yields an infinite cost so the candidate is culled by selection.
/// A constant volatility path contributes zero from the (degenerate)
/// log-volatility term.
pub fn cost(candidate_sigma: &[f64], returns: &[f64], c: f64, grid: BinGrid) -> Result<f64> {
    if candidate_sigma.len() != returns.len() {
        return Err(Error::invalid(
            "candidate_sigma",
            "length must match the return series",
        ));
    }
    if candidate_sigma.len() < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: candidate_sigma.len(),
        });
    }
    if candidate_sigma
        .iter()
        .any(|&s| !(s.is_finite() && s > 0.0))
    {
        return Ok(f64::INFINITY);
    }
    let log_sigma: Vec<f64> = candidate_sigma.iter().map(|s| s.ln()).collect();
    let evaluator = CostEvaluator::new(returns, c, grid);
    let mut scratch = CostScratch::new(returns.len(), grid.bins);
    Ok(evaluator.cost(&log_sigma, &mut scratch))
}

/// Deviation metrics with the module-default grid and significance 0.01.
pub fn deviation_metrics(d: &Decomposition) -> Result<DeviationReport> {
    deviation_metrics_with(d, BinGrid::default(), 0.01)
}

/// Deviation metrics on an explicit grid and significance level.
pub fn deviation_metrics_with(
    d: &Decomposition,
    grid: BinGrid,
    significance: f64,
) -> Result<DeviationReport> {
    let reference = gaussian_reference(grid);
    let dw_std = standardize(d.dw())?;
    let delta_w = overlap_deviation(&estimate_pdf(&dw_std, grid)?, &reference)?;
    let ks_dw = ks_test(&dw_std, significance)?;

    let (delta_dln_sigma, ks_dln_sigma) = match standardize(d.dln_sigma()) {
        Ok(std) => {
            let dev = overlap_deviation(&estimate_pdf(&std, grid)?, &reference)?;
            (Some(dev), Some(ks_test(&std, significance)?))
        }
        Err(Error::ZeroDispersion { .. }) => (None, None),
        Err(e) => return Err(e),
    };

    Ok(DeviationReport {
        delta_w,
        delta_dln_sigma,
        ks_dw,
        ks_dln_sigma,
        final_cost: None,
    })
}

/// Shared fast path for cost evaluation: bins standardized samples straight
/// into counts and compares masses against the cached gaussian reference.
/// Kept exactly equivalent to the public composition
/// `overlap_deviation(estimate_pdf(standardize(x)), gaussian_reference)`.
pub(crate) struct CostEvaluator<'a> {
    returns: &'a [f64],
    c: f64,
    grid: BinGrid,
    ref_masses: Vec<f64>,
    ref_left: f64,
    ref_right: f64,
}

pub(crate) struct CostScratch {
    dw: Vec<f64>,
    counts: Vec<u64>,
}

impl CostScratch {
    pub(crate) fn new(n: usize, bins: usize) -> Self {
        Self {
            dw: vec![0.0; n],
            counts: vec![0; bins],
        }
    }
}

impl<'a> CostEvaluator<'a> {
    pub(crate) fn new(returns: &'a [f64], c: f64, grid: BinGrid) -> Self {
        let reference = gaussian_reference(grid);
        Self {
            returns,
            c,
            grid,
            ref_masses: reference.bin_masses().collect(),
            ref_left: reference.left_tail_mass,
            ref_right: reference.right_tail_mass,
        }
    }

    /// Overlap deviation of standardized samples from the normal reference,
    /// or `None` when the samples are degenerate.
    fn deviation_of(&self, samples: &[f64], counts: &mut [u64]) -> Option<f64> {
        let n = samples.len() as f64;
        let mut sum = 0.0;
        for &x in samples {
            sum += x;
        }
        let m = sum / n;
        let mut ss = 0.0;
        for &x in samples {
            ss += (x - m) * (x - m);
        }
        let sd = (ss / n).sqrt();
        if !(sd > 0.0 && sd.is_finite()) {
            return None;
        }
        counts.fill(0);
        let mut left = 0u64;
        let mut right = 0u64;
        for &x in samples {
            match self.grid.locate((x - m) / sd) {
                Ok(k) => counts[k] += 1,
                Err(false) => left += 1,
                Err(true) => right += 1,
            }
        }
        let mut acc = (left as f64 / n - self.ref_left).abs()
            + (right as f64 / n - self.ref_right).abs();
        for (cnt, reference) in counts.iter().zip(&self.ref_masses) {
            acc += (*cnt as f64 / n - reference).abs();
        }
        Some(0.5 * acc)
    }

    /// Full cost of a log-volatility chromosome.
    pub(crate) fn cost(&self, log_sigma: &[f64], scratch: &mut CostScratch) -> f64 {
        for ((out, &r), &g) in scratch.dw.iter_mut().zip(self.returns).zip(log_sigma) {
            *out = r * (-g).exp();
        }
        let dev_dw = match self.deviation_of(&scratch.dw, &mut scratch.counts) {
            Some(v) => v,
            None => return f64::INFINITY,
        };
        // Log-volatility increments, evaluated without materializing them.
        let n1 = log_sigma.len() - 1;
        let mut sum = 0.0;
        for w in log_sigma.windows(2) {
            sum += w[1] - w[0];
        }
        let m = sum / n1 as f64;
        let mut ss = 0.0;
        for w in log_sigma.windows(2) {
            let d = (w[1] - w[0]) - m;
            ss += d * d;
        }
        let sd = (ss / n1 as f64).sqrt();
        let dev_dln = if sd > 0.0 && sd.is_finite() {
            scratch.counts.fill(0);
            let mut left = 0u64;
            let mut right = 0u64;
            for w in log_sigma.windows(2) {
                match self.grid.locate(((w[1] - w[0]) - m) / sd) {
                    Ok(k) => scratch.counts[k] += 1,
                    Err(false) => left += 1,
                    Err(true) => right += 1,
                }
            }
            let nf = n1 as f64;
            let mut acc = (left as f64 / nf - self.ref_left).abs()
                + (right as f64 / nf - self.ref_right).abs();
            for (cnt, reference) in scratch.counts.iter().zip(&self.ref_masses) {
                acc += (*cnt as f64 / nf - reference).abs();
            }
            0.5 * acc
        } else {
            // Constant volatility path: degenerate increments contribute zero.
            0.0
        };
        self.c * dev_dw + dev_dln
    }
}
