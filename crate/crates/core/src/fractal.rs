//! Structure-function multifractal analysis.
//!
//! For a path `X(t)`, the moment surface is
//! `M(q, T) = mean_t |X(t+T) - X(t)|^q` over all overlapping increment
//! pairs. A power law `M(q, T) ~ K_q * T^f(q)` is fit per `q` by least
//! squares in log-log coordinates; a linear `f(q) = qH` marks a monofractal
//! path, strict nonlinearity a multifractal one.

use crate::error::{Error, Result};
use crate::numeric::fit_line;
use serde::{Deserialize, Serialize};

/// Default moment orders: 0.5, 1.0, ..., 5.0. Non-positive q are excluded
/// (their absolute moments trivialize or diverge).
pub fn default_q_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 * 0.5).collect()
}

/// Default lags: dyadic 1, 2, 4, ..., 256, capped at a tenth of the series
/// length so every lag keeps ample pairs.
pub fn default_t_grid(series_len: usize) -> Vec<usize> {
    let cap = series_len / 10;
    (0..)
        .map(|k| 1usize << k)
        .take_while(|&t| t <= 256 && t <= cap)
        .collect()
}

/// Moment surface `M(q, T)` on explicit grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSurface {
    pub q_grid: Vec<f64>,
    pub t_grid: Vec<usize>,
    /// Row-major by q: `moments[qi][ti]`.
    pub moments: Vec<Vec<f64>>,
}

/// Per-q power-law fit of the moment surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// Fitted exponents f(q).
    pub f_of_q: Vec<f64>,
    /// Prefactors K_q.
    pub prefactor_k: Vec<f64>,
    pub fit_r2: Vec<f64>,
    /// Standard error of each fitted exponent.
    pub fit_se: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fractality {
    Monofractal,
    Multifractal,
}

/// Full scaling analysis of one path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpectrum {
    pub q_grid: Vec<f64>,
    pub t_grid: Vec<usize>,
    pub moments: Vec<Vec<f64>>,
    pub f_of_q: Vec<f64>,
    pub prefactor_k: Vec<f64>,
    pub fit_r2: Vec<f64>,
    pub fit_se: Vec<f64>,
    pub hurst: f64,
    pub classification: Fractality,
}

impl ScalingSpectrum {
    /// Compute the moment surface, fit the exponents, and classify, using
    /// `epsilon` as the tolerance for the linear-spectrum test.
    pub fn analyze(values: &[f64], q_grid: &[f64], t_grid: &[usize], epsilon: f64) -> Result<Self> {
        let surface = moment_surface(values, q_grid, t_grid)?;
        let fit = scaling_exponents(&surface)?;
        let h = hurst(&fit.f_of_q, q_grid)?;
        let classification = classify(&fit.f_of_q, q_grid, epsilon)?;
        Ok(Self {
            q_grid: surface.q_grid,
            t_grid: surface.t_grid,
            moments: surface.moments,
            f_of_q: fit.f_of_q,
            prefactor_k: fit.prefactor_k,
            fit_r2: fit.fit_r2,
            fit_se: fit.fit_se,
            hurst: h,
            classification,
        })
    }

    /// Indices `i` of interior grid points where `f(q)` bulges above the
    /// chord of its neighbors by more than `tol_multiplier` times the local
    /// fit standard error — concavity violations beyond fit noise, flagging
    /// a non-scaling fit range.
    pub fn concavity_violations(&self, tol_multiplier: f64) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 1..self.f_of_q.len().saturating_sub(1) {
            let (q0, q1, q2) = (self.q_grid[i - 1], self.q_grid[i], self.q_grid[i + 1]);
            let w = (q1 - q0) / (q2 - q0);
            let chord = self.f_of_q[i - 1] * (1.0 - w) + self.f_of_q[i + 1] * w;
            let se = self.fit_se[i - 1].max(self.fit_se[i]).max(self.fit_se[i + 1]);
            // Absolute floor keeps exact fits (se = 0) from tripping on
            // rounding noise.
            if chord - self.f_of_q[i] > tol_multiplier * se + 1e-9 {
                out.push(i);
            }
        }
        out
    }
}

/// Absolute-increment moments over all overlapping pairs.
///
/// Requires the series to be at least ten times the largest lag, and all
/// moment orders positive.
pub fn moment_surface(values: &[f64], q_grid: &[f64], t_grid: &[usize]) -> Result<MomentSurface> {
    if q_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::invalid("grids", "q and T grids must be non-empty"));
    }
    if q_grid.iter().any(|&q| !(q > 0.0 && q.is_finite())) {
        return Err(Error::invalid("q_grid", "all moment orders must be positive"));
    }
    let max_lag = *t_grid.iter().max().unwrap();
    if max_lag == 0 {
        return Err(Error::invalid("t_grid", "lags must be positive"));
    }
    if values.len() < 10 * max_lag {
        return Err(Error::LagTooLarge {
            lag: max_lag,
            len: values.len(),
        });
    }
    let mut moments = vec![vec![0.0f64; t_grid.len()]; q_grid.len()];
    for (ti, &t) in t_grid.iter().enumerate() {
        let pairs = values.len() - t;
        // One pass per lag; reuse ln|increment| across the q grid.
        let mut sums = vec![0.0f64; q_grid.len()];
        for i in 0..pairs {
            let delta = (values[i + t] - values[i]).abs();
            if delta > 0.0 {
                let log_delta = delta.ln();
                for (qi, &q) in q_grid.iter().enumerate() {
                    sums[qi] += (q * log_delta).exp();
                }
            }
        }
        for (qi, sum) in sums.iter().enumerate() {
            moments[qi][ti] = sum / pairs as f64;
        }
    }
    Ok(MomentSurface {
        q_grid: q_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        moments,
    })
}

/// Least-squares fit of `ln M(q,T)` against `ln T` per moment order.
/// Non-positive cells are dropped; fewer than four usable scales for any q
/// is an error.
pub fn scaling_exponents(surface: &MomentSurface) -> Result<ScalingFit> {
    let mut f_of_q = Vec::with_capacity(surface.q_grid.len());
    let mut prefactor_k = Vec::with_capacity(surface.q_grid.len());
    let mut fit_r2 = Vec::with_capacity(surface.q_grid.len());
    let mut fit_se = Vec::with_capacity(surface.q_grid.len());
    for (qi, &q) in surface.q_grid.iter().enumerate() {
        let mut xs = Vec::with_capacity(surface.t_grid.len());
        let mut ys = Vec::with_capacity(surface.t_grid.len());
        for (ti, &t) in surface.t_grid.iter().enumerate() {
            let m = surface.moments[qi][ti];
            if m > 0.0 && m.is_finite() {
                xs.push((t as f64).ln());
                ys.push(m.ln());
            }
        }
        if xs.len() < 4 {
            return Err(Error::DegenerateMoments { q, required: 4 });
        }
        let fit = fit_line(&xs, &ys)?;
        f_of_q.push(fit.slope);
        prefactor_k.push(fit.intercept.exp());
        fit_r2.push(fit.r_squared.clamp(0.0, 1.0));
        fit_se.push(fit.slope_se);
    }
    Ok(ScalingFit {
        f_of_q,
        prefactor_k,
        fit_r2,
        fit_se,
    })
}

/// Hurst exponent `H = f(2) / 2`; q = 2 must be on the grid.
pub fn hurst(f_of_q: &[f64], q_grid: &[f64]) -> Result<f64> {
    let idx = q_grid
        .iter()
        .position(|&q| (q - 2.0).abs() < 1e-12)
        .ok_or(Error::MissingGridPoint { q: 2.0 })?;
    Ok(f_of_q[idx] / 2.0)
}

/// Classify the spectrum: fit `f(q) = qH` through the origin by least
/// squares; monofractal iff the largest deviation from that line is within
/// `epsilon`.
pub fn classify(f_of_q: &[f64], q_grid: &[f64], epsilon: f64) -> Result<Fractality> {
    if q_grid.len() < 4 {
        return Err(Error::invalid("q_grid", "need at least 4 points to classify"));
    }
    if f_of_q.len() != q_grid.len() {
        return Err(Error::invalid("f_of_q", "length must match q_grid"));
    }
    let sqq: f64 = q_grid.iter().map(|q| q * q).sum();
    let sqf: f64 = q_grid.iter().zip(f_of_q).map(|(q, f)| q * f).sum();
    let h = sqf / sqq;
    let max_dev = q_grid
        .iter()
        .zip(f_of_q)
        .map(|(q, f)| (f - q * h).abs())
        .fold(0.0f64, f64::max);
    Ok(if max_dev <= epsilon {
        Fractality::Monofractal
    } else {
        Fractality::Multifractal
    })
}

/// Default classification tolerance for the linear-spectrum test.
pub const DEFAULT_CLASSIFY_EPSILON: f64 = 0.05;
