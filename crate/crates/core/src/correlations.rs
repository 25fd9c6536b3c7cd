//! Autocorrelation and leverage cross-correlation curves.
//!
//! Autocorrelations are the standard demeaned, variance-normalized sample
//! estimates. Leverage curves correlate one series against the future of
//! another, normalized by the two global standard deviations so amplitudes
//! are comparable across lags, with optional sign conditioning on large
//! fluctuations of the leading series.

use crate::error::{Error, Result};
use crate::numeric::mean;
use serde::{Deserialize, Serialize};

/// A correlation value per lag, with pair counts and the white-noise
/// reference band `2 / sqrt(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    /// Pairs actually entering each lag's estimate, so bands stay honest
    /// near the series ends.
    pub n_pairs: Vec<usize>,
    /// The +/- reference level for an uncorrelated series of this length.
    pub confidence_band: f64,
}

impl CorrelationCurve {
    /// Fraction of the lags `1..` whose values lie inside the band.
    pub fn fraction_within_band(&self) -> f64 {
        let mut inside = 0usize;
        let mut total = 0usize;
        for (lag, v) in self.lags.iter().zip(&self.values) {
            if *lag == 0 {
                continue;
            }
            total += 1;
            if v.abs() <= self.confidence_band {
                inside += 1;
            }
        }
        if total == 0 {
            1.0
        } else {
            inside as f64 / total as f64
        }
    }

    /// Plot rows `(lag, value, band)`.
    pub fn plot_rows(&self) -> Vec<(usize, f64, f64)> {
        self.lags
            .iter()
            .zip(&self.values)
            .map(|(&l, &v)| (l, v, self.confidence_band))
            .collect()
    }
}

/// Sign conditioning for leverage correlations: restrict the leading series
/// to large negative or large positive standardized fluctuations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    None,
    NegativeOnly,
    PositiveOnly,
}

/// Demeaned, variance-normalized sample autocorrelation for lags `0..=max_lag`.
/// Requires `length > 4 * max_lag` and non-degenerate variance.
pub fn autocorr(values: &[f64], max_lag: usize) -> Result<CorrelationCurve> {
    if values.len() <= 4 * max_lag {
        return Err(Error::LagTooLarge {
            lag: max_lag,
            len: values.len(),
        });
    }
    if values.len() < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: values.len(),
        });
    }
    let m = mean(values);
    let denom: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    if !(denom > 0.0) {
        return Err(Error::ZeroDispersion {
            context: "autocorrelation",
        });
    }
    let n = values.len();
    let mut lags = Vec::with_capacity(max_lag + 1);
    let mut out = Vec::with_capacity(max_lag + 1);
    let mut pairs = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let mut acc = 0.0;
        for i in 0..(n - lag) {
            acc += (values[i] - m) * (values[i + lag] - m);
        }
        lags.push(lag);
        out.push(acc / denom);
        pairs.push(n - lag);
    }
    Ok(CorrelationCurve {
        lags,
        values: out,
        n_pairs: pairs,
        confidence_band: 2.0 / (n as f64).sqrt(),
    })
}

/// Autocorrelation of absolute values — the nonlinear correlation probe.
pub fn abs_autocorr(values: &[f64], max_lag: usize) -> Result<CorrelationCurve> {
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    autocorr(&abs, max_lag).map_err(|e| match e {
        Error::ZeroDispersion { .. } => Error::ZeroDispersion {
            context: "absolute autocorrelation",
        },
        other => other,
    })
}

/// Leverage cross-correlation `L(n) = <a(t) b(t+n)> / (sd_a * sd_b)` for lags
/// `0..=max_lag`, both series demeaned and the standard deviations global.
///
/// With conditioning, `t` is restricted to where the standardized `a(t)` is
/// below `-threshold` (negative-only) or above `+threshold` (positive-only);
/// a conditioning subset smaller than 30 points is rejected.
pub fn leverage(
    a: &[f64],
    b: &[f64],
    max_lag: usize,
    conditioning: Conditioning,
    threshold: f64,
) -> Result<CorrelationCurve> {
    if a.len() != b.len() {
        return Err(Error::invalid("leverage", "series lengths must match"));
    }
    let n = a.len();
    if max_lag >= n.div_ceil(4) {
        return Err(Error::LagTooLarge { lag: max_lag, len: n });
    }
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(Error::invalid("threshold", "must be non-negative"));
    }
    let ma = mean(a);
    let mb = mean(b);
    let sa = (a.iter().map(|v| (v - ma) * (v - ma)).sum::<f64>() / n as f64).sqrt();
    let sb = (b.iter().map(|v| (v - mb) * (v - mb)).sum::<f64>() / n as f64).sqrt();
    if !(sa > 0.0 && sb > 0.0) {
        return Err(Error::ZeroDispersion { context: "leverage" });
    }

    let selected: Vec<usize> = match conditioning {
        Conditioning::None => (0..n).collect(),
        Conditioning::NegativeOnly => (0..n)
            .filter(|&i| (a[i] - ma) / sa < -threshold)
            .collect(),
        Conditioning::PositiveOnly => (0..n)
            .filter(|&i| (a[i] - ma) / sa > threshold)
            .collect(),
    };

    let mut lags = Vec::with_capacity(max_lag + 1);
    let mut values = Vec::with_capacity(max_lag + 1);
    let mut n_pairs = Vec::with_capacity(max_lag + 1);
    let mut min_pairs = usize::MAX;
    for lag in 0..=max_lag {
        let mut acc = 0.0;
        let mut count = 0usize;
        for &t in &selected {
            if t + lag < n {
                acc += (a[t] - ma) * (b[t + lag] - mb);
                count += 1;
            }
        }
        min_pairs = min_pairs.min(count);
        lags.push(lag);
        n_pairs.push(count);
        values.push(if count > 0 {
            acc / (count as f64 * sa * sb)
        } else {
            f64::NAN
        });
    }
    if conditioning != Conditioning::None && min_pairs < 30 {
        return Err(Error::ConditioningTooSmall {
            actual: min_pairs,
            required: 30,
        });
    }
    Ok(CorrelationCurve {
        lags,
        values,
        n_pairs,
        confidence_band: 2.0 / (n as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand_distr::{Distribution, StandardNormal};

    fn white_noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = crate::rng::derive_rng(seed, &[0xcc]);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn autocorr_lag_zero_is_one() {
        let x = white_noise(500, 1);
        let curve = autocorr(&x, 20).unwrap();
        assert_abs_diff_eq!(curve.values[0], 1.0, epsilon = 1e-12);
        assert_eq!(curve.n_pairs[0], 500);
        assert_eq!(curve.n_pairs[20], 480);
    }

    #[test]
    fn autocorr_white_noise_within_band() {
        let x = white_noise(12000, 2);
        let curve = autocorr(&x, 100).unwrap();
        assert!(
            curve.fraction_within_band() >= 0.95,
            "within-band fraction {}",
            curve.fraction_within_band()
        );
    }

    #[test]
    fn autocorr_alternating_signal() {
        let x: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let curve = autocorr(&x, 4).unwrap();
        assert_abs_diff_eq!(curve.values[1], -1.0, epsilon = 1e-2);
    }

    #[test]
    fn autocorr_affine_invariance() {
        let x = white_noise(600, 3);
        let y: Vec<f64> = x.iter().map(|v| -2.5 * v + 7.0).collect();
        let a = autocorr(&x, 30).unwrap();
        let b = autocorr(&y, 30).unwrap();
        for (va, vb) in a.values.iter().zip(&b.values) {
            assert_abs_diff_eq!(va, vb, epsilon = 1e-12);
        }
    }

    #[test]
    fn autocorr_rejects_constant_and_long_lags() {
        assert!(matches!(
            autocorr(&[1.0; 100], 10).unwrap_err(),
            Error::ZeroDispersion { .. }
        ));
        assert!(matches!(
            autocorr(&white_noise(100, 4), 25).unwrap_err(),
            Error::LagTooLarge { .. }
        ));
    }

    #[test]
    fn abs_autocorr_gaussian_within_band() {
        let x = white_noise(12000, 5);
        let curve = abs_autocorr(&x, 100).unwrap();
        assert!(curve.fraction_within_band() >= 0.93);
    }

    #[test]
    fn abs_autocorr_constant_magnitude_rejected() {
        let x: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 2.0 } else { -2.0 }).collect();
        assert!(matches!(
            abs_autocorr(&x, 5).unwrap_err(),
            Error::ZeroDispersion { .. }
        ));
    }

    #[test]
    fn leverage_independent_series_within_band() {
        let a = white_noise(8000, 6);
        let b = white_noise(8000, 7);
        let curve = leverage(&a, &b, 30, Conditioning::None, 1.0).unwrap();
        assert!(curve.fraction_within_band() >= 0.9);
    }

    #[test]
    fn leverage_detects_seeded_construction() {
        // b(t+1) = -0.3 a(t) + noise.
        let a = white_noise(12000, 8);
        let eta = white_noise(12000, 9);
        let mut b = vec![0.0; a.len()];
        for t in 0..a.len() - 1 {
            b[t + 1] = -0.3 * a[t] + eta[t + 1];
        }
        let curve = leverage(&a, &b, 10, Conditioning::None, 1.0).unwrap();
        assert!(
            curve.values[1] < -curve.confidence_band,
            "L(1) = {} vs band {}",
            curve.values[1],
            curve.confidence_band
        );
        // Reversed direction: volatility's past does not predict returns.
        let reversed = leverage(&b, &a, 10, Conditioning::None, 1.0).unwrap();
        for lag in 1..=10 {
            assert!(
                reversed.values[lag].abs() <= reversed.confidence_band,
                "reversed L({lag}) = {}",
                reversed.values[lag]
            );
        }
    }

    #[test]
    fn leverage_reversal_symmetry() {
        // <a(t) b(t+n)> summed over t equals <b'(t) a'(t+n)> on the
        // reversed series; the estimates match exactly.
        let a = white_noise(2000, 10);
        let b = white_noise(2000, 11);
        let fwd = leverage(&a, &b, 15, Conditioning::None, 1.0).unwrap();
        let ra: Vec<f64> = a.iter().rev().copied().collect();
        let rb: Vec<f64> = b.iter().rev().copied().collect();
        let swapped = leverage(&rb, &ra, 15, Conditioning::None, 1.0).unwrap();
        for (x, y) in fwd.values.iter().zip(&swapped.values) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn leverage_conditioning_subset_guard() {
        let a = white_noise(200, 12);
        let b = white_noise(200, 13);
        // Threshold so extreme that almost nothing qualifies.
        let err = leverage(&a, &b, 10, Conditioning::NegativeOnly, 5.0).unwrap_err();
        assert!(matches!(err, Error::ConditioningTooSmall { .. }));
    }

    #[test]
    fn leverage_conditioned_variants_run() {
        let a = white_noise(4000, 14);
        let b = white_noise(4000, 15);
        let neg = leverage(&a, &b, 10, Conditioning::NegativeOnly, 1.0).unwrap();
        let pos = leverage(&a, &b, 10, Conditioning::PositiveOnly, 1.0).unwrap();
        assert!(neg.n_pairs[0] > 30 && pos.n_pairs[0] > 30);
        assert!(neg.n_pairs[0] < 4000 / 2);
    }
}
