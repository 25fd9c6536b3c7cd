//! Canonical price and return series plus the transforms every other module
//! consumes.
//!
//! Timestamps are optional metadata: synthetic series carry none and all math
//! operates on the value arrays alone. Market loaders attach timestamps as
//! days-since-epoch keys; gaps between trading days are treated as
//! consecutive steps (no imputation).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A strictly positive price path, optionally keyed by strictly increasing
/// integer timestamps (days since epoch for market data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    prices: Vec<f64>,
    timestamps: Option<Vec<i64>>,
}

impl PriceSeries {
    /// Validate and wrap a price path. Rejects non-positive or non-finite
    /// prices (with the offending index), out-of-order timestamps and
    /// length mismatches. Needs at least two prices.
    pub fn new(prices: Vec<f64>, timestamps: Option<Vec<i64>>) -> Result<Self> {
        if prices.len() < 2 {
            return Err(Error::TooShort {
                required: 2,
                actual: prices.len(),
            });
        }
        for (index, &p) in prices.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite {
                    context: "prices",
                    index,
                });
            }
            if p <= 0.0 {
                return Err(Error::NonPositivePrice { index, value: p });
            }
        }
        if let Some(ts) = &timestamps {
            if ts.len() != prices.len() {
                return Err(Error::TimestampLengthMismatch {
                    timestamps: ts.len(),
                    prices: prices.len(),
                });
            }
            for (index, w) in ts.windows(2).enumerate() {
                if w[1] <= w[0] {
                    return Err(Error::UnorderedTimestamps { index: index + 1 });
                }
            }
        }
        Ok(Self { prices, timestamps })
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn timestamps(&self) -> Option<&[i64]> {
        self.timestamps.as_deref()
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Per-step log returns `ln(S_{i+1}/S_i)`, with a flag recording whether the
/// sample mean has been removed and, if so, the removed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    values: Vec<f64>,
    mean_removed: bool,
    mu: f64,
}

impl ReturnSeries {
    /// Wrap raw (not yet demeaned) return values.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort {
                required: 2,
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "returns",
                index,
            });
        }
        Ok(Self {
            values,
            mean_removed: false,
            mu: 0.0,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean_removed(&self) -> bool {
        self.mean_removed
    }

    /// The mean removed by [`demean`]; zero until then.
    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Log returns of a price series: `values[i] = ln(prices[i+1] / prices[i])`.
///
/// The output is not demeaned (`mu = 0`); positivity is guaranteed by the
/// [`PriceSeries`] invariants.
pub fn log_returns(series: &PriceSeries) -> ReturnSeries {
    let p = series.prices();
    let values: Vec<f64> = p.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    ReturnSeries {
        values,
        mean_removed: false,
        mu: 0.0,
    }
}

/// Remove the sample mean from a return series, recording it as `mu`.
///
/// Demeaning twice is rejected: a second subtraction would silently shift
/// `mu` out of the reconstruction identity.
pub fn demean(returns: &ReturnSeries) -> Result<ReturnSeries> {
    if returns.mean_removed {
        return Err(Error::AlreadyDemeaned);
    }
    let mu = crate::numeric::mean(&returns.values);
    let values = returns.values.iter().map(|v| v - mu).collect();
    Ok(ReturnSeries {
        values,
        mean_removed: true,
        mu,
    })
}

/// Rebuild a price path from `S_0` and log returns (inverse of
/// [`log_returns`], up to rounding).
pub fn prices_from_returns(s0: f64, returns: &ReturnSeries) -> Vec<f64> {
    let mut out = Vec::with_capacity(returns.len() + 1);
    let mut log_price = s0.ln();
    out.push(s0);
    for v in &returns.values {
        log_price += v + returns.mu;
        out.push(log_price.exp());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn log_returns_of_e_powers() {
        let e = std::f64::consts::E;
        let s = PriceSeries::new(vec![1.0, e, e * e], None).unwrap();
        let r = log_returns(&s);
        assert_abs_diff_eq!(r.values()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.values()[1], 1.0, epsilon = 1e-12);
        assert!(!r.mean_removed());
        assert_eq!(r.mu(), 0.0);
    }

    #[test]
    fn log_returns_constant_prices() {
        let s = PriceSeries::new(vec![5.0, 5.0, 5.0], None).unwrap();
        let r = log_returns(&s);
        assert_eq!(r.values(), &[0.0, 0.0]);
    }

    #[test]
    fn log_returns_ten_percent() {
        let s = PriceSeries::new(vec![100.0, 110.0], None).unwrap();
        let r = log_returns(&s);
        assert_abs_diff_eq!(r.values()[0], 0.0953102, epsilon = 1e-7);
    }

    #[test]
    fn non_positive_price_rejected_with_index() {
        let err = PriceSeries::new(vec![1.0, -2.0, 3.0], None).unwrap_err();
        assert_eq!(err, Error::NonPositivePrice { index: 1, value: -2.0 });
        let err = PriceSeries::new(vec![1.0, 0.0], None).unwrap_err();
        assert!(matches!(err, Error::NonPositivePrice { index: 1, .. }));
    }

    #[test]
    fn unordered_timestamps_rejected() {
        let err = PriceSeries::new(vec![1.0, 2.0, 3.0], Some(vec![0, 5, 5])).unwrap_err();
        assert_eq!(err, Error::UnorderedTimestamps { index: 2 });
    }

    #[test]
    fn demean_basic() {
        let r = ReturnSeries::from_values(vec![1.0, 2.0, 3.0]).unwrap();
        let d = demean(&r).unwrap();
        assert_eq!(d.values(), &[-1.0, 0.0, 1.0]);
        assert_abs_diff_eq!(d.mu(), 2.0, epsilon = 1e-15);
        assert!(d.mean_removed());
    }

    #[test]
    fn demean_zero_series() {
        let r = ReturnSeries::from_values(vec![0.0, 0.0]).unwrap();
        let d = demean(&r).unwrap();
        assert_eq!(d.values(), &[0.0, 0.0]);
        assert_eq!(d.mu(), 0.0);
    }

    #[test]
    fn demean_twice_rejected() {
        let r = ReturnSeries::from_values(vec![1.0, 2.0]).unwrap();
        let d = demean(&r).unwrap();
        assert_eq!(demean(&d).unwrap_err(), Error::AlreadyDemeaned);
    }

    #[test]
    fn demean_output_mean_is_zero() {
        let r = ReturnSeries::from_values(vec![0.013, -0.027, 0.004, 0.19, -0.003]).unwrap();
        let d = demean(&r).unwrap();
        let m = crate::numeric::mean(d.values());
        let scale = d.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(m.abs() < 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn price_round_trip() {
        let s = PriceSeries::new(vec![100.0, 103.0, 99.5, 101.25], None).unwrap();
        let r = log_returns(&s);
        let rebuilt = prices_from_returns(100.0, &r);
        for (a, b) in rebuilt.iter().zip(s.prices()) {
            assert!((a - b).abs() / b < 1e-10);
        }
    }
}
