//! Stationary Gaussian field synthesis for the log-volatility process.
//!
//! Two routes produce zero-mean samples with covariance
//! `c(k) = lambda2 * ln(horizon / (k + 1))` for `k < horizon`, else 0:
//!
//! * circulant embedding with an FFT, `O(n log n)`, used at battery scale;
//! * dense Cholesky factorization of the covariance matrix, exact and simple,
//!   used for short series and as the cross-check route in tests.
//!
//! Both must agree in distribution; the ensemble-covariance test in this
//! module's suite checks that on overlapping sizes.

use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};

/// Series length at or above which synthesis switches to the FFT route.
pub const CIRCULANT_THRESHOLD: usize = 4096;

/// Relative size of a negative embedding eigenvalue that is still treated as
/// rounding noise and clamped to zero.
const EIGENVALUE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisRoute {
    Auto,
    Dense,
    Circulant,
}

/// Truncated logarithmic covariance of the log-volatility process.
pub fn log_vol_covariance(lambda2: f64, horizon: usize, lag: usize) -> f64 {
    if lag >= horizon {
        0.0
    } else {
        lambda2 * (horizon as f64 / (lag + 1) as f64).ln()
    }
}

/// Draw one zero-mean realization of length `n`.
pub fn sample_log_vol_field(
    n: usize,
    lambda2: f64,
    horizon: usize,
    rng: &mut impl Rng,
    route: SynthesisRoute,
) -> Result<Vec<f64>> {
    if !(lambda2 >= 0.0 && lambda2.is_finite()) {
        return Err(Error::invalid("lambda2", "must be finite and non-negative"));
    }
    if horizon == 0 {
        return Err(Error::invalid("horizon", "must be at least 1"));
    }
    if lambda2 == 0.0 || horizon == 1 {
        // Degenerate covariance: the field is identically zero.
        return Ok(vec![0.0; n]);
    }
    let use_circulant = match route {
        SynthesisRoute::Auto => n >= CIRCULANT_THRESHOLD,
        SynthesisRoute::Dense => false,
        SynthesisRoute::Circulant => true,
    };
    if use_circulant {
        circulant_sample(n, lambda2, horizon, rng)
    } else {
        dense_sample(n, lambda2, horizon, rng)
    }
}

fn dense_sample(n: usize, lambda2: f64, horizon: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let cov = DMatrix::from_fn(n, n, |i, j| {
        log_vol_covariance(lambda2, horizon, i.abs_diff(j))
    });
    let chol = match Cholesky::new(cov.clone()) {
        Some(c) => c,
        None => {
            // Rounding can push the smallest eigenvalue marginally negative;
            // retry once with a tiny diagonal jitter.
            let jitter = 1e-12 * log_vol_covariance(lambda2, horizon, 0).max(1e-300);
            let jittered = cov + DMatrix::identity(n, n) * jitter;
            Cholesky::new(jittered).ok_or_else(|| {
                Error::Numerical("log-volatility covariance is not positive definite".into())
            })?
        }
    };
    let z = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
    Ok((chol.l() * z).iter().copied().collect())
}

fn circulant_sample(
    n: usize,
    lambda2: f64,
    horizon: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let m = (2 * n.max(2)).next_power_of_two();
    // Symmetric circular extension of the covariance sequence.
    let mut s: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let lag = j.min(m - j);
            Complex::new(log_vol_covariance(lambda2, horizon, lag), 0.0)
        })
        .collect();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut s);

    let max_eig = s.iter().fold(0.0f64, |a, e| a.max(e.re));
    let mut spectrum = Vec::with_capacity(m);
    for e in &s {
        if e.re < -EIGENVALUE_SLACK * max_eig {
            return Err(Error::Numerical(format!(
                "circulant embedding produced a negative eigenvalue ({});\
                 covariance not embeddable at this size",
                e.re
            )));
        }
        spectrum.push(e.re.max(0.0));
    }

    // w_k = sqrt(e_k / m) * (a_k + i b_k); the real part of FFT(w) has the
    // target covariance.
    let mut w: Vec<Complex<f64>> = spectrum
        .iter()
        .map(|&e| {
            let scale = (e / m as f64).sqrt();
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            Complex::new(a * scale, b * scale)
        })
        .collect();
    fft.process(&mut w);
    Ok(w.iter().take(n).map(|z| z.re).collect())
}
