//! Synthetic series of known distributional structure: standardized i.i.d.
//! noises and the multifractal random walk (MRW), plus the analytic
//! intrinsic deviation of each noise kind from the standard normal.
//!
//! All noise variants are standardized to mean 0 and variance 1, so
//! deviations measured downstream are shape effects only.

pub mod field;

use crate::decomposer::Decomposition;
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, normal_cdf, normal_pdf};
use crate::rng::{derive_rng, domain};
use crate::series::ReturnSeries;
use field::{sample_log_vol_field, SynthesisRoute};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Triangular, Uniform};
use serde::{Deserialize, Serialize};

/// Half-width of the unit-variance rectangular support.
pub const RECT_HALF_WIDTH: f64 = 1.732_050_807_568_877_2; // sqrt(3)
/// Half-width of the unit-variance symmetric triangular support.
pub const TRI_HALF_WIDTH: f64 = 2.449_489_742_783_178; // sqrt(6)

// Skew triangle: base shape on [0, 3] with mode at 1 (left third of the
// support), then standardized. Mean 4/3, variance 7/18.
const SKEW_SCALE: f64 = 1.603_567_451_474_546_8; // sqrt(18/7)
const SKEW_MEAN: f64 = 4.0 / 3.0;

/// Standardized noise distributions used by the validation battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    Rectangular,
    Triangular,
    SkewTriangular,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 4] = [
        NoiseKind::Gaussian,
        NoiseKind::Rectangular,
        NoiseKind::Triangular,
        NoiseKind::SkewTriangular,
    ];

    fn stream_id(self) -> u64 {
        match self {
            NoiseKind::Gaussian => 0,
            NoiseKind::Rectangular => 1,
            NoiseKind::Triangular => 2,
            NoiseKind::SkewTriangular => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Rectangular => "rectangular",
            NoiseKind::Triangular => "triangular",
            NoiseKind::SkewTriangular => "skew_triangular",
        }
    }

    /// Support of the standardized density (gaussian support is unbounded).
    pub fn support(self) -> (f64, f64) {
        match self {
            NoiseKind::Gaussian => (f64::NEG_INFINITY, f64::INFINITY),
            NoiseKind::Rectangular => (-RECT_HALF_WIDTH, RECT_HALF_WIDTH),
            NoiseKind::Triangular => (-TRI_HALF_WIDTH, TRI_HALF_WIDTH),
            NoiseKind::SkewTriangular => {
                ((0.0 - SKEW_MEAN) * SKEW_SCALE, (3.0 - SKEW_MEAN) * SKEW_SCALE)
            }
        }
    }

    /// Analytic density of the standardized variant.
    pub fn density(self, x: f64) -> f64 {
        match self {
            NoiseKind::Gaussian => normal_pdf(x),
            NoiseKind::Rectangular => {
                if x.abs() <= RECT_HALF_WIDTH {
                    1.0 / (2.0 * RECT_HALF_WIDTH)
                } else {
                    0.0
                }
            }
            NoiseKind::Triangular => {
                let a = TRI_HALF_WIDTH;
                if x.abs() <= a {
                    (a - x.abs()) / (a * a)
                } else {
                    0.0
                }
            }
            NoiseKind::SkewTriangular => {
                // Map back to the base triangle on [0, 3] with mode 1.
                let u = x / SKEW_SCALE + SKEW_MEAN;
                let base = if (0.0..=1.0).contains(&u) {
                    2.0 * u / 3.0
                } else if (1.0..=3.0).contains(&u) {
                    (3.0 - u) / 3.0
                } else {
                    0.0
                };
                base / SKEW_SCALE
            }
        }
    }

    /// Analytic CDF of the standardized variant.
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            NoiseKind::Gaussian => normal_cdf(x),
            NoiseKind::Rectangular => {
                ((x + RECT_HALF_WIDTH) / (2.0 * RECT_HALF_WIDTH)).clamp(0.0, 1.0)
            }
            NoiseKind::Triangular => {
                let a = TRI_HALF_WIDTH;
                if x <= -a {
                    0.0
                } else if x < 0.0 {
                    (a + x) * (a + x) / (2.0 * a * a)
                } else if x < a {
                    1.0 - (a - x) * (a - x) / (2.0 * a * a)
                } else {
                    1.0
                }
            }
            NoiseKind::SkewTriangular => {
                let u = x / SKEW_SCALE + SKEW_MEAN;
                if u <= 0.0 {
                    0.0
                } else if u <= 1.0 {
                    u * u / 3.0
                } else if u < 3.0 {
                    1.0 - (3.0 - u) * (3.0 - u) / 6.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Density breakpoints (support edges and modes) where the integrand of
    /// the deviation quadrature has kinks.
    fn breakpoints(self) -> Vec<f64> {
        match self {
            NoiseKind::Gaussian => vec![],
            NoiseKind::Rectangular => vec![-RECT_HALF_WIDTH, RECT_HALF_WIDTH],
            NoiseKind::Triangular => vec![-TRI_HALF_WIDTH, 0.0, TRI_HALF_WIDTH],
            NoiseKind::SkewTriangular => {
                let (lo, hi) = self.support();
                vec![lo, (1.0 - SKEW_MEAN) * SKEW_SCALE, hi]
            }
        }
    }

    fn sample_into(self, rng: &mut impl Rng, out: &mut Vec<f64>, n: usize) {
        match self {
            NoiseKind::Gaussian => {
                out.extend((0..n).map(|_| -> f64 { StandardNormal.sample(rng) }))
            }
            NoiseKind::Rectangular => {
                let u = Uniform::new(-RECT_HALF_WIDTH, RECT_HALF_WIDTH).expect("valid support");
                out.extend((0..n).map(|_| u.sample(rng)));
            }
            NoiseKind::Triangular => {
                let t = Triangular::new(-TRI_HALF_WIDTH, TRI_HALF_WIDTH, 0.0)
                    .expect("valid support");
                out.extend((0..n).map(|_| t.sample(rng)));
            }
            NoiseKind::SkewTriangular => {
                let (lo, hi) = self.support();
                let mode = (1.0 - SKEW_MEAN) * SKEW_SCALE;
                let t = Triangular::new(lo, hi, mode).expect("valid support");
                out.extend((0..n).map(|_| t.sample(rng)));
            }
        }
    }
}

/// Parameters of a multifractal random walk realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MrwParams {
    pub n: usize,
    /// Intermittency: variance scale of the log-volatility covariance.
    pub lambda2: f64,
    /// Correlation range of the log volatility, in steps.
    pub horizon: usize,
    pub noise: NoiseKind,
    pub seed: u64,
}

impl MrwParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::TooShort {
                required: 2,
                actual: self.n,
            });
        }
        if !(self.lambda2 >= 0.0 && self.lambda2.is_finite()) {
            return Err(Error::invalid("lambda2", "must be finite and non-negative"));
        }
        if self.horizon == 0 || self.horizon > self.n {
            return Err(Error::invalid(
                "horizon",
                format!("must lie in [1, n]; got {} with n = {}", self.horizon, self.n),
            ));
        }
        Ok(())
    }
}

/// `n` i.i.d. draws of a standardized noise kind; bit-deterministic per
/// `(kind, n, seed)`.
pub fn gen_noise(kind: NoiseKind, n: usize, seed: u64) -> Result<ReturnSeries> {
    if n < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: n,
        });
    }
    let mut rng = derive_rng(seed, &[domain::NOISE, kind.stream_id()]);
    let mut values = Vec::with_capacity(n);
    kind.sample_into(&mut rng, &mut values, n);
    ReturnSeries::from_values(values)
}

/// A multifractal random walk realization together with its ground-truth
/// decomposition.
///
/// Returns `r_i = sigma_i * eps_i` where `ln sigma` is a stationary Gaussian
/// field with covariance `lambda2 * ln(horizon/(|i-j|+1))` inside the horizon
/// and mean chosen so that `E[sigma^2] = 1`, and `eps` are i.i.d. draws of
/// the requested noise kind. `lambda2 = 0` degenerates to the pure noise with
/// unit volatility.
pub fn gen_mrw(params: &MrwParams) -> Result<(ReturnSeries, Decomposition)> {
    params.validate()?;
    let MrwParams {
        n,
        lambda2,
        horizon,
        noise,
        seed,
    } = *params;

    let mut field_rng = derive_rng(seed, &[domain::MRW_FIELD]);
    let mut omega = sample_log_vol_field(n, lambda2, horizon, &mut field_rng, SynthesisRoute::Auto)?;
    // E[omega] = -Var(omega) makes E[sigma^2] = 1.
    let mean_shift = -field::log_vol_covariance(lambda2, horizon, 0);
    for w in &mut omega {
        *w += mean_shift;
    }

    let mut noise_rng = derive_rng(seed, &[domain::MRW_NOISE, noise.stream_id()]);
    let mut eps = Vec::with_capacity(n);
    noise.sample_into(&mut noise_rng, &mut eps, n);

    let sigma: Vec<f64> = omega.iter().map(|w| w.exp()).collect();
    let r: Vec<f64> = sigma.iter().zip(&eps).map(|(s, e)| s * e).collect();

    let decomposition = Decomposition::from_parts(sigma, eps, 0.0)?;
    Ok((ReturnSeries::from_values(r)?, decomposition))
}

/// Deviation of a standardized noise density from the standard normal:
/// half the integrated absolute density difference, by adaptive quadrature
/// on the analytic densities (no sampling). Exactly 0 for the gaussian kind.
pub fn intrinsic_deviation(kind: NoiseKind) -> f64 {
    if kind == NoiseKind::Gaussian {
        return 0.0;
    }
    // Quadrature range covers every bounded support; outside it the normal
    // tail mass is ~1e-19 and the noise density is zero.
    const RANGE: f64 = 9.0;
    let mut points = vec![-RANGE, RANGE];
    points.extend(kind.breakpoints());
    points.retain(|p| p.abs() <= RANGE);
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup();

    let mut integral = 0.0;
    for pair in points.windows(2) {
        integral += adaptive_simpson(
            |x| (normal_pdf(x) - kind.density(x)).abs(),
            pair[0],
            pair[1],
            1e-12,
        );
    }
    0.5 * integral
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn noise_is_deterministic_per_seed() {
        for kind in NoiseKind::ALL {
            let a = gen_noise(kind, 64, 123).unwrap();
            let b = gen_noise(kind, 64, 123).unwrap();
            assert_eq!(a.values(), b.values());
            let c = gen_noise(kind, 64, 124).unwrap();
            assert_ne!(a.values(), c.values());
        }
    }

    #[test]
    fn gaussian_moments_at_scale() {
        let series = gen_noise(NoiseKind::Gaussian, 200_000, 42).unwrap();
        let m = crate::numeric::mean(series.values());
        let v = crate::numeric::population_variance(series.values());
        assert!(m.abs() < 0.01, "mean {m}");
        assert!((v - 1.0).abs() < 0.02, "variance {v}");
    }

    #[test]
    fn rectangular_support_bound() {
        let series = gen_noise(NoiseKind::Rectangular, 50_000, 7).unwrap();
        assert!(series
            .values()
            .iter()
            .all(|v| v.abs() <= RECT_HALF_WIDTH));
    }

    #[test]
    fn triangular_support_bound() {
        let series = gen_noise(NoiseKind::Triangular, 50_000, 7).unwrap();
        assert!(series.values().iter().all(|v| v.abs() <= TRI_HALF_WIDTH));
    }

    /// Every analytic density must integrate to 1 with variance 1.
    /// Integration is split at the support breakpoints; sampling a bounded
    /// support only at far-out points would alias it to zero.
    #[test]
    fn densities_are_standardized() {
        for kind in NoiseKind::ALL {
            let mut points = vec![-9.0, 0.0, 9.0];
            points.extend(kind.breakpoints());
            points.sort_by(|a, b| a.total_cmp(b));
            points.dedup();
            let integrate = |f: &dyn Fn(f64) -> f64| -> f64 {
                points
                    .windows(2)
                    .map(|p| adaptive_simpson(f, p[0], p[1], 1e-10))
                    .sum()
            };
            let mass = integrate(&|x| kind.density(x));
            let mean = integrate(&|x| x * kind.density(x));
            let var = integrate(&|x| x * x * kind.density(x));
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
            assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-8);
            assert_abs_diff_eq!(var, 1.0, epsilon = 1e-8);
        }
    }

    /// CDFs must differentiate back to the densities.
    #[test]
    fn cdf_consistent_with_density() {
        for kind in NoiseKind::ALL {
            for &x in &[-2.5, -1.3, -0.4, 0.0, 0.6, 1.1, 2.4] {
                let h = 1e-6;
                let num = (kind.cdf(x + h) - kind.cdf(x - h)) / (2.0 * h);
                assert_abs_diff_eq!(num, kind.density(x), epsilon = 1e-5);
            }
        }
    }

    /// Independent oracle for the intrinsic deviation: locate the crossings
    /// of the two densities by bisection and sum analytic CDF differences
    /// between them.
    fn deviation_by_cdf_crossings(kind: NoiseKind) -> f64 {
        let f = |x: f64| normal_pdf(x) - kind.density(x);
        let mut knots = vec![-9.0];
        knots.extend(kind.breakpoints());
        knots.push(9.0);
        knots.sort_by(|a, b| a.total_cmp(b));
        knots.dedup();

        // Scan for sign changes on a fine grid inside each smooth segment.
        let mut crossings = vec![-9.0];
        for pair in knots.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let steps = 4000;
            let mut prev_x = a;
            let mut prev_f = f(a);
            for i in 1..=steps {
                let x = a + (b - a) * i as f64 / steps as f64;
                let fx = f(x);
                if prev_f * fx < 0.0 {
                    let (mut lo, mut hi) = (prev_x, x);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if f(lo) * f(mid) > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    crossings.push(0.5 * (lo + hi));
                }
                prev_x = x;
                prev_f = fx;
            }
            crossings.push(b);
        }
        crossings.sort_by(|a, b| a.total_cmp(b));
        crossings.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

        let mut total = 0.0;
        for pair in crossings.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let normal_mass = normal_cdf(b) - normal_cdf(a);
            let kind_mass = kind.cdf(b) - kind.cdf(a);
            total += (normal_mass - kind_mass).abs();
        }
        0.5 * total
    }

    #[test]
    fn intrinsic_deviation_matches_cdf_oracle() {
        for kind in NoiseKind::ALL {
            let quad = intrinsic_deviation(kind);
            let oracle = deviation_by_cdf_crossings(kind);
            assert_abs_diff_eq!(quad, oracle, epsilon = 1e-7);
        }
    }

    #[test]
    fn intrinsic_deviation_reference_values() {
        assert_eq!(intrinsic_deviation(NoiseKind::Gaussian), 0.0);
        // 0.1977 for the unit-variance rectangular density.
        assert_abs_diff_eq!(
            intrinsic_deviation(NoiseKind::Rectangular),
            0.1977,
            epsilon = 1e-3
        );
        assert_abs_diff_eq!(
            intrinsic_deviation(NoiseKind::Triangular),
            0.051,
            epsilon = 1e-3
        );
    }

    #[test]
    fn mrw_zero_lambda_degenerates_to_noise() {
        let params = MrwParams {
            n: 1000,
            lambda2: 0.0,
            horizon: 100,
            noise: NoiseKind::Gaussian,
            seed: 5,
        };
        let (series, truth) = gen_mrw(&params).unwrap();
        assert!(truth.sigma().iter().all(|&s| s == 1.0));
        assert_eq!(series.values(), truth.dw());
    }

    #[test]
    fn mrw_reconstructs_exactly() {
        let params = MrwParams {
            n: 2000,
            lambda2: 0.04,
            horizon: 250,
            noise: NoiseKind::Rectangular,
            seed: 8,
        };
        let (series, truth) = gen_mrw(&params).unwrap();
        for ((r, s), e) in series.values().iter().zip(truth.sigma()).zip(truth.dw()) {
            assert_eq!(*r, s * e);
        }
    }

    #[test]
    fn mrw_heavy_tails_with_gaussian_noise() {
        let params = MrwParams {
            n: 65536,
            lambda2: 0.05,
            horizon: 1000,
            noise: NoiseKind::Gaussian,
            seed: 21,
        };
        let (series, _) = gen_mrw(&params).unwrap();
        let v = series.values();
        let m = crate::numeric::mean(v);
        let var = crate::numeric::population_variance(v);
        let kurt = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / (v.len() as f64 * var * var);
        assert!(kurt > 3.0, "kurtosis {kurt}");
    }

    #[test]
    fn mrw_rejects_bad_horizon() {
        let params = MrwParams {
            n: 100,
            lambda2: 0.02,
            horizon: 101,
            noise: NoiseKind::Gaussian,
            seed: 0,
        };
        assert!(gen_mrw(&params).is_err());
    }

    /// Ensemble log-volatility autocovariance against the analytic target
    /// over 100 realizations at battery scale.
    #[test]
    fn mrw_log_vol_matches_covariance() {
        let lambda2 = 0.05;
        let horizon = 1000;
        let n = 12000;
        let lags = [1usize, 10, 100, 500];
        let mut acc = [0.0f64; 4];
        let mut var_acc = 0.0f64;
        let realizations = 100;
        for rep in 0..realizations {
            let params = MrwParams {
                n,
                lambda2,
                horizon,
                noise: NoiseKind::Gaussian,
                seed: 3000 + rep,
            };
            let (_, truth) = gen_mrw(&params).unwrap();
            let omega: Vec<f64> = truth.sigma().iter().map(|s| s.ln()).collect();
            let mean = -field::log_vol_covariance(lambda2, horizon, 0);
            var_acc += omega.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / n as f64;
            for (li, &lag) in lags.iter().enumerate() {
                let mut s = 0.0;
                for i in 0..(n - lag) {
                    s += (omega[i] - mean) * (omega[i + lag] - mean);
                }
                acc[li] += s / (n - lag) as f64;
            }
        }
        let var_est = var_acc / realizations as f64;
        let var_target = field::log_vol_covariance(lambda2, horizon, 0);
        assert!(
            (var_est - var_target).abs() < 0.05 * var_target,
            "variance {var_est} vs {var_target}"
        );
        for (li, &lag) in lags.iter().enumerate() {
            let est = acc[li] / realizations as f64;
            let target = field::log_vol_covariance(lambda2, horizon, lag);
            assert!(
                (est - target).abs() < 0.012,
                "lag {lag}: covariance {est} vs {target}"
            );
        }
    }
}
