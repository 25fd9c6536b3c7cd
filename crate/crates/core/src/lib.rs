//! Decomposition of nonlinear time series into a local-volatility path and a
//! residual noise process, with quantitative measures of how far each part
//! deviates from a Wiener process.
//!
//! The pipeline implemented here:
//!
//! 1. [`series`] — log-return transforms and mean removal.
//! 2. [`decomposer`] — moving-window volatility seeding followed by a
//!    genetic-algorithm search for the per-step volatility path that makes
//!    both the noise increments and the log-volatility increments as
//!    Gaussian as possible.
//! 3. [`distributions`] — histogram densities on a fixed standardized grid,
//!    the overlap-deviation metric between densities, and a one-sample
//!    Kolmogorov-Smirnov test against the standard normal.
//! 4. [`fractal`] — structure-function moments `M(q,T)`, scaling exponents
//!    `f(q)`, Hurst exponent and mono/multifractal classification.
//! 5. [`correlations`] — linear and nonlinear autocorrelations and
//!    sign-conditioned leverage cross-correlations.
//! 6. [`generators`] — synthetic i.i.d. noises and the multifractal random
//!    walk, with ground-truth decompositions for validation.
//!
//! All randomized operations are deterministic given their seed, and results
//! do not depend on the number of worker threads.

pub mod correlations;
pub mod decomposer;
pub mod distributions;
pub mod error;
pub mod fractal;
pub mod generators;
pub mod numeric;
pub mod rng;
pub mod series;

pub use error::{Error, Result};
