//! Spectral-strength estimation from Haar wavelet detail variances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::longterm::ols_line;
use crate::series::{population_std, TimeSeries};

/// Smallest input accepted by [`wavelet_beta`].
pub const MIN_WAVELET_LEN: usize = 64;
/// Levels enter the fit only with at least this many detail coefficients.
pub const MIN_COEFFS_PER_LEVEL: usize = 8;

/// Per-level detail variances and the fitted spectral strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletResult {
    /// Decomposition levels k (1 = finest) that entered the fit.
    pub levels: Vec<usize>,
    /// Population variance of the level-k detail coefficients.
    pub variances: Vec<f64>,
    /// Slope of log2(variance) vs level: the spectral strength beta of
    /// S(f) ~ f^-beta.
    pub beta: f64,
}

/// Estimates beta from the orthonormal Haar wavelet transform.
///
/// The pyramid step maps pairs to one approximation (sum / sqrt 2) and
/// one detail (difference / sqrt 2) coefficient. For an f^-beta process
/// the level-k detail variance grows as 2^(k beta), so the log2-variance
/// vs level line has slope beta: flat for white noise, slope 2 for a
/// random walk. Only levels with at least [`MIN_COEFFS_PER_LEVEL`]
/// coefficients enter the fit; levels with zero variance are skipped.
///
/// # Errors
/// [`Error::TooShort`] below [`MIN_WAVELET_LEN`] samples,
/// [`Error::NotPowerOfTwo`] for a non-power-of-two length (see
/// [`truncate_pow2`]), [`Error::ZeroVariance`] when fewer than two
/// levels have positive variance.
pub fn wavelet_beta(x: &TimeSeries) -> Result<WaveletResult> {
    let n = x.len();
    if n < MIN_WAVELET_LEN {
        return Err(Error::TooShort {
            need: MIN_WAVELET_LEN,
            got: n,
        });
    }
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: n });
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut approx = x.values().to_vec();
    let mut levels = Vec::new();
    let mut variances = Vec::new();
    let mut k = 0usize;
    while approx.len() / 2 >= MIN_COEFFS_PER_LEVEL {
        k += 1;
        let half = approx.len() / 2;
        let mut details = Vec::with_capacity(half);
        for i in 0..half {
            let a = approx[2 * i];
            let b = approx[2 * i + 1];
            details.push((a - b) * inv_sqrt2);
            approx[i] = (a + b) * inv_sqrt2;
        }
        approx.truncate(half);
        let sd = population_std(&details);
        if sd > 0.0 {
            levels.push(k);
            variances.push(sd * sd);
        }
    }
    if levels.len() < 2 {
        return Err(Error::ZeroVariance {
            context: "wavelet_beta",
        });
    }
    let xs: Vec<f64> = levels.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = variances.iter().map(|&v| v.log2()).collect();
    let (beta, _, _) = ols_line(&xs, &ys);
    Ok(WaveletResult {
        levels,
        variances,
        beta,
    })
}

/// Truncates a series to the largest power-of-two length, the default way
/// to feed arbitrary-length input to [`wavelet_beta`].
///
/// # Errors
/// [`Error::TooShort`] when the input has no samples to keep (never, by
/// the container invariant).
pub fn truncate_pow2(x: &TimeSeries) -> Result<TimeSeries> {
    let n = x.len();
    let keep = if n.is_power_of_two() {
        n
    } else {
        n.next_power_of_two() / 2
    };
    TimeSeries::new(x.values()[..keep].to_vec(), x.sample_period(), x.label())
}
