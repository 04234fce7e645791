//! Autocorrelation, semivariogram, and spectral-slope estimators.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::longterm::ols_line;
use crate::series::TimeSeries;

/// Normalized autocovariance r[k] for k = 0..=k_max.
///
/// r[k] = (1 / (N - k)) sum_{n} (x[n] - mu)(x[n+k] - mu) / sigma^2 with
/// the population variance sigma^2, so r[0] = 1 exactly.
///
/// # Errors
/// [`Error::ZeroVariance`] on a constant series, [`Error::TooShort`] if
/// `k_max >= N`.
pub fn acf(x: &TimeSeries, k_max: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if k_max >= n {
        return Err(Error::TooShort {
            need: k_max + 1,
            got: n,
        });
    }
    let mu = x.mean();
    let var = {
        let s = x.std_dev();
        s * s
    };
    if var == 0.0 {
        return Err(Error::ZeroVariance { context: "acf" });
    }
    let v = x.values();
    Ok((0..=k_max)
        .map(|k| {
            let cov: f64 = (0..n - k)
                .map(|i| (v[i] - mu) * (v[i + k] - mu))
                .sum::<f64>()
                / (n - k) as f64;
            cov / var
        })
        .collect())
}

/// Semivariogram with its fitted Hausdorff exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Semivariogram {
    /// Lags 0..=k_max in samples.
    pub lags: Vec<usize>,
    /// gamma[k] per lag; gamma[0] = 0 by convention.
    pub gamma: Vec<f64>,
    /// Hausdorff exponent: half the log-log slope of gamma over lags
    /// 1..=k_max. Absent when fewer than two lags have positive gamma
    /// (for example a constant series).
    pub hausdorff: Option<f64>,
}

/// Matheron semivariogram
/// gamma[k] = (1 / (2 (N - k))) sum_n (x[n+k] - x[n])^2, with the
/// Hausdorff exponent from gamma[k] ~ k^(2 H-hat). The spectral strength
/// is recoverable as beta = 2 H-hat + 1.
///
/// # Errors
/// [`Error::BadScales`] if `k_max` exceeds N / 4 or is zero.
pub fn semivariogram(x: &TimeSeries, k_max: usize) -> Result<Semivariogram> {
    let n = x.len();
    if k_max == 0 || k_max > n / 4 {
        return Err(Error::BadScales {
            reason: format!("k_max must be in 1..=N/4 = {}, got {k_max}", n / 4),
        });
    }
    let v = x.values();
    let mut lags = Vec::with_capacity(k_max + 1);
    let mut gamma = Vec::with_capacity(k_max + 1);
    lags.push(0);
    gamma.push(0.0);
    for k in 1..=k_max {
        let sum: f64 = (0..n - k)
            .map(|i| {
                let d = v[i + k] - v[i];
                d * d
            })
            .sum();
        lags.push(k);
        gamma.push(sum / (2.0 * (n - k) as f64));
    }
    let pts: Vec<(f64, f64)> = lags
        .iter()
        .zip(&gamma)
        .skip(1)
        .filter(|&(_, &g)| g > 0.0)
        .map(|(&k, &g)| ((k as f64).ln(), g.ln()))
        .collect();
    let hausdorff = if pts.len() >= 2 {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        Some(ols_line(&xs, &ys).0 / 2.0)
    } else {
        None
    };
    Ok(Semivariogram {
        lags,
        gamma,
        hausdorff,
    })
}

/// One-sided periodogram of `x`: frequencies k / (N tau) for
/// k = 1..=N/2 and power |X_k|^2 / N (mean removed first).
///
/// # Errors
/// [`Error::TooShort`] below 4 samples.
pub fn periodogram(x: &TimeSeries) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    if n < 4 {
        return Err(Error::TooShort { need: 4, got: n });
    }
    let mu = x.mean();
    let mut buf: Vec<Complex<f64>> = x
        .values()
        .iter()
        .map(|&v| Complex::new(v - mu, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let tau = x.sample_period();
    let freqs = (1..=half).map(|k| k as f64 / (n as f64 * tau)).collect();
    let power = buf[1..=half]
        .iter()
        .map(|c| c.norm_sqr() / n as f64)
        .collect();
    Ok((freqs, power))
}

/// Minimum number of non-empty log-frequency bins for the slope fit.
const MIN_PSD_BINS: usize = 4;
/// Bins requested over the fit range before empty ones are dropped.
const PSD_BIN_COUNT: usize = 24;

/// Spectral persistence strength: beta such that S(f) ~ f^-beta over the
/// lowest `fit_fraction` of nonzero frequencies.
///
/// The periodogram is averaged inside logarithmically spaced frequency
/// bins (bin frequency = geometric mean of its members, bin power =
/// arithmetic mean) before the log-log fit; averaging first keeps the
/// chi-squared scatter of raw periodogram ordinates from biasing the
/// slope.
///
/// # Errors
/// [`Error::TooShort`] below 64 samples, [`Error::InvalidParam`] if
/// `fit_fraction` is outside (0, 1], [`Error::InsufficientPoints`] when
/// fewer than 4 non-empty bins remain.
pub fn psd_beta(x: &TimeSeries, fit_fraction: f64) -> Result<f64> {
    if x.len() < 64 {
        return Err(Error::TooShort {
            need: 64,
            got: x.len(),
        });
    }
    if !(fit_fraction > 0.0 && fit_fraction <= 1.0) {
        return Err(Error::InvalidParam {
            name: "fit_fraction",
            reason: format!("must lie in (0, 1], got {fit_fraction}"),
        });
    }
    let (freqs, power) = periodogram(x)?;
    let keep = ((freqs.len() as f64 * fit_fraction).ceil() as usize).max(2);
    let freqs = &freqs[..keep.min(freqs.len())];
    let power = &power[..freqs.len()];

    let f_lo = freqs[0];
    let f_hi = freqs[freqs.len() - 1];
    let log_span = (f_hi / f_lo).ln();
    let mut bins: Vec<(f64, f64, usize)> = vec![(0.0, 0.0, 0); PSD_BIN_COUNT];
    for (&f, &p) in freqs.iter().zip(power) {
        let t = ((f / f_lo).ln() / log_span * PSD_BIN_COUNT as f64).floor() as usize;
        let b = t.min(PSD_BIN_COUNT - 1);
        bins[b].0 += f.ln();
        bins[b].1 += p;
        bins[b].2 += 1;
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (lf_sum, p_sum, count) in bins {
        if count == 0 {
            continue;
        }
        let mean_p = p_sum / count as f64;
        if mean_p <= 0.0 {
            continue;
        }
        xs.push(lf_sum / count as f64);
        ys.push(mean_p.ln());
    }
    if xs.len() < MIN_PSD_BINS {
        return Err(Error::InsufficientPoints {
            need: MIN_PSD_BINS,
            got: xs.len(),
            context: "log-binned periodogram fit",
        });
    }
    Ok(-ols_line(&xs, &ys).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{simulate, ArmaSpec};
    use crate::synth::{generate, GeneratorKind, GeneratorSpec};

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::from_values(v).unwrap()
    }

    #[test]
    fn acf_lag_zero_is_one() {
        let x = ts(vec![0.4, -1.0, 2.2, 0.9, -0.3]);
        let r = acf(&x, 2).unwrap();
        assert_eq!(r[0], 1.0);
    }

    #[test]
    fn acf_white_noise_uncorrelated() {
        let sim = simulate(&ArmaSpec::standard(vec![], vec![]).unwrap(), 100_000, 8).unwrap();
        let r = acf(&sim.series, 1).unwrap();
        assert!(r[1].abs() < 0.01, "r[1] = {}", r[1]);
    }

    #[test]
    fn acf_red_noise_matches_a() {
        let sim = simulate(&ArmaSpec::red_noise(0.6).unwrap(), 100_000, 14).unwrap();
        let r = acf(&sim.series, 1).unwrap();
        assert!((r[1] - 0.6).abs() < 0.01, "r[1] = {}", r[1]);
    }

    #[test]
    fn acf_guards() {
        assert!(matches!(
            acf(&ts(vec![1.0, 1.0, 1.0]), 1),
            Err(Error::ZeroVariance { .. })
        ));
        assert!(acf(&ts(vec![1.0, 2.0]), 2).is_err());
    }

    #[test]
    fn semivariogram_constant_is_zero() {
        let sv = semivariogram(&ts(vec![5.0; 64]), 8).unwrap();
        assert!(sv.gamma.iter().all(|&g| g == 0.0));
        assert!(sv.hausdorff.is_none());
    }

    #[test]
    fn semivariogram_walk_scales_linearly() {
        // Brownian increments: E[(x[n+k] - x[n])^2] = k, so
        // gamma[k] = k/2 and the log-log slope 2H is 1 (beta = 2).
        let spec = GeneratorSpec {
            kind: GeneratorKind::GaussianWalk {
                mu: 0.0,
                sigma: 1.0,
            },
            n: 1 << 14,
            seed: 3,
        };
        let walk = generate(&spec).unwrap();
        let sv = semivariogram(&walk, 128).unwrap();
        let h = sv.hausdorff.unwrap();
        assert!((h - 0.5).abs() < 0.1, "H-hat = {h}");
        // gamma[16] should be near 16 / 2.
        assert!(
            (sv.gamma[16] / 8.0 - 1.0).abs() < 0.35,
            "gamma[16] = {}",
            sv.gamma[16]
        );
    }

    #[test]
    fn semivariogram_white_noise_is_flat() {
        let sim = simulate(&ArmaSpec::standard(vec![], vec![]).unwrap(), 1 << 14, 21).unwrap();
        let sv = semivariogram(&sim.series, 64).unwrap();
        let h = sv.hausdorff.unwrap();
        assert!(h.abs() < 0.05, "H-hat = {h}");
        // gamma levels off at the variance.
        assert!((sv.gamma[32] - 1.0).abs() < 0.1);
    }

    #[test]
    fn semivariogram_nonnegative_and_guarded() {
        let sim = simulate(&ArmaSpec::red_noise(0.5).unwrap(), 4096, 2).unwrap();
        let sv = semivariogram(&sim.series, 64).unwrap();
        assert!(sv.gamma.iter().all(|&g| g >= 0.0));
        assert_eq!(sv.gamma[0], 0.0);
        assert!(semivariogram(&sim.series, 2000).is_err());
        assert!(semivariogram(&sim.series, 0).is_err());
    }

    #[test]
    fn psd_white_noise_flat() {
        let sim = simulate(&ArmaSpec::standard(vec![], vec![]).unwrap(), 1 << 14, 17).unwrap();
        let beta = psd_beta(&sim.series, 1.0).unwrap();
        assert!(beta.abs() < 0.15, "beta = {beta}");
    }

    #[test]
    fn psd_walk_is_brownian() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::GaussianWalk {
                mu: 0.0,
                sigma: 1.0,
            },
            n: 1 << 14,
            seed: 5,
        };
        let walk = generate(&spec).unwrap();
        let beta = psd_beta(&walk, 0.25).unwrap();
        assert!((beta - 2.0).abs() < 0.2, "beta = {beta}");
    }

    #[test]
    fn psd_guards() {
        let sim = simulate(&ArmaSpec::standard(vec![], vec![]).unwrap(), 128, 1).unwrap();
        assert!(psd_beta(&sim.series, 0.0).is_err());
        assert!(psd_beta(&sim.series, 1.5).is_err());
        let short = ts(vec![1.0; 32]);
        assert!(matches!(
            psd_beta(&short, 1.0),
            Err(Error::TooShort { need: 64, .. })
        ));
    }
}
