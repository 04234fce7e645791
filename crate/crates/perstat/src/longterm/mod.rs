//! Long-range-dependence estimators: autocorrelation, semivariogram,
//! spectral exponent, rescaled range, DFA, MF-DFA, wavelet variance,
//! crossover detection, and conversions between scaling exponents.
//!
//! All estimators reduce to a straight-line fit in log-log space; the
//! shared [`ScalingResult`] carries the (scale, fluctuation) pairs, the
//! fitted exponent, and the fit diagnostics, ready for plotting.

mod correlate;
mod dfa;
mod rs;
mod wavelet;

pub use correlate::{acf, periodogram, psd_beta, semivariogram, Semivariogram};
pub use dfa::{dfa, mfdfa, MfdfaResult, MAX_DFA_ORDER};
pub use rs::hurst_rs;
pub use wavelet::{
    truncate_pow2, wavelet_beta, WaveletResult, MIN_COEFFS_PER_LEVEL, MIN_WAVELET_LEN,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fitted power law F(s) ~ s^exponent over a grid of integer scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    /// Scales in samples, strictly increasing.
    pub scales: Vec<usize>,
    /// Fluctuation value per scale, non-negative.
    pub fluctuations: Vec<f64>,
    /// Slope of ln F vs ln s over the fit range.
    pub exponent: f64,
    /// Scale bounds (inclusive) the exponent was fitted over.
    pub fit_range: (usize, usize),
    /// Sum of squared residuals of the log-log fit.
    pub residual_sse: f64,
    /// Two-regime refinement, when a caller ran [`crossover_fit`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossover: Option<Crossover>,
}

/// Two scaling regimes separated by a breakpoint scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    /// Breakpoint scale in samples.
    pub s_star: usize,
    /// Exponent of the regime below `s_star`.
    pub alpha1: f64,
    /// Exponent of the regime above `s_star`.
    pub alpha2: f64,
    /// Total squared residual of the two-line fit.
    pub sse_two_piece: f64,
    /// Squared residual of the single-line fit over the same points, for
    /// rejecting spurious crossovers.
    pub sse_single: f64,
}

impl ScalingResult {
    pub(crate) fn from_points(scales: Vec<usize>, fluctuations: Vec<f64>) -> Result<Self> {
        let (exponent, _, residual_sse) = fit_loglog(&scales, &fluctuations)?;
        let fit_range = (scales[0], *scales.last().expect("non-empty scales"));
        Ok(Self {
            scales,
            fluctuations,
            exponent,
            fit_range,
            residual_sse,
            crossover: None,
        })
    }
}

/// Ordinary least squares of y on x; returns (slope, intercept, sse).
pub(crate) fn ols_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    (slope, intercept, sse)
}

/// Fits ln F = exponent * ln s + c over strictly positive points.
///
/// # Errors
/// [`Error::InsufficientPoints`] with fewer than two positive
/// fluctuation values.
pub(crate) fn fit_loglog(scales: &[usize], fluct: &[f64]) -> Result<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .zip(fluct)
        .filter(|&(_, &f)| f > 0.0)
        .map(|(&s, &f)| ((s as f64).ln(), f.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientPoints {
            need: 2,
            got: pts.len(),
            context: "log-log fit",
        });
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    Ok(ols_line(&xs, &ys))
}

/// Default scale grid: 20 logarithmically spaced integers from
/// `max(8, m + 2)` to `n / 4`, deduplicated.
///
/// # Errors
/// [`Error::BadScales`] when the series is too short to host the grid.
pub fn default_scales(n: usize, m: usize) -> Result<Vec<usize>> {
    let lo = 8.max(m + 2);
    let hi = n / 4;
    if hi <= lo {
        return Err(Error::BadScales {
            reason: format!("series too short: max scale {hi} not above min scale {lo}"),
        });
    }
    Ok(log_spaced_integers(lo, hi, 20))
}

/// `count` log-spaced integers in `[lo, hi]`, deduplicated, increasing.
pub fn log_spaced_integers(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    assert!(lo >= 1 && hi >= lo && count >= 2);
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            (llo + t * (lhi - llo)).exp().round() as usize
        })
        .map(|s| s.clamp(lo, hi))
        .collect();
    out.dedup();
    out
}

/// Validates a scale grid for a profile-segmentation estimator.
pub(crate) fn validate_scales(scales: &[usize], n: usize, min_scale: usize) -> Result<()> {
    if scales.len() < 2 {
        return Err(Error::BadScales {
            reason: format!("need at least 2 scales, got {}", scales.len()),
        });
    }
    if let Some(w) = scales.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::BadScales {
            reason: format!(
                "scales must be strictly increasing ({} then {})",
                w[0], w[1]
            ),
        });
    }
    let lo = scales[0];
    let hi = *scales.last().expect("non-empty");
    if lo < min_scale {
        return Err(Error::BadScales {
            reason: format!("min scale {lo} below smallest allowed {min_scale}"),
        });
    }
    if hi > n / 4 {
        return Err(Error::BadScales {
            reason: format!("max scale {hi} above N/4 = {}", n / 4),
        });
    }
    Ok(())
}

/// Fits two independent lines in log-log space around every admissible
/// breakpoint and returns the split minimizing total squared residual.
///
/// The breakpoint scale belongs to both segments; candidates need at
/// least 3 points per side; ties resolve to the smaller breakpoint. On a
/// noiseless single power law the two slopes agree and the SSE gain over
/// [`ScalingResult::residual_sse`] is negligible, which is how callers
/// reject spurious crossovers.
///
/// # Errors
/// [`Error::InsufficientPoints`] with fewer than 6 scale points, or when
/// fewer than 6 have positive fluctuation.
pub fn crossover_fit(sr: &ScalingResult) -> Result<Crossover> {
    let pts: Vec<(usize, f64, f64)> = sr
        .scales
        .iter()
        .zip(&sr.fluctuations)
        .filter(|&(_, &f)| f > 0.0)
        .map(|(&s, &f)| (s, (s as f64).ln(), f.ln()))
        .collect();
    if pts.len() < 6 {
        return Err(Error::InsufficientPoints {
            need: 6,
            got: pts.len(),
            context: "crossover fit",
        });
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.2).collect();
    let (_, _, sse_single) = ols_line(&xs, &ys);

    let mut best: Option<Crossover> = None;
    // Breakpoint index b keeps >= 3 points on each side with the shared
    // point counted for both.
    for b in 2..pts.len() - 2 {
        let (sl1, _, sse1) = ols_line(&xs[..=b], &ys[..=b]);
        let (sl2, _, sse2) = ols_line(&xs[b..], &ys[b..]);
        let total = sse1 + sse2;
        let better = match &best {
            None => true,
            // Strict improvement keeps ties at the smaller breakpoint.
            Some(cur) => total < cur.sse_two_piece,
        };
        if better {
            best = Some(Crossover {
                s_star: pts[b].0,
                alpha1: sl1,
                alpha2: sl2,
                sse_two_piece: total,
                sse_single,
            });
        }
    }
    Ok(best.expect("at least one candidate breakpoint"))
}

/// The four interconvertible scaling exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    /// Hurst exponent H.
    H,
    /// DFA exponent alpha (= H over the stationary range).
    Alpha,
    /// Spectral persistence strength beta, S(f) ~ f^-beta = 2H - 1.
    Beta,
    /// Fractal (box) dimension D = 2 - H of the series graph.
    D,
}

/// Converts a scaling exponent between the H / alpha / beta / D
/// conventions, routing through H: alpha = H, beta = 2H - 1, D = 2 - H.
///
/// # Errors
/// [`Error::InvalidParam`] on a non-finite input.
pub fn convert_exponents(value: f64, from: ExponentKind, to: ExponentKind) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidParam {
            name: "value",
            reason: format!("must be finite, got {value}"),
        });
    }
    let h = match from {
        ExponentKind::H | ExponentKind::Alpha => value,
        ExponentKind::Beta => (value + 1.0) / 2.0,
        ExponentKind::D => 2.0 - value,
    };
    Ok(match to {
        ExponentKind::H | ExponentKind::Alpha => h,
        ExponentKind::Beta => 2.0 * h - 1.0,
        ExponentKind::D => 2.0 - h,
    })
}
