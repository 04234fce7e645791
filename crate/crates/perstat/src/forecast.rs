//! Persistence-based forecasting baselines.
//!
//! The naive persistence forecast NV_k predicts the mean of the last `k`
//! observations. The four CS-NV blends combine NV_k with an externally
//! supplied clear-sky series CS:
//!
//! ```text
//! CS-NV1[n] = (CS[n] + NV_k[n]) / 2
//! CS-NV2[n] = alpha * CS[n] + beta * NV_k[n]
//! CS-NV3[n] = sqrt(CS[n] * NV_k[n])
//! CS-NV4[n] = sqrt(alpha * CS[n] * beta * NV_k[n])
//! ```
//!
//! Some published statements of these blends wrap each right-hand side in
//! an outer (1/k) sum over j = 1..k of a j-independent summand; that
//! wrapper is the identity and is omitted here.
//!
//! Points without `k` samples of history, and points where a geometric
//! blend has a negative radicand, are marked invalid rather than clamped;
//! [`evaluate`] scores valid points only and reports the invalid count.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Which forecasting baseline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Pure naive persistence NV_k.
    Nv,
    /// Arithmetic mean of clear-sky and NV_k.
    CsNv1,
    /// Weighted blend alpha*CS + beta*NV_k.
    CsNv2,
    /// Geometric mean sqrt(CS * NV_k).
    CsNv3,
    /// Weighted geometric blend sqrt(alpha*CS * beta*NV_k).
    CsNv4,
}

impl Variant {
    /// Canonical lowercase name (`nv`, `cs-nv1`, ...).
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Variant::Nv => "nv",
            Variant::CsNv1 => "cs-nv1",
            Variant::CsNv2 => "cs-nv2",
            Variant::CsNv3 => "cs-nv3",
            Variant::CsNv4 => "cs-nv4",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nv" => Ok(Variant::Nv),
            "cs-nv1" => Ok(Variant::CsNv1),
            "cs-nv2" => Ok(Variant::CsNv2),
            "cs-nv3" => Ok(Variant::CsNv3),
            "cs-nv4" => Ok(Variant::CsNv4),
            other => Err(Error::SpecParse {
                what: "forecast variant",
                reason: format!("unknown variant `{other}` (expected nv or cs-nv1..cs-nv4)"),
            }),
        }
    }
}

/// Baseline selection plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    /// Baseline to run.
    pub variant: Variant,
    /// Lookback window length; at least 1.
    pub k: usize,
    /// Clear-sky weight (variants 2 and 4; ignored otherwise).
    pub alpha: f64,
    /// Persistence weight (variants 2 and 4; ignored otherwise).
    pub beta: f64,
}

impl ForecastConfig {
    /// Config with unit blend weights.
    ///
    /// # Errors
    /// [`Error::InvalidParam`] if `k == 0`.
    pub fn new(variant: Variant, k: usize) -> Result<Self> {
        Self::weighted(variant, k, 1.0, 1.0)
    }

    /// Config with explicit blend weights for CS-NV2 / CS-NV4.
    ///
    /// # Errors
    /// [`Error::InvalidParam`] if `k == 0` or a weight is non-finite.
    pub fn weighted(variant: Variant, k: usize, alpha: f64, beta: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParam {
                name: "k",
                reason: "lookback must be at least 1".into(),
            });
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParam {
                name: "alpha/beta",
                reason: format!("blend weights must be finite, got ({alpha}, {beta})"),
            });
        }
        Ok(Self {
            variant,
            k,
            alpha,
            beta,
        })
    }
}

/// Why a prediction point carries no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidReason {
    /// Fewer than `k` observations precede the point.
    InsufficientHistory,
    /// Geometric blend radicand was negative (or the result non-finite).
    NegativeRadicand,
}

/// Per-point record of an invalid prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvalidPoint {
    /// Sample index of the skipped prediction.
    pub index: usize,
    /// Why it was skipped.
    pub reason: InvalidReason,
}

/// Prediction vector with a validity mask.
///
/// `predictions[i]` is NaN exactly where `valid[i]` is false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    /// One prediction per input sample; NaN at invalid points.
    pub predictions: Vec<f64>,
    /// Validity mask, aligned with `predictions`.
    pub valid: Vec<bool>,
    /// Record of every invalid point, in index order.
    pub invalid_points: Vec<InvalidPoint>,
}

impl Forecast {
    /// Number of invalid points.
    #[must_use]
    pub fn n_invalid(&self) -> usize {
        self.invalid_points.len()
    }

    /// Number of valid points.
    #[must_use]
    pub fn n_valid(&self) -> usize {
        self.valid.len() - self.invalid_points.len()
    }
}

/// Error summary of a forecast against observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastScore {
    /// Mean absolute error over valid points.
    pub mae: f64,
    /// Root mean square error over valid points.
    pub rmse: f64,
    /// Points scored.
    pub n_valid: usize,
    /// Points excluded (insufficient history or bad radicand).
    pub n_invalid: usize,
}

/// Naive persistence value at 0-based target index `i`: the mean of the
/// `k` observations `x[i-k..i]`.
///
/// # Errors
/// [`Error::InvalidParam`] for `k == 0` or `i` out of range;
/// [`Error::InsufficientPoints`] when fewer than `k` samples precede `i`.
pub fn nv_k(x: &TimeSeries, k: usize, i: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParam {
            name: "k",
            reason: "lookback must be at least 1".into(),
        });
    }
    if i >= x.len() {
        return Err(Error::InvalidParam {
            name: "i",
            reason: format!("target index {i} out of range for length {}", x.len()),
        });
    }
    if i < k {
        return Err(Error::InsufficientPoints {
            need: k,
            got: i,
            context: "nv_k history",
        });
    }
    let window = &x.values()[i - k..i];
    Ok(window.iter().sum::<f64>() / k as f64)
}

/// Runs the configured baseline over aligned clear-sky and observation
/// series, producing one prediction per sample.
///
/// The first `k` points have insufficient history and are invalid; for
/// the geometric variants, points with a negative radicand are invalid.
/// All CS-NV variants read the clear-sky value at the target index and
/// the NV_k average of the `k` preceding observations.
///
/// # Errors
/// [`Error::InvalidParam`] for a zero `k`, non-finite weights, or
/// mismatched series lengths; [`Error::TooShort`] when no point has `k`
/// samples of history.
pub fn predict(cfg: &ForecastConfig, cs: &TimeSeries, obs: &TimeSeries) -> Result<Forecast> {
    let cfg = ForecastConfig::weighted(cfg.variant, cfg.k, cfg.alpha, cfg.beta)?;
    if cs.len() != obs.len() {
        return Err(Error::InvalidParam {
            name: "cs/obs",
            reason: format!(
                "clear-sky and observation lengths differ ({} vs {})",
                cs.len(),
                obs.len()
            ),
        });
    }
    let n = obs.len();
    if n <= cfg.k {
        return Err(Error::TooShort {
            need: cfg.k + 1,
            got: n,
        });
    }
    // CS-NV1 routes through the same weighted-sum expression as CS-NV2 so
    // that CS-NV2 with alpha = beta = 0.5 is bit-identical to CS-NV1.
    let (alpha, beta) = match cfg.variant {
        Variant::CsNv1 => (0.5, 0.5),
        _ => (cfg.alpha, cfg.beta),
    };
    let mut predictions = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    let mut invalid_points = Vec::new();
    let mut mark_invalid = |i: usize, reason: InvalidReason| {
        invalid_points.push(InvalidPoint { index: i, reason });
        (f64::NAN, false)
    };
    for i in 0..n {
        let (p, ok) = if i < cfg.k {
            mark_invalid(i, InvalidReason::InsufficientHistory)
        } else {
            let window = &obs.values()[i - cfg.k..i];
            let nv = window.iter().sum::<f64>() / cfg.k as f64;
            let c = cs.values()[i];
            let value = match cfg.variant {
                Variant::Nv => nv,
                Variant::CsNv1 | Variant::CsNv2 => alpha * c + beta * nv,
                Variant::CsNv3 => (c * nv).sqrt(),
                Variant::CsNv4 => ((alpha * c) * (beta * nv)).sqrt(),
            };
            if value.is_finite() {
                (value, true)
            } else {
                mark_invalid(i, InvalidReason::NegativeRadicand)
            }
        };
        predictions.push(p);
        valid.push(ok);
    }
    Ok(Forecast {
        predictions,
        valid,
        invalid_points,
    })
}

/// Scores a forecast against observations over valid points only.
///
/// # Errors
/// [`Error::InvalidParam`] on length mismatch; [`Error::NoValidPoints`]
/// if the mask leaves nothing to score.
pub fn evaluate(forecast: &Forecast, obs: &TimeSeries) -> Result<ForecastScore> {
    if forecast.predictions.len() != obs.len() {
        return Err(Error::InvalidParam {
            name: "forecast/obs",
            reason: format!(
                "forecast and observation lengths differ ({} vs {})",
                forecast.predictions.len(),
                obs.len()
            ),
        });
    }
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut n_valid = 0usize;
    for i in 0..obs.len() {
        if forecast.valid[i] {
            let e = forecast.predictions[i] - obs.values()[i];
            abs_sum += e.abs();
            sq_sum += e * e;
            n_valid += 1;
        }
    }
    if n_valid == 0 {
        return Err(Error::NoValidPoints);
    }
    Ok(ForecastScore {
        mae: abs_sum / n_valid as f64,
        rmse: (sq_sum / n_valid as f64).sqrt(),
        n_valid,
        n_invalid: forecast.n_invalid(),
    })
}

/// Toy diurnal-and-seasonal clear-sky curve for benchmarks and tests.
///
/// Hour `h` maps to `peak * seasonal(day) * daylight(hour-of-day)` with a
/// half-sine daylight arc from hour 6 to hour 18 and a +/-30% seasonal
/// sine over a 365-day year. Not a physical irradiance model.
///
/// # Errors
/// [`Error::EmptySeries`] for `n == 0`; [`Error::InvalidParam`] for a
/// non-positive `peak`.
pub fn toy_clear_sky(n: usize, peak: f64) -> Result<TimeSeries> {
    if peak <= 0.0 || !peak.is_finite() {
        return Err(Error::InvalidParam {
            name: "peak",
            reason: format!("must be a positive finite real, got {peak}"),
        });
    }
    let values: Vec<f64> = (0..n)
        .map(|h| {
            let day = (h / 24) as f64;
            let hour = (h % 24) as f64;
            let seasonal = 1.0 - 0.3 * (std::f64::consts::TAU * day / 365.0).cos();
            let daylight = if (6.0..18.0).contains(&hour) {
                (std::f64::consts::PI * (hour - 6.0) / 12.0).sin()
            } else {
                0.0
            };
            peak * seasonal * daylight
        })
        .collect();
    TimeSeries::new(values, 1.0, "toy_clear_sky")
}
