//! Hurst rescaled-range (R/S) analysis.

use crate::error::{Error, Result};
use crate::longterm::{validate_scales, ScalingResult};
use crate::series::{cumulative_sum, population_std, TimeSeries};

/// Rescaled-range estimate of the Hurst exponent over `scales`.
///
/// Per scale s the profile y (cumulative sum of the raw series) is split
/// into floor(N/s) non-overlapping segments; R is the range (max - min)
/// of the profile inside a segment and S the population standard
/// deviation of the raw samples inside it. Segment means R_s and S_s
/// form the rescaled range, which scales as (R_s/S_s) ~ (s/2)^H; the
/// halved abscissa only shifts the log-log intercept, so H is the plain
/// log-log slope.
///
/// Windows with S = 0 are skipped (from both means); a scale where every
/// window was skipped is dropped.
///
/// The profile range is not window-mean-adjusted, so the estimator
/// presumes stationary input; difference an integrated series before
/// analysis (a random walk fed directly drifts toward H = 1/2 here
/// where mean-adjusted variants saturate toward 1).
///
/// # Errors
/// [`Error::BadScales`] for a grid outside [8, N/4] or non-increasing;
/// [`Error::ZeroVariance`] when no scale survives (constant input);
/// [`Error::InsufficientPoints`] when fewer than two scales survive.
pub fn hurst_rs(x: &TimeSeries, scales: &[usize]) -> Result<ScalingResult> {
    validate_scales(scales, x.len(), 8)?;
    let v = x.values();
    let profile = cumulative_sum(v);

    let mut kept_scales = Vec::with_capacity(scales.len());
    let mut ratios = Vec::with_capacity(scales.len());
    for &s in scales {
        let n_seg = v.len() / s;
        let mut r_sum = 0.0;
        let mut s_sum = 0.0;
        let mut kept = 0usize;
        for m in 0..n_seg {
            let x_seg = &v[m * s..(m + 1) * s];
            let sd = population_std(x_seg);
            if sd == 0.0 {
                continue;
            }
            let y_seg = &profile[m * s..(m + 1) * s];
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &y in y_seg {
                lo = lo.min(y);
                hi = hi.max(y);
            }
            r_sum += hi - lo;
            s_sum += sd;
            kept += 1;
        }
        if kept == 0 {
            continue;
        }
        kept_scales.push(s);
        ratios.push((r_sum / kept as f64) / (s_sum / kept as f64));
    }
    if kept_scales.is_empty() {
        return Err(Error::ZeroVariance {
            context: "hurst_rs",
        });
    }
    ScalingResult::from_points(kept_scales, ratios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::longterm::default_scales;
    use crate::models::{simulate, ArmaSpec};

    #[test]
    fn white_noise_h_half() {
        let n = 1 << 14;
        let x = simulate(&ArmaSpec::standard(vec![], vec![]).unwrap(), n, 41)
            .unwrap()
            .series;
        let scales = default_scales(n, 2).unwrap();
        let r = hurst_rs(&x, &scales).unwrap();
        assert!((r.exponent - 0.5).abs() < 0.1, "H = {}", r.exponent);
    }

    #[test]
    fn constant_series_fails() {
        let x = TimeSeries::from_values(vec![2.0; 1024]).unwrap();
        let scales = default_scales(1024, 2).unwrap();
        assert!(matches!(
            hurst_rs(&x, &scales),
            Err(Error::ZeroVariance { .. })
        ));
    }

    #[test]
    fn scale_guards() {
        let x = simulate(&ArmaSpec::standard(vec![], vec![]).unwrap(), 1024, 1)
            .unwrap()
            .series;
        assert!(hurst_rs(&x, &[4, 16, 64]).is_err());
        assert!(hurst_rs(&x, &[8, 512]).is_err());
        assert!(hurst_rs(&x, &[8]).is_err());
    }

    #[test]
    fn zero_variance_windows_are_skipped() {
        // First half constant (S = 0 windows at small scales), second
        // half noisy; small scales keep only the noisy windows.
        let n = 2048;
        let noise = simulate(&ArmaSpec::standard(vec![], vec![]).unwrap(), n / 2, 55).unwrap();
        let mut v = vec![1.0; n / 2];
        v.extend_from_slice(noise.series.values());
        let x = TimeSeries::from_values(v).unwrap();
        let r = hurst_rs(&x, &[8, 16, 32, 64]).unwrap();
        assert_eq!(r.scales.len(), 4);
        assert!(r.fluctuations.iter().all(|&f| f.is_finite() && f > 0.0));
    }
}
