//! Analytic persistence of the Gaussian random walker.
//!
//! For a walker whose increments are N(mu, sigma^2), the probability that
//! a single step exceeds the change threshold epsilon in magnitude is
//! p = 2 Q((epsilon - mu) / sigma), with Q the standard Gaussian
//! upper-tail function Q(x) = erfc(x / sqrt(2)) / 2. Successive steps are
//! independent, so the dwell time in a state is geometric:
//! P^P(T) = p (1 - p)^(T-1), and the one-step persistence is
//! P^M = 1 - p.
//!
//! The two-sided form 2 Q((epsilon - mu) / sigma) is exact for mu = 0 and
//! a standard near-symmetric approximation otherwise; it is a probability
//! only while mu <= epsilon.

use crate::error::{Error, Result};

fn validate(epsilon: f64, sigma: f64) -> Result<()> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidParam {
            name: "sigma",
            reason: format!("must be a positive finite real, got {sigma}"),
        });
    }
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidParam {
            name: "epsilon",
            reason: format!("must be a positive finite real, got {epsilon}"),
        });
    }
    Ok(())
}

/// Probability that one increment changes the state:
/// p = 2 Q((epsilon - mu) / sigma) = erfc((epsilon - mu) / (sigma sqrt(2))).
///
/// # Errors
/// [`Error::InvalidParam`] unless `sigma > 0` and `epsilon > 0`.
pub fn gaussian_change_prob(epsilon: f64, mu: f64, sigma: f64) -> Result<f64> {
    validate(epsilon, sigma)?;
    let z = (epsilon - mu) / sigma;
    Ok(libm::erfc(z / std::f64::consts::SQRT_2))
}

/// One-step persistence P^M = 1 - 2 Q((epsilon - mu) / sigma).
///
/// Computed as `1 - gaussian_change_prob(..)`, so the two always sum to 1
/// exactly.
///
/// # Errors
/// Same domain as [`gaussian_change_prob`].
pub fn gaussian_pm(epsilon: f64, mu: f64, sigma: f64) -> Result<f64> {
    Ok(1.0 - gaussian_change_prob(epsilon, mu, sigma)?)
}

/// Geometric dwell law P^P(T) = p (1 - p)^(T-1): probability that the
/// first change happens at step `t` exactly.
///
/// # Errors
/// [`Error::InvalidParam`] if `t < 1`; domain of
/// [`gaussian_change_prob`] otherwise.
pub fn gaussian_pp(t: u64, epsilon: f64, mu: f64, sigma: f64) -> Result<f64> {
    if t < 1 {
        return Err(Error::InvalidParam {
            name: "t",
            reason: "dwell time must be at least 1 step".into(),
        });
    }
    let p = gaussian_change_prob(epsilon, mu, sigma)?;
    Ok(p * (1.0 - p).powi((t - 1) as i32))
}
