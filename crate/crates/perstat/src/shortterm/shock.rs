//! Expected dwell time under Poisson shock arrivals.
//!
//! Shocks arrive as a Poisson process with rate lambda. In the count
//! model the state changes after the k-th shock, so the expected dwell
//! time is the Erlang mean k / lambda. In the damage model each shock
//! inflicts damage 1 + eta * epsilon (a unit base plus a damage factor
//! eta scaled by severity epsilon) and the state changes when the
//! accumulated damage reaches that of a single dressed shock, giving
//! P^E = (1 + eta * epsilon) / lambda.

use crate::error::{Error, Result};

/// Which shock-accumulation rule ends the dwell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShockModel {
    /// State changes at the k-th shock; `k >= 1`.
    Count {
        /// Number of shocks required.
        k: u64,
    },
    /// State changes when dressed damage `1 + eta * epsilon` accumulates.
    Damage {
        /// Damage amplification per unit severity; `eta >= 0`.
        eta: f64,
        /// Shock severity; `epsilon >= 0`.
        epsilon: f64,
    },
}

/// Expected dwell time P^E = E[T] under `model` with arrival rate
/// `lambda`.
///
/// # Errors
/// [`Error::InvalidParam`] if `lambda <= 0`, `k < 1`, `eta < 0`, or
/// `epsilon < 0`.
pub fn shock_model_pe(model: ShockModel, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParam {
            name: "lambda",
            reason: format!("arrival rate must be a positive finite real, got {lambda}"),
        });
    }
    match model {
        ShockModel::Count { k } => {
            if k < 1 {
                return Err(Error::InvalidParam {
                    name: "k",
                    reason: "shock count must be at least 1".into(),
                });
            }
            Ok(k as f64 / lambda)
        }
        ShockModel::Damage { eta, epsilon } => {
            if eta < 0.0 || !eta.is_finite() {
                return Err(Error::InvalidParam {
                    name: "eta",
                    reason: format!("damage factor must be a non-negative finite real, got {eta}"),
                });
            }
            if epsilon < 0.0 || !epsilon.is_finite() {
                return Err(Error::InvalidParam {
                    name: "epsilon",
                    reason: format!("severity must be a non-negative finite real, got {epsilon}"),
                });
            }
            Ok((1.0 + eta * epsilon) / lambda)
        }
    }
}
