//! Short-term persistence: dwell-time statistics over state sequences,
//! Markov-chain estimation, analytic persistence of the Gaussian walker
//! and the shock/damage model, and forward master-equation evolution.

mod dwell;
mod gaussian;
mod markov;
mod master;
mod shock;

pub use dwell::{
    dwell_stats, persistence_burst, persistence_expected, persistence_markov, persistence_pp,
    BurstPersistence, DwellStats, StateDwell,
};
pub use gaussian::{gaussian_change_prob, gaussian_pm, gaussian_pp};
pub use markov::{fit_markov, TransitionEntry, TransitionModel, TransitionModelJson};
pub use master::{master_equation_evolve, RateMatrix, Trajectory};
pub use shock::{shock_model_pe, ShockModel};
