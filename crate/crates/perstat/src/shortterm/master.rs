//! Forward master-equation evolution of state-occupation probabilities.
//!
//! The occupation probabilities P_i(t) of a continuous-time Markov
//! process obey the linear system dP/dt = M P, where the generator M is
//! built from the transition rates alpha(i -> j): the off-diagonal entry
//! M[j][i] receives flux alpha(i -> j) into state j from state i, and the
//! diagonal entry M[i][i] = -sum_k alpha(i -> k) drains state i. Every
//! column of M sums to zero, so the total probability is a conserved
//! linear invariant, which classical Runge-Kutta preserves to roundoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transition rates alpha(i -> j) >= 0 of a continuous-time Markov chain.
///
/// Rates have unit 1/time. Diagonal entries are implied by conservation
/// and cannot be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMatrix {
    n_states: usize,
    /// Row-major: rates[i][j] = alpha(i -> j); rates[i][i] = 0.
    rates: Vec<Vec<f64>>,
}

impl RateMatrix {
    /// A chain over `n_states` states with all rates zero.
    ///
    /// # Errors
    /// [`Error::InvalidParam`] if `n_states == 0`.
    pub fn new(n_states: usize) -> Result<Self> {
        if n_states == 0 {
            return Err(Error::InvalidParam {
                name: "n_states",
                reason: "need at least one state".into(),
            });
        }
        Ok(Self {
            n_states,
            rates: vec![vec![0.0; n_states]; n_states],
        })
    }

    /// Sets alpha(from -> to).
    ///
    /// # Errors
    /// [`Error::InvalidParam`] on a negative or non-finite rate, an
    /// out-of-range index, or `from == to`.
    pub fn set_rate(&mut self, from: usize, to: usize, rate: f64) -> Result<()> {
        if from >= self.n_states || to >= self.n_states {
            return Err(Error::InvalidParam {
                name: "from/to",
                reason: format!(
                    "state index out of range: ({from}, {to}) with {} states",
                    self.n_states
                ),
            });
        }
        if from == to {
            return Err(Error::InvalidParam {
                name: "from/to",
                reason: "diagonal rates are implied by conservation".into(),
            });
        }
        if rate < 0.0 || !rate.is_finite() {
            return Err(Error::InvalidParam {
                name: "rate",
                reason: format!("must be a non-negative finite real, got {rate}"),
            });
        }
        self.rates[from][to] = rate;
        Ok(())
    }

    /// alpha(from -> to); zero on the diagonal.
    #[must_use]
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rates[from][to]
    }

    /// Number of states.
    #[must_use]
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// Largest total exit rate over states; bounds the stable step size.
    #[must_use]
    pub fn max_exit_rate(&self) -> f64 {
        (0..self.n_states)
            .map(|i| self.rates[i].iter().sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Dense generator M with M[to][from] = alpha(from -> to) off the
    /// diagonal and M[i][i] = -(total exit rate of i); columns sum to 0.
    #[must_use]
    #[allow(clippy::needless_range_loop)] // index form mirrors M[to][from]
    pub fn generator(&self) -> Vec<Vec<f64>> {
        let n = self.n_states;
        let mut m = vec![vec![0.0; n]; n];
        for from in 0..n {
            let exit: f64 = self.rates[from].iter().sum();
            for to in 0..n {
                if to != from {
                    m[to][from] = self.rates[from][to];
                }
            }
            m[from][from] = -exit;
        }
        m
    }
}

/// Probability-vector trajectory produced by [`master_equation_evolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Sample times, starting at 0 and ending at `t_end`.
    pub times: Vec<f64>,
    /// One probability vector per sample time.
    pub probs: Vec<Vec<f64>>,
}

fn mat_vec(m: &[Vec<f64>], v: &[f64], out: &mut [f64]) {
    for (row, o) in m.iter().zip(out.iter_mut()) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
}

const P0_TOL: f64 = 1e-9;

/// Integrates dP/dt = M P from `p0` to `t_end` with classical
/// fourth-order Runge-Kutta at step `dt` (the final step is shortened to
/// land exactly on `t_end`).
///
/// Every output vector sums to 1 within 1e-8 and has entries no more
/// negative than roundoff (about -1e-10) as long as the stability guard
/// `dt < 0.1 / max_exit_rate` holds; the guard is enforced.
///
/// # Errors
/// [`Error::NotStochastic`] if `p0` does not sum to 1 within 1e-9 or has
/// a negative entry, [`Error::UnstableTimeStep`] on a guard violation,
/// [`Error::InvalidParam`] on a dimension mismatch or non-positive
/// `t_end` / `dt`.
pub fn master_equation_evolve(
    rates: &RateMatrix,
    p0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if p0.len() != rates.n_states() {
        return Err(Error::InvalidParam {
            name: "p0",
            reason: format!(
                "dimension mismatch: {} entries for {} states",
                p0.len(),
                rates.n_states()
            ),
        });
    }
    if t_end <= 0.0 || !t_end.is_finite() {
        return Err(Error::InvalidParam {
            name: "t_end",
            reason: format!("must be a positive finite real, got {t_end}"),
        });
    }
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParam {
            name: "dt",
            reason: format!("must be a positive finite real, got {dt}"),
        });
    }
    let sum: f64 = p0.iter().sum();
    if (sum - 1.0).abs() > P0_TOL || p0.iter().any(|&p| p < 0.0) {
        return Err(Error::NotStochastic { sum, tol: P0_TOL });
    }
    let max_exit = rates.max_exit_rate();
    if max_exit > 0.0 {
        let limit = 0.1 / max_exit;
        if dt >= limit {
            return Err(Error::UnstableTimeStep {
                dt,
                max_exit_rate: max_exit,
                limit,
            });
        }
    }

    let m = rates.generator();
    let n = rates.n_states();
    let n_steps = (t_end / dt).ceil() as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut probs = Vec::with_capacity(n_steps + 1);
    let mut p = p0.to_vec();
    times.push(0.0);
    probs.push(p.clone());

    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut stage = vec![0.0; n];
    let mut t = 0.0;
    for step in 0..n_steps {
        // Shorten the last step so the trajectory ends exactly at t_end.
        let h = if step + 1 == n_steps { t_end - t } else { dt };
        mat_vec(&m, &p, &mut k1);
        for i in 0..n {
            stage[i] = p[i] + 0.5 * h * k1[i];
        }
        mat_vec(&m, &stage, &mut k2);
        for i in 0..n {
            stage[i] = p[i] + 0.5 * h * k2[i];
        }
        mat_vec(&m, &stage, &mut k3);
        for i in 0..n {
            stage[i] = p[i] + h * k3[i];
        }
        mat_vec(&m, &stage, &mut k4);
        for i in 0..n {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = if step + 1 == n_steps { t_end } else { t + h };
        times.push(t);
        probs.push(p.clone());
    }
    Ok(Trajectory { times, probs })
}
