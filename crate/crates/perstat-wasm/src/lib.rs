//! Browser bindings for the perstat toolkit.
//!
//! Three demo operations back the static page in `www/`:
//!
//! * synthesize a long-range-correlated FfM series and fit its DFA
//!   exponent,
//! * the analytic Gaussian-walker persistence curves P^M and the
//!   geometric dwell law P^P,
//! * a two-state master-equation relaxation toward its stationary
//!   distribution.
//!
//! Each operation returns one JSON string, so the page needs nothing
//! beyond wasm-bindgen's loader. The JSON-building core below is plain
//! Rust compiled for every target and unit-tested natively; only the
//! `#[wasm_bindgen]` wrappers are gated to wasm32. Build the browser
//! package with `wasm-pack build crates/perstat-wasm --target web`.

use perstat::longterm::{default_scales, dfa};
use perstat::shortterm::{
    gaussian_change_prob, gaussian_pm, gaussian_pp, master_equation_evolve, RateMatrix,
};
use perstat::synth::ffm_powerlaw;
use serde_json::json;

/// Plot payloads are decimated to at most this many points.
pub const MAX_PLOT_POINTS: usize = 2048;

fn err_str(e: perstat::Error) -> String {
    e.to_string()
}

/// Keeps every `stride`-th element plus the final one, so decimated
/// curves still end at the true last sample.
fn decimate<T: Copy>(xs: &[T], stride: usize) -> Vec<T> {
    let stride = stride.max(1);
    let mut out: Vec<T> = xs.iter().copied().step_by(stride).collect();
    if let Some(&last) = xs.last() {
        if !(xs.len() - 1).is_multiple_of(stride) {
            out.push(last);
        }
    }
    out
}

/// Synthesizes FfM noise with spectral target `beta` and fits DFA over
/// the default scale grid.
///
/// The JSON carries the (decimated) series, the fluctuation table, the
/// fitted `alpha`, and its spectral conversion `2 alpha - 1`.
///
/// # Errors
/// A rendered message for an invalid `beta` or a length that is not a
/// power of two >= 256.
pub fn synth_dfa_json(beta: f64, n: usize, seed: u64) -> Result<String, String> {
    let x = ffm_powerlaw(n, beta, seed).map_err(err_str)?;
    let scales = default_scales(n, 2).map_err(err_str)?;
    let fit = dfa(&x, &scales, 2).map_err(err_str)?;
    let stride = n.div_ceil(MAX_PLOT_POINTS);
    Ok(json!({
        "n": n,
        "beta": beta,
        "seed": seed,
        "stride": stride,
        "series": decimate(x.values(), stride),
        "scales": fit.scales,
        "fluctuations": fit.fluctuations,
        "alpha": fit.exponent,
        "beta_from_alpha": 2.0 * fit.exponent - 1.0,
    })
    .to_string())
}

/// Analytic persistence of the Gaussian walker: the P^M curve over an
/// epsilon grid, the value at the chosen `epsilon`, the expected dwell
/// time 1 / (2 Q), and the geometric dwell law P^P(t) for t <= `t_max`.
///
/// # Errors
/// A rendered message unless `sigma > 0` and `epsilon > 0`.
pub fn walker_persistence_json(
    mu: f64,
    sigma: f64,
    epsilon: f64,
    t_max: usize,
) -> Result<String, String> {
    // Validates the domain once; the grid below stays inside it.
    let pm_at = gaussian_pm(epsilon, mu, sigma).map_err(err_str)?;
    let expected_dwell = 1.0 / gaussian_change_prob(epsilon, mu, sigma).map_err(err_str)?;
    let eps_hi = (mu + 4.0 * sigma).max(epsilon);
    let grid = 160;
    let mut eps = Vec::with_capacity(grid);
    let mut pm = Vec::with_capacity(grid);
    for i in 1..=grid {
        let e = eps_hi * i as f64 / grid as f64;
        eps.push(e);
        pm.push(gaussian_pm(e, mu, sigma).map_err(err_str)?);
    }
    let t_max = t_max.clamp(1, 400);
    let mut pp = Vec::with_capacity(t_max);
    for t in 1..=t_max as u64 {
        pp.push(gaussian_pp(t, epsilon, mu, sigma).map_err(err_str)?);
    }
    Ok(json!({
        "mu": mu,
        "sigma": sigma,
        "epsilon": epsilon,
        "eps": eps,
        "pm": pm,
        "pm_at": pm_at,
        "expected_dwell": expected_dwell,
        "t": (1..=t_max).collect::<Vec<usize>>(),
        "pp": pp,
    })
    .to_string())
}

/// Two-state master-equation relaxation with exchange rates `lambda01`
/// (0 -> 1) and `lambda10` (1 -> 0) from initial occupation
/// `p0_initial` of state 0.
///
/// The step size stays an order of magnitude inside the integrator's
/// stability guard; the trajectory is decimated for plotting. The JSON
/// also carries the analytic stationary distribution.
///
/// # Errors
/// A rendered message for negative rates, `p0_initial` outside [0, 1],
/// or a non-positive horizon.
pub fn master_trajectory_json(
    lambda01: f64,
    lambda10: f64,
    p0_initial: f64,
    t_end: f64,
) -> Result<String, String> {
    if !(0.0..=1.0).contains(&p0_initial) {
        return Err(format!(
            "initial occupation must be in [0, 1], got {p0_initial}"
        ));
    }
    let mut rates = RateMatrix::new(2).map_err(err_str)?;
    rates.set_rate(0, 1, lambda01).map_err(err_str)?;
    rates.set_rate(1, 0, lambda10).map_err(err_str)?;
    let mut dt = t_end / 1000.0;
    let max_exit = rates.max_exit_rate();
    if max_exit > 0.0 {
        dt = dt.min(0.01 / max_exit);
    }
    let traj = master_equation_evolve(&rates, &[p0_initial, 1.0 - p0_initial], t_end, dt)
        .map_err(err_str)?;
    let stride = traj.times.len().div_ceil(MAX_PLOT_POINTS);
    let p0: Vec<f64> = traj.probs.iter().map(|p| p[0]).collect();
    let p1: Vec<f64> = traj.probs.iter().map(|p| p[1]).collect();
    let total = lambda01 + lambda10;
    let stationary = if total > 0.0 {
        [lambda10 / total, lambda01 / total]
    } else {
        [p0_initial, 1.0 - p0_initial]
    };
    Ok(json!({
        "lambda01": lambda01,
        "lambda10": lambda10,
        "times": decimate(&traj.times, stride),
        "p0": decimate(&p0, stride),
        "p1": decimate(&p1, stride),
        "stationary": stationary,
    })
    .to_string())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    /// JS `synthDfa(beta, n, seed)` -> JSON string.
    #[wasm_bindgen(js_name = synthDfa)]
    pub fn synth_dfa(beta: f64, n: u32, seed: u32) -> Result<String, JsValue> {
        super::synth_dfa_json(beta, n as usize, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
    }

    /// JS `walkerPersistence(mu, sigma, epsilon, tMax)` -> JSON string.
    #[wasm_bindgen(js_name = walkerPersistence)]
    pub fn walker_persistence(
        mu: f64,
        sigma: f64,
        epsilon: f64,
        t_max: u32,
    ) -> Result<String, JsValue> {
        super::walker_persistence_json(mu, sigma, epsilon, t_max as usize)
            .map_err(|e| JsValue::from_str(&e))
    }

    /// JS `masterTrajectory(lambda01, lambda10, p0, tEnd)` -> JSON string.
    #[wasm_bindgen(js_name = masterTrajectory)]
    pub fn master_trajectory(
        lambda01: f64,
        lambda10: f64,
        p0_initial: f64,
        t_end: f64,
    ) -> Result<String, JsValue> {
        super::master_trajectory_json(lambda01, lambda10, p0_initial, t_end)
            .map_err(|e| JsValue::from_str(&e))
    }
}
