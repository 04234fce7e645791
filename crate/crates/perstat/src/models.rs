//! AR/ARMA process simulation and fitting, red-noise AR(1), e-folding
//! times, and the Monte-Carlo first-change persistence harness.
//!
//! The process convention is
//! `x[n] = a_1 x[n-1] + ... + a_p x[n-p] + e[n] - b_1 e[n-1] - ... - b_q e[n-q]`
//! with the moving-average terms subtracted (some references add them;
//! negate the `ma` coefficients to translate). The red-noise variant is
//! the variance-normalized AR(1) `x[n] = a x[n-1] + sqrt(1 - a^2) e[n]`,
//! whose stationary variance equals the noise variance and whose
//! autocorrelation at lag k is `a^k`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::series::TimeSeries;

/// Which recursion [`simulate`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmaVariant {
    /// The plain ARMA recursion.
    Standard,
    /// Variance-normalized AR(1); requires `p = 1`, `q = 0`, `|a| < 1`.
    RedNoise,
}

/// Parameters of an ARMA(p, q) process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaSpec {
    /// Autoregressive coefficients a_1..a_p.
    pub ar: Vec<f64>,
    /// Moving-average coefficients b_1..b_q (subtracted).
    pub ma: Vec<f64>,
    /// Standard deviation of the innovation noise; must be positive.
    pub noise_sigma: f64,
    /// Recursion variant.
    pub variant: ArmaVariant,
}

impl ArmaSpec {
    /// Standard ARMA(p, q) with unit noise.
    pub fn standard(ar: Vec<f64>, ma: Vec<f64>) -> Result<Self> {
        Self::new(ar, ma, 1.0, ArmaVariant::Standard)
    }

    /// Red-noise AR(1) with coefficient `a`, `|a| < 1`, unit noise.
    pub fn red_noise(a: f64) -> Result<Self> {
        Self::new(vec![a], vec![], 1.0, ArmaVariant::RedNoise)
    }

    /// Pure Gaussian random walk x[n] = x[n-1] + e[n].
    pub fn gaussian_walk(sigma: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![], sigma, ArmaVariant::Standard)
    }

    /// Validating constructor.
    ///
    /// # Errors
    /// [`Error::InvalidParam`] for non-finite coefficients,
    /// `noise_sigma <= 0`, or a red-noise spec that is not AR(1) with
    /// `|a| < 1`.
    pub fn new(ar: Vec<f64>, ma: Vec<f64>, noise_sigma: f64, variant: ArmaVariant) -> Result<Self> {
        if ar.iter().chain(ma.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidParam {
                name: "ar/ma",
                reason: "coefficients must be finite".into(),
            });
        }
        if noise_sigma <= 0.0 || !noise_sigma.is_finite() {
            return Err(Error::InvalidParam {
                name: "noise_sigma",
                reason: format!("must be a positive finite real, got {noise_sigma}"),
            });
        }
        if variant == ArmaVariant::RedNoise {
            if ar.len() != 1 || !ma.is_empty() {
                return Err(Error::InvalidParam {
                    name: "variant",
                    reason: "red_noise requires exactly one AR coefficient and no MA terms".into(),
                });
            }
            if ar[0].abs() >= 1.0 {
                return Err(Error::InvalidParam {
                    name: "ar",
                    reason: format!("red_noise requires |a| < 1, got {}", ar[0]),
                });
            }
        }
        Ok(Self {
            ar,
            ma,
            noise_sigma,
            variant,
        })
    }

    /// AR order p.
    #[must_use]
    pub fn p(&self) -> usize {
        self.ar.len()
    }

    /// MA order q.
    #[must_use]
    pub fn q(&self) -> usize {
        self.ma.len()
    }

    /// True when every AR characteristic root lies strictly outside the
    /// unit circle of the back-shift polynomial (the recursion has a
    /// stationary solution).
    #[must_use]
    pub fn is_stationary(&self) -> bool {
        matches!(self.ar_class(), ArClass::Stationary)
    }

    /// True when some AR characteristic root lies strictly inside the
    /// unit circle (the recursion grows without bound).
    #[must_use]
    pub fn is_explosive(&self) -> bool {
        matches!(self.ar_class(), ArClass::Explosive)
    }

    fn ar_class(&self) -> ArClass {
        classify_ar(&self.ar)
    }

    /// Burn-in discarded by [`simulate`]: `max(100, 10 (p + q))` for
    /// stationary specs, zero for unit-root or explosive ones.
    #[must_use]
    pub fn burn_in(&self) -> usize {
        if self.is_stationary() {
            100.max(10 * (self.p() + self.q()))
        } else {
            0
        }
    }
}

impl FromStr for ArmaSpec {
    type Err = Error;

    /// Parses the compact text form
    /// `"ar=0.9; ma=0.5; sigma=1; variant=standard"`.
    ///
    /// `ar` and `ma` are comma-separated lists and default to empty;
    /// `sigma` defaults to 1; `variant` is `standard` (default) or
    /// `red_noise`.
    fn from_str(s: &str) -> Result<Self> {
        let mut ar = Vec::new();
        let mut ma = Vec::new();
        let mut sigma = 1.0;
        let mut variant = ArmaVariant::Standard;
        for field in s.split(';') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let (key, value) = field.split_once('=').ok_or_else(|| Error::SpecParse {
                what: "arma",
                reason: format!("field `{field}` is not key=value"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let parse_list = |v: &str| -> Result<Vec<f64>> {
                if v.is_empty() {
                    return Ok(Vec::new());
                }
                v.split(',')
                    .map(|t| {
                        t.trim().parse::<f64>().map_err(|_| Error::SpecParse {
                            what: "arma",
                            reason: format!("`{t}` is not a number in `{key}`"),
                        })
                    })
                    .collect()
            };
            match key {
                "ar" => ar = parse_list(value)?,
                "ma" => ma = parse_list(value)?,
                "sigma" => {
                    sigma = value.parse().map_err(|_| Error::SpecParse {
                        what: "arma",
                        reason: format!("`{value}` is not a number in `sigma`"),
                    })?;
                }
                "variant" => {
                    variant = match value {
                        "standard" => ArmaVariant::Standard,
                        "red_noise" => ArmaVariant::RedNoise,
                        other => {
                            return Err(Error::SpecParse {
                                what: "arma",
                                reason: format!(
                                    "unknown variant `{other}` (expected standard or red_noise)"
                                ),
                            })
                        }
                    };
                }
                other => {
                    return Err(Error::SpecParse {
                        what: "arma",
                        reason: format!("unknown field `{other}`"),
                    })
                }
            }
        }
        Self::new(ar, ma, sigma, variant)
    }
}

enum ArClass {
    Stationary,
    Marginal,
    Explosive,
}

const UNIT_ROOT_TOL: f64 = 1e-9;

/// Classifies the AR polynomial by the largest modulus among the roots of
/// z^p - a_1 z^{p-1} - ... - a_p (the reciprocals of the back-shift
/// roots): all inside the unit circle means stationary, any outside means
/// explosive, on the circle means marginal (for example a random walk).
fn classify_ar(ar: &[f64]) -> ArClass {
    if ar.is_empty() {
        return ArClass::Stationary;
    }
    let mut coeffs = Vec::with_capacity(ar.len() + 1);
    coeffs.push(Complex64::new(1.0, 0.0));
    coeffs.extend(ar.iter().map(|&a| Complex64::new(-a, 0.0)));
    let max_mod = polynomial_roots(&coeffs)
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    if max_mod < 1.0 - UNIT_ROOT_TOL {
        ArClass::Stationary
    } else if max_mod > 1.0 + UNIT_ROOT_TOL {
        ArClass::Explosive
    } else {
        ArClass::Marginal
    }
}

/// All roots of the polynomial with the given coefficients (highest power
/// first, leading coefficient nonzero) by Durand-Kerner iteration. Fine
/// for the small degrees of AR specs.
fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (1..=degree).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 {
            break;
        }
    }
    roots
}

/// Output of [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    /// The simulated samples (burn-in already discarded).
    pub series: TimeSeries,
    /// Warning flag: the AR polynomial is explosive, so the sample path
    /// grows without bound. The simulation itself still runs.
    pub explosive: bool,
}

/// Incremental ARMA stepper with zero initial conditions.
struct ArmaStepper<'a> {
    spec: &'a ArmaSpec,
    /// Most recent p values, x[n-1] first.
    x_hist: Vec<f64>,
    /// Most recent q innovations, e[n-1] first.
    e_hist: Vec<f64>,
    red_noise_gain: f64,
}

impl<'a> ArmaStepper<'a> {
    fn new(spec: &'a ArmaSpec) -> Self {
        let red_noise_gain = match spec.variant {
            ArmaVariant::Standard => 1.0,
            ArmaVariant::RedNoise => (1.0 - spec.ar[0] * spec.ar[0]).sqrt(),
        };
        Self {
            spec,
            x_hist: vec![0.0; spec.p()],
            e_hist: vec![0.0; spec.q()],
            red_noise_gain,
        }
    }

    fn step(&mut self, rng: &mut impl Rng) -> f64 {
        let e: f64 = self.spec.noise_sigma * rng.sample::<f64, _>(StandardNormal);
        let ar_part: f64 = self
            .spec
            .ar
            .iter()
            .zip(&self.x_hist)
            .map(|(a, x)| a * x)
            .sum();
        let ma_part: f64 = self
            .spec
            .ma
            .iter()
            .zip(&self.e_hist)
            .map(|(b, em)| b * em)
            .sum();
        let x = ar_part + self.red_noise_gain * e - ma_part;
        if !self.x_hist.is_empty() {
            self.x_hist.rotate_right(1);
            self.x_hist[0] = x;
        }
        if !self.e_hist.is_empty() {
            self.e_hist.rotate_right(1);
            self.e_hist[0] = e;
        }
        x
    }
}

/// Simulates `n` samples of `spec`, deterministically for
/// `(spec, n, seed)`.
///
/// Initial conditions are zero. For stationary specs a burn-in of
/// `max(100, 10 (p + q))` extra samples is generated and discarded; walk
/// and explosive specs start cold so their paths begin at the origin.
/// An explosive AR polynomial sets the warning flag on the result rather
/// than failing.
///
/// # Errors
/// [`Error::InvalidParam`] for `n == 0`; [`Error::NonFinite`] if an
/// explosive path overflows the float range before `n` samples.
pub fn simulate(spec: &ArmaSpec, n: usize, seed: u64) -> Result<Simulation> {
    if n == 0 {
        return Err(Error::InvalidParam {
            name: "n",
            reason: "need at least one sample".into(),
        });
    }
    let burn = spec.burn_in();
    let mut rng = stream_rng(seed, 0);
    let mut stepper = ArmaStepper::new(spec);
    for _ in 0..burn {
        stepper.step(&mut rng);
    }
    let values: Vec<f64> = (0..n).map(|_| stepper.step(&mut rng)).collect();
    let label = match spec.variant {
        ArmaVariant::Standard => format!("arma({},{})", spec.p(), spec.q()),
        ArmaVariant::RedNoise => format!("red_noise({})", spec.ar[0]),
    };
    Ok(Simulation {
        series: TimeSeries::new(values, 1.0, label)?,
        explosive: spec.is_explosive(),
    })
}

/// Lag-1 coefficient estimator
/// `a_hat = sum_{t=2..N} x[t] x[t-1] / sum_{t=2..N} x[t]^2`.
///
/// For a constant nonzero series both sums coincide and the estimate is
/// exactly 1.
///
/// # Errors
/// [`Error::TooShort`] below three samples, [`Error::ZeroDenominator`]
/// when the sum of squares vanishes.
pub fn fit_ar1(x: &TimeSeries) -> Result<f64> {
    if x.len() < 3 {
        return Err(Error::TooShort {
            need: 3,
            got: x.len(),
        });
    }
    let v = x.values();
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 1..v.len() {
        num += v[t] * v[t - 1];
        den += v[t] * v[t];
    }
    if den == 0.0 {
        return Err(Error::ZeroDenominator { context: "fit_ar1" });
    }
    Ok(num / den)
}

/// Region of `a` treated as "indistinguishable from 1": values in
/// `[1 - EFOLD_UNIT_TOL, 1]` map to an infinite e-folding time.
pub const EFOLD_UNIT_TOL: f64 = 1e-12;

/// e-folding decay time T_e = -tau / ln(a) of an AR(1) process with
/// lag-1 coefficient `a` and sample period `tau`.
///
/// The autocorrelation r(n tau) = a^n = exp(-n tau / T_e) crosses 1/e at
/// lag T_e. Values of `a` within [`EFOLD_UNIT_TOL`] of 1 return positive
/// infinity (the perfectly persistent limit).
///
/// # Errors
/// [`Error::InvalidParam`] unless `0 < a <= 1` and `tau > 0`.
pub fn efolding_time(a: f64, tau: f64) -> Result<f64> {
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::InvalidParam {
            name: "tau",
            reason: format!("sample period must be a positive finite real, got {tau}"),
        });
    }
    if a <= 0.0 || a > 1.0 || !a.is_finite() {
        return Err(Error::InvalidParam {
            name: "a",
            reason: format!("lag-1 coefficient must lie in (0, 1], got {a}"),
        });
    }
    if a >= 1.0 - EFOLD_UNIT_TOL {
        return Ok(f64::INFINITY);
    }
    Ok(-tau / a.ln())
}

/// Estimates the e-folding time of `x` as
/// `efolding_time(fit_ar1(x), sample period)`.
///
/// # Errors
/// [`Error::NoExponentialDecay`] when the fitted coefficient is not in
/// (0, 1] (white or anti-correlated series decay faster than any
/// exponential; explosive estimates have none); errors of [`fit_ar1`].
pub fn efolding_from_series(x: &TimeSeries) -> Result<f64> {
    let a_hat = fit_ar1(x)?;
    if a_hat <= 0.0 || a_hat > 1.0 {
        return Err(Error::NoExponentialDecay { a_hat });
    }
    efolding_time(a_hat, x.sample_period())
}

/// Per-epoch cap on simulation steps in the Monte-Carlo harness.
pub const FIRST_CHANGE_STEP_CAP: u64 = 10_000_000;

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    /// Mean first-change step over uncapped epochs.
    pub estimate: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    /// Epochs requested.
    pub epochs: usize,
    /// Epochs that hit the step cap and were excluded from the estimate.
    pub n_capped: usize,
    /// Per-epoch first-change steps (capped epochs omitted), kept only
    /// when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_epoch: Option<Vec<u64>>,
}

/// Estimates the expected first-change time E[T] of `spec` under the
/// residual rule: each epoch simulates from zero initial conditions until
/// `|x[n] - x[n-1]| > epsilon` and reports the step at which that first
/// happens.
///
/// Epochs use independent derived RNG streams (`stream = epoch index`),
/// so the result is bit-identical for a given `seed` regardless of
/// thread count. Epochs that reach [`FIRST_CHANGE_STEP_CAP`] without a
/// change are excluded from the mean and counted in `n_capped`.
///
/// # Errors
/// [`Error::InvalidParam`] for `epochs < 100` or a non-positive
/// `epsilon`; [`Error::AllEpochsCapped`] when no epoch observed a change.
pub fn monte_carlo_first_change(
    spec: &ArmaSpec,
    epsilon: f64,
    epochs: usize,
    seed: u64,
    keep_per_epoch: bool,
) -> Result<MonteCarloResult> {
    if epochs < 100 {
        return Err(Error::InvalidParam {
            name: "epochs",
            reason: format!("need at least 100 epochs, got {epochs}"),
        });
    }
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidParam {
            name: "epsilon",
            reason: format!("change threshold must be a positive finite real, got {epsilon}"),
        });
    }
    // One stream per epoch; collect preserves epoch order, so the
    // aggregation below is independent of the rayon schedule.
    let raw: Vec<u64> = (0..epochs as u64)
        .into_par_iter()
        .map(|epoch| {
            let mut rng = stream_rng(seed, epoch);
            let mut stepper = ArmaStepper::new(spec);
            let mut prev = 0.0f64;
            for step in 1..=FIRST_CHANGE_STEP_CAP {
                let x = stepper.step(&mut rng);
                if (x - prev).abs() > epsilon {
                    return step;
                }
                prev = x;
            }
            FIRST_CHANGE_STEP_CAP + 1
        })
        .collect();

    let times: Vec<u64> = raw
        .iter()
        .copied()
        .filter(|&t| t <= FIRST_CHANGE_STEP_CAP)
        .collect();
    let n_capped = epochs - times.len();
    if times.is_empty() {
        return Err(Error::AllEpochsCapped {
            epochs,
            cap: FIRST_CHANGE_STEP_CAP,
        });
    }
    let n = times.len() as f64;
    let mean = times.iter().map(|&t| t as f64).sum::<f64>() / n;
    let var = times
        .iter()
        .map(|&t| {
            let d = t as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    Ok(MonteCarloResult {
        estimate: mean,
        std_error: (var / n).sqrt(),
        epochs,
        n_capped,
        per_epoch: keep_per_epoch.then_some(times),
    })
}
