//! Seeded synthetic-series generators: white and uniform noise, random
//! walks, and Fourier-filtered power-law-correlated noise.
//!
//! Every generator is bit-reproducible for a fixed [`GeneratorSpec`]; see
//! [`crate::rng`] for the portable seed-derivation scheme. Walks use the
//! same derived stream as their increment noise, so differencing a walk
//! recovers the matching noise series sample for sample.

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::series::TimeSeries;

/// Smallest length accepted by [`ffm_powerlaw`].
pub const MIN_FFM_LEN: usize = 256;

/// Which process [`generate`] synthesizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Independent N(mu, sigma^2) samples.
    GaussianNoise {
        /// Mean of each sample.
        mu: f64,
        /// Standard deviation of each sample; must be positive.
        sigma: f64,
    },
    /// Independent U(lo, hi) samples.
    UniformNoise {
        /// Lower bound (inclusive).
        lo: f64,
        /// Upper bound (exclusive); must exceed `lo`.
        hi: f64,
    },
    /// Cumulative sum of Gaussian noise.
    GaussianWalk {
        /// Mean of each increment.
        mu: f64,
        /// Standard deviation of each increment; must be positive.
        sigma: f64,
    },
    /// Cumulative sum of uniform noise.
    UniformWalk {
        /// Lower increment bound (inclusive).
        lo: f64,
        /// Upper increment bound (exclusive); must exceed `lo`.
        hi: f64,
    },
    /// Fourier-filtered noise with power spectrum S(f) ~ f^-beta.
    FfmPowerlaw {
        /// Target spectral exponent; must be >= 0.
        beta: f64,
    },
}

/// Seeded description of a synthetic process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// Process family and its parameters.
    #[serde(flatten)]
    pub kind: GeneratorKind,
    /// Number of samples; power of two >= 256 for the Fourier filter.
    pub n: usize,
    /// Master seed.
    pub seed: u64,
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses the compact text form
    /// `"kind=ffm; beta=0.6; n=65536; seed=7"`.
    ///
    /// Kinds: `gaussian_noise` (mu, sigma), `uniform_noise` (lo, hi),
    /// `gaussian_walk` (mu, sigma), `uniform_walk` (lo, hi), `ffm`
    /// (beta; alias `ffm_powerlaw`). Defaults: mu = 0, sigma = 1,
    /// lo = 0, hi = 1, beta = 1.
    fn from_str(s: &str) -> Result<Self> {
        let mut kind_name: Option<String> = None;
        let mut mu = 0.0;
        let mut sigma = 1.0;
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut beta = 1.0;
        let mut n: Option<usize> = None;
        let mut seed: Option<u64> = None;
        for field in s.split(';') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let (key, value) = field.split_once('=').ok_or_else(|| Error::SpecParse {
                what: "generator",
                reason: format!("field `{field}` is not key=value"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.parse().map_err(|_| Error::SpecParse {
                    what: "generator",
                    reason: format!("`{v}` is not a number in `{key}`"),
                })
            };
            match key {
                "kind" => kind_name = Some(value.to_string()),
                "mu" => mu = num(value)?,
                "sigma" => sigma = num(value)?,
                "lo" => lo = num(value)?,
                "hi" => hi = num(value)?,
                "beta" => beta = num(value)?,
                "n" => {
                    n = Some(value.parse().map_err(|_| Error::SpecParse {
                        what: "generator",
                        reason: format!("`{value}` is not a length in `n`"),
                    })?);
                }
                "seed" => {
                    seed = Some(value.parse().map_err(|_| Error::SpecParse {
                        what: "generator",
                        reason: format!("`{value}` is not a seed in `seed`"),
                    })?);
                }
                other => {
                    return Err(Error::SpecParse {
                        what: "generator",
                        reason: format!("unknown field `{other}`"),
                    })
                }
            }
        }
        let kind = match kind_name.as_deref() {
            Some("gaussian_noise") => GeneratorKind::GaussianNoise { mu, sigma },
            Some("uniform_noise") => GeneratorKind::UniformNoise { lo, hi },
            Some("gaussian_walk") => GeneratorKind::GaussianWalk { mu, sigma },
            Some("uniform_walk") => GeneratorKind::UniformWalk { lo, hi },
            Some("ffm") | Some("ffm_powerlaw") => GeneratorKind::FfmPowerlaw { beta },
            Some(other) => {
                return Err(Error::SpecParse {
                    what: "generator",
                    reason: format!("unknown kind `{other}`"),
                })
            }
            None => {
                return Err(Error::SpecParse {
                    what: "generator",
                    reason: "missing `kind` field".into(),
                })
            }
        };
        Ok(GeneratorSpec {
            kind,
            n: n.ok_or_else(|| Error::SpecParse {
                what: "generator",
                reason: "missing `n` field".into(),
            })?,
            seed: seed.ok_or_else(|| Error::SpecParse {
                what: "generator",
                reason: "missing `seed` field".into(),
            })?,
        })
    }
}

fn validate_gaussian(mu: f64, sigma: f64) -> Result<()> {
    if !mu.is_finite() || sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidParam {
            name: "mu/sigma",
            reason: format!("need finite mu and positive sigma, got ({mu}, {sigma})"),
        });
    }
    Ok(())
}

fn validate_uniform(lo: f64, hi: f64) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || hi <= lo {
        return Err(Error::InvalidParam {
            name: "lo/hi",
            reason: format!("need finite bounds with hi > lo, got ({lo}, {hi})"),
        });
    }
    Ok(())
}

/// Synthesizes the series described by `spec`, deterministically.
///
/// # Errors
/// [`Error::InvalidParam`] for `n == 0` or bad kind parameters;
/// [`Error::NotPowerOfTwo`] / [`Error::TooShort`] for Fourier-filter
/// length violations.
pub fn generate(spec: &GeneratorSpec) -> Result<TimeSeries> {
    if spec.n == 0 {
        return Err(Error::InvalidParam {
            name: "n",
            reason: "need at least one sample".into(),
        });
    }
    let mut rng = stream_rng(spec.seed, 0);
    match spec.kind {
        GeneratorKind::GaussianNoise { mu, sigma } => {
            validate_gaussian(mu, sigma)?;
            let v: Vec<f64> = (0..spec.n)
                .map(|_| mu + sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            TimeSeries::new(v, 1.0, "gaussian_noise")
        }
        GeneratorKind::UniformNoise { lo, hi } => {
            validate_uniform(lo, hi)?;
            let v: Vec<f64> = (0..spec.n).map(|_| rng.gen_range(lo..hi)).collect();
            TimeSeries::new(v, 1.0, "uniform_noise")
        }
        GeneratorKind::GaussianWalk { mu, sigma } => {
            validate_gaussian(mu, sigma)?;
            let mut acc = 0.0;
            let v: Vec<f64> = (0..spec.n)
                .map(|_| {
                    acc += mu + sigma * rng.sample::<f64, _>(StandardNormal);
                    acc
                })
                .collect();
            TimeSeries::new(v, 1.0, "gaussian_walk")
        }
        GeneratorKind::UniformWalk { lo, hi } => {
            validate_uniform(lo, hi)?;
            let mut acc = 0.0;
            let v: Vec<f64> = (0..spec.n)
                .map(|_| {
                    acc += rng.gen_range(lo..hi);
                    acc
                })
                .collect();
            TimeSeries::new(v, 1.0, "uniform_walk")
        }
        GeneratorKind::FfmPowerlaw { beta } => ffm_powerlaw(spec.n, beta, spec.seed),
    }
}

/// Fourier-filtering synthesis of power-law-correlated Gaussian noise.
///
/// A white Gaussian series is transformed, its spectrum is shaped by the
/// amplitude filter f^(-beta/2) (so the power spectrum follows f^-beta),
/// the zero-frequency coefficient is set to zero, and the inverse
/// transform is standardized to zero mean and unit variance. The input
/// spectrum of a real series is Hermitian and the filter depends on |f|
/// only, so the output is real up to roundoff; the imaginary parts are
/// dropped.
///
/// # Errors
/// [`Error::TooShort`] for `n` < [`MIN_FFM_LEN`],
/// [`Error::NotPowerOfTwo`] for a non-power-of-two `n`,
/// [`Error::InvalidParam`] for `beta < 0` or non-finite.
pub fn ffm_powerlaw(n: usize, beta: f64, seed: u64) -> Result<TimeSeries> {
    if n < MIN_FFM_LEN {
        return Err(Error::TooShort {
            need: MIN_FFM_LEN,
            got: n,
        });
    }
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: n });
    }
    if beta < 0.0 || !beta.is_finite() {
        return Err(Error::InvalidParam {
            name: "beta",
            reason: format!("target exponent must be a non-negative finite real, got {beta}"),
        });
    }
    let mut rng = stream_rng(seed, 0);
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    buf[0] = Complex::new(0.0, 0.0);
    for (k, c) in buf.iter_mut().enumerate().skip(1) {
        // Two-sided frequency magnitude |f_k| = min(k, n - k) / n.
        let f = k.min(n - k) as f64 / n as f64;
        *c *= f.powf(-beta / 2.0);
    }
    planner.plan_fft_inverse(n).process(&mut buf);

    let raw: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let var = raw.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return Err(Error::ZeroVariance {
            context: "ffm_powerlaw",
        });
    }
    let sd = var.sqrt();
    let v: Vec<f64> = raw.iter().map(|&x| (x - mean) / sd).collect();
    TimeSeries::new(v, 1.0, format!("ffm(beta={beta})"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::longterm::{acf, default_scales, dfa, psd_beta};

    #[test]
    fn text_form() {
        let spec: GeneratorSpec = "kind=ffm; beta=0.6; n=65536; seed=7".parse().unwrap();
        assert_eq!(spec.kind, GeneratorKind::FfmPowerlaw { beta: 0.6 });
        assert_eq!(spec.n, 65536);
        assert_eq!(spec.seed, 7);

        let g: GeneratorSpec = "kind=gaussian_noise; mu=2; sigma=3; n=100; seed=1"
            .parse()
            .unwrap();
        assert_eq!(
            g.kind,
            GeneratorKind::GaussianNoise {
                mu: 2.0,
                sigma: 3.0
            }
        );

        assert!("kind=ffm; beta=0.6".parse::<GeneratorSpec>().is_err());
        assert!("n=10; seed=0".parse::<GeneratorSpec>().is_err());
        assert!("kind=warp; n=10; seed=0".parse::<GeneratorSpec>().is_err());
        assert!("kind=ffm; beta=x; n=256; seed=0"
            .parse::<GeneratorSpec>()
            .is_err());
    }

    #[test]
    fn gaussian_noise_moments() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::GaussianNoise {
                mu: 0.0,
                sigma: 2.0,
            },
            n: 100_000,
            seed: 71,
        };
        let x = generate(&spec).unwrap();
        assert!(x.mean().abs() < 0.02 * 2.0, "mean = {}", x.mean());
        assert!((x.std_dev() - 2.0).abs() < 0.04, "sd = {}", x.std_dev());
    }

    #[test]
    fn uniform_walk_is_non_decreasing() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::UniformWalk { lo: 0.0, hi: 1.0 },
            n: 10_000,
            seed: 72,
        };
        let x = generate(&spec).unwrap();
        assert!(x.values().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn walk_differencing_recovers_noise_exactly() {
        let noise = generate(&GeneratorSpec {
            kind: GeneratorKind::GaussianNoise {
                mu: 0.1,
                sigma: 1.5,
            },
            n: 5000,
            seed: 73,
        })
        .unwrap();
        let walk = generate(&GeneratorSpec {
            kind: GeneratorKind::GaussianWalk {
                mu: 0.1,
                sigma: 1.5,
            },
            n: 5000,
            seed: 73,
        })
        .unwrap();
        assert_eq!(walk.values()[0], noise.values()[0]);
        for i in 1..walk.len() {
            let diff = walk.values()[i] - walk.values()[i - 1];
            // Differencing undoes the running sum exactly up to the
            // float roundoff of the accumulation itself.
            assert!((diff - noise.values()[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn generators_bit_reproducible() {
        for kind in [
            GeneratorKind::GaussianNoise {
                mu: 0.0,
                sigma: 1.0,
            },
            GeneratorKind::UniformNoise { lo: -1.0, hi: 1.0 },
            GeneratorKind::GaussianWalk {
                mu: 0.0,
                sigma: 1.0,
            },
            GeneratorKind::UniformWalk { lo: 0.0, hi: 1.0 },
            GeneratorKind::FfmPowerlaw { beta: 0.6 },
        ] {
            let spec = GeneratorSpec {
                kind,
                n: 1024,
                seed: 9,
            };
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a.values(), b.values());
        }
    }

    #[test]
    fn ffm_standardized_output() {
        let x = ffm_powerlaw(4096, 0.6, 4).unwrap();
        assert!(x.mean().abs() < 1e-10);
        assert!((x.std_dev() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ffm_beta_zero_is_white() {
        let x = ffm_powerlaw(1 << 14, 0.0, 5).unwrap();
        let r = acf(&x, 1).unwrap();
        let bound = 3.0 / (x.len() as f64).sqrt();
        assert!(r[1].abs() < bound, "acf(1) = {} vs {bound}", r[1]);
        let scales = default_scales(x.len(), 2).unwrap();
        let alpha = dfa(&x, &scales, 2).unwrap().exponent;
        assert!((alpha - 0.5).abs() < 0.05, "alpha = {alpha}");
    }

    #[test]
    fn ffm_brownian_target() {
        let x = ffm_powerlaw(1 << 14, 2.0, 6).unwrap();
        let beta = psd_beta(&x, 0.5).unwrap();
        assert!((beta - 2.0).abs() < 0.2, "beta = {beta}");
    }

    #[test]
    fn ffm_guards() {
        assert!(matches!(
            ffm_powerlaw(128, 0.5, 0),
            Err(Error::TooShort { need: 256, .. })
        ));
        assert!(matches!(
            ffm_powerlaw(1000, 0.5, 0),
            Err(Error::NotPowerOfTwo { len: 1000 })
        ));
        assert!(ffm_powerlaw(256, -0.5, 0).is_err());
    }
}
