//! Detrended fluctuation analysis, standard and multifractal.
//!
//! Both estimators share one fluctuation table: the input is
//! standardized, integrated into its profile, the profile is split into
//! non-overlapping segments of length s taken from the start (the
//! leftover tail beyond s * floor(N/s) is excluded), and each segment is
//! detrended by an order-m least-squares polynomial. The table entry
//! F2(nu, s) is the mean squared residual of segment nu.
//!
//! Standard DFA reports F(s) = [(1/N_s) sum_nu F2(nu, s)]^(1/2); the
//! multifractal generalization (Kantelhardt's formulation) reports
//! F_q(s) = [(1/N_s) sum_nu F2(nu, s)^(q/2)]^(1/q) with the logarithmic
//! q = 0 form exp[(1/(2 N_s)) sum_nu ln F2(nu, s)]. Since F_2 equals the
//! standard fluctuation by construction, h(2) from [`mfdfa`] and the
//! exponent from [`dfa`] are computed by the same code path and agree
//! bit-for-bit on shared scales.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::longterm::{fit_loglog, validate_scales, ScalingResult};
use crate::series::{cumulative_sum, standardize, TimeSeries};

/// Largest supported detrending order; normal equations on the
/// normalized segment coordinate stay well conditioned through this
/// order.
pub const MAX_DFA_ORDER: usize = 10;

/// Mean squared detrending residual per segment, per scale.
struct FluctTable {
    scales: Vec<usize>,
    /// f2[si] holds F2(nu, scales[si]) for every segment nu.
    f2: Vec<Vec<f64>>,
}

/// Least-squares polynomial detrending of one segment: returns the mean
/// squared residual. `upow[a]` holds the a-th power of the normalized
/// coordinate per sample; `gram` is the (m+1)^2 normal matrix of those
/// powers, shared by every segment of the scale.
#[allow(clippy::needless_range_loop)] // index form mirrors the matrix algebra
fn segment_mean_sq_residual(y: &[f64], upow: &[Vec<f64>], gram: &[Vec<f64>]) -> f64 {
    let k = upow.len();
    let s = y.len();
    // Right-hand side r[a] = sum_t u^a y_t.
    let mut aug: Vec<Vec<f64>> = gram
        .iter()
        .enumerate()
        .map(|(a, row)| {
            let r: f64 = upow[a].iter().zip(y).map(|(&u, &v)| u * v).sum();
            let mut full = row.clone();
            full.push(r);
            full
        })
        .collect();
    // Gaussian elimination with partial pivoting on the augmented system.
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs()))
            .expect("non-empty column");
        aug.swap(col, pivot);
        let diag = aug[col][col];
        for row in col + 1..k {
            let factor = aug[row][col] / diag;
            if factor == 0.0 {
                continue;
            }
            for idx in col..=k {
                aug[row][idx] -= factor * aug[col][idx];
            }
        }
    }
    let mut coef = vec![0.0; k];
    for row in (0..k).rev() {
        let mut acc = aug[row][k];
        for idx in row + 1..k {
            acc -= aug[row][idx] * coef[idx];
        }
        coef[row] = acc / aug[row][row];
    }
    let mut ssq = 0.0;
    for t in 0..s {
        let fit: f64 = (0..k).map(|a| coef[a] * upow[a][t]).sum();
        let r = y[t] - fit;
        ssq += r * r;
    }
    ssq / s as f64
}

fn fluctuation_table(x: &TimeSeries, scales: &[usize], m: usize) -> Result<FluctTable> {
    if !(1..=MAX_DFA_ORDER).contains(&m) {
        return Err(Error::InvalidParam {
            name: "m",
            reason: format!("detrending order must be in 1..={MAX_DFA_ORDER}, got {m}"),
        });
    }
    let n = x.len();
    validate_scales(scales, n, 4.max(m + 2))?;
    let profile = cumulative_sum(standardize(x)?.values());

    let mut f2 = Vec::with_capacity(scales.len());
    for &s in scales {
        // Normalized segment coordinate in [-1, 1]; identical for every
        // segment of this scale, so the normal matrix is shared.
        let upow: Vec<Vec<f64>> = (0..=m)
            .map(|a| {
                (0..s)
                    .map(|t| {
                        let u = if s == 1 {
                            0.0
                        } else {
                            2.0 * t as f64 / (s - 1) as f64 - 1.0
                        };
                        u.powi(a as i32)
                    })
                    .collect()
            })
            .collect();
        let gram: Vec<Vec<f64>> = (0..=m)
            .map(|a| {
                (0..=m)
                    .map(|b| upow[a].iter().zip(&upow[b]).map(|(&p, &q)| p * q).sum())
                    .collect()
            })
            .collect();
        let n_seg = n / s;
        let per_segment: Vec<f64> = (0..n_seg)
            .map(|nu| segment_mean_sq_residual(&profile[nu * s..(nu + 1) * s], &upow, &gram))
            .collect();
        f2.push(per_segment);
    }
    Ok(FluctTable {
        scales: scales.to_vec(),
        f2,
    })
}

/// Generalized fluctuation at one scale; `excluded` counts segments with
/// zero residual dropped for q <= 0 (they would blow up the negative
/// moments; for positive q they contribute nothing and are kept).
fn fq_value(per_segment: &[f64], q: f64) -> (f64, usize) {
    if q == 0.0 {
        let kept: Vec<f64> = per_segment.iter().copied().filter(|&v| v > 0.0).collect();
        let excluded = per_segment.len() - kept.len();
        if kept.is_empty() {
            return (0.0, excluded);
        }
        let mean_ln: f64 = kept.iter().map(|&v| v.ln()).sum::<f64>() / kept.len() as f64;
        ((0.5 * mean_ln).exp(), excluded)
    } else {
        let (kept, excluded): (Vec<f64>, usize) = if q < 0.0 {
            let kept: Vec<f64> = per_segment.iter().copied().filter(|&v| v > 0.0).collect();
            let excluded = per_segment.len() - kept.len();
            (kept, excluded)
        } else {
            (per_segment.to_vec(), 0)
        };
        if kept.is_empty() {
            return (0.0, excluded);
        }
        let mean_pow: f64 = kept.iter().map(|&v| v.powf(q / 2.0)).sum::<f64>() / kept.len() as f64;
        (mean_pow.powf(1.0 / q), excluded)
    }
}

/// Detrended fluctuation analysis of order `m` over `scales`.
///
/// Returns F(s) per scale and the exponent alpha fitted over the whole
/// grid. alpha = 0.5 for uncorrelated input, (beta + 1) / 2 for
/// power-law-correlated input, and 1.5 for integrated white noise.
/// Standardization makes the result invariant under affine transforms of
/// the input.
///
/// # Errors
/// [`Error::ZeroVariance`] on constant input, [`Error::BadScales`] /
/// [`Error::InvalidParam`] on grid or order violations.
pub fn dfa(x: &TimeSeries, scales: &[usize], m: usize) -> Result<ScalingResult> {
    let table = fluctuation_table(x, scales, m)?;
    let fluct: Vec<f64> = table.f2.iter().map(|seg| fq_value(seg, 2.0).0).collect();
    ScalingResult::from_points(table.scales, fluct)
}

/// Multifractal DFA output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfdfaResult {
    /// Moment orders, as supplied.
    pub qs: Vec<f64>,
    /// Scales in samples.
    pub scales: Vec<usize>,
    /// fq[qi][si] = F_q(s) for `qs[qi]`, `scales[si]`.
    pub fq: Vec<Vec<f64>>,
    /// Generalized Hurst exponent h(q) per entry of `qs`.
    pub h: Vec<f64>,
    /// Zero-residual segments dropped from q <= 0 moments.
    pub n_excluded_segments: usize,
}

impl MfdfaResult {
    /// h(q) for the given moment order, if it was requested.
    #[must_use]
    pub fn h_of(&self, q: f64) -> Option<f64> {
        self.qs.iter().position(|&v| v == q).map(|i| self.h[i])
    }
}

/// Multifractal DFA: generalized fluctuations F_q(s) and exponents h(q).
///
/// h(q) is constant in q for monofractal input; h(2) reproduces the
/// [`dfa`] exponent exactly (same fluctuation table, same fit).
///
/// # Errors
/// As [`dfa`], plus [`Error::InvalidParam`] for an empty or non-finite
/// `qs`.
pub fn mfdfa(x: &TimeSeries, scales: &[usize], qs: &[f64], m: usize) -> Result<MfdfaResult> {
    if qs.is_empty() || qs.iter().any(|q| !q.is_finite()) {
        return Err(Error::InvalidParam {
            name: "qs",
            reason: "moment orders must be a non-empty list of finite reals".into(),
        });
    }
    let table = fluctuation_table(x, scales, m)?;
    let mut fq = Vec::with_capacity(qs.len());
    let mut h = Vec::with_capacity(qs.len());
    let mut n_excluded = 0;
    for &q in qs {
        let mut curve = Vec::with_capacity(table.scales.len());
        for seg in &table.f2 {
            let (v, excluded) = fq_value(seg, q);
            curve.push(v);
            n_excluded += excluded;
        }
        let (slope, _, _) = fit_loglog(&table.scales, &curve)?;
        fq.push(curve);
        h.push(slope);
    }
    Ok(MfdfaResult {
        qs: qs.to_vec(),
        scales: table.scales,
        fq,
        h,
        n_excluded_segments: n_excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::longterm::default_scales;
    use crate::models::{simulate, ArmaSpec};
    use crate::synth::{generate, GeneratorKind, GeneratorSpec};

    fn white(n: usize, seed: u64) -> TimeSeries {
        simulate(&ArmaSpec::standard(vec![], vec![]).unwrap(), n, seed)
            .unwrap()
            .series
    }

    fn walk(n: usize, seed: u64) -> TimeSeries {
        generate(&GeneratorSpec {
            kind: GeneratorKind::GaussianWalk {
                mu: 0.0,
                sigma: 1.0,
            },
            n,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn white_noise_alpha_half() {
        let n = 1 << 14;
        let x = white(n, 31);
        let scales = default_scales(n, 2).unwrap();
        let r = dfa(&x, &scales, 2).unwrap();
        assert!((r.exponent - 0.5).abs() < 0.05, "alpha = {}", r.exponent);
    }

    #[test]
    fn random_walk_alpha_three_halves() {
        let n = 1 << 14;
        let x = walk(n, 32);
        let scales = default_scales(n, 2).unwrap();
        let r = dfa(&x, &scales, 2).unwrap();
        assert!((r.exponent - 1.5).abs() < 0.1, "alpha = {}", r.exponent);
    }

    #[test]
    fn affine_invariance() {
        let n = 4096;
        let x = white(n, 33);
        let y =
            TimeSeries::from_values(x.values().iter().map(|&v| -3.5 * v + 11.0).collect()).unwrap();
        let scales = default_scales(n, 1).unwrap();
        let rx = dfa(&x, &scales, 1).unwrap();
        let ry = dfa(&y, &scales, 1).unwrap();
        assert!((rx.exponent - ry.exponent).abs() < 1e-9);
        for (a, b) in rx.fluctuations.iter().zip(&ry.fluctuations) {
            assert!((a - b).abs() < 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn h2_equals_dfa_alpha_bit_exactly() {
        let n = 8192;
        let x = white(n, 34);
        let scales = default_scales(n, 2).unwrap();
        let d = dfa(&x, &scales, 2).unwrap();
        let m = mfdfa(&x, &scales, &[-4.0, -2.0, 0.0, 2.0, 4.0], 2).unwrap();
        assert_eq!(m.h_of(2.0).unwrap(), d.exponent);
        let qi = m.qs.iter().position(|&q| q == 2.0).unwrap();
        assert_eq!(m.fq[qi], d.fluctuations);
    }

    #[test]
    fn white_noise_is_monofractal() {
        let n = 1 << 14;
        let x = white(n, 35);
        let scales = default_scales(n, 2).unwrap();
        let qs = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0];
        let m = mfdfa(&x, &scales, &qs, 2).unwrap();
        let lo = m.h.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = m.h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo <= 0.1, "h(q) spread = {}", hi - lo);
        assert!((m.h_of(2.0).unwrap() - 0.5).abs() < 0.06);
    }

    #[test]
    fn guards() {
        let x = white(1024, 36);
        let scales = default_scales(1024, 2).unwrap();
        assert!(dfa(&x, &scales, 0).is_err());
        assert!(dfa(&x, &scales, 99).is_err());
        assert!(dfa(&x, &[8], 2).is_err());
        assert!(dfa(&x, &[8, 8, 16], 2).is_err());
        assert!(dfa(&x, &[8, 1024], 2).is_err());
        let constant = TimeSeries::from_values(vec![1.0; 1024]).unwrap();
        assert!(matches!(
            dfa(&constant, &scales, 2),
            Err(Error::ZeroVariance { .. })
        ));
        assert!(mfdfa(&x, &scales, &[], 2).is_err());
        assert!(mfdfa(&x, &scales, &[f64::NAN], 2).is_err());
    }

    #[test]
    fn detrending_kills_polynomial_trends() {
        // Profile of a linear series is quadratic; order-2 detrending
        // removes it exactly, leaving residuals at roundoff (possibly
        // exactly zero, in which case the log-log fit has nothing to
        // work with and reports insufficient points).
        let n = 1024;
        let x = TimeSeries::from_values((0..n).map(|i| 0.5 + 0.25 * i as f64).collect()).unwrap();
        let scales = [8, 16, 32, 64, 128, 256];
        match dfa(&x, &scales, 2) {
            Ok(r) => {
                for &f in &r.fluctuations {
                    assert!(f < 1e-8, "residual fluctuation {f}");
                }
            }
            Err(Error::InsufficientPoints { .. }) => {}
            Err(other) => panic!("unexpected error {other:?}"),
        }
    }
}
