//! Core containers and sample-level transforms.
//!
//! A [`TimeSeries`] is a uniformly sampled real-valued sequence. A
//! [`ThresholdMap`] discretizes it into a [`StateSequence`] of integer
//! labels, which is the input to every state-based persistence measure.
//! The transforms here (residuals, standardization, profile, block
//! averaging) are the shared first steps of the short- and long-term
//! analyses.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Uniformly sampled real-valued time series.
///
/// Invariants enforced at construction: at least one sample, all samples
/// finite, positive sample period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    sample_period: f64,
    label: String,
}

impl TimeSeries {
    /// Wraps raw samples, validating the container invariants.
    ///
    /// # Errors
    /// [`Error::EmptySeries`] on empty input, [`Error::NonFinite`] if any
    /// sample is NaN or infinite, [`Error::InvalidParam`] if
    /// `sample_period <= 0` or non-finite.
    pub fn new(values: Vec<f64>, sample_period: f64, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if sample_period <= 0.0 || !sample_period.is_finite() {
            return Err(Error::InvalidParam {
                name: "sample_period",
                reason: format!("must be a positive finite real, got {sample_period}"),
            });
        }
        Ok(Self {
            values,
            sample_period,
            label: label.into(),
        })
    }

    /// Wraps samples with unit sample period and an empty label.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1.0, "")
    }

    /// The samples.
    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Consumes the series, returning the samples.
    #[must_use]
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Time units per sample.
    #[must_use]
    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    /// Caller-defined label.
    #[must_use]
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of samples.
    #[must_use]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: the length-one-or-more invariant holds by construction.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean of the samples.
    #[must_use]
    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Population standard deviation (divide by N) of the samples.
    ///
    /// The population convention is used throughout the crate so that
    /// two-point examples are exact and all scaling estimators share one
    /// convention.
    #[must_use]
    pub fn std_dev(&self) -> f64 {
        population_std(&self.values)
    }
}

/// Mean of a non-empty slice.
pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population (divide by N) standard deviation of a slice.
pub(crate) fn population_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Ordered thresholds mapping real samples to `thresholds.len() + 1` states.
///
/// With thresholds d_1 <= ... <= d_{K}, label `i` covers:
/// the first label covers x < d_1, label `i` (interior) covers
/// d_i <= x < d_{i+1}, and the last label covers x >= d_K. The lowest
/// interval is strict-less; every other boundary is closed on the left and
/// open on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMap {
    thresholds: Vec<f64>,
    labels: Vec<i64>,
}

impl ThresholdMap {
    /// Builds a map from `thresholds` (non-decreasing) and one label per
    /// interval (`thresholds.len() + 1` pairwise distinct labels).
    ///
    /// # Errors
    /// [`Error::UnsortedThresholds`], [`Error::DuplicateLabels`],
    /// [`Error::LabelCountMismatch`], or [`Error::NonFinite`] on a NaN
    /// threshold.
    pub fn new(thresholds: Vec<f64>, labels: Vec<i64>) -> Result<Self> {
        if let Some(index) = thresholds.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(index) = thresholds.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::UnsortedThresholds { index: index + 1 });
        }
        if labels.len() != thresholds.len() + 1 {
            return Err(Error::LabelCountMismatch {
                need: thresholds.len() + 1,
                thresholds: thresholds.len(),
                got: labels.len(),
            });
        }
        let distinct: BTreeSet<i64> = labels.iter().copied().collect();
        if distinct.len() != labels.len() {
            return Err(Error::DuplicateLabels);
        }
        Ok(Self { thresholds, labels })
    }

    /// Binary map: one threshold, labels `(below, at_or_above)`.
    pub fn binary(threshold: f64, below: i64, at_or_above: i64) -> Result<Self> {
        Self::new(vec![threshold], vec![below, at_or_above])
    }

    /// The threshold values.
    #[must_use]
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// One label per interval, lowest interval first.
    #[must_use]
    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Number of states (`thresholds.len() + 1`).
    #[must_use]
    pub fn n_states(&self) -> usize {
        self.labels.len()
    }

    /// Label of the interval containing `x`.
    #[must_use]
    pub fn classify(&self, x: f64) -> i64 {
        // partition_point returns the count of thresholds t with t <= x,
        // which is exactly the interval index under the convention
        // x < d_1 -> first, d_i <= x < d_{i+1} -> i-th, x >= d_K -> last.
        let idx = self.thresholds.partition_point(|&t| t <= x);
        self.labels[idx]
    }
}

/// Integer state labels per sample, plus the alphabet they range over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSequence {
    states: Vec<i64>,
    alphabet: BTreeSet<i64>,
    source_map: Option<ThresholdMap>,
}

impl StateSequence {
    /// Wraps raw labels; the alphabet is the set of distinct labels seen.
    ///
    /// # Errors
    /// [`Error::EmptySeries`] on empty input.
    pub fn from_labels(states: Vec<i64>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptySeries);
        }
        let alphabet = states.iter().copied().collect();
        Ok(Self {
            states,
            alphabet,
            source_map: None,
        })
    }

    /// The per-sample labels.
    #[must_use]
    pub fn states(&self) -> &[i64] {
        &self.states
    }

    /// Set of labels the sequence ranges over.
    ///
    /// For sequences built by [`build_state_sequence`] this is the full
    /// label set of the threshold map, including labels that never occur.
    #[must_use]
    pub fn alphabet(&self) -> &BTreeSet<i64> {
        &self.alphabet
    }

    /// The map that produced this sequence, if any.
    #[must_use]
    pub fn source_map(&self) -> Option<&ThresholdMap> {
        self.source_map.as_ref()
    }

    /// Number of samples.
    #[must_use]
    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Always false by construction.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Discretizes `x` through `map`, keeping the map as provenance.
///
/// The alphabet of the result is the full label set of `map`, so states
/// that never occur still count toward the alphabet size used by the
/// burst measures.
///
/// # Errors
/// Never fails for a valid [`TimeSeries`] and [`ThresholdMap`]; both
/// enforce their invariants at construction.
#[must_use]
pub fn build_state_sequence(x: &TimeSeries, map: &ThresholdMap) -> StateSequence {
    let states = x.values().iter().map(|&v| map.classify(v)).collect();
    StateSequence {
        states,
        alphabet: map.labels().iter().copied().collect(),
        source_map: Some(map.clone()),
    }
}

/// Absolute first differences r[n] = |x[n+1] - x[n]|, length N - 1.
///
/// # Errors
/// [`Error::TooShort`] if the input has fewer than two samples.
pub fn residual_series(x: &TimeSeries) -> Result<TimeSeries> {
    if x.len() < 2 {
        return Err(Error::TooShort {
            need: 2,
            got: x.len(),
        });
    }
    let r: Vec<f64> = x.values().windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    TimeSeries::new(r, x.sample_period(), format!("residual({})", x.label()))
}

/// Shifts and scales `x` to mean 0 and population standard deviation 1.
///
/// # Errors
/// [`Error::ZeroVariance`] if all samples are equal.
pub fn standardize(x: &TimeSeries) -> Result<TimeSeries> {
    let m = x.mean();
    let s = x.std_dev();
    if s == 0.0 {
        return Err(Error::ZeroVariance {
            context: "standardize",
        });
    }
    let z = x.values().iter().map(|&v| (v - m) / s).collect();
    TimeSeries::new(z, x.sample_period(), x.label())
}

/// Cumulative sum y[n] = sum of x[1..=n] (the series profile).
#[must_use]
pub fn profile(x: &TimeSeries) -> TimeSeries {
    let mut acc = 0.0;
    let y: Vec<f64> = x
        .values()
        .iter()
        .map(|&v| {
            acc += v;
            acc
        })
        .collect();
    TimeSeries::new(y, x.sample_period(), format!("profile({})", x.label()))
        .expect("profile of a valid series is valid")
}

/// Raw cumulative sum of a slice (profile without the container).
pub(crate) fn cumulative_sum(values: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    values
        .iter()
        .map(|&v| {
            acc += v;
            acc
        })
        .collect()
}

/// Block-averages `x` over non-overlapping blocks of `b` samples.
///
/// Output sample p is the mean of block p; the sample period is scaled by
/// `b`; the trailing `N mod b` samples are dropped.
///
/// # Errors
/// [`Error::InvalidParam`] if `b == 0`, [`Error::BlockTooLarge`] if
/// `b > N`.
pub fn block_rescale(x: &TimeSeries, b: usize) -> Result<TimeSeries> {
    if b == 0 {
        return Err(Error::InvalidParam {
            name: "b",
            reason: "block size must be at least 1".into(),
        });
    }
    if b > x.len() {
        return Err(Error::BlockTooLarge {
            block: b,
            len: x.len(),
        });
    }
    let n_blocks = x.len() / b;
    let v: Vec<f64> = (0..n_blocks)
        .map(|p| x.values()[p * b..(p + 1) * b].iter().sum::<f64>() / b as f64)
        .collect();
    TimeSeries::new(v, x.sample_period() * b as f64, x.label())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn container_rejects_bad_input() {
        assert!(matches!(
            TimeSeries::from_values(vec![]),
            Err(Error::EmptySeries)
        ));
        assert!(matches!(
            TimeSeries::from_values(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(TimeSeries::new(vec![1.0], 0.0, "x").is_err());
        assert!(TimeSeries::new(vec![1.0], -1.0, "x").is_err());
    }

    #[test]
    fn threshold_map_validation() {
        assert!(matches!(
            ThresholdMap::new(vec![2.0, 1.0], vec![0, 1, 2]),
            Err(Error::UnsortedThresholds { index: 1 })
        ));
        assert!(matches!(
            ThresholdMap::new(vec![1.0], vec![0, 0]),
            Err(Error::DuplicateLabels)
        ));
        assert!(matches!(
            ThresholdMap::new(vec![1.0], vec![0]),
            Err(Error::LabelCountMismatch { .. })
        ));
        // Equal thresholds are allowed; the middle interval is empty.
        let m = ThresholdMap::new(vec![1.0, 1.0], vec![0, 1, 2]).unwrap();
        assert_eq!(m.classify(1.0), 2);
        assert_eq!(m.classify(0.9), 0);
    }

    #[test]
    fn binary_visibility_example() {
        // Low values map to the first label, high values to the second.
        let map = ThresholdMap::binary(100.0, 1, 0).unwrap();
        let x = ts(&[10.0, 2000.0, 50.0]);
        let s = build_state_sequence(&x, &map);
        assert_eq!(s.states(), &[1, 0, 1]);
    }

    #[test]
    fn constant_below_single_threshold() {
        let map = ThresholdMap::binary(6.0, 1, 0).unwrap();
        let x = ts(&[5.0, 5.0, 5.0]);
        assert_eq!(build_state_sequence(&x, &map).states(), &[1, 1, 1]);
    }

    #[test]
    fn three_state_intervals() {
        let map = ThresholdMap::new(vec![0.3, 0.6], vec![1, 2, 3]).unwrap();
        let x = ts(&[0.1, 0.5, 0.9]);
        assert_eq!(build_state_sequence(&x, &map).states(), &[1, 2, 3]);
    }

    #[test]
    fn boundary_convention() {
        // Lowest interval is strict-less: x == d_1 belongs to the second
        // state; interior boundaries are closed-left.
        let map = ThresholdMap::new(vec![0.0, 1.0], vec![-1, 0, 1]).unwrap();
        assert_eq!(map.classify(-0.5), -1);
        assert_eq!(map.classify(0.0), 0);
        assert_eq!(map.classify(0.5), 0);
        assert_eq!(map.classify(1.0), 1);
        assert_eq!(map.classify(2.0), 1);
    }

    #[test]
    fn alphabet_includes_unvisited_labels() {
        let map = ThresholdMap::new(vec![0.0, 10.0], vec![0, 1, 2]).unwrap();
        let s = build_state_sequence(&ts(&[1.0, 2.0]), &map);
        assert_eq!(s.alphabet().len(), 3);
        assert_eq!(s.states(), &[1, 1]);
    }

    #[test]
    fn residuals() {
        assert_eq!(
            residual_series(&ts(&[1.0, 4.0, 2.0])).unwrap().values(),
            &[3.0, 2.0]
        );
        assert_eq!(
            residual_series(&ts(&[3.0, 3.0, 3.0])).unwrap().values(),
            &[0.0, 0.0]
        );
        assert_eq!(
            residual_series(&ts(&[0.0, 1.0, 0.0, 1.0]))
                .unwrap()
                .values(),
            &[1.0, 1.0, 1.0]
        );
        assert!(residual_series(&ts(&[1.0])).is_err());
    }

    #[test]
    fn standardize_two_points_exact() {
        // Population convention makes the two-point case exact.
        let z = standardize(&ts(&[1.0, 3.0])).unwrap();
        assert_eq!(z.values(), &[-1.0, 1.0]);
    }

    #[test]
    fn standardize_idempotent() {
        let x = ts(&[0.3, -1.2, 2.5, 0.0, 4.1]);
        let z1 = standardize(&x).unwrap();
        let z2 = standardize(&z1).unwrap();
        for (a, b) in z1.values().iter().zip(z2.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn standardize_rejects_constant() {
        assert!(matches!(
            standardize(&ts(&[2.0, 2.0])),
            Err(Error::ZeroVariance { .. })
        ));
    }

    #[test]
    fn profile_examples() {
        assert_eq!(profile(&ts(&[1.0, 1.0, 1.0])).values(), &[1.0, 2.0, 3.0]);
        assert_eq!(
            profile(&ts(&[1.0, -1.0, 1.0, -1.0])).values(),
            &[1.0, 0.0, 1.0, 0.0]
        );
        assert_eq!(profile(&ts(&[0.0, 0.0])).values(), &[0.0, 0.0]);
    }

    #[test]
    fn block_rescale_examples() {
        let x = ts(&[1.0, 2.0, 3.0, 4.0]);
        let r = block_rescale(&x, 2).unwrap();
        assert_eq!(r.values(), &[1.5, 3.5]);
        assert_eq!(r.sample_period(), 2.0);

        // b = 1 is the identity.
        assert_eq!(block_rescale(&x, 1).unwrap().values(), x.values());

        // Trailing remainder is dropped.
        let odd = ts(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(block_rescale(&odd, 2).unwrap().values(), &[1.5, 3.5]);

        assert!(matches!(
            block_rescale(&x, 5),
            Err(Error::BlockTooLarge { block: 5, len: 4 })
        ));
        assert!(block_rescale(&x, 0).is_err());
    }

    #[test]
    fn block_rescale_preserves_covered_mean() {
        let x = ts(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let b = 3;
        let r = block_rescale(&x, b).unwrap();
        let covered = &x.values()[..(x.len() / b) * b];
        let covered_mean = covered.iter().sum::<f64>() / covered.len() as f64;
        assert!((r.mean() - covered_mean).abs() < 1e-12);
    }
}
