//! Crate-wide error type.

/// Convenience alias for results produced by this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by persistence operations.
///
/// Every variant names the offending quantity so callers can map failures
/// back to a concrete input field or parameter.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// The input series has no samples.
    #[error("series is empty")]
    EmptySeries,

    /// The input has fewer samples than the operation needs.
    #[error("series has {got} samples, need at least {need}")]
    TooShort {
        /// Minimum number of samples required.
        need: usize,
        /// Number of samples provided.
        got: usize,
    },

    /// A sample is NaN or infinite.
    #[error("non-finite value at sample index {index}")]
    NonFinite {
        /// Index of the first offending sample.
        index: usize,
    },

    /// The series has zero variance where a spread is required.
    #[error("zero variance in {context}")]
    ZeroVariance {
        /// Operation that needed a nonzero spread.
        context: &'static str,
    },

    /// Threshold sequence is not sorted non-decreasing.
    #[error("thresholds must be non-decreasing (violated at index {index})")]
    UnsortedThresholds {
        /// Index of the first threshold smaller than its predecessor.
        index: usize,
    },

    /// State labels passed to a threshold map are not pairwise distinct.
    #[error("state labels must be pairwise distinct")]
    DuplicateLabels,

    /// Label count does not match threshold count plus one.
    #[error("need exactly {need} state labels for {thresholds} thresholds, got {got}")]
    LabelCountMismatch {
        /// Required label count.
        need: usize,
        /// Number of thresholds supplied.
        thresholds: usize,
        /// Number of labels supplied.
        got: usize,
    },

    /// A state label was requested that never occurs in the sequence.
    #[error("state {state} not present in sequence")]
    StateAbsent {
        /// The missing label.
        state: i64,
    },

    /// A scalar parameter is outside its documented domain.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam {
        /// Parameter name as it appears in the API.
        name: &'static str,
        /// Why the value was rejected.
        reason: String,
    },

    /// Block size exceeds the series length.
    #[error("block size {block} exceeds series length {len}")]
    BlockTooLarge {
        /// Requested block size.
        block: usize,
        /// Series length.
        len: usize,
    },

    /// The denominator of an estimator is zero.
    #[error("zero denominator in {context}")]
    ZeroDenominator {
        /// Estimator that failed.
        context: &'static str,
    },

    /// An initial probability vector does not sum to one.
    #[error("initial probabilities sum to {sum}, expected 1 within {tol}")]
    NotStochastic {
        /// Actual sum of the supplied vector.
        sum: f64,
        /// Tolerance that was applied.
        tol: f64,
    },

    /// The integration step violates the stability guard.
    #[error("time step {dt} too large for max exit rate {max_exit_rate} (need dt < {limit})")]
    UnstableTimeStep {
        /// Requested step.
        dt: f64,
        /// Largest total exit rate of any state.
        max_exit_rate: f64,
        /// Stability bound 0.1 / max_exit_rate.
        limit: f64,
    },

    /// The fitted lag-1 coefficient admits no exponential decay time.
    #[error("no exponential decay: fitted lag-1 coefficient {a_hat} is not in (0, 1)")]
    NoExponentialDecay {
        /// The offending coefficient.
        a_hat: f64,
    },

    /// A scale grid violates its documented bounds.
    #[error("invalid scale grid: {reason}")]
    BadScales {
        /// Why the grid was rejected.
        reason: String,
    },

    /// The series length must be a power of two for this transform.
    #[error("length {len} is not a power of two")]
    NotPowerOfTwo {
        /// Offending length.
        len: usize,
    },

    /// Too few points remain to fit the requested model.
    #[error("need at least {need} points for {context}, got {got}")]
    InsufficientPoints {
        /// Minimum number of points.
        need: usize,
        /// Points available.
        got: usize,
        /// Fit that was attempted.
        context: &'static str,
    },

    /// Every Monte-Carlo epoch hit the step cap without observing a change.
    #[error("all {epochs} epochs hit the {cap}-step cap without a state change")]
    AllEpochsCapped {
        /// Number of epochs run.
        epochs: usize,
        /// Per-epoch step cap.
        cap: u64,
    },

    /// No valid prediction points remain for evaluation.
    #[error("no valid prediction points to evaluate")]
    NoValidPoints,

    /// A textual spec (generator or model) failed to parse.
    #[error("cannot parse {what} spec: {reason}")]
    SpecParse {
        /// Which spec grammar was being parsed.
        what: &'static str,
        /// Why parsing failed.
        reason: String,
    },
}
