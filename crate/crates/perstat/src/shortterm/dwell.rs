//! Dwell-time statistics and state-based persistence measures.
//!
//! An *episode* (or burst) is a maximal run of identical consecutive
//! states. The final, right-censored run counts as an episode, which
//! biases dwell statistics slightly low on short records; the effect
//! vanishes as the number of episodes grows.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::series::StateSequence;

/// Dwell statistics of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDwell {
    /// Length of every episode of the state, in samples, in order of
    /// occurrence.
    pub episodes: Vec<usize>,
    /// Number of episodes (visits).
    pub n_visits: usize,
    /// Total samples spent in the state; equals the episode-length sum.
    pub n_samples: usize,
    /// Mean episode length in samples.
    pub mean_dwell: f64,
    /// Longest episode in samples.
    pub max_dwell: usize,
    /// Fraction of all samples spent in the state, in [0, 1].
    pub frequency: f64,
}

/// Per-state dwell statistics of a whole sequence.
///
/// Also carries the ingredients of per-state prevalence scores of the
/// form mean dwell x per-state weight x frequency (the weight, for
/// example a mean power, is supplied by the caller's domain).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwellStats {
    /// Statistics per state label, ordered by label.
    pub per_state: BTreeMap<i64, StateDwell>,
    /// Total sequence length in samples.
    pub n_total: usize,
}

impl DwellStats {
    /// All episode lengths pooled across states, in order of occurrence.
    #[must_use]
    pub fn pooled_episodes(&self) -> Vec<usize> {
        // Order across states does not matter for any pooled statistic;
        // iterate by label for determinism.
        self.per_state
            .values()
            .flat_map(|d| d.episodes.iter().copied())
            .collect()
    }

    /// Total number of episodes across states.
    #[must_use]
    pub fn n_episodes(&self) -> usize {
        self.per_state.values().map(|d| d.n_visits).sum()
    }
}

/// Computes per-state dwell statistics of `s`.
///
/// Episodes are maximal runs of identical consecutive states; the final
/// run counts as an episode. Frequencies sum to 1 over states that occur.
#[must_use]
pub fn dwell_stats(s: &StateSequence) -> DwellStats {
    let states = s.states();
    let n_total = states.len();
    let mut per_state: BTreeMap<i64, StateDwell> = BTreeMap::new();

    let mut run_state = states[0];
    let mut run_len = 1usize;
    let mut push = |state: i64, len: usize| {
        let d = per_state.entry(state).or_insert_with(|| StateDwell {
            episodes: Vec::new(),
            n_visits: 0,
            n_samples: 0,
            mean_dwell: 0.0,
            max_dwell: 0,
            frequency: 0.0,
        });
        d.episodes.push(len);
        d.n_visits += 1;
        d.n_samples += len;
        d.max_dwell = d.max_dwell.max(len);
    };
    for &st in &states[1..] {
        if st == run_state {
            run_len += 1;
        } else {
            push(run_state, run_len);
            run_state = st;
            run_len = 1;
        }
    }
    push(run_state, run_len);

    for d in per_state.values_mut() {
        d.mean_dwell = d.n_samples as f64 / d.n_visits as f64;
        d.frequency = d.n_samples as f64 / n_total as f64;
    }
    DwellStats { per_state, n_total }
}

/// Expected dwell time P^E: mean episode length pooled over all states.
///
/// This is the sample estimator of E[T], the expected time the system
/// remains in a state before changing. Non-persistent (alternating)
/// sequences give 1; a constant length-N sequence gives N.
#[must_use]
pub fn persistence_expected(s: &StateSequence) -> f64 {
    let stats = dwell_stats(s);
    s.len() as f64 / stats.n_episodes() as f64
}

/// Burst-based persistence measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstPersistence {
    /// Per-state burst ratio P^b_i = max(T_i) / N_i, where max(T_i) is the
    /// longest episode of state i and N_i its number of visits. States
    /// with zero visits are absent.
    pub per_state: BTreeMap<i64, f64>,
    /// (1 / |S|) max_i P^b_i, with |S| the alphabet size.
    pub p_max: f64,
    /// (1 / |S|) sum_i P^b_i over visited states.
    pub p_sum: f64,
}

/// Computes the burst measures P^b_i, P^b_max, P^b_S.
///
/// `N_i` counts visits (episodes), not samples: a sequence pinned to one
/// state has a single visit, so P^b_i grows with the record length, which
/// is the intended perfectly-persistent limit. The normalizing alphabet
/// size |S| includes labels that never occur (possible when the sequence
/// was built from a threshold map); unvisited states are excluded from
/// the max and the sum themselves.
#[must_use]
pub fn persistence_burst(s: &StateSequence) -> BurstPersistence {
    let stats = dwell_stats(s);
    let n_alphabet = s.alphabet().len() as f64;
    let per_state: BTreeMap<i64, f64> = stats
        .per_state
        .iter()
        .map(|(&state, d)| (state, d.max_dwell as f64 / d.n_visits as f64))
        .collect();
    let max = per_state.values().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let sum: f64 = per_state.values().sum();
    BurstPersistence {
        p_max: max / n_alphabet,
        p_sum: sum / n_alphabet,
        per_state,
    }
}

/// Empirical dwell-length distribution P^P of one state.
///
/// Entry `(n_r, p)` is the fraction of the state's episodes with length
/// exactly `n_r` samples. Values sum to 1 over the observed lengths.
///
/// # Errors
/// [`Error::StateAbsent`] if `state` never occurs in the sequence.
pub fn persistence_pp(s: &StateSequence, state: i64) -> Result<BTreeMap<usize, f64>> {
    let stats = dwell_stats(s);
    let d = stats
        .per_state
        .get(&state)
        .ok_or(Error::StateAbsent { state })?;
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &len in &d.episodes {
        *hist.entry(len).or_insert(0) += 1;
    }
    let total = d.n_visits as f64;
    Ok(hist
        .into_iter()
        .map(|(len, count)| (len, count as f64 / total))
        .collect())
}

/// Markov persistence P^M: mean self-transition probability.
///
/// Estimates first-order transition probabilities from the sequence and
/// averages p_ii, unweighted, over the states that have at least one
/// outgoing transition. For a binary sequence this is (p00 + p11) / 2.
/// A constant sequence gives 1; an alternating one gives 0.
///
/// # Errors
/// [`Error::TooShort`] if the sequence has fewer than two samples.
pub fn persistence_markov(s: &StateSequence) -> Result<f64> {
    if s.len() < 2 {
        return Err(Error::TooShort {
            need: 2,
            got: s.len(),
        });
    }
    // (outgoing transitions, self transitions) per state.
    let mut counts: BTreeMap<i64, (u64, u64)> = BTreeMap::new();
    for w in s.states().windows(2) {
        let e = counts.entry(w[0]).or_insert((0, 0));
        e.0 += 1;
        if w[1] == w[0] {
            e.1 += 1;
        }
    }
    let p_sum: f64 = counts
        .values()
        .map(|&(total, selfs)| selfs as f64 / total as f64)
        .sum();
    Ok(p_sum / counts.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(states: &[i64]) -> StateSequence {
        StateSequence::from_labels(states.to_vec()).unwrap()
    }

    #[test]
    fn dwell_hand_count() {
        let stats = dwell_stats(&seq(&[0, 0, 1, 1, 1, 0]));
        assert_eq!(stats.per_state[&0].episodes, vec![2, 1]);
        assert_eq!(stats.per_state[&1].episodes, vec![3]);
        assert_eq!(stats.per_state[&0].n_visits, 2);
        assert_eq!(stats.per_state[&0].n_samples, 3);
        assert_eq!(stats.per_state[&1].max_dwell, 3);
        assert_eq!(stats.per_state[&0].frequency, 0.5);
        assert_eq!(stats.per_state[&1].frequency, 0.5);
    }

    #[test]
    fn dwell_constant_and_alternating() {
        let c = dwell_stats(&seq(&[7, 7, 7]));
        assert_eq!(c.per_state[&7].episodes, vec![3]);
        assert_eq!(c.per_state[&7].frequency, 1.0);

        let a = dwell_stats(&seq(&[0, 1, 0, 1]));
        assert_eq!(a.per_state[&0].episodes, vec![1, 1]);
        assert_eq!(a.per_state[&1].episodes, vec![1, 1]);
    }

    #[test]
    fn dwell_invariants() {
        let s = seq(&[2, 2, 0, 1, 1, 1, 0, 0, 2]);
        let stats = dwell_stats(&s);
        let sample_sum: usize = stats.per_state.values().map(|d| d.n_samples).sum();
        assert_eq!(sample_sum, s.len());
        for d in stats.per_state.values() {
            assert_eq!(d.episodes.iter().sum::<usize>(), d.n_samples);
        }
        let freq_sum: f64 = stats.per_state.values().map(|d| d.frequency).sum();
        assert!((freq_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expected_dwell() {
        assert_eq!(persistence_expected(&seq(&[0, 1, 0, 1])), 1.0);
        assert_eq!(persistence_expected(&seq(&[5, 5, 5, 5])), 4.0);
        // Episodes {2, 1, 3} pooled: mean 2.
        assert_eq!(persistence_expected(&seq(&[0, 0, 1, 1, 1, 0])), 2.0);
    }

    #[test]
    fn expected_dwell_equals_pooled_mean() {
        let s = seq(&[0, 0, 1, 2, 2, 2, 0, 1, 1]);
        let stats = dwell_stats(&s);
        let pooled = stats.pooled_episodes();
        let mean = pooled.iter().sum::<usize>() as f64 / pooled.len() as f64;
        assert!((persistence_expected(&s) - mean).abs() < 1e-15);
    }

    #[test]
    fn burst_single_state() {
        let b = persistence_burst(&seq(&[1, 1, 1, 1]));
        assert_eq!(b.per_state[&1], 4.0);
        assert_eq!(b.p_max, 4.0);
        assert_eq!(b.p_sum, 4.0);
    }

    #[test]
    fn burst_alternating() {
        let b = persistence_burst(&seq(&[0, 1, 0, 1]));
        assert_eq!(b.per_state[&0], 0.5);
        assert_eq!(b.per_state[&1], 0.5);
    }

    #[test]
    fn burst_hand_count() {
        let b = persistence_burst(&seq(&[0, 0, 1, 1, 1, 0]));
        assert_eq!(b.per_state[&0], 1.0);
        assert_eq!(b.per_state[&1], 3.0);
        assert_eq!(b.p_max, 1.5);
        assert_eq!(b.p_sum, 2.0);
    }

    #[test]
    fn pp_distribution() {
        let pp = persistence_pp(&seq(&[0, 0, 1, 1, 1, 0]), 0).unwrap();
        assert_eq!(pp[&2], 0.5);
        assert_eq!(pp[&1], 0.5);

        let alt = persistence_pp(&seq(&[0, 1, 0, 1]), 1).unwrap();
        assert_eq!(alt[&1], 1.0);

        let cst = persistence_pp(&seq(&[3, 3, 3, 3, 3]), 3).unwrap();
        assert_eq!(cst[&5], 1.0);

        assert!(matches!(
            persistence_pp(&seq(&[0, 1]), 9),
            Err(Error::StateAbsent { state: 9 })
        ));
    }

    #[test]
    fn pp_sums_to_one() {
        let s = seq(&[0, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1]);
        for state in [0, 1] {
            let total: f64 = persistence_pp(&s, state).unwrap().values().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn markov_persistence() {
        // Transitions: 0->0, 0->1, 1->1 gives p00 = 1/2, p11 = 1.
        assert_eq!(persistence_markov(&seq(&[0, 0, 1, 1])).unwrap(), 0.75);
        assert_eq!(persistence_markov(&seq(&[4, 4, 4])).unwrap(), 1.0);
        assert_eq!(persistence_markov(&seq(&[0, 1, 0, 1, 0])).unwrap(), 0.0);
        assert!(persistence_markov(&seq(&[1])).is_err());
    }
}
