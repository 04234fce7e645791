//! k-order Markov-chain estimation from state sequences.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::series::StateSequence;

/// Transition counts and probabilities of a k-order Markov chain.
///
/// Probabilities are conditional relative frequencies: the count of
/// `history -> next` divided by the count of `history -> anything`.
/// Histories that never occur are absent from the table.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    order: usize,
    /// history -> (next -> (count, prob)), ordered for determinism.
    table: BTreeMap<Vec<i64>, BTreeMap<i64, (u64, f64)>>,
}

/// One row of the serialized transition table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionEntry {
    /// The k preceding states, oldest first.
    pub history: Vec<i64>,
    /// The state that follows.
    pub next: i64,
    /// Number of observed `history -> next` transitions.
    pub count: u64,
    /// Conditional probability of `next` given `history`.
    pub prob: f64,
}

/// Serialized form of a [`TransitionModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionModelJson {
    /// Markov order k.
    pub order: usize,
    /// All observed transitions, ordered by (history, next).
    pub entries: Vec<TransitionEntry>,
}

impl TransitionModel {
    /// Markov order k.
    #[must_use]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Observed count of `history -> next`.
    #[must_use]
    pub fn count(&self, history: &[i64], next: i64) -> u64 {
        self.table
            .get(history)
            .and_then(|row| row.get(&next))
            .map_or(0, |&(c, _)| c)
    }

    /// Estimated probability of `next` given `history`; 0 for pairs that
    /// were never observed but whose history was.
    ///
    /// Returns `None` when the history itself never occurred.
    #[must_use]
    pub fn prob(&self, history: &[i64], next: i64) -> Option<f64> {
        self.table
            .get(history)
            .map(|row| row.get(&next).map_or(0.0, |&(_, p)| p))
    }

    /// Iterates over rows as (history, next, count, prob), ordered.
    pub fn entries(&self) -> impl Iterator<Item = TransitionEntry> + '_ {
        self.table.iter().flat_map(|(history, row)| {
            row.iter()
                .map(move |(&next, &(count, prob))| TransitionEntry {
                    history: history.clone(),
                    next,
                    count,
                    prob,
                })
        })
    }

    /// Number of distinct observed histories.
    #[must_use]
    pub fn n_histories(&self) -> usize {
        self.table.len()
    }

    /// Converts to the serializable table form.
    #[must_use]
    pub fn to_json_model(&self) -> TransitionModelJson {
        TransitionModelJson {
            order: self.order,
            entries: self.entries().collect(),
        }
    }
}

/// Estimates a k-order transition model from `s`.
///
/// # Errors
/// [`Error::TooShort`] if the sequence has fewer than `k + 1` samples, and
/// [`Error::InvalidParam`] for `k == 0`.
pub fn fit_markov(s: &StateSequence, k: usize) -> Result<TransitionModel> {
    if k == 0 {
        return Err(Error::InvalidParam {
            name: "k",
            reason: "Markov order must be at least 1".into(),
        });
    }
    if s.len() < k + 1 {
        return Err(Error::TooShort {
            need: k + 1,
            got: s.len(),
        });
    }
    let states = s.states();
    let mut table: BTreeMap<Vec<i64>, BTreeMap<i64, (u64, f64)>> = BTreeMap::new();
    for w in states.windows(k + 1) {
        let history = w[..k].to_vec();
        let next = w[k];
        table
            .entry(history)
            .or_default()
            .entry(next)
            .or_insert((0, 0.0))
            .0 += 1;
    }
    for row in table.values_mut() {
        let total: u64 = row.values().map(|&(c, _)| c).sum();
        for entry in row.values_mut() {
            entry.1 = entry.0 as f64 / total as f64;
        }
    }
    Ok(TransitionModel { order: k, table })
}
