//! Flag value types with their text forms.
//!
//! Each type parses via `FromStr` so clap rejects malformed values as
//! usage errors (exit 2) before any data is touched, and serializes as
//! its original text so manifests stay readable and replay exactly.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Scale-grid selector: `auto` or an explicit `min:max:count:log` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSpec {
    raw: String,
    kind: ScaleKind,
}

#[derive(Clone, Debug, PartialEq)]
enum ScaleKind {
    Auto,
    Log { lo: usize, hi: usize, count: usize },
}

impl ScaleSpec {
    /// Expands to a concrete grid for a series of length `n` with
    /// detrending order `m` (`m` only affects the `auto` lower bound).
    pub fn resolve(&self, n: usize, m: usize) -> perstat::Result<Vec<usize>> {
        match self.kind {
            ScaleKind::Auto => perstat::longterm::default_scales(n, m),
            ScaleKind::Log { lo, hi, count } => {
                Ok(perstat::longterm::log_spaced_integers(lo, hi, count))
            }
        }
    }
}

impl FromStr for ScaleSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let raw = s.trim().to_string();
        if raw == "auto" {
            return Ok(Self {
                raw,
                kind: ScaleKind::Auto,
            });
        }
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 4 || parts[3] != "log" {
            return Err(format!(
                "expected \"auto\" or \"min:max:count:log\", got {s:?}"
            ));
        }
        let field = |i: usize, name: &str| -> Result<usize, String> {
            parts[i]
                .parse::<usize>()
                .map_err(|_| format!("scale {name} {:?} is not a positive integer", parts[i]))
        };
        let lo = field(0, "min")?;
        let hi = field(1, "max")?;
        let count = field(2, "count")?;
        if lo < 2 {
            return Err(format!("scale min must be at least 2, got {lo}"));
        }
        if hi <= lo {
            return Err(format!("scale max must exceed min, got {lo}:{hi}"));
        }
        if count < 2 {
            return Err(format!("scale count must be at least 2, got {count}"));
        }
        Ok(Self {
            raw,
            kind: ScaleKind::Log { lo, hi, count },
        })
    }
}

impl fmt::Display for ScaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// Moment orders for MF-DFA: a `min:max:count` linear grid or an
/// explicit comma-separated list.
#[derive(Clone, Debug, PartialEq)]
pub struct QSpec {
    raw: String,
    values: Vec<f64>,
}

impl QSpec {
    /// The parsed moment orders, in input order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl FromStr for QSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let raw = s.trim().to_string();
        let values = if raw.contains(':') {
            let parts: Vec<&str> = raw.split(':').collect();
            if parts.len() != 3 {
                return Err(format!(
                    "expected \"min:max:count\" or \"q1,q2,...\", got {s:?}"
                ));
            }
            let lo: f64 = parts[0]
                .parse()
                .map_err(|_| format!("q min {:?} is not a number", parts[0]))?;
            let hi: f64 = parts[1]
                .parse()
                .map_err(|_| format!("q max {:?} is not a number", parts[1]))?;
            let count: usize = parts[2]
                .parse()
                .map_err(|_| format!("q count {:?} is not a positive integer", parts[2]))?;
            if !lo.is_finite() || !hi.is_finite() || hi <= lo {
                return Err(format!("q range must be finite with max > min, got {s:?}"));
            }
            if count < 2 {
                return Err(format!("q count must be at least 2, got {count}"));
            }
            (0..count)
                .map(|i| lo + i as f64 * (hi - lo) / (count - 1) as f64)
                .collect()
        } else {
            raw.split(',')
                .map(|part| {
                    let part = part.trim();
                    part.parse::<f64>()
                        .ok()
                        .filter(|q| q.is_finite())
                        .ok_or_else(|| format!("moment order {part:?} is not a finite number"))
                })
                .collect::<Result<Vec<f64>, String>>()?
        };
        if values.is_empty() {
            return Err("need at least one moment order".to_string());
        }
        Ok(Self { raw, values })
    }
}

impl fmt::Display for QSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// Text form of a continuous-time rate matrix, for example
/// `"n=2; 0->1=0.5; 1->0=0.5"`. Unlisted rates are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RatesSpec {
    raw: String,
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl RatesSpec {
    /// Number of states.
    pub fn n_states(&self) -> usize {
        self.n
    }

    /// The `(from, to, rate)` triples, in input order.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }
}

impl FromStr for RatesSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let raw = s.trim().to_string();
        let mut n: Option<usize> = None;
        let mut entries = Vec::new();
        for part in raw.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("rate term {part:?} is not of the form key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "n" {
                let parsed = value
                    .parse::<usize>()
                    .map_err(|_| format!("state count {value:?} is not a positive integer"))?;
                if parsed == 0 {
                    return Err("state count n must be at least 1".to_string());
                }
                n = Some(parsed);
                continue;
            }
            let (from, to) = key
                .split_once("->")
                .ok_or_else(|| format!("rate key {key:?} is not of the form FROM->TO"))?;
            let from = from
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("source state {from:?} is not an integer"))?;
            let to = to
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("target state {to:?} is not an integer"))?;
            let rate = value
                .parse::<f64>()
                .ok()
                .filter(|r| r.is_finite() && *r >= 0.0)
                .ok_or_else(|| format!("rate {value:?} is not a finite non-negative number"))?;
            if from == to {
                return Err(format!("diagonal rate {from}->{to} is not allowed"));
            }
            entries.push((from, to, rate));
        }
        let n = n.ok_or_else(|| "missing state count term n=<int>".to_string())?;
        if let Some(&(from, to, _)) = entries.iter().find(|&&(f, t, _)| f >= n || t >= n) {
            return Err(format!("rate {from}->{to} is out of range for n={n}"));
        }
        Ok(Self { raw, n, entries })
    }
}

impl fmt::Display for RatesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// Fluctuation estimator behind the `crossover` subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    /// Detrended fluctuation analysis.
    Dfa,
    /// Rescaled-range analysis.
    Rs,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dfa => "dfa",
            Self::Rs => "rs",
        })
    }
}

macro_rules! serde_as_text {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(&self.raw)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let raw = String::deserialize(deserializer)?;
                raw.parse().map_err(D::Error::custom)
            }
        }
    };
}

serde_as_text!(ScaleSpec);
serde_as_text!(QSpec);
serde_as_text!(RatesSpec);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_spec_parses_auto_and_grids() {
        assert!("auto".parse::<ScaleSpec>().is_ok());
        let grid = "8:4096:20:log".parse::<ScaleSpec>().unwrap();
        let scales = grid.resolve(1 << 14, 2).unwrap();
        assert_eq!(*scales.first().unwrap(), 8);
        assert_eq!(*scales.last().unwrap(), 4096);
        for w in scales.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn scale_spec_rejects_malformed() {
        for bad in [
            "",
            "8:4096:20",
            "8:4096:20:lin",
            "4096:8:20:log",
            "8:9:1:log",
            "a:b:c:log",
        ] {
            assert!(bad.parse::<ScaleSpec>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn q_spec_grid_hits_integer_orders() {
        let qs = "-4:4:9".parse::<QSpec>().unwrap();
        assert_eq!(
            qs.values(),
            &[-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]
        );
        let list = "0.5, 2".parse::<QSpec>().unwrap();
        assert_eq!(list.values(), &[0.5, 2.0]);
    }

    #[test]
    fn rates_spec_round_trips_and_validates() {
        let r = "n=2; 0->1=0.5; 1->0=0.25".parse::<RatesSpec>().unwrap();
        assert_eq!(r.n_states(), 2);
        assert_eq!(r.entries(), &[(0, 1, 0.5), (1, 0, 0.25)]);
        for bad in [
            "0->1=0.5",
            "n=2; 0->0=1",
            "n=2; 0->2=1",
            "n=2; 0->1=-1",
            "n=0",
        ] {
            assert!(bad.parse::<RatesSpec>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn specs_serialize_as_their_text() {
        let s: ScaleSpec = "16:512:10:log".parse().unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "\"16:512:10:log\"");
        let back: ScaleSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
