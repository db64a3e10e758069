//! Detector outcomes, their probabilities, parity statistics and sampling.
//!
//! Station `k` reports `+1` when its unprimed detector fires and `-1` for
//! the primed one. Stations are indexed D, E, F = 0, 1, 2.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amplitude::{ModeId, Sign, StateVector};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub const STATION_NAMES: [&str; 3] = ["D", "E", "F"];

/// Station index and reported sign for a detector mode.
pub fn detector(mode: ModeId) -> Option<(usize, Sign)> {
    match mode {
        ModeId::D => Some((0, Sign::Plus)),
        ModeId::DPrime => Some((0, Sign::Minus)),
        ModeId::E => Some((1, Sign::Plus)),
        ModeId::EPrime => Some((1, Sign::Minus)),
        ModeId::F => Some((2, Sign::Plus)),
        ModeId::FPrime => Some((2, Sign::Minus)),
        _ => None,
    }
}

/// One ±1 result per station.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(Vec<Sign>);

impl Outcome {
    pub fn new(signs: Vec<Sign>) -> Self {
        Outcome(signs)
    }

    /// Outcome from `±1` integers; anything else is rejected.
    pub fn from_values(values: &[i8]) -> Result<Self> {
        values
            .iter()
            .map(|&v| match v {
                1 => Ok(Sign::Plus),
                -1 => Ok(Sign::Minus),
                _ => Err(Error::InvalidOutcome(format!("{values:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Outcome)
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn station_count(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, station: usize) -> Sign {
        self.0[station]
    }

    /// Product of all station results.
    pub fn parity(&self) -> Sign {
        self.0.iter().copied().product()
    }

    /// All `2^n` outcomes, `+…+` first.
    pub fn all(station_count: usize) -> impl Iterator<Item = Outcome> {
        (0..1usize << station_count).map(move |bits| {
            Outcome(
                (0..station_count)
                    .map(|k| Sign::from_parity(bits >> (station_count - 1 - k) & 1 == 1))
                    .collect(),
            )
        })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(if s.is_minus() { "-" } else { "+" })?;
        }
        Ok(())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    /// Accepts `+` and `-` (or U+2212 `−`) per station.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidOutcome(s.to_owned()));
        }
        s.chars()
            .map(|ch| match ch {
                '+' => Ok(Sign::Plus),
                '-' | '\u{2212}' => Ok(Sign::Minus),
                _ => Err(Error::InvalidOutcome(s.to_owned())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Outcome)
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Probability of every outcome over a fixed number of stations.
///
/// All `2^n` outcomes are present, zeros included, in `+…+`-first order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    station_count: usize,
    probs: BTreeMap<Outcome, f64>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    outcome: Outcome,
    probability: f64,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    station_count: usize,
    outcomes: Vec<Row>,
}

impl OutcomeDistribution {
    /// Builds a distribution; outcomes not listed get probability zero and
    /// repeated outcomes accumulate.
    pub fn from_probabilities(
        station_count: usize,
        entries: impl IntoIterator<Item = (Outcome, f64)>,
    ) -> Result<Self> {
        let mut probs: BTreeMap<_, _> = Outcome::all(station_count).map(|o| (o, 0.0)).collect();
        for (o, p) in entries {
            if o.station_count() != station_count {
                return Err(Error::StationCountMismatch {
                    expected: station_count,
                    found: o.station_count(),
                });
            }
            *probs.get_mut(&o).expect("all outcomes present") += p;
        }
        Ok(OutcomeDistribution {
            station_count,
            probs,
        })
    }

    /// Relative frequencies of `samples`. An empty sample gives all zeros.
    pub fn empirical(station_count: usize, samples: &[Outcome]) -> Result<Self> {
        let w = if samples.is_empty() {
            0.0
        } else {
            1.0 / samples.len() as f64
        };
        Self::from_probabilities(station_count, samples.iter().map(|o| (o.clone(), w)))
    }

    pub fn station_count(&self) -> usize {
        self.station_count
    }

    pub fn probability(&self, outcome: &Outcome) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, f64)> {
        self.probs.iter().map(|(o, &p)| (o, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Outcomes with probability above `tol`.
    pub fn support(&self, tol: f64) -> Vec<&Outcome> {
        self.probs
            .iter()
            .filter(|(_, &p)| p > tol)
            .map(|(o, _)| o)
            .collect()
    }

    /// Probability that `station` reports `+1`.
    pub fn marginal_plus(&self, station: usize) -> f64 {
        self.probs
            .iter()
            .filter(|(o, _)| o.get(station) == Sign::Plus)
            .map(|(_, p)| p)
            .sum()
    }

    /// `Σ_o |p(o) − q(o)| / 2`.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        Outcome::all(self.station_count.max(other.station_count))
            .map(|o| (self.probability(&o) - other.probability(&o)).abs())
            .sum::<f64>()
            / 2.0
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = DistributionJson {
            station_count: self.station_count,
            outcomes: self
                .iter()
                .map(|(o, p)| Row {
                    outcome: o.clone(),
                    probability: p,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DistributionJson = serde_json::from_str(text)?;
        Self::from_probabilities(
            doc.station_count,
            doc.outcomes.into_iter().map(|r| (r.outcome, r.probability)),
        )
    }

    /// `outcome,probability` with a header row and `\n` line endings.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for (o, p) in self.iter() {
            w.serialize(Row {
                outcome: o.clone(),
                probability: p,
            })?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r
            .deserialize::<Row>()
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let station_count = rows
            .first()
            .map(|r| r.outcome.station_count())
            .ok_or_else(|| Error::Serialization("empty distribution CSV".into()))?;
        Self::from_probabilities(station_count, rows.into_iter().map(|r| (r.outcome, r.probability)))
    }
}

/// Squared amplitudes of a post-selected detector-mode state.
///
/// Every term must place exactly one particle at each station.
pub fn outcome_distribution(state: &StateVector) -> Result<OutcomeDistribution> {
    let stations = state.particle_count();
    let mut entries = Vec::with_capacity(state.len());
    for (term, amp) in state.iter() {
        let mut signs: Vec<Option<Sign>> = vec![None; stations];
        for &mode in term.modes() {
            let (station, sign) = detector(mode).ok_or(Error::NotDetectorMode(mode))?;
            let slot = signs.get_mut(station).ok_or(Error::StationCountMismatch {
                expected: stations,
                found: station + 1,
            })?;
            if slot.is_some() {
                return Err(Error::DoubleStationOccupancy { station });
            }
            *slot = Some(sign);
        }
        let outcome = Outcome(signs.into_iter().map(|s| s.expect("one particle per station")).collect());
        entries.push((outcome, amp.norm_sqr()));
    }
    OutcomeDistribution::from_probabilities(stations, entries)
}

/// `E[Π_k R_k]`.
pub fn parity_expectation(dist: &OutcomeDistribution) -> f64 {
    dist.iter().map(|(o, p)| p * o.parity().to_f64()).sum()
}

/// `n` i.i.d. draws by inverse CDF over outcomes in `+…+`-first order, one
/// `next_f64` per draw.
pub fn sample_with(dist: &OutcomeDistribution, rng: &mut SplitMix64, n: usize) -> Vec<Outcome> {
    let cumulative: Vec<(f64, &Outcome)> = dist
        .iter()
        .scan(0.0, |acc, (o, p)| {
            *acc += p;
            Some((*acc, o))
        })
        .collect();
    // rounding can leave the final cumulative just below 1
    let last_supported = dist
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .last()
        .map(|(o, _)| o);
    (0..n)
        .map(|_| {
            let u = rng.next_f64();
            cumulative
                .iter()
                .find(|(c, _)| u < *c)
                .map(|(_, o)| *o)
                .or(last_supported)
                .expect("distribution has support")
                .clone()
        })
        .collect()
}

/// [`sample_with`] on a fresh generator seeded with `seed`.
pub fn sample(dist: &OutcomeDistribution, seed: u64, n: usize) -> Vec<Outcome> {
    sample_with(dist, &mut SplitMix64::new(seed), n)
}
