//! States, populations, weights and quotas.

use std::collections::HashSet;
use std::io::Read;

use crate::error::{Error, Result};
use crate::sum::compensated_sum;

/// Persons per unit of population used for square-root weights.
pub const POPULATION_UNIT: f64 = 1e6;

const EU27_CSV: &str = include_str!("../data/eu27_qmv2017.csv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateRecord {
    pub name: String,
    pub population: u64,
}

/// An ordered roster of member states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Union {
    states: Vec<StateRecord>,
}

impl Union {
    pub fn new(states: Vec<StateRecord>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Validation("a union needs at least one state".into()));
        }
        let mut seen = HashSet::new();
        for s in &states {
            if s.name.is_empty() {
                return Err(Error::Validation("empty state name".into()));
            }
            if s.population == 0 {
                return Err(Error::Validation(format!("state {:?} has zero population", s.name)));
            }
            if !seen.insert(s.name.as_str()) {
                return Err(Error::Validation(format!("duplicate state name {:?}", s.name)));
            }
        }
        Ok(Self { states })
    }

    /// Parses `name,population` delimited text with a header row.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .has_headers(true)
            .from_reader(source);

        let headers = reader.headers().map_err(csv_error)?.clone();
        if headers.is_empty() {
            return Err(Error::Validation("empty input".into()));
        }
        if headers.len() != 2 || &headers[0] != "name" || &headers[1] != "population" {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `name,population`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }

        let mut states = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line());
            let population = record[1].parse::<u64>().map_err(|e| Error::Parse {
                line,
                message: format!("population {:?}: {e}", &record[1]),
            })?;
            if population == 0 {
                return Err(Error::Parse { line, message: "population must be positive".into() });
            }
            states.push(StateRecord { name: record[0].to_string(), population });
        }
        Self::new(states)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::from_csv(text.as_bytes())
    }

    /// The bundled EU27 roster (QMV2017 populations), largest state first.
    pub fn eu27() -> Self {
        Self::from_csv_str(EU27_CSV).expect("bundled dataset is valid")
    }

    pub fn states(&self) -> &[StateRecord] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(|s| s.name.as_str())
    }

    /// Total population `N`.
    pub fn total_population(&self) -> u128 {
        self.states.iter().map(|s| s.population as u128).sum()
    }

    pub fn max_population(&self) -> u64 {
        self.states.iter().map(|s| s.population).max().unwrap_or(0)
    }

    /// `w_j = sqrt(N_j)` with `N_j` in millions.
    pub fn sqrt_weights(&self) -> WeightVector {
        WeightVector {
            weights: self.states.iter().map(|s| (s.population as f64 / POPULATION_UNIT).sqrt()).collect(),
        }
    }

    /// The quota `q* = sqrt(N) / sum_j sqrt(N_j)`.
    pub fn jagcom_quota(&self) -> QuotaSpec {
        let numerator = (self.total_population() as f64).sqrt();
        let denominator = compensated_sum(self.states.iter().map(|s| (s.population as f64).sqrt()));
        QuotaSpec { q: numerator / denominator, source: QuotaSource::JagcomStar }
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse { line, message: format!("{kind:?}") },
    }
}

/// Positive council weights aligned with the union's states.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("weight vector is empty"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::domain(format!("weights must be positive and finite, got {w}")));
        }
        Ok(Self { weights })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, j: usize) -> Option<f64> {
        self.weights.get(j).copied()
    }

    /// Aggregate weight `W`.
    pub fn total(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// Rescales to percentages of `W`.
    pub fn normalize(&self) -> Result<WeightVector> {
        let total = self.total();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::domain("cannot normalise weights with zero aggregate"));
        }
        Ok(WeightVector { weights: self.weights.iter().map(|w| 100.0 * w / total).collect() })
    }
}

/// Where a quota value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotaSource {
    Zero,
    JagcomStar,
    Explicit,
}

/// Pass threshold: a motion passes iff the signed weighted vote exceeds `q W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotaSpec {
    pub q: f64,
    pub source: QuotaSource,
}

impl QuotaSpec {
    pub fn zero() -> Self {
        Self { q: 0.0, source: QuotaSource::Zero }
    }

    pub fn explicit(q: f64) -> Self {
        Self { q, source: QuotaSource::Explicit }
    }

    /// Rescales a quota, keeping the provenance only when the value is unchanged.
    pub fn scaled(&self, factor: f64) -> Self {
        if factor == 1.0 {
            *self
        } else {
            Self::explicit(self.q * factor)
        }
    }

    /// Analyses need `|q| < 1`; otherwise passage is impossible or certain.
    pub fn check_for_analysis(&self) -> Result<()> {
        if self.q.is_finite() && self.q.abs() < 1.0 {
            Ok(())
        } else {
            Err(Error::domain(format!("quota {} must satisfy |q| < 1", self.q)))
        }
    }
}
