//! Filter feature subset selection algorithms.
//!
//! Each algorithm pairs an evaluation measure with a search strategy:
//!
//! | id         | measure                      | search            |
//! |------------|------------------------------|-------------------|
//! | `cfs-sfs`  | CFS merit (dependency)       | greedy forward    |
//! | `cfs-sbs`  | CFS merit (dependency)       | greedy backward   |
//! | `cons-sfs` | inconsistency rate           | greedy forward    |
//! | `cons-sbs` | inconsistency rate           | greedy backward   |
//! | `fcbf`     | symmetric uncertainty        | FCBF              |
//! | `relieff`  | ReliefF distance weights     | ranker, w > 0.01  |
//! | `signific` | chi-square significance      | ranker, p < 0.01  |
//!
//! All but ReliefF work on the MDL-discretized view of the data.

mod fcbf;
mod measures;
mod relieff;
mod search;
pub(crate) mod significance;

pub use self::fcbf::fcbf;
pub use self::measures::{cfs_merit, inconsistency_rate, symmetric_uncertainty, CfsEvaluator};
pub use self::relieff::relieff_weights;
pub use self::search::{greedy_search, Direction};
pub use self::significance::{chi_square_independence, significance_rank, ChiSquare};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tabular::{mdl_discretize, Dataset};

/// Floor applied to measured selection runtimes (seconds).
pub const RUNTIME_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SelectError {
    #[error("training data holds a single class")]
    SingleClass,
    #[error("training data has no predictive features")]
    NoFeatures,
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmId {
    #[serde(rename = "cfs-sfs")]
    CfsSfs,
    #[serde(rename = "cfs-sbs")]
    CfsSbs,
    #[serde(rename = "cons-sfs")]
    ConsSfs,
    #[serde(rename = "cons-sbs")]
    ConsSbs,
    #[serde(rename = "fcbf")]
    Fcbf,
    #[serde(rename = "relieff")]
    Relieff,
    #[serde(rename = "signific")]
    Signific,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 7] = [
        AlgorithmId::CfsSfs,
        AlgorithmId::CfsSbs,
        AlgorithmId::ConsSfs,
        AlgorithmId::ConsSbs,
        AlgorithmId::Fcbf,
        AlgorithmId::Relieff,
        AlgorithmId::Signific,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::CfsSfs => "cfs-sfs",
            AlgorithmId::CfsSbs => "cfs-sbs",
            AlgorithmId::ConsSfs => "cons-sfs",
            AlgorithmId::ConsSbs => "cons-sbs",
            AlgorithmId::Fcbf => "fcbf",
            AlgorithmId::Relieff => "relieff",
            AlgorithmId::Signific => "signific",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = SelectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| SelectError::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Selected predictive column indices, ascending.
    pub selected: Vec<usize>,
    pub runtime_s: f64,
    pub algorithm: AlgorithmId,
}

/// Tunables of the individual algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectorConfig {
    pub relieff_max_samples: usize,
    pub relieff_neighbors: usize,
    pub relieff_threshold: f64,
    pub relieff_seed: u64,
    pub significance_alpha: f64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            relieff_max_samples: 250,
            relieff_neighbors: 10,
            relieff_threshold: 0.01,
            relieff_seed: 0,
            significance_alpha: 0.01,
        }
    }
}

/// Dense nominal codes of a discretized dataset, the input of every
/// entropy- and count-based measure.
#[derive(Debug, Clone)]
pub struct NominalTable {
    columns: Vec<Vec<Option<u32>>>,
    labels: Vec<u32>,
    class_count: usize,
}

impl NominalTable {
    /// Discretizes numeric columns first.
    pub fn new(ds: &Dataset) -> Self {
        let discrete = mdl_discretize(ds);
        NominalTable {
            columns: discrete
                .columns()
                .iter()
                .map(|c| c.as_codes().expect("discretized").to_vec())
                .collect(),
            labels: discrete.class_labels().to_vec(),
            class_count: discrete.class_count(),
        }
    }

    pub fn feature_count(&self) -> usize {
        self.columns.len()
    }

    pub fn instance_count(&self) -> usize {
        self.labels.len()
    }

    pub fn column(&self, i: usize) -> &[Option<u32>] {
        &self.columns[i]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }
}

pub fn select(alg: AlgorithmId, train: &Dataset) -> Result<SelectionResult, SelectError> {
    select_with(alg, train, &SelectorConfig::default())
}

/// Run one algorithm on a training split, timing the whole call (including
/// discretization) with a monotonic clock.
pub fn select_with(alg: AlgorithmId, train: &Dataset, config: &SelectorConfig) -> Result<SelectionResult, SelectError> {
    if train.feature_count() == 0 {
        return Err(SelectError::NoFeatures);
    }
    if train.classes_present() < 2 {
        return Err(SelectError::SingleClass);
    }
    let start = Instant::now();
    let mut selected = run(alg, train, config)?;
    let runtime_s = start.elapsed().as_secs_f64().max(RUNTIME_FLOOR);
    selected.sort_unstable();
    selected.dedup();
    debug_assert!(!selected.is_empty() && selected.len() <= train.feature_count());
    Ok(SelectionResult {
        selected,
        runtime_s,
        algorithm: alg,
    })
}

fn run(alg: AlgorithmId, train: &Dataset, config: &SelectorConfig) -> Result<Vec<usize>, SelectError> {
    let f = train.feature_count();
    Ok(match alg {
        AlgorithmId::CfsSfs | AlgorithmId::CfsSbs => {
            let table = NominalTable::new(train);
            let eval = CfsEvaluator::new(&table);
            greedy_search(direction(alg), f, |s| eval.merit(s))
        }
        AlgorithmId::ConsSfs | AlgorithmId::ConsSbs => {
            let table = NominalTable::new(train);
            greedy_search(direction(alg), f, |s| -inconsistency_rate(s, &table))
        }
        AlgorithmId::Fcbf => fcbf(&NominalTable::new(train)),
        AlgorithmId::Signific => significance_rank(&NominalTable::new(train), config.significance_alpha),
        AlgorithmId::Relieff => {
            let m = config.relieff_max_samples.min(train.instance_count());
            let weights = relieff_weights(train, m, config.relieff_neighbors, config.relieff_seed)?;
            threshold_or_top(&weights, config.relieff_threshold)
        }
    })
}

fn direction(alg: AlgorithmId) -> Direction {
    match alg {
        AlgorithmId::CfsSbs | AlgorithmId::ConsSbs => Direction::Backward,
        _ => Direction::Forward,
    }
}

/// Features whose score exceeds `threshold`; the single best one otherwise.
pub(crate) fn threshold_or_top(scores: &[f64], threshold: f64) -> Vec<usize> {
    let kept: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] > threshold).collect();
    if kept.is_empty() {
        vec![argmax(scores)]
    } else {
        kept
    }
}

/// Index of the largest value; the lowest index wins ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}
