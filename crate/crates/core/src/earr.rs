//! The EARR metric: accuracy ratio discounted by runtime and subset-size ratios.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::selectors::RUNTIME_FLOOR;

/// Lower bound on the EARR denominator.
pub const DENOMINATOR_FLOOR: f64 = 0.1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EarrError {
    #[error("EARR needs at least two algorithms, got {0}")]
    TooFewAlgorithms(usize),
    #[error("target index {target} out of range for {count} algorithms")]
    TargetOutOfRange { target: usize, count: usize },
    #[error("no triple for algorithm {0} in this fold")]
    MissingTriple(usize),
    #[error("parameters must be finite and non-negative")]
    InvalidParams,
}

/// Weights on runtime (`alpha`) and subset size (`beta`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EarrParams {
    pub alpha: f64,
    pub beta: f64,
}

impl EarrParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, EarrError> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if ok(alpha) && ok(beta) {
            Ok(EarrParams { alpha, beta })
        } else {
            Err(EarrError::InvalidParams)
        }
    }
}

/// Accuracy, selection runtime in seconds and selected feature count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfTriple {
    pub acc: f64,
    pub t: f64,
    pub n: f64,
}

impl PerfTriple {
    /// Build a triple from raw fold results. Zero accuracy becomes half of the
    /// smallest observable accuracy on `test_size` instances, runtime is
    /// floored and the subset size is at least 1.
    pub fn from_raw(acc: f64, test_size: usize, t: f64, n: usize) -> Self {
        let acc = if acc > 0.0 { acc } else { 1.0 / (2.0 * test_size.max(1) as f64) };
        PerfTriple {
            acc,
            t: t.max(RUNTIME_FLOOR),
            n: n.max(1) as f64,
        }
    }
}

pub fn pairwise_earr(i: &PerfTriple, j: &PerfTriple, p: &EarrParams) -> f64 {
    let denom = 1.0 + p.alpha * (i.t / j.t).log10() + p.beta * (i.n / j.n).log10();
    (i.acc / j.acc) / denom.max(DENOMINATOR_FLOOR)
}

/// Mean pairwise EARR of `triples[target]` against every other algorithm.
pub fn mean_earr(target: usize, triples: &[PerfTriple], p: &EarrParams) -> Result<f64, EarrError> {
    let m = triples.len();
    if m < 2 {
        return Err(EarrError::TooFewAlgorithms(m));
    }
    if target >= m {
        return Err(EarrError::TargetOutOfRange { target, count: m });
    }
    // summed in sorted order so that algorithms with identical triples get
    // bit-identical scores regardless of roster position
    let mut terms: Vec<f64> = (0..m)
        .filter(|&j| j != target)
        .map(|j| pairwise_earr(&triples[target], &triples[j], p))
        .collect();
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum::<f64>() / (m - 1) as f64)
}

/// Mean EARR of every algorithm on one fold. `None` marks an algorithm without
/// a result for this fold.
pub fn fold_earr_matrix(fold: &[Option<PerfTriple>], p: &EarrParams) -> Result<Vec<f64>, EarrError> {
    let triples: Vec<PerfTriple> = fold
        .iter()
        .enumerate()
        .map(|(a, t)| t.ok_or(EarrError::MissingTriple(a)))
        .collect::<Result<_, _>>()?;
    (0..triples.len()).map(|a| mean_earr(a, &triples, p)).collect()
}
