//! Distance-weighted k-nearest-neighbour recommendation over a meta-db.

use serde::Serialize;
use thiserror::Error;

use crate::earr::EarrParams;
use crate::metadb::{earr_view, EarrView, MetaDb};
use crate::metafeatures::{extract, l1_distance, MetaFeatureVector, StandardizationRecord, META_LEN};
use crate::selectors::AlgorithmId;
use crate::tabular::Dataset;

/// Added to every distance before inversion so exact matches get finite weight.
pub const DISTANCE_EPS: f64 = 1e-9;

/// Default number of recommended algorithms.
pub const DEFAULT_TOP: usize = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecommendError {
    #[error("k = {k} is out of range 1..={available}")]
    KOutOfRange { k: usize, available: usize },
    #[error("top = {r} is out of range 1..={algorithms}")]
    TopOutOfRange { r: usize, algorithms: usize },
    #[error("excluded entry {0} is not in the meta-db")]
    BadExclusion(usize),
}

/// round(0.375 * n), at least 1 and at most `n`.
pub fn default_k(n: usize) -> usize {
    ((0.375 * n as f64).round() as usize).clamp(1, n.max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    #[serde(rename = "name")]
    pub dataset: String,
    /// Position of the entry in the meta-db.
    #[serde(skip)]
    pub entry: usize,
    pub distance: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredAlgorithm {
    pub algorithm: AlgorithmId,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecommendParams {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub top: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub query: MetaFeatureVector,
    pub params: RecommendParams,
    pub neighbors: Vec<Neighbor>,
    /// Every roster algorithm, best estimated score first.
    pub ranking: Vec<ScoredAlgorithm>,
    pub top: Vec<AlgorithmId>,
}

/// A meta-db paired with its EARR view for one parameter setting, so that
/// many queries can share the view.
pub struct Recommender<'a> {
    db: &'a MetaDb,
    view: EarrView,
}

impl<'a> Recommender<'a> {
    pub fn new(db: &'a MetaDb, p: &EarrParams) -> Self {
        Recommender {
            db,
            view: earr_view(db, p),
        }
    }

    pub fn from_view(db: &'a MetaDb, view: EarrView) -> Self {
        Recommender { db, view }
    }

    pub fn view(&self) -> &EarrView {
        &self.view
    }

    /// The `k` entries closest to `query`, skipping entry `exclude` if given.
    ///
    /// Meta-feature vectors are min-max standardized over the candidate entries
    /// and the query is mapped with the same record (clamped to [0, 1]).
    /// Distances are L1; equal distances keep meta-db order. Weights are
    /// normalized inverse distances.
    pub fn neighbors(
        &self,
        query: &MetaFeatureVector,
        k: usize,
        exclude: Option<usize>,
    ) -> Result<Vec<Neighbor>, RecommendError> {
        let entries = self.db.entries();
        if let Some(x) = exclude {
            if x >= entries.len() {
                return Err(RecommendError::BadExclusion(x));
            }
        }
        let candidates: Vec<usize> = (0..entries.len()).filter(|&i| Some(i) != exclude).collect();
        if k == 0 || k > candidates.len() {
            return Err(RecommendError::KOutOfRange {
                k,
                available: candidates.len(),
            });
        }
        let raw: Vec<[f64; META_LEN]> = candidates.iter().map(|&i| entries[i].meta.to_array()).collect();
        let record = StandardizationRecord::fit(&raw).expect("at least one candidate");
        let q = record.apply(&query.to_array());
        let mut scored: Vec<(f64, usize)> = candidates
            .iter()
            .zip(&raw)
            .map(|(&i, v)| (l1_distance(&record.apply(v), &q).expect("equal lengths"), i))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        scored.truncate(k);
        let inverse: Vec<f64> = scored.iter().map(|(d, _)| 1.0 / (d + DISTANCE_EPS)).collect();
        let total: f64 = inverse.iter().sum();
        Ok(scored
            .iter()
            .zip(&inverse)
            .map(|(&(distance, entry), w)| Neighbor {
                dataset: entries[entry].dataset.clone(),
                entry,
                distance,
                weight: w / total,
            })
            .collect())
    }

    /// Weighted EARR estimate of every algorithm, ranked descending (ties keep
    /// roster order), with the first `r` as the recommendation.
    pub fn recommend(
        &self,
        query: &MetaFeatureVector,
        k: usize,
        r: usize,
        exclude: Option<usize>,
    ) -> Result<Recommendation, RecommendError> {
        let m = self.view.algorithms.len();
        if r == 0 || r > m {
            return Err(RecommendError::TopOutOfRange { r, algorithms: m });
        }
        let neighbors = self.neighbors(query, k, exclude)?;
        let mut ranking: Vec<ScoredAlgorithm> = self
            .view
            .algorithms
            .iter()
            .enumerate()
            .map(|(a, &algorithm)| ScoredAlgorithm {
                algorithm,
                score: neighbors.iter().map(|n| n.weight * self.view.scores[n.entry][a]).sum(),
            })
            .collect();
        ranking.sort_by(|x, y| y.score.total_cmp(&x.score));
        Ok(Recommendation {
            query: *query,
            params: RecommendParams {
                alpha: self.view.params.alpha,
                beta: self.view.params.beta,
                k,
                top: r,
            },
            neighbors,
            top: ranking[..r].iter().map(|s| s.algorithm).collect(),
            ranking,
        })
    }
}

pub fn neighbors(db: &MetaDb, query: &MetaFeatureVector, k: usize) -> Result<Vec<Neighbor>, RecommendError> {
    Recommender::new(db, &EarrParams::default()).neighbors(query, k, None)
}

pub enum Query<'q> {
    Dataset(&'q Dataset),
    Meta(MetaFeatureVector),
}

pub fn recommend(db: &MetaDb, query: Query<'_>, p: &EarrParams, k: usize, r: usize) -> Result<Recommendation, RecommendError> {
    let meta = match query {
        Query::Dataset(ds) => extract(ds),
        Query::Meta(m) => m,
    };
    Recommender::new(db, p).recommend(&meta, k, r, None)
}
