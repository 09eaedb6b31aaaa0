//! Recommendation of feature subset selection (FSS) algorithms for
//! classification datasets.
//!
//! A meta-knowledge database records, for each historical dataset, thirteen
//! meta-features and the fold-level accuracy, selection runtime and subset size
//! of every candidate FSS algorithm. A new dataset is matched against its
//! nearest historical neighbours and the candidates are ranked by an
//! inverse-distance-weighted estimate of their EARR score, a metric that
//! trades accuracy against runtime and subset size.

mod info;
mod rng;

pub mod tabular;
pub mod metafeatures;
pub mod selectors;
pub mod learners;
pub mod earr;
pub mod metadb;
pub mod recommender;
pub mod evalharness;
