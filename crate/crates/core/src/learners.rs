//! Classifiers that score selected feature subsets: naive Bayes and IB1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tabular::{ColumnData, Dataset};

const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LearnError {
    #[error("test set is empty")]
    EmptyTest,
    #[error("training set is empty")]
    EmptyTrain,
    #[error("train and test schemas differ")]
    SchemaMismatch,
    #[error("unknown learner `{0}`")]
    UnknownLearner(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerId {
    Nb,
    Ib1,
}

impl LearnerId {
    pub fn as_str(self) -> &'static str {
        match self {
            LearnerId::Nb => "nb",
            LearnerId::Ib1 => "ib1",
        }
    }
}

impl fmt::Display for LearnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerId {
    type Err = LearnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nb" => Ok(LearnerId::Nb),
            "ib1" => Ok(LearnerId::Ib1),
            other => Err(LearnError::UnknownLearner(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccuracyScore {
    pub correct: usize,
    pub total: usize,
}

impl AccuracyScore {
    pub fn acc(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }
}

pub trait Classifier {
    fn predict(&self, ds: &Dataset, row: usize) -> u32;
}

/// Train `learner` on `train` and report its accuracy on `test`.
pub fn train_and_score(learner: LearnerId, train: &Dataset, test: &Dataset) -> Result<AccuracyScore, LearnError> {
    if test.instance_count() == 0 {
        return Err(LearnError::EmptyTest);
    }
    check_schema(train, test)?;
    let correct = match learner {
        LearnerId::Nb => count_correct(&NaiveBayes::fit(train)?, test),
        LearnerId::Ib1 => count_correct(&Ib1::fit(train)?, test),
    };
    Ok(AccuracyScore {
        correct,
        total: test.instance_count(),
    })
}

fn count_correct<C: Classifier>(model: &C, test: &Dataset) -> usize {
    (0..test.instance_count())
        .filter(|&r| model.predict(test, r) == test.class_labels()[r])
        .count()
}

fn check_schema(train: &Dataset, test: &Dataset) -> Result<(), LearnError> {
    let same = train.feature_count() == test.feature_count()
        && train.class_count() == test.class_count()
        && train
            .columns()
            .iter()
            .zip(test.columns())
            .all(|(a, b)| a.kind() == b.kind() && a.cardinality() == b.cardinality());
    if same {
        Ok(())
    } else {
        Err(LearnError::SchemaMismatch)
    }
}

enum FeatureModel {
    /// Laplace-smoothed log P(value | class), `[class][value]`.
    Nominal(Vec<Vec<f64>>),
    /// Per-class (mean, variance); `None` when the class has no observation.
    Gaussian(Vec<Option<(f64, f64)>>),
}

/// Naive Bayes with Laplace-smoothed priors and nominal likelihoods, and
/// Gaussian likelihoods for numeric features. Only classes seen in training
/// are predicted; missing test values are left out of the product.
pub struct NaiveBayes {
    classes: Vec<u32>,
    log_prior: Vec<f64>,
    features: Vec<FeatureModel>,
}

impl NaiveBayes {
    pub fn fit(train: &Dataset) -> Result<Self, LearnError> {
        let n = train.instance_count();
        if n == 0 {
            return Err(LearnError::EmptyTrain);
        }
        let freq = train.class_frequencies();
        let classes: Vec<u32> = (0..freq.len() as u32).filter(|&c| freq[c as usize] > 0).collect();
        let t = classes.len() as f64;
        let log_prior = classes
            .iter()
            .map(|&c| ((freq[c as usize] as f64 + 1.0) / (n as f64 + t)).ln())
            .collect();
        let labels = train.class_labels();
        let features = train
            .columns()
            .iter()
            .map(|col| match &col.data {
                ColumnData::Nominal { categories, codes } => {
                    let v = categories.len();
                    FeatureModel::Nominal(
                        classes
                            .iter()
                            .map(|&c| {
                                let mut counts = vec![0usize; v];
                                for (code, &l) in codes.iter().zip(labels) {
                                    if let (Some(x), true) = (code, l == c) {
                                        counts[*x as usize] += 1;
                                    }
                                }
                                let seen: usize = counts.iter().sum();
                                counts
                                    .iter()
                                    .map(|&k| ((k as f64 + 1.0) / (seen as f64 + v as f64)).ln())
                                    .collect()
                            })
                            .collect(),
                    )
                }
                ColumnData::Numeric(values) => FeatureModel::Gaussian(
                    classes
                        .iter()
                        .map(|&c| {
                            let xs: Vec<f64> = values
                                .iter()
                                .zip(labels)
                                .filter(|(_, &l)| l == c)
                                .filter_map(|(v, _)| *v)
                                .collect();
                            if xs.is_empty() {
                                return None;
                            }
                            let m = xs.iter().sum::<f64>() / xs.len() as f64;
                            let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
                            Some((m, var.max(VARIANCE_FLOOR)))
                        })
                        .collect(),
                ),
            })
            .collect();
        Ok(NaiveBayes {
            classes,
            log_prior,
            features,
        })
    }

    /// Unnormalized log posterior of each training class, in class-id order.
    pub fn log_posteriors(&self, ds: &Dataset, row: usize) -> Vec<(u32, f64)> {
        let mut scores = self.log_prior.clone();
        for (f, model) in self.features.iter().enumerate() {
            match (model, &ds.column(f).data) {
                (FeatureModel::Nominal(table), ColumnData::Nominal { codes, .. }) => {
                    if let Some(v) = codes[row] {
                        for (s, probs) in scores.iter_mut().zip(table) {
                            *s += probs[v as usize];
                        }
                    }
                }
                (FeatureModel::Gaussian(stats), ColumnData::Numeric(values)) => {
                    // a class with no observations leaves the feature out for everyone
                    if let (Some(x), true) = (values[row], stats.iter().all(Option::is_some)) {
                        for (s, st) in scores.iter_mut().zip(stats) {
                            let (m, var) = st.expect("checked above");
                            *s += -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (x - m) * (x - m) / (2.0 * var);
                        }
                    }
                }
                _ => unreachable!("schema checked before prediction"),
            }
        }
        self.classes.iter().copied().zip(scores).collect()
    }
}

impl Classifier for NaiveBayes {
    fn predict(&self, ds: &Dataset, row: usize) -> u32 {
        let mut best = (self.classes[0], f64::NEG_INFINITY);
        for (c, s) in self.log_posteriors(ds, row) {
            if s > best.1 {
                best = (c, s);
            }
        }
        best.0
    }
}

/// 1-nearest-neighbour under the heterogeneous Euclidean-overlap metric.
pub struct Ib1<'a> {
    train: &'a Dataset,
    ranges: Vec<f64>,
}

impl<'a> Ib1<'a> {
    pub fn fit(train: &'a Dataset) -> Result<Self, LearnError> {
        if train.instance_count() == 0 {
            return Err(LearnError::EmptyTrain);
        }
        let ranges = train
            .columns()
            .iter()
            .map(|c| match c.as_numeric() {
                Some(v) => {
                    let (lo, hi) = v
                        .iter()
                        .flatten()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                    if hi > lo {
                        hi - lo
                    } else {
                        0.0
                    }
                }
                None => 0.0,
            })
            .collect();
        Ok(Ib1 { train, ranges })
    }

    /// Per-feature difference in [0, 1]: scaled absolute difference for
    /// numeric features (clamped; a zero range counts any difference as 1),
    /// overlap for nominal ones, 1 whenever either side is missing.
    fn diff(&self, f: usize, test: &Dataset, row: usize, train_row: usize) -> f64 {
        match (&test.column(f).data, &self.train.column(f).data) {
            (ColumnData::Numeric(a), ColumnData::Numeric(b)) => match (a[row], b[train_row]) {
                (Some(x), Some(y)) => {
                    if self.ranges[f] > 0.0 {
                        ((x - y).abs() / self.ranges[f]).min(1.0)
                    } else if x == y {
                        0.0
                    } else {
                        1.0
                    }
                }
                _ => 1.0,
            },
            (ColumnData::Nominal { codes: a, .. }, ColumnData::Nominal { codes: b, .. }) => {
                match (a[row], b[train_row]) {
                    (Some(x), Some(y)) if x == y => 0.0,
                    _ => 1.0,
                }
            }
            _ => unreachable!("schema checked before prediction"),
        }
    }

    pub fn squared_distance(&self, test: &Dataset, row: usize, train_row: usize) -> f64 {
        (0..test.feature_count())
            .map(|f| {
                let d = self.diff(f, test, row, train_row);
                d * d
            })
            .sum()
    }
}

impl Classifier for Ib1<'_> {
    fn predict(&self, ds: &Dataset, row: usize) -> u32 {
        let mut best = (0, f64::INFINITY);
        for t in 0..self.train.instance_count() {
            let d = self.squared_distance(ds, row, t);
            if d < best.1 {
                best = (t, d);
            }
        }
        self.train.class_labels()[best.0]
    }
}
