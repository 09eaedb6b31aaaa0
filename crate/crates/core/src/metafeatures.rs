//! Dataset characterization: thirteen general, statistical and
//! information-theoretic measures, their 0-1 standardization across a
//! collection, and the L1 distance between standardized vectors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::info::{entropy_of_counts, joint_entropy_with_class};
use crate::tabular::{mdl_discretize, Dataset};

/// Number of meta-features.
pub const META_LEN: usize = 13;

/// Value substituted for the equivalent-attribute count and noise-signal
/// ratio when the mean mutual information vanishes.
pub const ZERO_MI_CAP: f64 = 1e6;

const ZERO_MI: f64 = 1e-12;

pub const META_NAMES: [&str; META_LEN] = [
    "I",
    "F",
    "T",
    "D",
    "rho_bar",
    "skew_bar",
    "kurt_bar",
    "hc_norm",
    "hx_norm_bar",
    "mi_bar",
    "mi_max",
    "en_attr",
    "ns_ratio",
];

#[derive(Debug, Error, PartialEq)]
pub enum MetaError {
    #[error("column has no observed values")]
    AllMissing,
    #[error("feature and class share no complete observations")]
    NoCompletePairs,
    #[error("feature and class lengths differ ({feature} vs {class})")]
    UnequalLengths { feature: usize, class: usize },
    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("cannot standardize an empty collection")]
    EmptyCollection,
}

/// The thirteen meta-features of one dataset. Field order is the canonical
/// serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaFeatureVector {
    /// Instance count.
    #[serde(rename = "I")]
    pub instances: usize,
    /// Attribute count, class included.
    #[serde(rename = "F")]
    pub attributes: usize,
    /// Distinct class labels.
    #[serde(rename = "T")]
    pub classes: usize,
    /// Dimensionality ratio I/F.
    #[serde(rename = "D")]
    pub dimensionality: f64,
    pub rho_bar: f64,
    pub skew_bar: f64,
    pub kurt_bar: f64,
    pub hc_norm: f64,
    pub hx_norm_bar: f64,
    pub mi_bar: f64,
    pub mi_max: f64,
    pub en_attr: f64,
    pub ns_ratio: f64,
}

impl MetaFeatureVector {
    pub fn to_array(&self) -> [f64; META_LEN] {
        [
            self.instances as f64,
            self.attributes as f64,
            self.classes as f64,
            self.dimensionality,
            self.rho_bar,
            self.skew_bar,
            self.kurt_bar,
            self.hc_norm,
            self.hx_norm_bar,
            self.mi_bar,
            self.mi_max,
            self.en_attr,
            self.ns_ratio,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Compute all thirteen meta-features.
///
/// Correlation, skewness and kurtosis use the raw numeric columns; the
/// entropy-based measures use the MDL-discretized view of every column.
pub fn extract(ds: &Dataset) -> MetaFeatureVector {
    let instances = ds.instance_count();
    let attributes = ds.feature_count() + 1;
    let classes = ds.classes_present();

    let numeric: Vec<&[Option<f64>]> = ds.columns().iter().filter_map(|c| c.as_numeric()).collect();
    let (skew_bar, kurt_bar) = if numeric.is_empty() {
        (0.0, 0.0)
    } else {
        let (s, k) = numeric
            .iter()
            .map(|c| moments(c))
            .fold((0.0, 0.0), |(s, k), (a, b)| (s + a, k + b));
        (s / numeric.len() as f64, k / numeric.len() as f64)
    };

    let hc = entropy_of_counts(&ds.class_frequencies());
    let hc_norm = if classes > 1 { (hc / (classes as f64).log2()).min(1.0) } else { 0.0 };

    let discrete = mdl_discretize(ds);
    let labels = discrete.class_labels();
    let mut hx_sum = 0.0;
    let mut hx_norm_sum = 0.0;
    let mut mi_sum = 0.0;
    let mut mi_max = 0.0f64;
    for col in discrete.columns() {
        let codes = col.as_codes().expect("discretized view is nominal");
        let observed: Vec<u32> = codes.iter().flatten().copied().collect();
        let hx = code_entropy(&observed);
        let distinct = distinct_count(&observed);
        hx_sum += hx;
        if distinct > 1 {
            hx_norm_sum += (hx / (distinct as f64).log2()).min(1.0);
        }
        let mi = joint_entropy_with_class(codes, labels).mutual_information();
        mi_sum += mi;
        mi_max = mi_max.max(mi);
    }
    let f = discrete.feature_count() as f64;
    let hx_bar = hx_sum / f;
    let mi_bar = mi_sum / f;
    let (en_attr, ns_ratio) = if mi_bar < ZERO_MI {
        (ZERO_MI_CAP, ZERO_MI_CAP)
    } else {
        (
            (hc / mi_bar).min(ZERO_MI_CAP),
            ((hx_bar - mi_bar) / mi_bar).min(ZERO_MI_CAP),
        )
    };

    MetaFeatureVector {
        instances,
        attributes,
        classes,
        dimensionality: instances as f64 / attributes as f64,
        rho_bar: pearson_abs_mean(ds),
        skew_bar,
        kurt_bar,
        hc_norm,
        hx_norm_bar: hx_norm_sum / f,
        mi_bar,
        mi_max: mi_max.max(mi_bar),
        en_attr,
        ns_ratio,
    }
}

fn code_counts(codes: &[u32]) -> Vec<usize> {
    let size = codes.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut counts = vec![0; size];
    for &c in codes {
        counts[c as usize] += 1;
    }
    counts
}

fn code_entropy(codes: &[u32]) -> f64 {
    entropy_of_counts(&code_counts(codes))
}

fn distinct_count(codes: &[u32]) -> usize {
    code_counts(codes).iter().filter(|&&c| c > 0).count()
}

/// Shannon entropy (bits) of the observed values of a nominal column.
pub fn entropy(column: &[Option<u32>]) -> Result<f64, MetaError> {
    let observed: Vec<u32> = column.iter().flatten().copied().collect();
    if observed.is_empty() {
        return Err(MetaError::AllMissing);
    }
    Ok(code_entropy(&observed))
}

/// MI(C, X) = H(C) + H(X) - H(C, X) over rows where the feature is observed.
pub fn mutual_information(feature: &[Option<u32>], class: &[u32]) -> Result<f64, MetaError> {
    if feature.len() != class.len() {
        return Err(MetaError::UnequalLengths {
            feature: feature.len(),
            class: class.len(),
        });
    }
    let joint = joint_entropy_with_class(feature, class);
    if joint.pairs == 0 {
        return Err(MetaError::NoCompletePairs);
    }
    Ok(joint.mutual_information())
}

fn pearson_abs(x: &[Option<f64>], y: &[Option<f64>]) -> f64 {
    let pairs: Vec<(f64, f64)> = x.iter().zip(y).filter_map(|(a, b)| Some(((*a)?, (*b)?))).collect();
    let constant = |f: fn(&(f64, f64)) -> f64| pairs.windows(2).all(|w| f(&w[0]) == f(&w[1]));
    if pairs.len() < 2 || constant(|p| p.0) || constant(|p| p.1) {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(a, b) in &pairs {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy / (sxx * syy).sqrt()).abs().min(1.0)
}

/// Mean |Pearson r| over all unordered pairs of numeric predictive columns.
pub fn pearson_abs_mean(ds: &Dataset) -> f64 {
    let numeric: Vec<&[Option<f64>]> = ds.columns().iter().filter_map(|c| c.as_numeric()).collect();
    if numeric.len() < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..numeric.len() {
        for j in i + 1..numeric.len() {
            sum += pearson_abs(numeric[i], numeric[j]);
            pairs += 1;
        }
    }
    sum / pairs as f64
}

/// (skewness, kurtosis) from biased central moments; kurtosis is not excess.
/// Columns without variance give (0, 0).
pub fn moments(column: &[Option<f64>]) -> (f64, f64) {
    let values: Vec<f64> = column.iter().flatten().copied().collect();
    let constant = values.windows(2).all(|w| w[0] == w[1]);
    if values.len() < 2 || constant {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in &values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    (m3 / m2.powf(1.5), m4 / (m2 * m2))
}

/// Per-component min/max over a fitted collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationRecord {
    pub min: [f64; META_LEN],
    pub max: [f64; META_LEN],
}

impl StandardizationRecord {
    pub fn fit(vectors: &[[f64; META_LEN]]) -> Result<Self, MetaError> {
        let first = vectors.first().ok_or(MetaError::EmptyCollection)?;
        let mut min = *first;
        let mut max = *first;
        for v in &vectors[1..] {
            for p in 0..META_LEN {
                min[p] = min[p].min(v[p]);
                max[p] = max[p].max(v[p]);
            }
        }
        Ok(StandardizationRecord { min, max })
    }

    /// Map into [0, 1]; components with no spread map to 0, values outside the
    /// fitted range are clamped.
    pub fn apply(&self, v: &[f64; META_LEN]) -> [f64; META_LEN] {
        let mut out = [0.0; META_LEN];
        for p in 0..META_LEN {
            let span = self.max[p] - self.min[p];
            if span > 0.0 {
                out[p] = ((v[p] - self.min[p]) / span).clamp(0.0, 1.0);
            }
        }
        out
    }
}

/// Standardize a collection of raw meta-feature arrays.
pub fn standardize_arrays(
    vectors: &[[f64; META_LEN]],
) -> Result<(Vec<[f64; META_LEN]>, StandardizationRecord), MetaError> {
    let record = StandardizationRecord::fit(vectors)?;
    Ok((vectors.iter().map(|v| record.apply(v)).collect(), record))
}

pub fn standardize(
    vectors: &[MetaFeatureVector],
) -> Result<(Vec<[f64; META_LEN]>, StandardizationRecord), MetaError> {
    let raw: Vec<[f64; META_LEN]> = vectors.iter().map(MetaFeatureVector::to_array).collect();
    standardize_arrays(&raw)
}

/// L1 distance between two standardized vectors.
pub fn l1_distance(a: &[f64], b: &[f64]) -> Result<f64, MetaError> {
    if a.len() != b.len() {
        return Err(MetaError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}
