use super::SelectError;
use crate::rng;
use crate::tabular::{ColumnData, Dataset};

/// Per-feature difference between two instances in [0, 1].
struct Differ<'a> {
    ds: &'a Dataset,
    ranges: Vec<f64>,
}

impl<'a> Differ<'a> {
    fn new(ds: &'a Dataset) -> Self {
        let ranges = ds
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
        Differ { ds, ranges }
    }

    /// Numeric: |a - b| / range; nominal: 0/1 mismatch; any missing side: 1.
    fn diff(&self, f: usize, a: usize, b: usize) -> f64 {
        match &self.ds.column(f).data {
            ColumnData::Numeric(v) => match (v[a], v[b]) {
                (Some(x), Some(y)) => {
                    if self.ranges[f] > 0.0 {
                        (x - y).abs() / self.ranges[f]
                    } else {
                        0.0
                    }
                }
                _ => 1.0,
            },
            ColumnData::Nominal { codes, .. } => match (codes[a], codes[b]) {
                (Some(x), Some(y)) => f64::from(u8::from(x != y)),
                _ => 1.0,
            },
        }
    }

    fn distance(&self, a: usize, b: usize) -> f64 {
        (0..self.ds.feature_count()).map(|f| self.diff(f, a, b)).sum()
    }
}

/// ReliefF feature weights.
///
/// `sample_m` instances are taken from the front of a seeded permutation. For
/// each, the `neighbors_k` nearest hits and, per other class, the
/// `neighbors_k` nearest misses (Manhattan distance over per-feature diffs,
/// ties by instance index) update
/// `w_f += sum_C P(C)/(1 - P(class)) * mean diff(f, miss_C) / m - mean diff(f, hit) / m`.
/// Classes with fewer than `neighbors_k` candidates use all of them.
pub fn relieff_weights(ds: &Dataset, sample_m: usize, neighbors_k: usize, seed: u64) -> Result<Vec<f64>, SelectError> {
    if ds.classes_present() < 2 {
        return Err(SelectError::SingleClass);
    }
    if neighbors_k == 0 {
        return Err(SelectError::InvalidParameter("ReliefF needs at least one neighbour".into()));
    }
    let n = ds.instance_count();
    let m = sample_m.min(n);
    if m == 0 {
        return Err(SelectError::InvalidParameter("ReliefF needs at least one sample".into()));
    }
    let labels = ds.class_labels();
    let freq = ds.class_frequencies();
    let prior: Vec<f64> = freq.iter().map(|&c| c as f64 / n as f64).collect();
    let differ = Differ::new(ds);
    let nf = ds.feature_count();
    let mut weights = vec![0.0; nf];

    let mut rng = rng::seeded(seed);
    let sample = rng::permutation(&mut rng, n);
    let mut by_class: Vec<Vec<(f64, usize)>> = vec![Vec::new(); ds.class_count()];
    for &r in &sample[..m] {
        for bucket in by_class.iter_mut() {
            bucket.clear();
        }
        for j in (0..n).filter(|&j| j != r) {
            by_class[labels[j] as usize].push((differ.distance(r, j), j));
        }
        let own = labels[r] as usize;
        for (class, bucket) in by_class.iter_mut().enumerate() {
            if bucket.is_empty() {
                continue;
            }
            bucket.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let near = &bucket[..neighbors_k.min(bucket.len())];
            let scale = if class == own {
                -1.0 / (m * near.len()) as f64
            } else {
                prior[class] / (1.0 - prior[own]) / (m * near.len()) as f64
            };
            for &(_, j) in near {
                for (f, w) in weights.iter_mut().enumerate() {
                    *w += scale * differ.diff(f, r, j);
                }
            }
        }
    }
    Ok(weights)
}
