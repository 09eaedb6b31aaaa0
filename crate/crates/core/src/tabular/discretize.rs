//! Supervised discretization by recursive entropy minimization with the
//! minimum-description-length stopping rule (Fayyad & Irani).

use super::{ColumnData, Dataset, FeatureColumn};
use crate::info::entropy_of_counts;

/// Two candidate cuts whose class entropies differ by less than this are tied;
/// the lower cut wins.
const TIE_EPS: f64 = 1e-12;

/// Replace every numeric column by a nominal column of MDL interval ids.
/// Nominal columns pass through untouched, so the transform is idempotent.
pub fn mdl_discretize(ds: &Dataset) -> Dataset {
    if !ds.has_numeric() {
        return ds.clone();
    }
    let labels = ds.class_labels();
    let k = ds.class_count();
    let columns = ds
        .columns()
        .iter()
        .map(|col| match &col.data {
            ColumnData::Nominal { .. } => col.clone(),
            ColumnData::Numeric(values) => {
                let cuts = mdl_cut_points(values, labels, k);
                let codes = values
                    .iter()
                    .map(|v| v.map(|x| cuts.iter().take_while(|&&c| c < x).count() as u32))
                    .collect();
                FeatureColumn::nominal(col.name.clone(), interval_names(&cuts), codes)
            }
        })
        .collect();
    ds.replace_columns(columns)
}

fn interval_names(cuts: &[f64]) -> Vec<String> {
    if cuts.is_empty() {
        return vec!["'All'".to_string()];
    }
    let mut names = Vec::with_capacity(cuts.len() + 1);
    names.push(format!("(-inf-{}]", cuts[0]));
    for w in cuts.windows(2) {
        names.push(format!("({}-{}]", w[0], w[1]));
    }
    names.push(format!("({}-inf)", cuts[cuts.len() - 1]));
    names
}

/// Accepted cut points (ascending) for one numeric column. Missing values are
/// skipped; `class_count` bounds the label ids.
pub fn mdl_cut_points(values: &[Option<f64>], labels: &[u32], class_count: usize) -> Vec<f64> {
    let mut pairs: Vec<(f64, u32)> = values
        .iter()
        .zip(labels)
        .filter_map(|(v, &l)| v.map(|x| (x, l)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut cuts = Vec::new();
    split(&pairs, class_count, &mut cuts);
    cuts.sort_by(f64::total_cmp);
    cuts
}

fn class_counts(pairs: &[(f64, u32)], class_count: usize) -> Vec<usize> {
    let mut counts = vec![0; class_count];
    for &(_, l) in pairs {
        counts[l as usize] += 1;
    }
    counts
}

fn distinct(counts: &[usize]) -> usize {
    counts.iter().filter(|&&c| c > 0).count()
}

/// Cut positions worth evaluating: between consecutive distinct values,
/// except where both adjacent value runs are pure in the same class (a cut
/// there can never minimize class entropy).
fn candidate_positions(pairs: &[(f64, u32)]) -> Vec<usize> {
    // runs of equal values: (start, end, pure label)
    let mut runs: Vec<(usize, usize, Option<u32>)> = Vec::new();
    let mut start = 0;
    for i in 1..=pairs.len() {
        if i == pairs.len() || pairs[i].0 != pairs[start].0 {
            let first = pairs[start].1;
            let pure = pairs[start..i].iter().all(|p| p.1 == first).then_some(first);
            runs.push((start, i, pure));
            start = i;
        }
    }
    runs.windows(2)
        .filter(|w| !(w[0].2.is_some() && w[0].2 == w[1].2))
        .map(|w| w[1].0)
        .collect()
}

fn split(pairs: &[(f64, u32)], class_count: usize, cuts: &mut Vec<f64>) {
    let n = pairs.len();
    if n < 2 {
        return;
    }
    let total = class_counts(pairs, class_count);
    let ent = entropy_of_counts(&total);
    if ent == 0.0 {
        return;
    }

    let mut best: Option<(f64, usize)> = None;
    let mut left = vec![0usize; class_count];
    let mut consumed = 0;
    for pos in candidate_positions(pairs) {
        for &(_, l) in &pairs[consumed..pos] {
            left[l as usize] += 1;
        }
        consumed = pos;
        let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let weighted =
            (pos as f64 * entropy_of_counts(&left) + (n - pos) as f64 * entropy_of_counts(&right)) / n as f64;
        if best.is_none_or(|(b, _)| weighted < b - TIE_EPS) {
            best = Some((weighted, pos));
        }
    }
    let Some((weighted, pos)) = best else { return };

    let (s1, s2) = pairs.split_at(pos);
    let c1 = class_counts(s1, class_count);
    let c2 = class_counts(s2, class_count);
    if mdlp_accepts(n, &total, &c1, &c2, ent - weighted) {
        cuts.push((pairs[pos - 1].0 + pairs[pos].0) / 2.0);
        split(s1, class_count, cuts);
        split(s2, class_count, cuts);
    }
}

/// log2(3^k - 2) without overflowing for large k.
fn log2_three_pow_minus_two(k: usize) -> f64 {
    if k <= 30 {
        (3f64.powi(k as i32) - 2.0).log2()
    } else {
        k as f64 * 3f64.log2()
    }
}

/// The MDLP acceptance test for a binary split of `total` into `left`/`right`.
pub(crate) fn mdlp_accepts(n: usize, total: &[usize], left: &[usize], right: &[usize], gain: f64) -> bool {
    let nf = n as f64;
    let (k, k1, k2) = (distinct(total), distinct(left), distinct(right));
    let delta = log2_three_pow_minus_two(k)
        - (k as f64 * entropy_of_counts(total)
            - k1 as f64 * entropy_of_counts(left)
            - k2 as f64 * entropy_of_counts(right));
    gain > ((nf - 1.0).log2() + delta) / nf
}
