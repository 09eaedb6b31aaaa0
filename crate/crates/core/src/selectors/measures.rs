use std::cell::OnceCell;
use std::collections::HashMap;

use super::NominalTable;
use crate::info::{joint_entropy_of, joint_entropy_with_class};

/// SU = 2 MI(x, y) / (H(x) + H(y)) over rows where both are observed; 0 when
/// both entropies vanish.
pub fn symmetric_uncertainty(x: &[Option<u32>], y: &[Option<u32>]) -> f64 {
    joint_entropy_of(x, y).symmetric_uncertainty()
}

/// Correlation-based feature subset merit with cached symmetric
/// uncertainties, for use inside searches.
pub struct CfsEvaluator<'a> {
    table: &'a NominalTable,
    class_su: Vec<f64>,
    pair_su: Vec<OnceCell<f64>>,
}

impl<'a> CfsEvaluator<'a> {
    pub fn new(table: &'a NominalTable) -> Self {
        let f = table.feature_count();
        let class_su = (0..f)
            .map(|i| joint_entropy_with_class(table.column(i), table.labels()).symmetric_uncertainty())
            .collect();
        CfsEvaluator {
            table,
            class_su,
            pair_su: (0..f * f).map(|_| OnceCell::new()).collect(),
        }
    }

    pub fn class_su(&self, i: usize) -> f64 {
        self.class_su[i]
    }

    pub fn pair_su(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let f = self.table.feature_count();
        *self.pair_su[a * f + b].get_or_init(|| symmetric_uncertainty(self.table.column(a), self.table.column(b)))
    }

    /// k * mean(SU(f, C)) / sqrt(k + k (k - 1) * mean(SU(f_i, f_j))).
    /// The empty subset scores 0.
    pub fn merit(&self, subset: &[usize]) -> f64 {
        let k = subset.len();
        if k == 0 {
            return 0.0;
        }
        let rcf = subset.iter().map(|&i| self.class_su[i]).sum::<f64>() / k as f64;
        let mut rff = 0.0;
        if k > 1 {
            let mut sum = 0.0;
            for (a, &i) in subset.iter().enumerate() {
                for &j in &subset[a + 1..] {
                    sum += self.pair_su(i, j);
                }
            }
            rff = sum / (k * (k - 1) / 2) as f64;
        }
        let kf = k as f64;
        let denom = (kf + kf * (kf - 1.0) * rff).sqrt();
        if denom > 0.0 {
            kf * rcf / denom
        } else {
            0.0
        }
    }
}

/// CFS merit of `subset`, computed from scratch.
pub fn cfs_merit(subset: &[usize], table: &NominalTable) -> f64 {
    CfsEvaluator::new(table).merit(subset)
}

/// Fraction of instances not covered by the majority class of their value
/// pattern on `subset`. Missing values form their own pattern symbol; the
/// empty subset puts every instance in one pattern.
pub fn inconsistency_rate(subset: &[usize], table: &NominalTable) -> f64 {
    let n = table.instance_count();
    if n == 0 {
        return 0.0;
    }
    let k = table.class_count();
    let mut groups: HashMap<Vec<Option<u32>>, Vec<usize>> = HashMap::new();
    for row in 0..n {
        let key: Vec<Option<u32>> = subset.iter().map(|&f| table.column(f)[row]).collect();
        groups.entry(key).or_insert_with(|| vec![0; k])[table.labels()[row] as usize] += 1;
    }
    let inconsistent: usize = groups
        .values()
        .map(|counts| counts.iter().sum::<usize>() - counts.iter().max().copied().unwrap_or(0))
        .sum();
    inconsistent as f64 / n as f64
}
