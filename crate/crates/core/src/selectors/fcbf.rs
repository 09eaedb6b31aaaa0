use super::{symmetric_uncertainty, NominalTable};
use crate::info::joint_entropy_with_class;

/// Fast correlation-based filter.
///
/// Features are ranked by SU with the class. The relevance threshold is the
/// SU of the floor(N / ln N)-th ranked feature (N = feature count, position
/// clamped to [1, N]); features at or above it with positive SU are relevant.
/// Walking the relevant list in rank order, each surviving feature removes any
/// later feature f_j with SU(f_i, f_j) >= SU(f_j, C). If nothing survives the
/// top-ranked feature is returned.
pub fn fcbf(table: &NominalTable) -> Vec<usize> {
    let n = table.feature_count();
    if n == 0 {
        return Vec::new();
    }
    let class_su: Vec<f64> = (0..n)
        .map(|i| joint_entropy_with_class(table.column(i), table.labels()).symmetric_uncertainty())
        .collect();
    let mut ranked: Vec<usize> = (0..n).collect();
    ranked.sort_by(|&a, &b| class_su[b].total_cmp(&class_su[a]).then(a.cmp(&b)));

    let position = if n < 2 {
        1
    } else {
        ((n as f64 / (n as f64).ln()).floor() as usize).clamp(1, n)
    };
    let threshold = class_su[ranked[position - 1]];

    let mut relevant: Vec<usize> = ranked
        .iter()
        .copied()
        .filter(|&f| class_su[f] >= threshold && class_su[f] > 0.0)
        .collect();

    let mut i = 0;
    while i < relevant.len() {
        let fi = relevant[i];
        let mut j = i + 1;
        while j < relevant.len() {
            let fj = relevant[j];
            if symmetric_uncertainty(table.column(fi), table.column(fj)) >= class_su[fj] {
                relevant.remove(j);
            } else {
                j += 1;
            }
        }
        i += 1;
    }

    if relevant.is_empty() {
        return vec![ranked[0]];
    }
    relevant.sort_unstable();
    relevant
}
