use statrs::function::gamma::gamma_ur;

use super::NominalTable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of independence between a nominal feature and the
/// class, over rows where the feature is observed. Empty rows and columns of
/// the contingency table are dropped before counting degrees of freedom.
pub fn chi_square_independence(feature: &[Option<u32>], labels: &[u32], class_count: usize) -> ChiSquare {
    let width = feature.iter().flatten().map(|&v| v as usize + 1).max().unwrap_or(0);
    let mut table = vec![vec![0usize; class_count]; width];
    for (v, &c) in feature.iter().zip(labels) {
        if let Some(v) = v {
            table[*v as usize][c as usize] += 1;
        }
    }
    let rows: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<usize> = (0..class_count).map(|c| table.iter().map(|r| r[c]).sum()).collect();
    let total: usize = rows.iter().sum();
    let r = rows.iter().filter(|&&x| x > 0).count();
    let k = cols.iter().filter(|&&x| x > 0).count();
    if r < 2 || k < 2 {
        return ChiSquare {
            statistic: 0.0,
            df: 0,
            p_value: 1.0,
        };
    }
    let mut statistic = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (c, &observed) in row.iter().enumerate() {
            if rows[i] == 0 || cols[c] == 0 {
                continue;
            }
            let expected = rows[i] as f64 * cols[c] as f64 / total as f64;
            let d = observed as f64 - expected;
            statistic += d * d / expected;
        }
    }
    let df = (r - 1) * (k - 1);
    ChiSquare {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df),
    }
}

/// Upper tail of the chi-square distribution.
pub(crate) fn chi_square_sf(x: f64, df: usize) -> f64 {
    if df == 0 || x <= 0.0 {
        return 1.0;
    }
    gamma_ur(df as f64 / 2.0, x / 2.0)
}

/// Features significantly associated with the class (p < `alpha`), or the
/// single highest-statistic feature when none pass.
pub fn significance_rank(table: &NominalTable, alpha: f64) -> Vec<usize> {
    let tests: Vec<ChiSquare> = (0..table.feature_count())
        .map(|f| chi_square_independence(table.column(f), table.labels(), table.class_count()))
        .collect();
    let mut kept: Vec<usize> = (0..tests.len()).filter(|&f| tests[f].p_value < alpha).collect();
    if kept.is_empty() {
        let stats: Vec<f64> = tests.iter().map(|t| t.statistic).collect();
        kept.push(super::argmax(&stats));
    }
    kept
}
