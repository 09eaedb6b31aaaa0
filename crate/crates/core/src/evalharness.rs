//! Evaluation of recommendations: optimal sets via Friedman and Holm tests,
//! hit ratio, RPR, leave-one-out validation and sensitivity to k.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::earr::EarrParams;
use crate::metadb::{earr_view, EarrView, MetaDb};
use crate::recommender::{RecommendError, Recommender};
use crate::selectors::significance::chi_square_sf;
use crate::selectors::AlgorithmId;

/// Significance level of the Friedman and Holm tests.
pub const DEFAULT_LEVEL: f64 = 0.05;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("need at least {need} treatments and 2 blocks, got {treatments} x {blocks}")]
    Shape {
        treatments: usize,
        blocks: usize,
        need: usize,
    },
    #[error("blocks have unequal lengths")]
    Ragged,
    #[error("dataset `{0}` is not in the meta-db")]
    UnknownDataset(String),
    #[error("need at least {need} meta-db entries, got {have}")]
    TooFewEntries { need: usize, have: usize },
    #[error(transparent)]
    Recommend(#[from] RecommendError),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Friedman {
    pub statistic: f64,
    pub p_value: f64,
    /// Mean within-block rank per treatment; rank 1 is the highest score.
    pub mean_ranks: Vec<f64>,
}

/// Ranks of `scores`, 1 for the highest, ties sharing their average rank.
pub fn descending_ranks(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Friedman test over `blocks` (rows) and treatments (columns).
pub fn friedman_test(blocks: &[Vec<f64>]) -> Result<Friedman, EvalError> {
    let b = blocks.len();
    let mt = blocks.first().map_or(0, Vec::len);
    if mt < 2 || b < 2 {
        return Err(EvalError::Shape {
            treatments: mt,
            blocks: b,
            need: 2,
        });
    }
    if blocks.iter().any(|row| row.len() != mt) {
        return Err(EvalError::Ragged);
    }
    let mut mean_ranks = vec![0.0; mt];
    for row in blocks {
        for (m, r) in mean_ranks.iter_mut().zip(descending_ranks(row)) {
            *m += r;
        }
    }
    for m in &mut mean_ranks {
        *m /= b as f64;
    }
    let constant = blocks.iter().all(|row| row.iter().all(|&x| x == row[0]));
    if constant {
        return Ok(Friedman {
            statistic: 0.0,
            p_value: 1.0,
            mean_ranks,
        });
    }
    let (bf, mf) = (b as f64, mt as f64);
    let sum_sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let statistic = (12.0 * bf / (mf * (mf + 1.0)) * (sum_sq - mf * (mf + 1.0) * (mf + 1.0) / 4.0)).max(0.0);
    Ok(Friedman {
        statistic,
        p_value: chi_square_sf(statistic, mt - 1),
        mean_ranks,
    })
}

/// Upper tail of the standard normal distribution.
fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Treatments not significantly worse than `reference` under one-sided
/// z-tests on mean ranks with Holm's step-down correction. The reference is
/// always included. Returned indices are ascending.
pub fn holm_vs_reference(mean_ranks: &[f64], blocks: usize, level: f64, reference: usize) -> Vec<usize> {
    let mt = mean_ranks.len() as f64;
    let se = (mt * (mt + 1.0) / (6.0 * blocks as f64)).sqrt();
    let mut tests: Vec<(f64, usize)> = (0..mean_ranks.len())
        .filter(|&j| j != reference)
        .map(|j| (normal_sf((mean_ranks[j] - mean_ranks[reference]) / se), j))
        .collect();
    tests.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let m = tests.len();
    let rejected = tests
        .iter()
        .enumerate()
        .take_while(|&(i, &(p, _))| p <= level / (m - i) as f64)
        .count();
    let mut kept: Vec<usize> = tests[rejected..].iter().map(|&(_, j)| j).collect();
    kept.push(reference);
    kept.sort_unstable();
    kept
}

/// As [`holm_vs_reference`], against the treatment with the lowest mean rank
/// (first one on ties).
pub fn holm_vs_best(mean_ranks: &[f64], blocks: usize, level: f64) -> Vec<usize> {
    let best = (0..mean_ranks.len())
        .min_by(|&a, &b| mean_ranks[a].total_cmp(&mean_ranks[b]).then(a.cmp(&b)))
        .unwrap_or(0);
    holm_vs_reference(mean_ranks, blocks, level, best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalSet {
    pub dataset: String,
    pub best: AlgorithmId,
    /// Roster order.
    pub members: Vec<AlgorithmId>,
    pub significance_level: f64,
    pub friedman_statistic: f64,
    pub friedman_p: f64,
}

impl OptimalSet {
    pub fn contains(&self, a: AlgorithmId) -> bool {
        self.members.contains(&a)
    }
}

fn first_max(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Optimal set of entry `entry` of `view`: the algorithm with the highest mean
/// EARR plus every algorithm Holm cannot separate from it, or the whole roster
/// when the Friedman test over the fold-level EARR does not reject.
pub fn optimal_set_in_view(view: &EarrView, entry: usize, level: f64) -> OptimalSet {
    let best = first_max(&view.scores[entry]);
    let blocks = &view.fold_scores[entry];
    let (members, statistic, p) = match friedman_test(blocks) {
        Ok(f) if f.p_value < level => {
            let kept = holm_vs_reference(&f.mean_ranks, blocks.len(), level, best);
            (kept, f.statistic, f.p_value)
        }
        Ok(f) => ((0..view.algorithms.len()).collect(), f.statistic, f.p_value),
        // a single fold cannot be tested
        Err(_) => ((0..view.algorithms.len()).collect(), 0.0, 1.0),
    };
    OptimalSet {
        dataset: view.datasets[entry].clone(),
        best: view.algorithms[best],
        members: members.into_iter().map(|a| view.algorithms[a]).collect(),
        significance_level: level,
        friedman_statistic: statistic,
        friedman_p: p,
    }
}

pub fn optimal_set(db: &MetaDb, dataset: &str, p: &EarrParams) -> Result<OptimalSet, EvalError> {
    let view = earr_view(db, p);
    let entry = view
        .datasets
        .iter()
        .position(|d| d == dataset)
        .ok_or_else(|| EvalError::UnknownDataset(dataset.to_string()))?;
    Ok(optimal_set_in_view(&view, entry, DEFAULT_LEVEL))
}

pub fn hit(rec: AlgorithmId, opt: &OptimalSet) -> bool {
    opt.contains(rec)
}

/// Recommendation performance ratio.
pub fn rpr(rec_score: f64, opt_score: f64) -> f64 {
    rec_score / opt_score
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetEvaluation {
    pub dataset: String,
    pub recommended: Vec<AlgorithmId>,
    /// Hit of each recommendation position.
    pub hits: Vec<bool>,
    /// Any of the recommended algorithms hits.
    pub hit_top: bool,
    /// RPR of the first recommendation.
    pub rpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub top: usize,
    #[serde(rename = "G")]
    pub g: usize,
    /// Hit ratio per recommendation position.
    pub hit_ratio: Vec<f64>,
    pub hit_ratio_top: f64,
    pub mean_rpr: f64,
    pub datasets: Vec<DatasetEvaluation>,
}

impl EvaluationReport {
    /// One row per dataset: name, rec1..recr, hit1..hitr, hit_top, rpr.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["name".to_string()];
        header.extend((1..=self.top).map(|i| format!("rec{i}")));
        header.extend((1..=self.top).map(|i| format!("hit{i}")));
        header.extend(["hit_top".to_string(), "rpr".to_string()]);
        w.write_record(&header)?;
        for d in &self.datasets {
            let mut row = vec![d.dataset.clone()];
            row.extend(d.recommended.iter().map(|a| a.to_string()));
            row.extend(d.hits.iter().map(|&h| u8::from(h).to_string()));
            row.push(u8::from(d.hit_top).to_string());
            row.push(d.rpr.to_string());
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// A meta-db with its EARR view and optimal sets, shared by many
/// leave-one-out runs.
pub struct Evaluator<'a> {
    db: &'a MetaDb,
    recommender: Recommender<'a>,
    optimal: Vec<OptimalSet>,
}

impl<'a> Evaluator<'a> {
    pub fn new(db: &'a MetaDb, p: &EarrParams, level: f64) -> Self {
        let view = earr_view(db, p);
        let optimal = (0..db.len()).map(|e| optimal_set_in_view(&view, e, level)).collect();
        Evaluator {
            db,
            recommender: Recommender::from_view(db, view),
            optimal,
        }
    }

    pub fn optimal_sets(&self) -> &[OptimalSet] {
        &self.optimal
    }

    pub fn view(&self) -> &EarrView {
        self.recommender.view()
    }

    /// Hold out each entry in turn, recommend from the others and score.
    pub fn leave_one_out(&self, k: usize, r: usize) -> Result<EvaluationReport, EvalError> {
        let n = self.db.len();
        if n < 3 {
            return Err(EvalError::TooFewEntries { need: 3, have: n });
        }
        let view = self.recommender.view();
        let rows: Vec<DatasetEvaluation> = (0..n)
            .into_par_iter()
            .map(|e| {
                let query = self.db.entries()[e].meta;
                let rec = self.recommender.recommend(&query, k, r, Some(e))?;
                let opt = &self.optimal[e];
                let hits: Vec<bool> = rec.top.iter().map(|&a| hit(a, opt)).collect();
                let first = view.algorithms.iter().position(|&a| a == rec.top[0]).expect("roster algorithm");
                Ok(DatasetEvaluation {
                    dataset: view.datasets[e].clone(),
                    hit_top: hits.iter().any(|&h| h),
                    hits,
                    rpr: rpr(view.scores[e][first], view.best_score(e)),
                    recommended: rec.top,
                })
            })
            .collect::<Result<_, EvalError>>()?;
        let g = rows.len() as f64;
        let hit_ratio = (0..r)
            .map(|i| rows.iter().filter(|d| d.hits[i]).count() as f64 / g)
            .collect();
        Ok(EvaluationReport {
            alpha: view.params.alpha,
            beta: view.params.beta,
            k,
            top: r,
            g: rows.len(),
            hit_ratio,
            hit_ratio_top: rows.iter().filter(|d| d.hit_top).count() as f64 / g,
            mean_rpr: rows.iter().map(|d| d.rpr).sum::<f64>() / g,
            datasets: rows,
        })
    }
}

pub fn loo_validate(db: &MetaDb, p: &EarrParams, k: usize, r: usize) -> Result<EvaluationReport, EvalError> {
    Evaluator::new(db, p, DEFAULT_LEVEL).leave_one_out(k, r)
}

/// Advisory band for k: [ceil(0.28 n), floor(0.47 n)].
pub fn advisory_band(n: usize) -> (usize, usize) {
    ((28 * n).div_ceil(100), 47 * n / 100)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KResult {
    pub k: usize,
    pub mean_rpr: f64,
    pub acceptable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub alpha: f64,
    pub beta: f64,
    pub level: f64,
    pub friedman_statistic: f64,
    pub friedman_p: f64,
    pub best_k: usize,
    pub per_k: Vec<KResult>,
    pub advisory_band: (usize, usize),
}

impl SensitivityReport {
    pub fn acceptable(&self) -> Vec<usize> {
        self.per_k.iter().filter(|r| r.acceptable).map(|r| r.k).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "mean_rpr", "acceptable"])?;
        for r in &self.per_k {
            w.write_record([r.k.to_string(), r.mean_rpr.to_string(), u8::from(r.acceptable).to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Leave-one-out RPR for every k in 1..n, compared with a Friedman test over
/// datasets x k values. When it rejects, the acceptable k values are those
/// Holm cannot separate from the k with the highest mean RPR (smallest on
/// ties); otherwise every k is acceptable.
pub fn k_sensitivity(db: &MetaDb, p: &EarrParams, level: f64) -> Result<SensitivityReport, EvalError> {
    let n = db.len();
    if n < 4 {
        return Err(EvalError::TooFewEntries { need: 4, have: n });
    }
    let eval = Evaluator::new(db, p, level);
    let ks: Vec<usize> = (1..n).collect();
    let reports: Vec<EvaluationReport> = ks
        .par_iter()
        .map(|&k| eval.leave_one_out(k, 1))
        .collect::<Result<_, _>>()?;
    let blocks: Vec<Vec<f64>> = (0..n)
        .map(|d| reports.iter().map(|r| r.datasets[d].rpr).collect())
        .collect();
    let means: Vec<f64> = reports.iter().map(|r| r.mean_rpr).collect();
    let best = first_max(&means);
    let f = friedman_test(&blocks)?;
    let acceptable: Vec<usize> = if f.p_value < level {
        holm_vs_reference(&f.mean_ranks, n, level, best)
    } else {
        (0..ks.len()).collect()
    };
    Ok(SensitivityReport {
        alpha: p.alpha,
        beta: p.beta,
        level,
        friedman_statistic: f.statistic,
        friedman_p: f.p_value,
        best_k: ks[best],
        per_k: ks
            .iter()
            .enumerate()
            .map(|(i, &k)| KResult {
                k,
                mean_rpr: means[i],
                acceptable: acceptable.contains(&i),
            })
            .collect(),
        advisory_band: advisory_band(n),
    })
}
