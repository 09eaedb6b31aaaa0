//! The meta-knowledge database: meta-features plus fold-level
//! (accuracy, runtime, subset size) records of every candidate algorithm.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::earr::{fold_earr_matrix, EarrParams, PerfTriple};
use crate::learners::{train_and_score, AccuracyScore, LearnError, LearnerId};
use crate::metafeatures::{extract, MetaFeatureVector};
use crate::rng;
use crate::selectors::{select, AlgorithmId, SelectError, SelectionResult, RUNTIME_FLOOR};
use crate::tabular::{folds, DataError, Dataset, FoldPlan};

pub const SCHEMA_VERSION: u32 = 1;

/// Re-draws of a pass whose training split lost a class.
pub const MAX_REDRAWS: u64 = 5;

#[derive(Debug, Error)]
pub enum MetaDbError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("selector failed on `{dataset}`: {source}")]
    Select { dataset: String, source: SelectError },
    #[error("learner failed on `{dataset}`: {source}")]
    Learn { dataset: String, source: LearnError },
    #[error("`{dataset}` has a single class")]
    SingleClass { dataset: String },
    #[error("`{dataset}`: pass {pass} kept a single-class training split after {MAX_REDRAWS} re-draws")]
    SingleClassFold { dataset: String, pass: usize },
    #[error("cannot access `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: String },
    #[error("malformed meta-db: {0}")]
    Malformed(String),
    #[error("entry `{dataset}` has no records for algorithm `{algorithm}`")]
    MissingAlgorithm { dataset: String, algorithm: String },
    #[error("entry `{dataset}` has records for `{algorithm}`, which is not in the roster")]
    UnexpectedAlgorithm { dataset: String, algorithm: String },
    #[error("entry `{dataset}`, algorithm `{algorithm}`: {message}")]
    BadRecords {
        dataset: String,
        algorithm: String,
        message: String,
    },
    #[error("duplicate entry `{0}`")]
    DuplicateEntry(String),
    #[error("meta-db has no entries")]
    NoEntries,
    #[error("roster needs at least two distinct algorithms, got {0}")]
    RosterTooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvConfig {
    pub passes: usize,
    pub folds: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            passes: 5,
            folds: 10,
            seed: 42,
        }
    }
}

impl CvConfig {
    pub fn fold_count(&self) -> usize {
        self.passes * self.folds
    }
}

/// One algorithm's result on one fold. `acc` is already clamped away from 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub acc: f64,
    pub t: f64,
    pub n: usize,
}

impl FoldRecord {
    pub fn triple(&self) -> PerfTriple {
        PerfTriple {
            acc: self.acc,
            t: self.t,
            n: self.n as f64,
        }
    }

    fn check(&self) -> Result<(), String> {
        if !(self.acc > 0.0 && self.acc <= 1.0) {
            return Err(format!("accuracy {} outside (0, 1]", self.acc));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(format!("runtime {} is not positive", self.t));
        }
        if self.n == 0 {
            return Err("empty feature subset".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaDbEntry {
    pub dataset: String,
    pub meta: MetaFeatureVector,
    /// Fold records per algorithm, in roster order.
    pub records: IndexMap<AlgorithmId, Vec<FoldRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaDb {
    schema_version: u32,
    learner: LearnerId,
    cv: CvConfig,
    algorithms: Vec<AlgorithmId>,
    entries: Vec<MetaDbEntry>,
}

impl MetaDb {
    pub fn new(
        learner: LearnerId,
        cv: CvConfig,
        algorithms: Vec<AlgorithmId>,
        entries: Vec<MetaDbEntry>,
    ) -> Result<Self, MetaDbError> {
        let db = MetaDb {
            schema_version: SCHEMA_VERSION,
            learner,
            cv,
            algorithms,
            entries,
        };
        db.validate()?;
        Ok(db)
    }

    pub fn learner(&self) -> LearnerId {
        self.learner
    }

    pub fn cv(&self) -> CvConfig {
        self.cv
    }

    pub fn algorithms(&self) -> &[AlgorithmId] {
        &self.algorithms
    }

    pub fn entries(&self) -> &[MetaDbEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, name: &str) -> Option<&MetaDbEntry> {
        self.entries.iter().find(|e| e.dataset == name)
    }

    /// A database over a reordered or reduced set of entries.
    pub fn with_entries(&self, entries: Vec<MetaDbEntry>) -> Result<Self, MetaDbError> {
        MetaDb::new(self.learner, self.cv, self.algorithms.clone(), entries)
    }

    fn validate(&self) -> Result<(), MetaDbError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(MetaDbError::SchemaVersion {
                found: self.schema_version.to_string(),
            });
        }
        let distinct: HashSet<_> = self.algorithms.iter().collect();
        if distinct.len() < 2 || distinct.len() != self.algorithms.len() {
            return Err(MetaDbError::RosterTooSmall(distinct.len()));
        }
        if self.entries.is_empty() {
            return Err(MetaDbError::NoEntries);
        }
        let expected = self.cv.fold_count();
        let mut names = HashSet::new();
        for e in &self.entries {
            if !names.insert(e.dataset.as_str()) {
                return Err(MetaDbError::DuplicateEntry(e.dataset.clone()));
            }
            for alg in &self.algorithms {
                let records = e.records.get(alg).ok_or_else(|| MetaDbError::MissingAlgorithm {
                    dataset: e.dataset.clone(),
                    algorithm: alg.to_string(),
                })?;
                let bad = |message: String| MetaDbError::BadRecords {
                    dataset: e.dataset.clone(),
                    algorithm: alg.to_string(),
                    message,
                };
                if records.len() != expected {
                    return Err(bad(format!("{} fold records, expected {expected}", records.len())));
                }
                for r in records {
                    r.check().map_err(bad)?;
                }
            }
            if let Some(extra) = e.records.keys().find(|a| !distinct.contains(a)) {
                return Err(MetaDbError::UnexpectedAlgorithm {
                    dataset: e.dataset.clone(),
                    algorithm: extra.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("meta-db serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, MetaDbError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| MetaDbError::Malformed(e.to_string()))?;
        match value.get("schema_version") {
            Some(v) if v.as_u64() == Some(u64::from(SCHEMA_VERSION)) => {}
            Some(v) => return Err(MetaDbError::SchemaVersion { found: v.to_string() }),
            None => return Err(MetaDbError::Malformed("missing schema_version".into())),
        }
        // put records in roster order whatever the file order was
        let mut db: MetaDb = serde_json::from_value(value).map_err(|e| MetaDbError::Malformed(e.to_string()))?;
        for e in &mut db.entries {
            let mut ordered = IndexMap::new();
            for alg in &db.algorithms {
                if let Some(r) = e.records.shift_remove(alg) {
                    ordered.insert(*alg, r);
                }
            }
            ordered.extend(e.records.drain(..));
            e.records = ordered;
        }
        db.validate()?;
        Ok(db)
    }

    pub fn save(&self, path: &Path) -> Result<(), MetaDbError> {
        fs::write(path, self.to_json()).map_err(|source| MetaDbError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, MetaDbError> {
        let text = fs::read_to_string(path).map_err(|source| MetaDbError::Io {
            path: path.display().to_string(),
            source,
        })?;
        MetaDb::from_json(&text)
    }
}

/// Per-dataset EARR scores under one parameter setting.
#[derive(Debug, Clone, PartialEq)]
pub struct EarrView {
    pub params: EarrParams,
    pub algorithms: Vec<AlgorithmId>,
    pub datasets: Vec<String>,
    /// `scores[entry][algorithm]`, averaged over all folds.
    pub scores: Vec<Vec<f64>>,
    /// `fold_scores[entry][fold][algorithm]`.
    pub fold_scores: Vec<Vec<Vec<f64>>>,
}

impl EarrView {
    pub fn get(&self, dataset: &str) -> Option<&[f64]> {
        let i = self.datasets.iter().position(|d| d == dataset)?;
        Some(&self.scores[i])
    }

    /// Highest score of entry `entry`.
    pub fn best_score(&self, entry: usize) -> f64 {
        self.scores[entry].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// EARR of every algorithm on every entry: the fold-level mean EARR,
/// averaged over the folds.
pub fn earr_view(db: &MetaDb, p: &EarrParams) -> EarrView {
    let m = db.algorithms.len();
    let folds = db.cv.fold_count();
    let mut scores = Vec::with_capacity(db.len());
    let mut fold_scores = Vec::with_capacity(db.len());
    for e in &db.entries {
        let per_fold: Vec<Vec<f64>> = (0..folds)
            .map(|k| {
                let triples: Vec<_> = db.algorithms.iter().map(|a| Some(e.records[a][k].triple())).collect();
                fold_earr_matrix(&triples, p).expect("validated meta-db")
            })
            .collect();
        let mean = (0..m)
            .map(|a| per_fold.iter().map(|f| f[a]).sum::<f64>() / folds as f64)
            .collect();
        scores.push(mean);
        fold_scores.push(per_fold);
    }
    EarrView {
        params: *p,
        algorithms: db.algorithms.clone(),
        datasets: db.entries.iter().map(|e| e.dataset.clone()).collect(),
        scores,
        fold_scores,
    }
}

/// Runs one feature selection algorithm; implementations report their own
/// runtime.
pub trait FeatureSelector: Sync {
    fn select(&self, algorithm: AlgorithmId, train: &Dataset) -> Result<SelectionResult, SelectError>;
}

/// Trains a classifier on one split and scores it on another.
pub trait Scorer: Sync {
    fn score(&self, learner: LearnerId, train: &Dataset, test: &Dataset) -> Result<AccuracyScore, LearnError>;
}

/// The built-in selectors with default settings.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardSelectors;

impl FeatureSelector for StandardSelectors {
    fn select(&self, algorithm: AlgorithmId, train: &Dataset) -> Result<SelectionResult, SelectError> {
        select(algorithm, train)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StandardScorer;

impl Scorer for StandardScorer {
    fn score(&self, learner: LearnerId, train: &Dataset, test: &Dataset) -> Result<AccuracyScore, LearnError> {
        train_and_score(learner, train, test)
    }
}

/// Fold plan where no training split is single-class. A failing pass is
/// re-drawn from a sub-seed derived from the base seed, pass and attempt.
fn fold_plan(ds: &Dataset, cv: &CvConfig) -> Result<FoldPlan, MetaDbError> {
    let mut plan = folds::stratified_folds(ds, cv.passes, cv.folds, cv.seed)?;
    let train_ok = |assignment: &[usize]| {
        (0..cv.folds).all(|f| {
            let mut seen = None;
            ds.class_labels()
                .iter()
                .zip(assignment)
                .filter(|(_, &a)| a != f)
                .any(|(&l, _)| *seen.get_or_insert(l) != l)
        })
    };
    for pass in 0..cv.passes {
        let mut attempt = 0;
        while !train_ok(&plan.assignments[pass]) {
            if attempt == MAX_REDRAWS {
                return Err(MetaDbError::SingleClassFold {
                    dataset: ds.name().to_string(),
                    pass,
                });
            }
            attempt += 1;
            let tag = (pass as u64) << 8 | attempt;
            let mut rng = rng::seeded(rng::derive_seed(cv.seed, tag));
            plan.assignments[pass] = folds::stratified_pass(ds.class_labels(), ds.class_count(), cv.folds, &mut rng);
        }
    }
    Ok(plan)
}

/// Cross-validate every roster algorithm on `ds` and extract its
/// meta-features. Folds run in parallel; within a fold the algorithms run
/// one after another so each timed selection has a thread to itself.
pub fn build_entry_with<S: FeatureSelector, C: Scorer>(
    ds: &Dataset,
    roster: &[AlgorithmId],
    learner: LearnerId,
    cv: &CvConfig,
    selector: &S,
    scorer: &C,
) -> Result<MetaDbEntry, MetaDbError> {
    let name = ds.name().to_string();
    if ds.classes_present() < 2 {
        return Err(MetaDbError::SingleClass { dataset: name });
    }
    let plan = fold_plan(ds, cv)?;
    let cells: Vec<(usize, usize)> = (0..cv.passes).flat_map(|p| (0..cv.folds).map(move |f| (p, f))).collect();
    let per_fold: Vec<Vec<FoldRecord>> = cells
        .par_iter()
        .map(|&(pass, fold)| {
            let train = ds.subset(&plan.train_indices(pass, fold));
            let test = ds.subset(&plan.test_indices(pass, fold));
            roster
                .iter()
                .map(|&alg| {
                    let sel = selector.select(alg, &train).map_err(|source| MetaDbError::Select {
                        dataset: name.clone(),
                        source,
                    })?;
                    let score = scorer
                        .score(learner, &train.project(&sel.selected)?, &test.project(&sel.selected)?)
                        .map_err(|source| MetaDbError::Learn {
                            dataset: name.clone(),
                            source,
                        })?;
                    let triple = PerfTriple::from_raw(score.acc(), score.total, sel.runtime_s, sel.selected.len());
                    Ok(FoldRecord {
                        acc: triple.acc,
                        t: sel.runtime_s.max(RUNTIME_FLOOR),
                        n: sel.selected.len(),
                    })
                })
                .collect()
        })
        .collect::<Result<_, MetaDbError>>()?;
    let records = roster
        .iter()
        .enumerate()
        .map(|(a, &alg)| (alg, per_fold.iter().map(|f| f[a]).collect()))
        .collect();
    Ok(MetaDbEntry {
        dataset: name,
        meta: extract(ds),
        records,
    })
}

pub fn build_entry(
    ds: &Dataset,
    roster: &[AlgorithmId],
    learner: LearnerId,
    cv: &CvConfig,
) -> Result<MetaDbEntry, MetaDbError> {
    build_entry_with(ds, roster, learner, cv, &StandardSelectors, &StandardScorer)
}

/// Build a database over `datasets`, one entry per dataset in input order.
pub fn build_db_with<S: FeatureSelector, C: Scorer>(
    datasets: &[Dataset],
    roster: &[AlgorithmId],
    learner: LearnerId,
    cv: &CvConfig,
    selector: &S,
    scorer: &C,
) -> Result<MetaDb, MetaDbError> {
    let entries = datasets
        .par_iter()
        .map(|ds| build_entry_with(ds, roster, learner, cv, selector, scorer))
        .collect::<Result<Vec<_>, _>>()?;
    MetaDb::new(learner, *cv, roster.to_vec(), entries)
}

pub fn build_db(
    datasets: &[Dataset],
    roster: &[AlgorithmId],
    learner: LearnerId,
    cv: &CvConfig,
) -> Result<MetaDb, MetaDbError> {
    build_db_with(datasets, roster, learner, cv, &StandardSelectors, &StandardScorer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::FeatureColumn;
    use approx::assert_abs_diff_eq;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn toy(n: usize) -> Dataset {
        let labels: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
        Dataset::new(
            "toy",
            vec![
                FeatureColumn::numeric("signal", labels.iter().map(|&l| Some(f64::from(l) * 3.0)).collect()),
                FeatureColumn::numeric("noise", (0..n).map(|i| Some(((i * 7) % 5) as f64)).collect()),
                FeatureColumn::nominal(
                    "mix",
                    vec!["u".into(), "v".into()],
                    (0..n).map(|i| Some(((i / 3) % 2) as u32)).collect(),
                ),
            ],
            "class",
            vec!["a".into(), "b".into()],
            labels,
        )
        .unwrap()
    }

    fn record(acc: f64, t: f64, n: usize) -> FoldRecord {
        FoldRecord { acc, t, n }
    }

    fn meta() -> MetaFeatureVector {
        extract(&toy(10))
    }

    fn small_db() -> MetaDb {
        let cv = CvConfig {
            passes: 1,
            folds: 2,
            seed: 1,
        };
        let roster = vec![AlgorithmId::Fcbf, AlgorithmId::Relieff];
        let entry = |name: &str, a: [FoldRecord; 2], b: [FoldRecord; 2]| MetaDbEntry {
            dataset: name.into(),
            meta: meta(),
            records: [(AlgorithmId::Fcbf, a.to_vec()), (AlgorithmId::Relieff, b.to_vec())]
                .into_iter()
                .collect(),
        };
        MetaDb::new(
            LearnerId::Nb,
            cv,
            roster,
            vec![
                entry(
                    "one",
                    [record(0.9, 0.1, 2), record(0.8, 0.2, 3)],
                    [record(0.7, 0.01, 1), record(0.6, 0.3, 1)],
                ),
                entry(
                    "two",
                    [record(0.5, 1e-6, 1), record(0.1 + 0.2, 0.123456789, 4)],
                    [record(0.55, 0.5, 2), record(1.0, 0.25, 2)],
                ),
            ],
        )
        .unwrap()
    }

    #[test]
    fn build_gives_one_record_per_fold() {
        let cv = CvConfig {
            passes: 1,
            folds: 2,
            seed: 3,
        };
        let entry = build_entry(&toy(10), &AlgorithmId::ALL, LearnerId::Nb, &cv).unwrap();
        assert_eq!(entry.records.len(), 7);
        assert!(entry.records.values().all(|r| r.len() == 2));
        let again = build_entry(&toy(10), &AlgorithmId::ALL, LearnerId::Nb, &cv).unwrap();
        for (a, b) in entry.records.values().zip(again.records.values()) {
            let strip = |r: &[FoldRecord]| r.iter().map(|x| (x.acc, x.n)).collect::<Vec<_>>();
            assert_eq!(strip(a), strip(b));
        }
    }

    struct Scripted;

    impl FeatureSelector for Scripted {
        fn select(&self, algorithm: AlgorithmId, _: &Dataset) -> Result<SelectionResult, SelectError> {
            let selected = match algorithm {
                AlgorithmId::Fcbf => vec![0],
                _ => vec![0, 1, 2],
            };
            Ok(SelectionResult {
                runtime_s: 0.25 * selected.len() as f64,
                selected,
                algorithm,
            })
        }
    }

    struct CountingScorer(AtomicUsize);

    impl Scorer for CountingScorer {
        fn score(&self, _: LearnerId, train: &Dataset, test: &Dataset) -> Result<AccuracyScore, LearnError> {
            self.0.fetch_add(1, Ordering::Relaxed);
            // scripted: all wrong on a single feature, all right otherwise
            let correct = if train.feature_count() == 1 { 0 } else { test.instance_count() };
            Ok(AccuracyScore {
                correct,
                total: test.instance_count(),
            })
        }
    }

    #[test]
    fn injected_components_are_recorded_verbatim() {
        let cv = CvConfig {
            passes: 2,
            folds: 5,
            seed: 9,
        };
        let scorer = CountingScorer(AtomicUsize::new(0));
        let roster = [AlgorithmId::Fcbf, AlgorithmId::CfsSfs];
        let entry = build_entry_with(&toy(20), &roster, LearnerId::Ib1, &cv, &Scripted, &scorer).unwrap();
        assert_eq!(scorer.0.load(Ordering::Relaxed), 20);
        // 20 instances in 5 folds -> 4 per test split; zero accuracy is clamped to 1/8
        assert!(entry.records[&AlgorithmId::Fcbf].iter().all(|r| *r == record(0.125, 0.25, 1)));
        assert!(entry.records[&AlgorithmId::CfsSfs].iter().all(|r| *r == record(1.0, 0.75, 3)));
    }

    #[test]
    fn single_class_training_split_is_rejected_after_redraws() {
        // the lone `b` instance is in some test fold in every draw
        let mut labels = vec![0u32; 9];
        labels.push(1);
        let ds = Dataset::new(
            "lonely",
            vec![FeatureColumn::numeric("x", (0..10).map(|i| Some(i as f64)).collect())],
            "class",
            vec!["a".into(), "b".into()],
            labels,
        )
        .unwrap();
        let cv = CvConfig {
            passes: 1,
            folds: 2,
            seed: 0,
        };
        let err = build_entry(&ds, &AlgorithmId::ALL, LearnerId::Nb, &cv).unwrap_err();
        assert!(matches!(err, MetaDbError::SingleClassFold { pass: 0, .. }), "{err}");
    }

    #[test]
    fn identical_records_score_one() {
        let db = small_db();
        let mut entries = db.entries().to_vec();
        let same = entries[0].records[&AlgorithmId::Fcbf].clone();
        entries[0].records[&AlgorithmId::Relieff] = same;
        let db = db.with_entries(entries).unwrap();
        let view = earr_view(&db, &EarrParams::new(0.1, 0.2).unwrap());
        assert_eq!(view.get("one").unwrap(), &[1.0, 1.0]);
    }

    #[test]
    fn view_averages_fold_level_scores() {
        let db = small_db();
        let p = EarrParams::new(0.05, 0.1).unwrap();
        let view = earr_view(&db, &p);
        let eq1 = |i: FoldRecord, j: FoldRecord| {
            (i.acc / j.acc) / (1.0 + 0.05 * (i.t / j.t).log10() + 0.1 * (i.n as f64 / j.n as f64).log10())
        };
        let e = &db.entries()[1];
        let (a, b) = (&e.records[&AlgorithmId::Fcbf], &e.records[&AlgorithmId::Relieff]);
        let fcbf = (eq1(a[0], b[0]) + eq1(a[1], b[1])) / 2.0;
        let relieff = (eq1(b[0], a[0]) + eq1(b[1], a[1])) / 2.0;
        assert_abs_diff_eq!(view.scores[1][0], fcbf, epsilon = 1e-12);
        assert_abs_diff_eq!(view.scores[1][1], relieff, epsilon = 1e-12);
        assert_eq!(view.fold_scores[1].len(), 2);
    }

    #[test]
    fn round_trip_is_exact_and_keys_are_canonical() {
        let db = small_db();
        let text = db.to_json();
        assert_eq!(MetaDb::from_json(&text).unwrap(), db);
        let positions: Vec<usize> = ["\"schema_version\"", "\"learner\"", "\"cv\"", "\"algorithms\"", "\"entries\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("0.30000000000000004"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.json");
        db.save(&path).unwrap();
        assert_eq!(MetaDb::load(&path).unwrap(), db);
    }

    #[test]
    fn load_errors_are_distinct() {
        let db = small_db();
        let mut value: serde_json::Value = serde_json::from_str(&db.to_json()).unwrap();
        value["schema_version"] = 99.into();
        assert!(matches!(
            MetaDb::from_json(&value.to_string()),
            Err(MetaDbError::SchemaVersion { found }) if found == "99"
        ));

        let mut value: serde_json::Value = serde_json::from_str(&db.to_json()).unwrap();
        value["entries"][1]["records"].as_object_mut().unwrap().remove("relieff");
        match MetaDb::from_json(&value.to_string()) {
            Err(MetaDbError::MissingAlgorithm { dataset, algorithm }) => {
                assert_eq!((dataset.as_str(), algorithm.as_str()), ("two", "relieff"));
            }
            other => panic!("{other:?}"),
        }

        assert!(matches!(MetaDb::from_json("{\"schema_version\": 1"), Err(MetaDbError::Malformed(_))));
        assert!(matches!(
            MetaDb::from_json("{\"schema_version\": 1, \"learner\": \"nb\"}"),
            Err(MetaDbError::Malformed(_))
        ));
    }

    #[test]
    fn invariants_enforced_on_construction() {
        let db = small_db();
        let mut entries = db.entries().to_vec();
        entries[1].dataset = "one".into();
        assert!(matches!(db.with_entries(entries), Err(MetaDbError::DuplicateEntry(_))));
        assert!(matches!(db.with_entries(vec![]), Err(MetaDbError::NoEntries)));
        let mut entries = db.entries().to_vec();
        entries[0].records[&AlgorithmId::Fcbf].pop();
        assert!(matches!(db.with_entries(entries), Err(MetaDbError::BadRecords { .. })));
        assert!(matches!(
            MetaDb::new(LearnerId::Nb, db.cv(), vec![AlgorithmId::Fcbf], db.entries().to_vec()),
            Err(MetaDbError::RosterTooSmall(1))
        ));
    }
}
