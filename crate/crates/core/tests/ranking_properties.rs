//! Property tests over EARR, the recommender and the evaluation harness.

use proptest::prelude::*;

use fssrec::earr::{mean_earr, pairwise_earr, EarrParams, PerfTriple};
use fssrec::evalharness::{friedman_test, optimal_set_in_view, rpr, Evaluator, DEFAULT_LEVEL};
use fssrec::learners::LearnerId;
use fssrec::metadb::{earr_view, CvConfig, FoldRecord, MetaDb, MetaDbEntry};
use fssrec::metafeatures::MetaFeatureVector;
use fssrec::recommender::Recommender;
use fssrec::selectors::AlgorithmId;

const ROSTER: [AlgorithmId; 4] = [
    AlgorithmId::CfsSfs,
    AlgorithmId::ConsSbs,
    AlgorithmId::Fcbf,
    AlgorithmId::Relieff,
];
const FOLDS: usize = 4;

fn triple() -> impl Strategy<Value = PerfTriple> {
    (0.05f64..=1.0, 1e-4f64..10.0, 1u32..40).prop_map(|(acc, t, n)| PerfTriple { acc, t, n: n as f64 })
}

fn params() -> impl Strategy<Value = EarrParams> {
    (0.0f64..0.3, 0.0f64..0.3).prop_map(|(a, b)| EarrParams::new(a, b).unwrap())
}

fn meta(v: [f64; 3]) -> MetaFeatureVector {
    MetaFeatureVector {
        instances: 100,
        attributes: 6,
        classes: 2,
        dimensionality: 100.0 / 6.0,
        rho_bar: v[0],
        skew_bar: v[1],
        kurt_bar: v[2],
        hc_norm: 1.0,
        hx_norm_bar: 0.5,
        mi_bar: 0.1,
        mi_max: 0.3,
        en_attr: 8.0,
        ns_ratio: 5.0,
    }
}

type RawEntry = ([f64; 3], Vec<[(f64, f64, usize); 4]>);

/// Entries with random meta-features and random fold records.
fn raw_entries(min: usize, max: usize) -> impl Strategy<Value = Vec<RawEntry>> {
    raw_entries_with(min, max, FOLDS)
}

fn raw_entries_with(min: usize, max: usize, folds: usize) -> impl Strategy<Value = Vec<RawEntry>> {
    let record = (0.3f64..=1.0, 1e-3f64..1.0, 1usize..10);
    let entry = (
        prop::array::uniform3(0.0f64..1.0),
        prop::collection::vec(prop::array::uniform4(record), folds),
    );
    prop::collection::vec(entry, min..=max)
}

fn build(raw: &[RawEntry]) -> MetaDb {
    let entries = raw
        .iter()
        .enumerate()
        .map(|(i, (m, folds))| MetaDbEntry {
            dataset: format!("d{i}"),
            meta: meta(*m),
            records: ROSTER
                .iter()
                .enumerate()
                .map(|(a, &alg)| {
                    let r = folds.iter().map(|f| FoldRecord { acc: f[a].0, t: f[a].1, n: f[a].2 }).collect();
                    (alg, r)
                })
                .collect(),
        })
        .collect();
    let cv = CvConfig {
        passes: 1,
        folds: raw[0].1.len(),
        seed: 0,
    };
    MetaDb::new(LearnerId::Nb, cv, ROSTER.to_vec(), entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn zero_weights_reduce_to_accuracy(ts in prop::collection::vec(triple(), 2..8)) {
        let p = EarrParams::default();
        for i in &ts {
            for j in &ts {
                prop_assert!((pairwise_earr(i, j, &p) * pairwise_earr(j, i, &p) - 1.0).abs() < 1e-12);
            }
        }
        let scores: Vec<f64> = (0..ts.len()).map(|a| mean_earr(a, &ts, &p).unwrap()).collect();
        for a in 0..ts.len() {
            for b in 0..ts.len() {
                if ts[a].acc > ts[b].acc {
                    prop_assert!(scores[a] > scores[b]);
                }
            }
        }
    }

    #[test]
    fn pairwise_earr_is_scale_invariant(i in triple(), j in triple(), p in params(), c in 0.01f64..100.0) {
        let base = pairwise_earr(&i, &j, &p);
        let tol = 1e-12 * base.abs().max(1.0);
        let scale = |f: fn(&mut PerfTriple, f64)| {
            let (mut a, mut b) = (i, j);
            f(&mut a, c);
            f(&mut b, c);
            pairwise_earr(&a, &b, &p)
        };
        prop_assert!((scale(|t, c| t.t *= c) - base).abs() < tol * 10.0);
        prop_assert!((scale(|t, c| t.n *= c) - base).abs() < tol * 10.0);
        prop_assert!((scale(|t, c| t.acc *= c) - base).abs() < tol * 10.0);
    }

    #[test]
    fn pairwise_earr_is_monotone(i in triple(), j in triple(), p in params(), bump in 1.01f64..3.0) {
        let base = pairwise_earr(&i, &j, &p);
        let better = PerfTriple { acc: i.acc * bump, ..i };
        prop_assert!(pairwise_earr(&better, &j, &p) > base);
        let slower = PerfTriple { t: i.t * bump, ..i };
        prop_assert!(pairwise_earr(&slower, &j, &p) <= base);
        let bigger = PerfTriple { n: i.n * bump, ..i };
        prop_assert!(pairwise_earr(&bigger, &j, &p) <= base);
    }

    #[test]
    fn view_scores_are_positive(raw in raw_entries(1, 5), p in params()) {
        let db = build(&raw);
        let view = earr_view(&db, &p);
        for row in &view.scores {
            prop_assert!(row.iter().all(|&s| s > 0.0));
        }
    }

    #[test]
    fn estimates_are_convex_combinations(raw in raw_entries(3, 8), q in prop::array::uniform3(0.0f64..1.0), k in 1usize..4, p in params()) {
        let db = build(&raw);
        let rec = Recommender::new(&db, &p);
        let r = rec.recommend(&meta(q), k.min(db.len()), ROSTER.len(), None).unwrap();
        let total: f64 = r.neighbors.iter().map(|n| n.weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!(r.neighbors.windows(2).all(|w| w[0].distance <= w[1].distance));
        for s in &r.ranking {
            let a = ROSTER.iter().position(|&x| x == s.algorithm).unwrap();
            let vals: Vec<f64> = r.neighbors.iter().map(|n| rec.view().scores[n.entry][a]).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(s.score >= lo - 1e-12 && s.score <= hi + 1e-12);
        }
        prop_assert!(r.ranking.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn entry_order_does_not_matter(raw in raw_entries(3, 8), q in prop::array::uniform3(0.0f64..1.0), k in 1usize..4, shift in 1usize..8) {
        let db = build(&raw);
        let mut entries = db.entries().to_vec();
        let len = entries.len();
        entries.rotate_left(shift % len);
        let shuffled = db.with_entries(entries).unwrap();
        let k = k.min(len);
        let p = EarrParams::new(0.1, 0.1).unwrap();
        let a = Recommender::new(&db, &p).recommend(&meta(q), k, 2, None).unwrap();
        let b = Recommender::new(&shuffled, &p).recommend(&meta(q), k, 2, None).unwrap();
        let names = |r: &fssrec::recommender::Recommendation| r.neighbors.iter().map(|n| n.dataset.clone()).collect::<Vec<_>>();
        prop_assert_eq!(names(&a), names(&b));
        prop_assert_eq!(a.top, b.top);
        for (x, y) in a.ranking.iter().zip(&b.ranking) {
            prop_assert_eq!(x.algorithm, y.algorithm);
            prop_assert!((x.score - y.score).abs() < 1e-12);
        }
    }

    #[test]
    fn far_duplicates_change_nothing(raw in raw_entries(4, 8), q in prop::array::uniform3(0.0f64..1.0), k in 1usize..3) {
        let db = build(&raw);
        let p = EarrParams::default();
        let base = Recommender::new(&db, &p).recommend(&meta(q), k, 2, None).unwrap();
        let all = Recommender::new(&db, &p).neighbors(&meta(q), db.len(), None).unwrap();
        let far = all.last().unwrap();
        prop_assume!(far.distance > base.neighbors.last().unwrap().distance);
        let mut entries = db.entries().to_vec();
        let mut copy = entries[far.entry].clone();
        copy.dataset.push_str("-copy");
        entries.push(copy);
        let bigger = db.with_entries(entries).unwrap();
        let again = Recommender::new(&bigger, &p).recommend(&meta(q), k, 2, None).unwrap();
        prop_assert_eq!(base, again);
    }

    #[test]
    fn nearest_entry_decides_when_k_is_one(raw in raw_entries(2, 6), q in prop::array::uniform3(0.0f64..1.0)) {
        let db = build(&raw);
        let rec = Recommender::new(&db, &EarrParams::default()).recommend(&meta(q), 1, 1, None).unwrap();
        let e = &db.entries()[rec.neighbors[0].entry];
        // mean fold accuracy ratio ranking of the nearest entry
        let view = earr_view(&db, &EarrParams::default());
        let scores = &view.scores[rec.neighbors[0].entry];
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let a = ROSTER.iter().position(|&x| x == rec.top[0]).unwrap();
        prop_assert_eq!(scores[a], best);
        prop_assert!(e.records.contains_key(&rec.top[0]));
    }

    #[test]
    fn single_fold_top_pick_is_the_most_accurate(raw in raw_entries_with(2, 6, 1), q in prop::array::uniform3(0.0f64..1.0)) {
        let db = build(&raw);
        let rec = Recommender::new(&db, &EarrParams::default()).recommend(&meta(q), 1, 1, None).unwrap();
        let e = &db.entries()[rec.neighbors[0].entry];
        let best_acc = e.records.values().map(|r| r[0].acc).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(e.records[&rec.top[0]][0].acc, best_acc);
    }

    #[test]
    fn friedman_is_rank_based(blocks in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..10)) {
        let f = friedman_test(&blocks).unwrap();
        let transformed: Vec<Vec<f64>> = blocks.iter().map(|row| row.iter().map(|x| x.exp() * 3.0 + 1.0).collect()).collect();
        let g = friedman_test(&transformed).unwrap();
        prop_assert!((f.statistic - g.statistic).abs() < 1e-9);
    }

    #[test]
    fn optimal_sets_hold_the_best_and_its_exact_ties(raw in raw_entries(1, 4), p in params(), twin in 1usize..4) {
        let db = build(&raw);
        // make one algorithm an exact copy of the first on every entry
        let entries: Vec<MetaDbEntry> = db
            .entries()
            .iter()
            .map(|e| {
                let mut e = e.clone();
                let first = e.records[&ROSTER[0]].clone();
                e.records[&ROSTER[twin]] = first;
                e
            })
            .collect();
        let db = db.with_entries(entries).unwrap();
        let view = earr_view(&db, &p);
        for e in 0..db.len() {
            let opt = optimal_set_in_view(&view, e, DEFAULT_LEVEL);
            prop_assert!(opt.contains(opt.best));
            if opt.contains(ROSTER[0]) || opt.contains(ROSTER[twin]) {
                prop_assert!(opt.contains(ROSTER[0]) && opt.contains(ROSTER[twin]));
            }
        }
    }

    #[test]
    fn leave_one_out_reports_are_consistent(raw in raw_entries(4, 7), k in 1usize..4, p in params()) {
        let db = build(&raw);
        let eval = Evaluator::new(&db, &p, DEFAULT_LEVEL);
        let mut previous = 0.0;
        for r in 1..=ROSTER.len() {
            let report = eval.leave_one_out(k.min(db.len() - 1), r).unwrap();
            prop_assert!(report.hit_ratio_top >= previous);
            previous = report.hit_ratio_top;
            for d in &report.datasets {
                prop_assert!(d.rpr > 0.0 && d.rpr <= 1.0);
                let e = db.entries().iter().position(|x| x.dataset == d.dataset).unwrap();
                let a = ROSTER.iter().position(|&x| x == d.recommended[0]).unwrap();
                let at_max = eval.view().scores[e][a] == eval.view().best_score(e);
                prop_assert_eq!(d.rpr == 1.0, at_max);
            }
            prop_assert!(report.hit_ratio.iter().all(|h| (0.0..=1.0).contains(h)));
        }
        // an oracle recommending each dataset's best always hits
        for opt in eval.optimal_sets() {
            prop_assert!(opt.contains(opt.best));
        }
        prop_assert_eq!(rpr(0.5, 0.5), 1.0);
    }
}
