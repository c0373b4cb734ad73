use std::collections::BTreeSet;

use codesign::enumerate::{enumerate_joint, verify_joint};
use codesign::sampling::{sample_cells, sample_hw};
use codesign::CachedEvaluator;
use codesign_core::accuracy::SurrogateParams;
use codesign_core::latency::{build_latency_table_for, LatencySource};
use codesign_core::{
    dominates, AccuracyOracle, AreaParams, Evaluate, Metrics, PointModel, SearchPoint, SkeletonSpec,
    SyntheticLatencyParams,
};

fn evaluator(parallelism: usize) -> CachedEvaluator {
    let skeleton = SkeletonSpec::default();
    let model = PointModel {
        area_params: AreaParams::default(),
        skeleton,
        table: build_latency_table_for(&skeleton, 6, 9, LatencySource::Synthetic(SyntheticLatencyParams::default()))
            .unwrap(),
        oracle: AccuracyOracle::Synthetic { params: SurrogateParams::default(), seed: 0 },
    };
    CachedEvaluator::new(model, parallelism, None)
}

fn key(m: &Metrics) -> [u64; 3] {
    [m.area_mm2.to_bits(), m.latency_ms.to_bits(), m.accuracy.to_bits()]
}

#[test]
fn frontier_equals_brute_force() {
    let ev = evaluator(1);
    let cells = sample_cells(50, 6, 9, 11);
    let hws = sample_hw(Some(50), 12);
    let mut all: Vec<(SearchPoint, Metrics)> = Vec::new();
    for c in &cells {
        for h in &hws {
            let p = SearchPoint::new(*c, *h);
            all.push((p, ev.evaluate(&p).unwrap()));
        }
    }
    let oracle: BTreeSet<[u64; 3]> =
        all.iter().filter(|(_, m)| !all.iter().any(|(_, o)| dominates(o, m))).map(|(_, m)| key(m)).collect();

    let got = enumerate_joint(&ev, &cells, &hws, &|_| {}).unwrap();
    assert_eq!(got.points, 2500);
    let keys: Vec<[u64; 3]> = got.frontier.iter().map(|e| key(&e.metrics)).collect();
    assert_eq!(keys.iter().copied().collect::<BTreeSet<_>>(), oracle);
    assert_eq!(keys.len(), oracle.len(), "duplicate metrics on the frontier");
    for e in &got.frontier {
        assert_eq!(key(&ev.evaluate(&e.point).unwrap()), key(&e.metrics));
    }
    assert!(verify_joint(&ev, &cells, &hws, &got.frontier).unwrap().is_none());
}

#[test]
fn parallel_enumeration_is_identical() {
    let cells = sample_cells(40, 6, 9, 13);
    let hws = sample_hw(Some(300), 14);
    let a = enumerate_joint(&evaluator(1), &cells, &hws, &|_| {}).unwrap();
    let b = enumerate_joint(&evaluator(4), &cells, &hws, &|_| {}).unwrap();
    assert_eq!(a.points, b.points);
    assert_eq!(a.frontier.len(), b.frontier.len());
    for (x, y) in a.frontier.iter().zip(&b.frontier) {
        assert_eq!(x.point, y.point);
        assert_eq!(key(&x.metrics), key(&y.metrics));
    }
}

#[test]
fn counts_every_pair() {
    let cells = sample_cells(100, 6, 9, 15);
    let got = enumerate_joint(&evaluator(1), &cells, &sample_hw(None, 0), &|_| {}).unwrap();
    assert_eq!(got.points, 864_000);
}

#[test]
fn verification_catches_a_dropped_point() {
    let ev = evaluator(1);
    let cells = sample_cells(20, 6, 9, 16);
    let hws = sample_hw(Some(100), 17);
    let mut f = enumerate_joint(&ev, &cells, &hws, &|_| {}).unwrap().frontier;
    let dropped = f.remove(f.len() / 2);
    let miss = verify_joint(&ev, &cells, &hws, &f).unwrap().expect("gap not found");
    assert!(!f.iter().any(|e| dominates(&e.metrics, &miss.metrics)));
    assert!(miss.metrics == dropped.metrics || dominates(&dropped.metrics, &miss.metrics));
}

#[test]
fn empty_inputs() {
    let ev = evaluator(1);
    let got = enumerate_joint(&ev, &[], &sample_hw(None, 0), &|_| {}).unwrap();
    assert!(got.frontier.is_empty());
    assert_eq!(got.points, 0);
    let got = enumerate_joint(&ev, &sample_cells(5, 6, 9, 1), &[], &|_| {}).unwrap();
    assert!(got.frontier.is_empty());
}
