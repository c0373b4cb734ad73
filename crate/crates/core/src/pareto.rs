//! Dominance over (area ↓, latency ↓, accuracy ↑) and the streaming
//! non-dominated archive.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::metrics::Metrics;
use crate::reward::{reward, RewardSpec};
use crate::space::SearchPoint;

/// `a` is no worse than `b` in every metric and strictly better in one.
pub fn dominates(a: &Metrics, b: &Metrics) -> bool {
    let no_worse = a.area_mm2 <= b.area_mm2 && a.latency_ms <= b.latency_ms && a.accuracy >= b.accuracy;
    let better = a.area_mm2 < b.area_mm2 || a.latency_ms < b.latency_ms || a.accuracy > b.accuracy;
    no_worse && better
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrontierEntry {
    pub point: SearchPoint,
    pub metrics: Metrics,
    /// Later points seen with exactly these metrics, which were dropped.
    pub duplicates: u64,
}

fn same_metrics(a: &Metrics, b: &Metrics) -> bool {
    a.area_mm2 == b.area_mm2 && a.latency_ms == b.latency_ms && a.accuracy == b.accuracy
}

fn frontier_order(a: &FrontierEntry, b: &FrontierEntry) -> Ordering {
    a.metrics
        .area_mm2
        .total_cmp(&b.metrics.area_mm2)
        .then(a.metrics.latency_ms.total_cmp(&b.metrics.latency_ms))
        .then(b.metrics.accuracy.total_cmp(&a.metrics.accuracy))
}

/// Current non-dominated set of a stream. Each incoming point is dropped if
/// an incumbent dominates it or has identical metrics; otherwise it is kept
/// and the incumbents it dominates are evicted.
#[derive(Clone, Debug, Default)]
pub struct ParetoArchive {
    entries: Vec<FrontierEntry>,
    seen: u64,
    duplicates: u64,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Offers a point; returns whether it entered the archive.
    pub fn insert(&mut self, point: SearchPoint, metrics: Metrics) -> bool {
        self.seen += 1;
        for e in &mut self.entries {
            if same_metrics(&e.metrics, &metrics) {
                e.duplicates += 1;
                self.duplicates += 1;
                return false;
            }
            if dominates(&e.metrics, &metrics) {
                return false;
            }
        }
        self.entries.retain(|e| !dominates(&metrics, &e.metrics));
        self.entries.push(FrontierEntry { point, metrics, duplicates: 0 });
        true
    }

    /// Folds another archive in, as if its stream had followed this one.
    pub fn merge(&mut self, other: ParetoArchive) {
        let seen = self.seen + other.seen;
        let mut duplicates = self.duplicates + other.duplicates;
        for e in other.entries {
            let extra = e.duplicates;
            if let Some(mine) = self.entries.iter_mut().find(|m| same_metrics(&m.metrics, &e.metrics)) {
                mine.duplicates += 1 + extra;
                duplicates += 1;
                continue;
            }
            if self.insert(e.point, e.metrics) {
                self.entries.last_mut().expect("just inserted").duplicates = extra;
            }
        }
        self.seen = seen;
        self.duplicates = duplicates;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Points offered so far.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    /// Points dropped for repeating an archived metric triple.
    pub fn duplicates(&self) -> u64 {
        self.duplicates
    }

    pub fn entries(&self) -> &[FrontierEntry] {
        &self.entries
    }

    /// Frontier in ascending area, then latency.
    pub fn into_frontier(mut self) -> Vec<FrontierEntry> {
        self.entries.sort_by(frontier_order);
        self.entries
    }
}

/// Non-dominated subset of a stream, ascending by area then latency.
pub fn frontier<I: IntoIterator<Item = (SearchPoint, Metrics)>>(points: I) -> Vec<FrontierEntry> {
    let mut archive = ParetoArchive::new();
    for (p, m) in points {
        archive.insert(p, m);
    }
    archive.into_frontier()
}

/// Indices of the (area, latency) minima of `items`, for points that share
/// an accuracy. Among exact ties the lowest index survives. The result is
/// sorted by area.
pub fn minima_2d(items: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[a].0.total_cmp(&items[b].0).then(items[a].1.total_cmp(&items[b].1)).then(a.cmp(&b)));
    let mut out = Vec::new();
    let mut best_latency = f64::INFINITY;
    for i in order {
        if items[i].1 < best_latency {
            best_latency = items[i].1;
            out.push(i);
        }
    }
    out
}

/// Feasible frontier entries by reward, best first, at most `k`.
pub fn top_k_by_reward<'a>(frontier: &'a [FrontierEntry], spec: &RewardSpec, k: usize) -> Vec<(&'a FrontierEntry, f64)> {
    let mut ranked: Vec<(&FrontierEntry, f64)> = frontier
        .iter()
        .filter_map(|e| {
            let r = reward(&e.metrics, spec);
            r.feasible.then_some((e, r.value))
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    ranked.truncate(k);
    ranked
}

/// Index in `points` of the first point that is neither on the frontier nor
/// dominated by a frontier entry, if any.
pub fn verify<'a, I: IntoIterator<Item = &'a Metrics>>(frontier: &[FrontierEntry], points: I) -> Option<usize> {
    points.into_iter().position(|m| {
        !frontier.iter().any(|e| same_metrics(&e.metrics, m) || dominates(&e.metrics, m))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{CellSpec, HwConfig};

    fn pt(i: u32) -> SearchPoint {
        SearchPoint { cell: CellSpec::identity(), hw: HwConfig::from_ordinal(i as usize).unwrap() }
    }

    #[test]
    fn dominance_cases() {
        let a = Metrics::new(1.0, 1.0, 0.9);
        assert!(dominates(&a, &Metrics::new(2.0, 1.0, 0.9)));
        assert!(dominates(&a, &Metrics::new(1.0, 1.0, 0.8)));
        assert!(!dominates(&a, &a));
        assert!(!dominates(&a, &Metrics::new(0.5, 2.0, 0.9)));
    }

    #[test]
    fn empty_and_single_dominator() {
        assert!(frontier(Vec::new()).is_empty());
        let pts = (0..5).map(|i| (pt(i), Metrics::new(2.0 + i as f64, 3.0, 0.5)));
        let f = frontier(core::iter::once((pt(9), Metrics::new(1.0, 1.0, 0.9))).chain(pts));
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].point, pt(9));
    }

    #[test]
    fn ties_keep_first_and_count() {
        let m = Metrics::new(1.0, 2.0, 0.5);
        let mut archive = ParetoArchive::new();
        assert!(archive.insert(pt(0), m));
        assert!(!archive.insert(pt(1), m));
        assert!(!archive.insert(pt(2), m));
        assert_eq!(archive.duplicates(), 2);
        let f = archive.into_frontier();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].point, pt(0));
        assert_eq!(f[0].duplicates, 2);
    }

    #[test]
    fn sorted_by_area_then_latency() {
        let f = frontier([
            (pt(0), Metrics::new(3.0, 1.0, 0.5)),
            (pt(1), Metrics::new(1.0, 3.0, 0.5)),
            (pt(2), Metrics::new(2.0, 2.0, 0.5)),
            (pt(3), Metrics::new(1.0, 2.0, 0.4)),
        ]);
        let areas: Vec<(f64, f64)> = f.iter().map(|e| (e.metrics.area_mm2, e.metrics.latency_ms)).collect();
        assert_eq!(areas, [(1.0, 2.0), (1.0, 3.0), (2.0, 2.0), (3.0, 1.0)]);
    }

    #[test]
    fn merge_matches_single_stream() {
        let ms = [
            Metrics::new(3.0, 1.0, 0.5),
            Metrics::new(1.0, 3.0, 0.5),
            Metrics::new(2.0, 2.0, 0.5),
            Metrics::new(1.0, 3.0, 0.5),
            Metrics::new(0.5, 0.5, 0.9),
            Metrics::new(4.0, 0.2, 0.1),
        ];
        let whole = frontier(ms.iter().enumerate().map(|(i, m)| (pt(i as u32), *m)));
        let mut left = ParetoArchive::new();
        let mut right = ParetoArchive::new();
        for (i, m) in ms.iter().enumerate() {
            if i < 3 { &mut left } else { &mut right }.insert(pt(i as u32), *m);
        }
        left.merge(right);
        assert_eq!(left.seen(), 6);
        assert_eq!(left.into_frontier(), whole);
    }

    #[test]
    fn minima_in_two_dims() {
        let items = [(2.0, 2.0), (1.0, 3.0), (1.0, 3.0), (3.0, 1.0), (2.5, 2.5), (1.0, 4.0)];
        assert_eq!(minima_2d(&items), [1, 0, 3]);
    }

    #[test]
    fn verify_flags_uncovered_point() {
        let ms = [Metrics::new(1.0, 1.0, 0.9), Metrics::new(2.0, 2.0, 0.5)];
        let f = frontier(ms.iter().enumerate().map(|(i, m)| (pt(i as u32), *m)));
        assert_eq!(verify(&f, &ms), None);
        let extra = [Metrics::new(0.5, 5.0, 0.1)];
        assert_eq!(verify(&f, &extra), Some(0));
    }
}
