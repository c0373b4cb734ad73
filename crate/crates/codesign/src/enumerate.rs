//! Exhaustive frontier of a cells × accelerators product.
//!
//! Accuracy is constant per cell, so the three-objective filter splits into
//! a two-objective (area, latency) filter per cell followed by a streaming
//! archive over the per-cell survivors. Cells are processed in parallel and
//! merged in input order, which gives the same frontier, ties included, as
//! streaming every pair cell-major.

use std::sync::atomic::{AtomicUsize, Ordering};

use codesign_core::latency::LatencyScratch;
use codesign_core::pareto::minima_2d;
use codesign_core::{
    cell_hash, validate_cell, CellSpec, EvalError, FrontierEntry, HwConfig, LatencyProjection, Metrics, ParetoArchive,
    SearchPoint,
};
use rayon::prelude::*;

use crate::evaluator::CachedEvaluator;

#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration {
    pub frontier: Vec<FrontierEntry>,
    /// Pairs evaluated.
    pub points: u64,
}

/// A point that the frontier neither contains nor dominates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Uncovered {
    pub point: SearchPoint,
    pub metrics: Metrics,
}

struct CellView {
    cell: CellSpec,
    accuracy: f64,
    /// Latency per hardware entry, parallel to the hardware list.
    latency: Vec<f64>,
}

fn projections(hws: &[HwConfig]) -> Vec<usize> {
    hws.iter().map(|h| LatencyProjection::of(h).index()).collect()
}

fn view(ev: &CachedEvaluator, cell: &CellSpec, proj: &[usize]) -> Result<CellView, EvalError> {
    let cell = validate_cell(cell)?;
    let accuracy = ev.accuracy_of(&cell, cell_hash(&cell))?;
    let compiled = ev.model().compile(&cell);
    let mut by_projection = [f64::NAN; LatencyProjection::COUNT];
    let mut scratch = LatencyScratch::default();
    let mut latency = Vec::with_capacity(proj.len());
    for &p in proj {
        if by_projection[p].is_nan() {
            let projection = LatencyProjection::from_index(p).expect("in range");
            by_projection[p] = compiled.latency_with(&projection, &mut scratch)?;
        }
        latency.push(by_projection[p]);
    }
    Ok(CellView { cell, accuracy, latency })
}

/// Runs `f` over the cells on the evaluator's pool, keeping input order and
/// reporting the first error in that order.
fn per_cell<T: Send>(
    ev: &CachedEvaluator,
    cells: &[CellSpec],
    progress: &(dyn Fn(usize) + Sync),
    f: impl Fn(&CellSpec) -> Result<T, EvalError> + Sync,
) -> Result<Vec<T>, EvalError> {
    let done = AtomicUsize::new(0);
    let g = |c: &CellSpec| {
        let out = f(c);
        progress(done.fetch_add(1, Ordering::Relaxed) + 1);
        out
    };
    let results: Vec<Result<T, EvalError>> = if ev.parallelism() == 1 {
        cells.iter().map(g).collect()
    } else {
        ev.pool().install(|| cells.par_iter().map(g).collect())
    };
    results.into_iter().collect()
}

/// Frontier of `cells × hws`. `progress` receives the number of finished
/// cells.
pub fn enumerate_joint(
    ev: &CachedEvaluator,
    cells: &[CellSpec],
    hws: &[HwConfig],
    progress: &(dyn Fn(usize) + Sync),
) -> Result<Enumeration, EvalError> {
    let areas: Vec<f64> = hws.iter().map(|h| ev.area_of(h)).collect();
    let proj = projections(hws);
    let survivors = per_cell(ev, cells, progress, |cell| {
        let v = view(ev, cell, &proj)?;
        let items: Vec<(f64, f64)> = areas.iter().copied().zip(v.latency.iter().copied()).collect();
        Ok(minima_2d(&items)
            .into_iter()
            .map(|i| (SearchPoint::new(v.cell, hws[i]), Metrics::new(areas[i], v.latency[i], v.accuracy)))
            .collect::<Vec<_>>())
    })?;
    let mut archive = ParetoArchive::new();
    for (point, metrics) in survivors.into_iter().flatten() {
        archive.insert(point, metrics);
    }
    Ok(Enumeration { frontier: archive.into_frontier(), points: cells.len() as u64 * hws.len() as u64 })
}

/// Re-evaluates every pair and returns the first, in cell-major order, that
/// is neither on `frontier` nor dominated by it.
pub fn verify_joint(
    ev: &CachedEvaluator,
    cells: &[CellSpec],
    hws: &[HwConfig],
    frontier: &[FrontierEntry],
) -> Result<Option<Uncovered>, EvalError> {
    let areas: Vec<f64> = hws.iter().map(|h| ev.area_of(h)).collect();
    let proj = projections(hws);
    let found = per_cell(ev, cells, &|_| {}, |cell| {
        let v = view(ev, cell, &proj)?;
        // Entries at least as accurate, by area, with running latency minima.
        let mut relevant: Vec<(f64, f64)> = frontier
            .iter()
            .filter(|e| e.metrics.accuracy >= v.accuracy)
            .map(|e| (e.metrics.area_mm2, e.metrics.latency_ms))
            .collect();
        relevant.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = f64::INFINITY;
        for r in &mut relevant {
            best = best.min(r.1);
            r.1 = best;
        }
        for (i, (&area, &lat)) in areas.iter().zip(&v.latency).enumerate() {
            let k = relevant.partition_point(|r| r.0 <= area);
            if k == 0 || relevant[k - 1].1 > lat {
                return Ok(Some(Uncovered {
                    point: SearchPoint::new(v.cell, hws[i]),
                    metrics: Metrics::new(area, lat, v.accuracy),
                }));
            }
        }
        Ok(None)
    })?;
    Ok(found.into_iter().flatten().next())
}
