//! Memoizing, thread-safe evaluator over a [`PointModel`].

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use codesign_core::model::BatchError;
use codesign_core::{cell_hash, validate_cell, CellDigest, CellSpec, EvalError, Evaluate, HwConfig, Metrics, PointModel, SearchPoint};
use lru::LruCache;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Cache counters. A hit means the value was served without recomputation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub accuracy_hits: u64,
    pub accuracy_misses: u64,
    pub area_hits: u64,
    pub area_misses: u64,
    pub latency_hits: u64,
    pub latency_misses: u64,
}

impl CacheStats {
    pub fn hits(&self) -> u64 {
        self.accuracy_hits + self.area_hits + self.latency_hits
    }

    pub fn misses(&self) -> u64 {
        self.accuracy_misses + self.area_misses + self.latency_misses
    }
}

#[derive(Default)]
struct Counters([AtomicU64; 6]);

impl Counters {
    fn bump(&self, slot: usize) {
        self.0[slot].fetch_add(1, Ordering::Relaxed);
    }
}

/// Accuracy is cached per cell digest, area per accelerator and latency per
/// (cell digest, accelerator) in an LRU of configurable capacity. Batches run
/// on a private pool of `parallelism` threads.
pub struct CachedEvaluator {
    model: PointModel,
    accuracy: Mutex<HashMap<CellDigest, f64>>,
    area: Mutex<HashMap<u16, f64>>,
    latency: Mutex<LruCache<(CellDigest, u16), f64>>,
    counters: Counters,
    parallelism: usize,
    pool: ThreadPool,
}

impl CachedEvaluator {
    /// `latency_capacity` of `None` keeps every latency.
    pub fn new(model: PointModel, parallelism: usize, latency_capacity: Option<usize>) -> Self {
        let parallelism = parallelism.max(1);
        let latency = match latency_capacity.and_then(NonZeroUsize::new) {
            Some(cap) => LruCache::new(cap),
            None => LruCache::unbounded(),
        };
        CachedEvaluator {
            model,
            accuracy: Mutex::new(HashMap::new()),
            area: Mutex::new(HashMap::new()),
            latency: Mutex::new(latency),
            counters: Counters::default(),
            parallelism,
            pool: ThreadPoolBuilder::new().num_threads(parallelism).build().expect("thread pool"),
        }
    }

    pub fn model(&self) -> &PointModel {
        &self.model
    }

    pub fn parallelism(&self) -> usize {
        self.parallelism
    }

    pub fn pool(&self) -> &ThreadPool {
        &self.pool
    }

    pub fn stats(&self) -> CacheStats {
        let c = |i: usize| self.counters.0[i].load(Ordering::Relaxed);
        CacheStats {
            accuracy_hits: c(0),
            accuracy_misses: c(1),
            area_hits: c(2),
            area_misses: c(3),
            latency_hits: c(4),
            latency_misses: c(5),
        }
    }

    /// Accuracy of a pruned cell with a known digest.
    pub fn accuracy_of(&self, cell: &CellSpec, digest: CellDigest) -> Result<f64, EvalError> {
        if let Some(&a) = self.accuracy.lock().unwrap().get(&digest) {
            self.counters.bump(0);
            return Ok(a);
        }
        self.counters.bump(1);
        let a = self.model.oracle.accuracy_with_digest(cell, digest)?.accuracy;
        self.accuracy.lock().unwrap().insert(digest, a);
        Ok(a)
    }

    pub fn area_of(&self, hw: &HwConfig) -> f64 {
        let key = hw.ordinal() as u16;
        if let Some(&a) = self.area.lock().unwrap().get(&key) {
            self.counters.bump(2);
            return a;
        }
        self.counters.bump(3);
        let a = self.model.area_mm2(hw);
        self.area.lock().unwrap().insert(key, a);
        a
    }

    fn latency_of(&self, cell: &CellSpec, digest: CellDigest, hw: &HwConfig) -> Result<f64, EvalError> {
        let key = (digest, hw.ordinal() as u16);
        if let Some(&l) = self.latency.lock().unwrap().get(&key) {
            self.counters.bump(4);
            return Ok(l);
        }
        self.counters.bump(5);
        let l = self.model.latency_ms(cell, hw)?;
        self.latency.lock().unwrap().put(key, l);
        Ok(l)
    }
}

impl Evaluate for CachedEvaluator {
    fn evaluate(&self, point: &SearchPoint) -> Result<Metrics, EvalError> {
        let cell = validate_cell(&point.cell)?;
        let digest = cell_hash(&cell);
        let accuracy = self.accuracy_of(&cell, digest)?;
        let latency_ms = self.latency_of(&cell, digest, &point.hw)?;
        Ok(Metrics { area_mm2: self.area_of(&point.hw), latency_ms, accuracy })
    }

    fn evaluate_accuracy(&self, cell: &CellSpec) -> Result<f64, EvalError> {
        let cell = validate_cell(cell)?;
        self.accuracy_of(&cell, cell_hash(&cell))
    }

    fn evaluate_batch(&self, points: &[SearchPoint]) -> Result<Vec<Metrics>, BatchError> {
        let one = |(index, p): (usize, &SearchPoint)| self.evaluate(p).map_err(|error| BatchError { index, error });
        if self.parallelism == 1 || points.len() < 2 {
            return points.iter().enumerate().map(one).collect();
        }
        let results: Vec<Result<Metrics, BatchError>> =
            self.pool.install(|| points.par_iter().enumerate().map(one).collect());
        results.into_iter().collect()
    }
}
