//! Greedy list scheduling of a task DAG onto dedicated execution units.
//!
//! Every task is bound to one unit; a unit runs one task at a time. The
//! scheduler is event driven: at each instant it starts, on every idle unit,
//! the lowest-index task whose predecessors have all finished. Task indices
//! are expected to be a topological order, so the tie-break is "lowest
//! topological index first".

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

/// Precedence structure of a task graph in compressed adjacency form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dag {
    pred_offsets: Vec<usize>,
    preds: Vec<usize>,
    succ_offsets: Vec<usize>,
    succs: Vec<usize>,
}

impl Dag {
    /// Builds a DAG from per-task predecessor lists. Predecessors must have
    /// smaller indices than their successors.
    pub fn from_preds<P: AsRef<[usize]>>(preds: &[P]) -> Self {
        let mut builder = DagBuilder::default();
        for p in preds {
            builder.push(p.as_ref());
        }
        builder.build()
    }

    pub fn len(&self) -> usize {
        self.pred_offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn preds(&self, task: usize) -> &[usize] {
        &self.preds[self.pred_offsets[task]..self.pred_offsets[task + 1]]
    }

    pub fn succs(&self, task: usize) -> &[usize] {
        &self.succs[self.succ_offsets[task]..self.succ_offsets[task + 1]]
    }

    /// Longest path through the DAG weighted by task durations.
    pub fn critical_path(&self, durations: &[f64]) -> f64 {
        let mut finish = vec![0.0f64; self.len()];
        let mut best = 0.0f64;
        for t in 0..self.len() {
            let ready = self.preds(t).iter().map(|&p| finish[p]).fold(0.0, f64::max);
            finish[t] = ready + durations[t];
            best = best.max(finish[t]);
        }
        best
    }
}

/// Incremental [`Dag`] construction.
#[derive(Clone, Debug)]
pub struct DagBuilder {
    pred_offsets: Vec<usize>,
    preds: Vec<usize>,
}

impl Default for DagBuilder {
    fn default() -> Self {
        DagBuilder { pred_offsets: vec![0], preds: Vec::new() }
    }
}

impl DagBuilder {
    /// Appends a task and returns its index.
    pub fn push(&mut self, preds: &[usize]) -> usize {
        let index = self.pred_offsets.len() - 1;
        for &p in preds {
            assert!(p < index, "predecessor {p} of task {index} is not earlier in topological order");
        }
        self.preds.extend_from_slice(preds);
        self.pred_offsets.push(self.preds.len());
        index
    }

    pub fn len(&self) -> usize {
        self.pred_offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn build(self) -> Dag {
        let n = self.len();
        let mut counts = vec![0usize; n + 1];
        for &p in &self.preds {
            counts[p + 1] += 1;
        }
        for k in 0..n {
            counts[k + 1] += counts[k];
        }
        let succ_offsets = counts.clone();
        let mut fill = counts;
        let mut succs = vec![0usize; self.preds.len()];
        for t in 0..n {
            for &p in &self.preds[self.pred_offsets[t]..self.pred_offsets[t + 1]] {
                succs[fill[p]] = t;
                fill[p] += 1;
            }
        }
        Dag { pred_offsets: self.pred_offsets, preds: self.preds, succ_offsets, succs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub makespan: f64,
    pub start: Vec<f64>,
    pub finish: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Pending {
    ready: f64,
    task: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (ready time, task index)
        other.ready.total_cmp(&self.ready).then_with(|| other.task.cmp(&self.task))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable scheduler; keeps scratch buffers between runs.
#[derive(Clone, Debug, Default)]
pub struct ListScheduler {
    start: Vec<f64>,
    finish: Vec<f64>,
    missing: Vec<usize>,
    ready_at: Vec<f64>,
    unit_free: Vec<f64>,
    queues: Vec<BinaryHeap<Reverse<usize>>>,
    pending: BinaryHeap<Pending>,
}

impl ListScheduler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Schedules `dag` with task `t` bound to unit `units[t]` for
    /// `durations[t]`. Returns the makespan; start and finish times stay
    /// available through [`ListScheduler::start`] and [`ListScheduler::finish`].
    pub fn run(&mut self, dag: &Dag, units: &[usize], durations: &[f64]) -> f64 {
        let n = dag.len();
        assert_eq!(units.len(), n);
        assert_eq!(durations.len(), n);
        let num_units = units.iter().copied().max().map_or(0, |u| u + 1);
        self.start.clear();
        self.start.resize(n, 0.0);
        self.finish.clear();
        self.finish.resize(n, 0.0);
        self.ready_at.clear();
        self.ready_at.resize(n, 0.0);
        self.missing.clear();
        self.missing.extend((0..n).map(|t| dag.preds(t).len()));
        self.unit_free.clear();
        self.unit_free.resize(num_units, 0.0);
        if self.queues.len() < num_units {
            self.queues.resize_with(num_units, BinaryHeap::new);
        }
        for q in &mut self.queues {
            q.clear();
        }
        self.pending.clear();
        for t in 0..n {
            if self.missing[t] == 0 {
                self.pending.push(Pending { ready: 0.0, task: t });
            }
        }

        let mut now = 0.0f64;
        let mut done = 0;
        let mut makespan = 0.0f64;
        while done < n {
            while let Some(&p) = self.pending.peek() {
                if p.ready > now {
                    break;
                }
                self.pending.pop();
                self.queues[units[p.task]].push(Reverse(p.task));
            }
            for u in 0..num_units {
                if self.unit_free[u] > now {
                    continue;
                }
                let Some(Reverse(t)) = self.queues[u].pop() else { continue };
                let end = now + durations[t];
                self.start[t] = now;
                self.finish[t] = end;
                self.unit_free[u] = end;
                makespan = makespan.max(end);
                done += 1;
                for &s in dag.succs(t) {
                    self.ready_at[s] = self.ready_at[s].max(end);
                    self.missing[s] -= 1;
                    if self.missing[s] == 0 {
                        self.pending.push(Pending { ready: self.ready_at[s], task: s });
                    }
                }
            }
            // next event: a task becoming ready or a busy unit with queued work freeing up
            let mut next = f64::INFINITY;
            if let Some(p) = self.pending.peek() {
                next = next.min(p.ready);
            }
            for u in 0..num_units {
                if !self.queues[u].is_empty() {
                    next = next.min(self.unit_free[u]);
                }
            }
            if next.is_finite() {
                now = now.max(next);
            } else {
                debug_assert_eq!(done, n);
            }
        }
        makespan
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn finish(&self) -> &[f64] {
        &self.finish
    }
}

/// One-shot convenience wrapper around [`ListScheduler`].
pub fn list_schedule(dag: &Dag, units: &[usize], durations: &[f64]) -> Schedule {
    let mut s = ListScheduler::new();
    let makespan = s.run(dag, units, durations);
    Schedule { makespan, start: s.start, finish: s.finish }
}
