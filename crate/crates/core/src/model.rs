//! Uncached composition of the three metric sources, and the evaluation trait
//! the search loop is written against.

use alloc::vec::Vec;

use thiserror::Error;

use crate::accuracy::{AccuracyError, AccuracyOracle, AccuracyRecord};
use crate::area::{area, AreaParams};
use crate::hash::canonical_cell;
use crate::latency::{CompiledNetwork, LatencyError, LatencyProjection, LatencyTable, Network};
use crate::metrics::Metrics;
use crate::space::{validate_cell, CellError, CellSpec, HwConfig, SearchPoint, SkeletonSpec};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("invalid cell: {0}")]
    InvalidCell(#[from] CellError),
    #[error(transparent)]
    Accuracy(#[from] AccuracyError),
    #[error(transparent)]
    Latency(#[from] LatencyError),
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("point {index}: {error}")]
pub struct BatchError {
    pub index: usize,
    pub error: EvalError,
}

/// Anything that maps a search point to its metrics.
pub trait Evaluate {
    fn evaluate(&self, point: &SearchPoint) -> Result<Metrics, EvalError>;

    /// Accuracy of a cell alone, without any hardware context.
    fn evaluate_accuracy(&self, cell: &CellSpec) -> Result<f64, EvalError>;

    /// Evaluates in order; the first failure aborts with its index.
    fn evaluate_batch(&self, points: &[SearchPoint]) -> Result<Vec<Metrics>, BatchError> {
        points
            .iter()
            .enumerate()
            .map(|(index, p)| self.evaluate(p).map_err(|error| BatchError { index, error }))
            .collect()
    }
}

/// Area model, latency table and accuracy oracle bundled together.
#[derive(Clone, Debug)]
pub struct PointModel {
    pub area_params: AreaParams,
    pub skeleton: SkeletonSpec,
    pub table: LatencyTable,
    pub oracle: AccuracyOracle,
}

impl PointModel {
    pub fn accuracy(&self, cell: &CellSpec) -> Result<AccuracyRecord, EvalError> {
        Ok(self.oracle.accuracy(cell)?)
    }

    pub fn area_mm2(&self, hw: &HwConfig) -> f64 {
        area(hw, &self.area_params).1
    }

    /// Compiles a pruned cell for repeated latency queries. The cell is
    /// relabeled canonically first, so isomorphic cells get the same
    /// schedule and therefore the same latency.
    pub fn compile(&self, cell: &CellSpec) -> CompiledNetwork<'_> {
        CompiledNetwork::new(Network::unroll(&canonical_cell(cell), &self.skeleton), &self.table)
    }

    pub fn latency_ms(&self, cell: &CellSpec, hw: &HwConfig) -> Result<f64, LatencyError> {
        self.compile(cell).latency(&LatencyProjection::of(hw))
    }
}

impl Evaluate for PointModel {
    fn evaluate(&self, point: &SearchPoint) -> Result<Metrics, EvalError> {
        let cell = validate_cell(&point.cell)?;
        let accuracy = self.accuracy(&cell)?.accuracy;
        let latency_ms = self.latency_ms(&cell, &point.hw)?;
        Ok(Metrics { area_mm2: self.area_mm2(&point.hw), latency_ms, accuracy })
    }

    fn evaluate_accuracy(&self, cell: &CellSpec) -> Result<f64, EvalError> {
        Ok(self.accuracy(&validate_cell(cell)?)?.accuracy)
    }
}
