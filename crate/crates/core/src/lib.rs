//! Joint CNN-cell / FPGA-accelerator codesign engine.
//!
//! This crate holds everything that is pure computation:
//!
//! * [`space`]: the NASBench-style cell space, the CHaiDNN-style accelerator
//!   space, their decision schemas and the canonical text encoding of a point.
//! * [`hash`]: isomorphism-invariant cell digests and exact cell enumeration.
//! * [`area`], [`latency`] and [`schedule`]: the analytic accelerator models.
//! * [`accuracy`]: table and synthetic accuracy oracles.
//! * [`reward`]: the constrained weighted-sum reward, punishment and the
//!   perf/area threshold ramp.
//! * [`pareto`]: dominance, the streaming non-dominated archive and frontier
//!   ranking.
//! * [`policy`] and [`search`]: the LSTM controller trained with REINFORCE and
//!   the combined / phase / separate search strategies.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, caching,
//! parallel evaluation and the command line live in the `codesign` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod accuracy;
pub mod area;
pub mod hash;
pub mod latency;
pub mod metrics;
pub mod model;
pub mod pareto;
pub mod policy;
pub mod reward;
pub mod schedule;
pub mod search;
pub mod space;

pub use accuracy::{AccuracyError, AccuracyOracle, AccuracyRecord, AccuracySource, AccuracyTable, SurrogateParams};
pub use area::{area, AreaBreakdown, AreaParams, ResourceVector};
pub use hash::{canonical_cell, cell_hash, enumerate_cells, CellDigest};
pub use latency::{LatencyProjection, LatencyTable, OpKind, OpVariant, SyntheticLatencyParams, Unit};
pub use metrics::Metrics;
pub use model::{EvalError, Evaluate, PointModel};
pub use pareto::{dominates, frontier, FrontierEntry, ParetoArchive};
pub use policy::{ControllerConfig, Policy};
pub use reward::{perf_per_area, reward, NormBounds, RewardOutcome, RewardSpec, ThresholdRamp, Thresholds};
pub use search::{run_search, Phase, Scenario, SearchConfig, SearchOutcome, StepRecord, Strategy};
pub use space::{
    validate_cell, CellError, CellOp, CellSpec, DecisionSchema, HwConfig, SearchPoint, SkeletonSpec, SpaceKind,
};
