//! Constrained weighted-sum reward over (area, latency, accuracy).
//!
//! Points that violate a threshold are not scalarized; they receive a
//! negative punishment proportional to how far they miss, capped at
//! `punishment_scale`.

use alloc::vec::Vec;

use thiserror::Error;

use crate::metrics::Metrics;

/// Smallest relative violation used by the punishment, so a point sitting
/// exactly on a strict threshold is still punished.
pub const MIN_VIOLATION: f64 = 1e-6;

/// Normalization range of one metric, in the metric's own units
/// (mm², ms, fraction). Orientation is applied by [`normalize`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBounds {
    pub min: f64,
    pub max: f64,
}

impl NormBounds {
    pub fn new(min: f64, max: f64) -> Self {
        NormBounds { min, max }
    }
}

/// Optional strict constraints: `area < area_max`, `latency < latency_max`,
/// `accuracy > accuracy_min`, `perf/area > perf_per_area_min`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Thresholds {
    pub area_max: Option<f64>,
    pub latency_max: Option<f64>,
    pub accuracy_min: Option<f64>,
    pub perf_per_area_min: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardSpec {
    /// Weights of (area, latency, accuracy).
    pub weights: [f64; 3],
    pub thresholds: Thresholds,
    /// Bounds of (area, latency, accuracy).
    pub norm: [NormBounds; 3],
    pub punishment_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RewardSpecError {
    #[error("weights must be nonnegative and sum to 1, got {0:?}")]
    Weights([f64; 3]),
    #[error("normalization bounds for {metric} need min < max, got ({min}, {max})")]
    Bounds { metric: &'static str, min: f64, max: f64 },
    #[error("punishment_scale must be positive, got {0}")]
    Punishment(f64),
}

pub const METRIC_NAMES: [&str; 3] = ["area", "latency", "accuracy"];

impl RewardSpec {
    pub fn new(weights: [f64; 3], norm: [NormBounds; 3]) -> Self {
        RewardSpec { weights, thresholds: Thresholds::default(), norm, punishment_scale: 1.0 }
    }

    pub fn validate(&self) -> Result<(), RewardSpecError> {
        let sum: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(RewardSpecError::Weights(self.weights));
        }
        for (b, metric) in self.norm.iter().zip(METRIC_NAMES) {
            if !(b.min.is_finite() && b.max.is_finite() && b.min < b.max) {
                return Err(RewardSpecError::Bounds { metric, min: b.min, max: b.max });
            }
        }
        if !(self.punishment_scale.is_finite() && self.punishment_scale > 0.0) {
            return Err(RewardSpecError::Punishment(self.punishment_scale));
        }
        Ok(())
    }
}

/// Linear map of `value` from `(lo, hi)` onto `(0, 1)`, clamped.
pub fn normalize_oriented(value: f64, lo: f64, hi: f64) -> f64 {
    ((value - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// Normalized (area, latency, accuracy), each oriented so that higher is
/// better: area and latency are negated before mapping, so their bounds
/// become `(-max, -min)`.
pub fn normalize(m: &Metrics, spec: &RewardSpec) -> [f64; 3] {
    let [a, l, acc] = spec.norm;
    [
        normalize_oriented(-m.area_mm2, -a.max, -a.min),
        normalize_oriented(-m.latency_ms, -l.max, -l.min),
        normalize_oriented(m.accuracy, acc.min, acc.max),
    ]
}

/// Batch-1 throughput per silicon area: `(1000 / latency_ms) / (area_mm2 / 100)`,
/// in images/s/cm².
pub fn perf_per_area(m: &Metrics) -> f64 {
    (1000.0 / m.latency_ms) / (m.area_mm2 / 100.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardOutcome {
    pub feasible: bool,
    /// Reward in `[0, 1]` when feasible, punishment in `[-scale, 0)` otherwise.
    pub value: f64,
    pub normalized: [f64; 3],
}

impl RewardOutcome {
    /// Full punishment, used for samples that do not decode to a valid point.
    pub fn invalid(spec: &RewardSpec) -> Self {
        RewardOutcome { feasible: false, value: -spec.punishment_scale, normalized: [0.0; 3] }
    }
}

fn relative_violation(value: f64, threshold: f64) -> f64 {
    if threshold == 0.0 {
        return 1.0;
    }
    ((value - threshold).abs() / threshold.abs()).clamp(MIN_VIOLATION, 1.0)
}

/// Relative violations of every threshold the metrics fail.
pub fn violations(m: &Metrics, thresholds: &Thresholds) -> Vec<f64> {
    let mut out = Vec::new();
    if let Some(th) = thresholds.area_max {
        if !(m.area_mm2 < th) {
            out.push(relative_violation(m.area_mm2, th));
        }
    }
    if let Some(th) = thresholds.latency_max {
        if !(m.latency_ms < th) {
            out.push(relative_violation(m.latency_ms, th));
        }
    }
    if let Some(th) = thresholds.accuracy_min {
        if !(m.accuracy > th) {
            out.push(relative_violation(m.accuracy, th));
        }
    }
    if let Some(th) = thresholds.perf_per_area_min {
        let ppa = perf_per_area(m);
        if !(ppa > th) {
            out.push(relative_violation(ppa, th));
        }
    }
    out
}

/// Weighted-sum reward of a feasible point, or the punishment of an
/// infeasible one.
pub fn reward(m: &Metrics, spec: &RewardSpec) -> RewardOutcome {
    let normalized = normalize(m, spec);
    let missed = violations(m, &spec.thresholds);
    if missed.is_empty() {
        let value = spec.weights.iter().zip(normalized.iter()).map(|(w, n)| w * n).sum::<f64>();
        RewardOutcome { feasible: true, value: value.clamp(0.0, 1.0), normalized }
    } else {
        let mean = missed.iter().sum::<f64>() / missed.len() as f64;
        RewardOutcome { feasible: false, value: -spec.punishment_scale * mean, normalized }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RampError {
    #[error("ramp schedule is empty")]
    Empty,
    #[error("ramp thresholds must be nondecreasing")]
    Decreasing,
    #[error("ramp stage budgets must be positive")]
    ZeroBudget,
}

/// Perf/area threshold that tightens after a given number of feasible
/// points at each stage. After the last stage's budget the final threshold
/// stays active.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdRamp {
    stages: Vec<(f64, u32)>,
    stage: usize,
    feasible_in_stage: u32,
}

impl ThresholdRamp {
    pub fn new(stages: &[(f64, u32)]) -> Result<Self, RampError> {
        if stages.is_empty() {
            return Err(RampError::Empty);
        }
        if stages.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(RampError::Decreasing);
        }
        if stages.iter().any(|s| s.1 == 0) {
            return Err(RampError::ZeroBudget);
        }
        Ok(ThresholdRamp { stages: stages.to_vec(), stage: 0, feasible_in_stage: 0 })
    }

    pub fn current(&self) -> f64 {
        self.stages[self.stage].0
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn stages(&self) -> &[(f64, u32)] {
        &self.stages
    }

    /// Records the verdict of the point judged against [`ThresholdRamp::current`].
    pub fn record(&mut self, feasible: bool) {
        if !feasible {
            return;
        }
        self.feasible_in_stage += 1;
        if self.feasible_in_stage >= self.stages[self.stage].1 && self.stage + 1 < self.stages.len() {
            self.stage += 1;
            self.feasible_in_stage = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit_spec(weights: [f64; 3]) -> RewardSpec {
        RewardSpec::new(weights, [NormBounds::new(0.0, 1.0), NormBounds::new(0.0, 1.0), NormBounds::new(0.0, 1.0)])
    }

    #[test]
    fn normalization_endpoints() {
        assert_eq!(normalize_oriented(2.0, 2.0, 6.0), 0.0);
        assert_eq!(normalize_oriented(6.0, 2.0, 6.0), 1.0);
        assert_eq!(normalize_oriented(4.0, 2.0, 6.0), 0.5);
        assert_eq!(normalize_oriented(1.0, 2.0, 6.0), 0.0);
        assert_eq!(normalize_oriented(7.0, 2.0, 6.0), 1.0);
        let spec = RewardSpec::new(
            [0.2, 0.3, 0.5],
            [NormBounds::new(50.0, 150.0), NormBounds::new(10.0, 110.0), NormBounds::new(0.8, 0.9)],
        );
        let n = normalize(&Metrics::new(150.0, 10.0, 0.85), &spec);
        assert_eq!(n[0], 0.0);
        assert_eq!(n[1], 1.0);
        assert!((n[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weighted_sum() {
        let spec = unit_spec([0.1, 0.8, 0.1]);
        let out = reward(&Metrics::new(0.5, 0.5, 0.5), &spec);
        assert!(out.feasible);
        assert!((out.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn latency_constraint_punishes() {
        let mut spec = unit_spec([0.1, 0.0, 0.9]);
        spec.norm[1] = NormBounds::new(10.0, 200.0);
        spec.thresholds.latency_max = Some(100.0);
        let out = reward(&Metrics::new(0.5, 150.0, 0.9), &spec);
        assert!(!out.feasible);
        assert!((out.value + 0.5).abs() < 1e-12);
        // exactly on the strict bound is still infeasible
        let edge = reward(&Metrics::new(0.5, 100.0, 0.9), &spec);
        assert!(!edge.feasible && edge.value < 0.0);
    }

    #[test]
    fn two_constraints_latency_only() {
        let mut spec = RewardSpec::new(
            [0.0, 1.0, 0.0],
            [NormBounds::new(50.0, 200.0), NormBounds::new(10.0, 110.0), NormBounds::new(0.8, 1.0)],
        );
        spec.thresholds.accuracy_min = Some(0.92);
        spec.thresholds.area_max = Some(100.0);
        let out = reward(&Metrics::new(90.0, 35.0, 0.95), &spec);
        assert!(out.feasible);
        assert!((out.value - 0.75).abs() < 1e-12);
        let slower = reward(&Metrics::new(90.0, 60.0, 0.95), &spec);
        assert!(slower.value < out.value);
        // area changes do not move a latency-only reward
        let smaller = reward(&Metrics::new(60.0, 35.0, 0.99), &spec);
        assert_eq!(smaller.value, out.value);
    }

    #[test]
    fn perf_per_area_values() {
        assert!((perf_per_area(&Metrics::new(186.0, 42.0, 0.7)) - 12.8).abs() < 0.05);
        assert!((perf_per_area(&Metrics::new(132.0, 41.8, 0.7)) - 18.1).abs() < 0.05);
        assert_eq!(perf_per_area(&Metrics::new(100.0, 1000.0, 0.7)), 1.0);
    }

    #[test]
    fn spec_validation() {
        assert!(unit_spec([0.1, 0.8, 0.1]).validate().is_ok());
        assert!(unit_spec([0.5, 0.6, 0.0]).validate().is_err());
        assert!(unit_spec([-0.5, 1.5, 0.0]).validate().is_err());
        let mut s = unit_spec([0.1, 0.8, 0.1]);
        s.norm[0] = NormBounds::new(1.0, 1.0);
        assert!(s.validate().is_err());
        s = unit_spec([0.1, 0.8, 0.1]);
        s.punishment_scale = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn ramp_advances_on_feasible_count() {
        let mut ramp = ThresholdRamp::new(&[(2.0, 3), (8.0, 2)]).unwrap();
        let verdicts = [true, false, true, false, true, true, true, true];
        let mut seen = Vec::new();
        for v in verdicts {
            seen.push(ramp.current());
            ramp.record(v);
        }
        assert_eq!(seen, vec![2.0, 2.0, 2.0, 2.0, 2.0, 8.0, 8.0, 8.0]);
        assert!(ThresholdRamp::new(&[]).is_err());
        assert!(ThresholdRamp::new(&[(8.0, 1), (2.0, 1)]).is_err());
        assert!(ThresholdRamp::new(&[(2.0, 0)]).is_err());
        let single = ThresholdRamp::new(&[(5.0, 1)]).unwrap();
        assert_eq!(single.current(), 5.0);
    }
}
