//! The search loop: sample from the controller, decode, evaluate, score,
//! update. Three strategies share it.
//!
//! * Combined: one controller over the joint schema.
//! * Phase: a cell controller and a hardware controller take turns; each
//!   phase freezes the other half at the best valid point found so far.
//! * Separate: an accuracy-only cell search, then a hardware search with the
//!   most accurate cell frozen. Only the second part competes for the best
//!   point.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hash::canonical_key;
use crate::metrics::Metrics;
use crate::model::{EvalError, Evaluate};
use crate::policy::{ControllerConfig, Policy, PolicyError};
use crate::reward::{normalize_oriented, reward, RewardSpec, ThresholdRamp};
use crate::space::{validate_cell, CellSpec, DecisionSchema, HwConfig, SearchPoint, SpaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Combined,
    /// Alternating phases, starting with the cell phase.
    Phase { cnn_steps: u64, hw_steps: u64 },
    /// `cnn_steps` of accuracy-only cell search, the rest hardware search.
    Separate { cnn_steps: u64 },
}

impl Strategy {
    pub const PHASE_DEFAULT: Strategy = Strategy::Phase { cnn_steps: 1000, hw_steps: 200 };
    pub const SEPARATE_DEFAULT: Strategy = Strategy::Separate { cnn_steps: 8333 };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Combined,
    Cnn,
    Hw,
    SeparateCnn,
    SeparateHw,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Combined => "combined",
            Phase::Cnn => "cnn",
            Phase::Hw => "hw",
            Phase::SeparateCnn => "separate_cnn",
            Phase::SeparateHw => "separate_hw",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Phase::Combined, Phase::Cnn, Phase::Hw, Phase::SeparateCnn, Phase::SeparateHw]
            .into_iter()
            .find(|p| p.name() == name)
    }
}

/// What is optimized: the reward and an optional perf/area ramp that
/// overrides the perf/area threshold step by step.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub reward: RewardSpec,
    pub ramp: Option<ThresholdRamp>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Total step budget.
    pub steps: u64,
    /// Largest cell the controller can emit.
    pub max_nodes: usize,
    pub controller: ControllerConfig,
    pub seed: u64,
    /// Samples drawn from the same parameters before one update.
    pub batch_size: usize,
    /// Hardware frozen during the first cell phase, and during separate
    /// search's accuracy-only part for logging.
    pub initial_hw: HwConfig,
    /// Parameters to start the first controller from.
    pub warm_start: Option<Policy>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Combined,
            steps: 10_000,
            max_nodes: crate::space::MAX_NODES,
            controller: ControllerConfig::default(),
            seed: 0,
            batch_size: 1,
            initial_hw: HwConfig::from_ordinal(0).expect("ordinal 0"),
            warm_start: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    pub phase: Phase,
    /// Pruned point when the cell is valid, the raw decoded point otherwise.
    pub point: SearchPoint,
    pub valid: bool,
    /// Absent for invalid cells and, except for accuracy, in accuracy-only steps.
    pub area_mm2: Option<f64>,
    pub latency_ms: Option<f64>,
    pub accuracy: Option<f64>,
    pub reward: f64,
    pub feasible: bool,
    /// The point was already evaluated earlier in this run.
    pub cache_hit: bool,
}

impl StepRecord {
    pub fn metrics(&self) -> Option<Metrics> {
        Some(Metrics::new(self.area_mm2?, self.latency_ms?, self.accuracy?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestPoint {
    pub step: u64,
    pub point: SearchPoint,
    pub metrics: Metrics,
    pub reward: f64,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub trajectory: Vec<StepRecord>,
    /// Highest-reward feasible point, first found on ties.
    pub best: Option<BestPoint>,
    /// Final controllers: the joint one, or the cell one then the hardware one.
    pub policies: Vec<Policy>,
    pub rng: ChaCha8Rng,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SearchError {
    #[error("step {step}: {error}")]
    Eval { step: u64, error: EvalError },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("invalid search config: {0}")]
    Config(&'static str),
}

struct Controller {
    schema: DecisionSchema,
    policy: Policy,
}

impl Controller {
    fn new(kind: SpaceKind, config: &SearchConfig, salt: u64) -> Self {
        let schema = DecisionSchema::with_max_nodes(kind, config.max_nodes);
        let policy = Policy::new(&schema.option_counts(), config.controller, config.seed ^ salt);
        Controller { schema, policy }
    }
}

struct Pending {
    choices: Vec<u8>,
    point: SearchPoint,
    valid: bool,
}

struct Run<'a, E, F> {
    evaluator: &'a E,
    spec: RewardSpec,
    ramp: Option<ThresholdRamp>,
    observer: F,
    rng: ChaCha8Rng,
    step: u64,
    trajectory: Vec<StepRecord>,
    best: Option<BestPoint>,
    /// Highest-reward valid point of any feasibility, used for freezing.
    best_valid: Option<(f64, SearchPoint)>,
    /// Most accurate valid cell, for separate search.
    best_accuracy: Option<(f64, CellSpec)>,
    seen: BTreeSet<(u128, Option<u16>)>,
}

impl<E: Evaluate, F: FnMut(&StepRecord)> Run<'_, E, F> {
    /// Runs `count` steps of one phase. `frozen` supplies whichever half the
    /// controller does not decide.
    fn phase(
        &mut self,
        ctl: &mut Controller,
        phase: Phase,
        count: u64,
        frozen: SearchPoint,
        batch_size: usize,
    ) -> Result<(), SearchError> {
        let end = self.step + count;
        while self.step < end {
            let k = batch_size.min((end - self.step) as usize);
            let mut batch = Vec::with_capacity(k);
            for _ in 0..k {
                let sample = ctl.policy.sample(&mut self.rng);
                let decoded = ctl.schema.decode(&sample.choices).expect("policy matches schema");
                let raw = SearchPoint {
                    cell: decoded.cell.unwrap_or(frozen.cell),
                    hw: decoded.hw.unwrap_or(frozen.hw),
                };
                let (point, valid) = match validate_cell(&raw.cell) {
                    Ok(cell) => (SearchPoint { cell, hw: raw.hw }, true),
                    Err(_) => (raw, false),
                };
                batch.push(Pending { choices: sample.choices, point, valid });
            }
            let rewards = self.score(phase, &batch)?;
            let updates: Vec<(&[u8], f64)> =
                batch.iter().zip(&rewards).map(|(p, &r)| (p.choices.as_slice(), r)).collect();
            ctl.policy.update_batch(&updates)?;
        }
        Ok(())
    }

    fn score(&mut self, phase: Phase, batch: &[Pending]) -> Result<Vec<f64>, SearchError> {
        let accuracy_only = phase == Phase::SeparateCnn;
        let valid: Vec<SearchPoint> = batch.iter().filter(|p| p.valid).map(|p| p.point).collect();
        let first_step = self.step;
        let mut evaluated = Vec::with_capacity(valid.len());
        if accuracy_only {
            for (i, p) in valid.iter().enumerate() {
                let acc = self.evaluator.evaluate_accuracy(&p.cell).map_err(|error| SearchError::Eval {
                    step: first_step + position_of_valid(batch, i),
                    error,
                })?;
                evaluated.push(Metrics::new(f64::NAN, f64::NAN, acc));
            }
        } else {
            evaluated = self.evaluator.evaluate_batch(&valid).map_err(|e| SearchError::Eval {
                step: first_step + position_of_valid(batch, e.index),
                error: e.error,
            })?;
        }
        let mut metrics = evaluated.into_iter();
        let mut rewards = Vec::with_capacity(batch.len());
        for pending in batch {
            let record = if pending.valid {
                let m = metrics.next().expect("one result per valid point");
                let key = (canonical_key(&pending.point.cell), (!accuracy_only).then(|| pending.point.hw.ordinal() as u16));
                let cache_hit = !self.seen.insert(key);
                self.judge(phase, pending.point, m, cache_hit)
            } else {
                StepRecord {
                    step: self.step,
                    phase,
                    point: pending.point,
                    valid: false,
                    area_mm2: None,
                    latency_ms: None,
                    accuracy: None,
                    reward: -self.spec.punishment_scale,
                    feasible: false,
                    cache_hit: false,
                }
            };
            rewards.push(record.reward);
            (self.observer)(&record);
            self.trajectory.push(record);
            self.step += 1;
        }
        Ok(rewards)
    }

    fn judge(&mut self, phase: Phase, point: SearchPoint, m: Metrics, cache_hit: bool) -> StepRecord {
        let mut record = StepRecord {
            step: self.step,
            phase,
            point,
            valid: true,
            area_mm2: None,
            latency_ms: None,
            accuracy: Some(m.accuracy),
            reward: 0.0,
            feasible: true,
            cache_hit,
        };
        if phase == Phase::SeparateCnn {
            let acc = self.spec.norm[2];
            record.reward = normalize_oriented(m.accuracy, acc.min, acc.max);
            if self.best_accuracy.as_ref().is_none_or(|(a, _)| m.accuracy > *a) {
                self.best_accuracy = Some((m.accuracy, point.cell));
            }
            return record;
        }
        record.area_mm2 = Some(m.area_mm2);
        record.latency_ms = Some(m.latency_ms);
        let mut spec = self.spec;
        if let Some(ramp) = &self.ramp {
            spec.thresholds.perf_per_area_min = Some(ramp.current());
        }
        let outcome = reward(&m, &spec);
        if let Some(ramp) = &mut self.ramp {
            ramp.record(outcome.feasible);
        }
        record.reward = outcome.value;
        record.feasible = outcome.feasible;
        if self.best_valid.as_ref().is_none_or(|(r, _)| outcome.value > *r) {
            self.best_valid = Some((outcome.value, point));
        }
        if outcome.feasible && self.best.as_ref().is_none_or(|b| outcome.value > b.reward) {
            self.best = Some(BestPoint { step: self.step, point, metrics: m, reward: outcome.value });
        }
        record
    }

    fn frozen(&self, fallback: SearchPoint) -> SearchPoint {
        self.best_valid.map_or(fallback, |(_, p)| p)
    }
}

fn position_of_valid(batch: &[Pending], nth: usize) -> u64 {
    batch.iter().enumerate().filter(|(_, p)| p.valid).nth(nth).map_or(0, |(i, _)| i as u64)
}

/// Runs one search. `observer` sees every step as soon as it is scored, in
/// step order.
pub fn run_search<E: Evaluate, F: FnMut(&StepRecord)>(
    evaluator: &E,
    scenario: &Scenario,
    config: &SearchConfig,
    observer: F,
) -> Result<SearchOutcome, SearchError> {
    if config.batch_size == 0 {
        return Err(SearchError::Config("batch_size must be positive"));
    }
    if !(2..=crate::space::MAX_NODES).contains(&config.max_nodes) {
        return Err(SearchError::Config("max_nodes must be in 2..=7"));
    }
    let mut run = Run {
        evaluator,
        spec: scenario.reward,
        ramp: scenario.ramp.clone(),
        observer,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        step: 0,
        trajectory: Vec::with_capacity(config.steps.min(1 << 20) as usize),
        best: None,
        best_valid: None,
        best_accuracy: None,
        seen: BTreeSet::new(),
    };
    let start = SearchPoint { cell: CellSpec::identity(), hw: config.initial_hw };
    let warm = |ctl: &mut Controller| -> Result<(), SearchError> {
        if let Some(p) = &config.warm_start {
            if p.options() != ctl.schema.option_counts().as_slice() || p.config() != &config.controller {
                return Err(SearchError::Config("warm-start policy does not match the controller shape"));
            }
            ctl.policy = p.clone();
        }
        Ok(())
    };
    let policies = match config.strategy {
        Strategy::Combined => {
            let mut ctl = Controller::new(SpaceKind::Joint, config, 0x5eed_0001);
            warm(&mut ctl)?;
            run.phase(&mut ctl, Phase::Combined, config.steps, start, config.batch_size)?;
            alloc::vec![ctl.policy]
        }
        Strategy::Phase { cnn_steps, hw_steps } => {
            if cnn_steps == 0 || hw_steps == 0 {
                return Err(SearchError::Config("phase budgets must be positive"));
            }
            let mut cnn = Controller::new(SpaceKind::Cell, config, 0x5eed_0002);
            let mut hw = Controller::new(SpaceKind::Hw, config, 0x5eed_0003);
            warm(&mut cnn)?;
            while run.step < config.steps {
                let n = cnn_steps.min(config.steps - run.step);
                let frozen = run.frozen(start);
                run.phase(&mut cnn, Phase::Cnn, n, frozen, config.batch_size)?;
                let n = hw_steps.min(config.steps - run.step);
                let frozen = run.frozen(start);
                run.phase(&mut hw, Phase::Hw, n, frozen, config.batch_size)?;
            }
            alloc::vec![cnn.policy, hw.policy]
        }
        Strategy::Separate { cnn_steps } => {
            let cnn_steps = cnn_steps.min(config.steps);
            let mut cnn = Controller::new(SpaceKind::Cell, config, 0x5eed_0002);
            let mut hw = Controller::new(SpaceKind::Hw, config, 0x5eed_0003);
            warm(&mut cnn)?;
            run.phase(&mut cnn, Phase::SeparateCnn, cnn_steps, start, config.batch_size)?;
            let cell = run.best_accuracy.map_or(start.cell, |(_, c)| c);
            let frozen = SearchPoint { cell, hw: config.initial_hw };
            run.phase(&mut hw, Phase::SeparateHw, config.steps - cnn_steps, frozen, config.batch_size)?;
            alloc::vec![cnn.policy, hw.policy]
        }
    };
    Ok(SearchOutcome { trajectory: run.trajectory, best: run.best, policies, rng: run.rng })
}
