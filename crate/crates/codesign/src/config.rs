//! Run configuration.
//!
//! A config is flat `key = value` text. Every key is optional; see
//! `scenarios/` for annotated examples. Relative paths resolve against the
//! directory holding the config file.

use std::path::{Path, PathBuf};

use codesign_core::reward::RewardSpecError;
use codesign_core::{
    ControllerConfig, HwConfig, NormBounds, RewardSpec, SkeletonSpec, Strategy, ThresholdRamp, Thresholds,
};

use crate::kv::{self, ConfigError, Entry};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    Combined,
    Phase,
    Separate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleBackend {
    Synthetic,
    Table(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatencyBackend {
    Synthetic,
    Import(PathBuf),
}

/// How many items to draw from a space; `All` takes every one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sample {
    All,
    Count(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParetoConfig {
    pub cells: Sample,
    pub max_nodes: usize,
    pub max_edges: usize,
    pub hw: Sample,
    pub seed: u64,
    pub verify: bool,
}

impl Default for ParetoConfig {
    fn default() -> Self {
        ParetoConfig { cells: Sample::Count(500), max_nodes: 7, max_edges: 9, hw: Sample::All, seed: 0, verify: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub strategy: StrategyKind,
    pub steps: u64,
    pub cnn_steps: Option<u64>,
    pub hw_steps: Option<u64>,
    pub batch_size: usize,
    pub max_nodes: usize,
    pub initial_hw: HwConfig,
    pub warm_start: Option<PathBuf>,

    pub weights: [f64; 3],
    pub thresholds: Thresholds,
    /// Missing bounds are measured on a random sweep of the search space.
    pub norm: [Option<NormBounds>; 3],
    pub norm_sweep_points: usize,
    pub norm_sweep_seed: u64,
    pub punishment_scale: f64,
    pub ramp: Option<Vec<(f64, u32)>>,

    pub oracle: OracleBackend,
    pub oracle_seed: u64,
    pub latency: LatencyBackend,
    pub synthetic_fallback: bool,
    /// Latency cache entries; `None` is unbounded.
    pub latency_cache: Option<usize>,
    pub skeleton: SkeletonSpec,
    pub calibration: Option<PathBuf>,
    pub controller: ControllerConfig,

    pub seed: u64,
    pub parallelism: usize,
    pub out: PathBuf,

    pub pareto: ParetoConfig,
    pub report_window: usize,
    pub report_top: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            strategy: StrategyKind::Combined,
            steps: 10_000,
            cnn_steps: None,
            hw_steps: None,
            batch_size: 1,
            max_nodes: 7,
            initial_hw: HwConfig::from_ordinal(0).expect("ordinal 0"),
            warm_start: None,
            weights: [0.1, 0.8, 0.1],
            thresholds: Thresholds::default(),
            norm: [None; 3],
            norm_sweep_points: 1000,
            norm_sweep_seed: 0,
            punishment_scale: 1.0,
            ramp: None,
            oracle: OracleBackend::Synthetic,
            oracle_seed: 0,
            latency: LatencyBackend::Synthetic,
            synthetic_fallback: false,
            latency_cache: None,
            skeleton: SkeletonSpec::default(),
            calibration: None,
            controller: ControllerConfig::default(),
            seed: 0,
            parallelism: 1,
            out: PathBuf::from("out"),
            pareto: ParetoConfig::default(),
            report_window: 50,
            report_top: 10,
        }
    }
}

pub const METRICS: [&str; 3] = ["area", "latency", "accuracy"];

fn positive<T: PartialOrd + Default>(e: &Entry, v: T) -> Result<T, ConfigError> {
    if v > T::default() {
        Ok(v)
    } else {
        Err(e.error("must be positive"))
    }
}

fn sample(e: &Entry) -> Result<Sample, ConfigError> {
    if e.value == "all" {
        Ok(Sample::All)
    } else {
        Ok(Sample::Count(e.parse()?))
    }
}

fn ramp_schedule(e: &Entry) -> Result<Vec<(f64, u32)>, ConfigError> {
    let mut stages = Vec::new();
    for part in e.value.split(',').map(str::trim) {
        let (th, budget) = part.split_once(':').ok_or_else(|| e.error(format!("stage {part:?} is not `threshold:budget`")))?;
        let th: f64 = th.trim().parse().map_err(|_| e.error(format!("cannot parse threshold {th:?}")))?;
        let budget: u32 = budget.trim().parse().map_err(|_| e.error(format!("cannot parse budget {budget:?}")))?;
        stages.push((th, budget));
    }
    ThresholdRamp::new(&stages).map_err(|err| e.error(err.to_string()))?;
    Ok(stages)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|err| ConfigError { line: None, key: None, message: format!("cannot read config: {err}") })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        let path = |e: &Entry| -> Result<PathBuf, ConfigError> {
            if e.value.is_empty() {
                return Err(e.error("empty path"));
            }
            Ok(base.join(&e.value))
        };
        let mut oracle_backend = None;
        let mut oracle_table = None;
        let mut latency_source = None;
        let mut latency_import = None;
        let mut keys = Vec::new();
        for e in kv::parse(text)? {
            match e.key.as_str() {
                "strategy" => {
                    c.strategy = match e.value.as_str() {
                        "combined" => StrategyKind::Combined,
                        "phase" => StrategyKind::Phase,
                        "separate" => StrategyKind::Separate,
                        v => return Err(e.error(format!("unknown strategy {v:?}; expected combined, phase or separate"))),
                    }
                }
                "seed" => c.seed = e.parse()?,
                "parallelism" => c.parallelism = positive(&e, e.parse()?)?,
                "out" => c.out = path(&e)?,
                "calibration" => c.calibration = Some(path(&e)?),

                "search.steps" => c.steps = e.parse()?,
                "search.cnn_steps" => c.cnn_steps = Some(e.parse()?),
                "search.hw_steps" => c.hw_steps = Some(e.parse()?),
                "search.batch_size" => c.batch_size = positive(&e, e.parse()?)?,
                "search.max_nodes" => {
                    c.max_nodes = e.parse()?;
                    if !(2..=7).contains(&c.max_nodes) {
                        return Err(e.error("must be in 2..=7"));
                    }
                }
                "search.initial_hw" => {
                    c.initial_hw = e.value.parse().map_err(|err| e.error(format!("{err}")))?;
                }
                "search.warm_start" => c.warm_start = Some(path(&e)?),

                "reward.weights" => {
                    let w = e.reals(3)?;
                    c.weights = [w[0], w[1], w[2]];
                }
                "reward.threshold.area" => c.thresholds.area_max = Some(e.parse()?),
                "reward.threshold.latency" => c.thresholds.latency_max = Some(e.parse()?),
                "reward.threshold.accuracy" => c.thresholds.accuracy_min = Some(e.parse()?),
                "reward.threshold.perf_per_area" => c.thresholds.perf_per_area_min = Some(e.parse()?),
                "reward.norm.area" | "reward.norm.latency" | "reward.norm.accuracy" => {
                    let m = METRICS.iter().position(|m| e.key.ends_with(m)).expect("matched above");
                    let b = e.reals(2)?;
                    c.norm[m] = Some(NormBounds::new(b[0], b[1]));
                }
                "reward.norm.sweep_points" => c.norm_sweep_points = positive(&e, e.parse()?)?,
                "reward.norm.sweep_seed" => c.norm_sweep_seed = e.parse()?,
                "reward.punishment_scale" => c.punishment_scale = e.parse()?,
                "ramp.schedule" => c.ramp = Some(ramp_schedule(&e)?),

                "oracle.backend" => oracle_backend = Some(e.clone()),
                "oracle.table" => oracle_table = Some(path(&e)?),
                "oracle.seed" => c.oracle_seed = e.parse()?,
                "latency.source" => latency_source = Some(e.clone()),
                "latency.import" => latency_import = Some(path(&e)?),
                "latency.synthetic_fallback" => c.synthetic_fallback = e.flag()?,
                "latency.cache_capacity" => {
                    c.latency_cache = if e.value == "unbounded" { None } else { Some(positive(&e, e.parse()?)?) }
                }

                "skeleton.stacks" => c.skeleton.num_stacks = e.parse()?,
                "skeleton.cells_per_stack" => c.skeleton.cells_per_stack = e.parse()?,
                "skeleton.stem_channels" => c.skeleton.stem_channels = e.parse()?,
                "skeleton.input_resolution" => c.skeleton.input_resolution = e.parse()?,

                "controller.hidden" => c.controller.hidden = positive(&e, e.parse()?)?,
                "controller.embedding" => c.controller.embedding = positive(&e, e.parse()?)?,
                "controller.learning_rate" => c.controller.learning_rate = positive(&e, e.parse()?)?,
                "controller.baseline_decay" => {
                    c.controller.baseline_decay = e.parse()?;
                    if !(0.0..1.0).contains(&c.controller.baseline_decay) {
                        return Err(e.error("must be in [0, 1)"));
                    }
                }
                "controller.entropy_weight" => c.controller.entropy_weight = e.parse()?,
                "controller.init_scale" => c.controller.init_scale = positive(&e, e.parse()?)?,

                "pareto.cells" => c.pareto.cells = sample(&e)?,
                "pareto.hw" => c.pareto.hw = sample(&e)?,
                "pareto.max_nodes" => {
                    c.pareto.max_nodes = e.parse()?;
                    if !(2..=7).contains(&c.pareto.max_nodes) {
                        return Err(e.error("must be in 2..=7"));
                    }
                }
                "pareto.max_edges" => c.pareto.max_edges = e.parse()?,
                "pareto.seed" => c.pareto.seed = e.parse()?,
                "pareto.verify" => c.pareto.verify = e.flag()?,

                "report.window" => c.report_window = positive(&e, e.parse()?)?,
                "report.top" => c.report_top = positive(&e, e.parse()?)?,
                _ => return Err(e.error("unknown key")),
            }
            keys.push(e);
        }
        let find = |k: &str| keys.iter().find(|e| e.key == k);

        c.oracle = match oracle_backend.as_ref().map(|e| (e, e.value.as_str())) {
            None | Some((_, "synthetic")) => OracleBackend::Synthetic,
            Some((e, "table")) => OracleBackend::Table(
                oracle_table.clone().ok_or_else(|| e.error("the table backend needs `oracle.table`"))?,
            ),
            Some((e, v)) => return Err(e.error(format!("unknown backend {v:?}; expected synthetic or table"))),
        };
        c.latency = match latency_source.as_ref().map(|e| (e, e.value.as_str())) {
            None | Some((_, "synthetic")) => LatencyBackend::Synthetic,
            Some((e, "import")) => LatencyBackend::Import(
                latency_import.clone().ok_or_else(|| e.error("the import source needs `latency.import`"))?,
            ),
            Some((e, v)) => return Err(e.error(format!("unknown source {v:?}; expected synthetic or import"))),
        };
        c.skeleton.validate().map_err(|err| ConfigError::key("skeleton", err.to_string()))?;
        c.reward_spec_with(c.norm.map(|n| n.unwrap_or(NormBounds::new(0.0, 1.0)))).map(|_| ()).map_err(|err| {
            let key = match err {
                RewardSpecError::Weights(_) => "reward.weights".to_string(),
                RewardSpecError::Bounds { metric, .. } => format!("reward.norm.{metric}"),
                RewardSpecError::Punishment(_) => "reward.punishment_scale".to_string(),
            };
            match find(&key) {
                Some(e) => e.error(err.to_string()),
                None => ConfigError::key(&key, err.to_string()),
            }
        })?;
        for (e, p) in [
            (find("oracle.table"), matches!(c.oracle, OracleBackend::Table(_)).then_some(&oracle_table)),
            (find("latency.import"), matches!(c.latency, LatencyBackend::Import(_)).then_some(&latency_import)),
            (find("calibration"), Some(&c.calibration)),
            (find("search.warm_start"), Some(&c.warm_start)),
        ] {
            if let (Some(e), Some(Some(p))) = (e, p) {
                if !p.is_file() {
                    return Err(e.error(format!("file {} does not exist", p.display())));
                }
            }
        }
        c.strategy().map_err(|(key, msg)| match find(key) {
            Some(e) => e.error(msg),
            None => ConfigError::key(key, msg),
        })?;
        Ok(c)
    }

    /// The strategy with its budgets resolved against `steps`.
    pub fn strategy(&self) -> Result<Strategy, (&'static str, String)> {
        match self.strategy {
            StrategyKind::Combined => Ok(Strategy::Combined),
            StrategyKind::Phase => {
                let Strategy::Phase { cnn_steps: dc, hw_steps: dh } = Strategy::PHASE_DEFAULT else { unreachable!() };
                let cnn = self.cnn_steps.unwrap_or(dc);
                let hw = self.hw_steps.unwrap_or(dh);
                if cnn == 0 || hw == 0 {
                    return Err(("search.cnn_steps", "phase budgets must be positive".into()));
                }
                if cnn + hw > self.steps {
                    return Err((
                        "search.steps",
                        format!("one phase cycle ({cnn} + {hw} steps) exceeds the budget of {}", self.steps),
                    ));
                }
                Ok(Strategy::Phase { cnn_steps: cnn, hw_steps: hw })
            }
            StrategyKind::Separate => {
                let (cnn, hw) = match (self.cnn_steps, self.hw_steps) {
                    (Some(c), Some(h)) => (c, h),
                    (Some(c), None) => (c, self.steps.saturating_sub(c)),
                    (None, Some(h)) => (self.steps.saturating_sub(h), h),
                    (None, None) => {
                        let Strategy::Separate { cnn_steps } = Strategy::SEPARATE_DEFAULT else { unreachable!() };
                        let c = (self.steps as u128 * cnn_steps as u128 / 10_000) as u64;
                        (c, self.steps - c)
                    }
                };
                if cnn + hw != self.steps {
                    return Err((
                        "search.steps",
                        format!("separate budgets {cnn} + {hw} do not sum to {} steps", self.steps),
                    ));
                }
                Ok(Strategy::Separate { cnn_steps: cnn })
            }
        }
    }

    pub fn reward_spec_with(&self, norm: [NormBounds; 3]) -> Result<RewardSpec, RewardSpecError> {
        let spec = RewardSpec {
            weights: self.weights,
            thresholds: self.thresholds,
            norm,
            punishment_scale: self.punishment_scale,
        };
        spec.validate()?;
        Ok(spec)
    }
}
