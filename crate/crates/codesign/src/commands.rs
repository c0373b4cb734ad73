//! The four CLI verbs as library functions.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use codesign_core::accuracy::SurrogateParams;
use codesign_core::latency::{build_latency_table_for, LatencySource};
use codesign_core::{
    perf_per_area, reward, run_search, validate_cell, AccuracyOracle, Evaluate, NormBounds, PointModel, RewardSpec,
    Scenario, SearchConfig, SearchPoint, SpaceKind, Strategy, ThresholdRamp,
};

use crate::calibration::Calibration;
use crate::checkpoint::Checkpoint;
use crate::config::{LatencyBackend, OracleBackend, RunConfig, Sample, METRICS};
use crate::enumerate::{enumerate_joint, verify_joint};
use crate::error::CliError;
use crate::evaluator::CachedEvaluator;
use crate::formats::{self, FrontierStats};
use crate::report;
use crate::sampling::{random_points, sample_cells, sample_hw};
use crate::steplog;

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub parallelism: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p).map_err(|error| CliError::Config { path: p.display().to_string(), error })?,
        None => RunConfig::default(),
    };
    if let Some(s) = overrides.seed {
        cfg.seed = s;
    }
    if let Some(p) = overrides.parallelism {
        if p == 0 {
            return Err(CliError::Input("--parallelism must be positive".into()));
        }
        cfg.parallelism = p;
    }
    if let Some(o) = &overrides.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Model whose latency table covers cells of up to `max_nodes` nodes and
/// `max_edges` edges.
pub fn build_model(cfg: &RunConfig, max_nodes: usize, max_edges: usize) -> Result<PointModel, CliError> {
    let cal = match &cfg.calibration {
        Some(p) => Calibration::parse(&read(p)?).map_err(|error| CliError::Config { path: p.display().to_string(), error })?,
        None => Calibration::default(),
    };
    let table = match &cfg.latency {
        LatencyBackend::Synthetic => {
            build_latency_table_for(&cfg.skeleton, max_nodes, max_edges, LatencySource::Synthetic(cal.latency))?
        }
        LatencyBackend::Import(p) => {
            let entries = formats::read_latency_csv(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            let fallback = cfg.synthetic_fallback.then_some(cal.latency);
            build_latency_table_for(&cfg.skeleton, max_nodes, max_edges, LatencySource::Import { entries: &entries, fallback })?
        }
    };
    let oracle = match &cfg.oracle {
        OracleBackend::Synthetic => AccuracyOracle::Synthetic { params: SurrogateParams::default(), seed: cfg.oracle_seed },
        OracleBackend::Table(p) => AccuracyOracle::Table(
            formats::read_accuracy_tsv(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        ),
    };
    Ok(PointModel { area_params: cal.area, skeleton: cfg.skeleton, table, oracle })
}

pub fn build_evaluator(cfg: &RunConfig, max_nodes: usize, max_edges: usize) -> Result<CachedEvaluator, CliError> {
    Ok(CachedEvaluator::new(build_model(cfg, max_nodes, max_edges)?, cfg.parallelism, cfg.latency_cache))
}

/// Configured bounds, with any missing ones measured as the observed range
/// over a seeded random sweep of the `max_nodes` space.
pub fn norm_bounds(cfg: &RunConfig, ev: &CachedEvaluator, max_nodes: usize) -> Result<[NormBounds; 3], CliError> {
    if let [Some(a), Some(l), Some(c)] = cfg.norm {
        return Ok([a, l, c]);
    }
    let points = random_points(cfg.norm_sweep_points, max_nodes, 9, cfg.norm_sweep_seed);
    let metrics = ev.evaluate_batch(&points).map_err(|e| CliError::from(e.error))?;
    let mut out = [NormBounds::new(f64::INFINITY, f64::NEG_INFINITY); 3];
    for m in &metrics {
        for (b, v) in out.iter_mut().zip([m.area_mm2, m.latency_ms, m.accuracy]) {
            b.min = b.min.min(v);
            b.max = b.max.max(v);
        }
    }
    for (k, b) in out.iter_mut().enumerate() {
        if let Some(given) = cfg.norm[k] {
            *b = given;
        } else if b.max <= b.min {
            let pad = 1e-9 * b.min.abs().max(1.0);
            *b = NormBounds::new(b.min - pad, b.max + pad);
        }
    }
    Ok(out)
}

pub fn reward_spec(cfg: &RunConfig, ev: &CachedEvaluator, max_nodes: usize) -> Result<RewardSpec, CliError> {
    let norm = norm_bounds(cfg, ev, max_nodes)?;
    cfg.reward_spec_with(norm).map_err(|e| CliError::Input(format!("reward: {e}")))
}

fn strategy_name(s: &Strategy) -> &'static str {
    match s {
        Strategy::Combined => "combined",
        Strategy::Phase { .. } => "phase",
        Strategy::Separate { .. } => "separate",
    }
}

fn controller_kinds(s: &Strategy) -> &'static [SpaceKind] {
    match s {
        Strategy::Combined => &[SpaceKind::Joint],
        _ => &[SpaceKind::Cell, SpaceKind::Hw],
    }
}

/// Runs a search, writing `steps.jsonl`, `summary.txt` and
/// `checkpoint.json` into the output directory. Returns the summary text.
pub fn cmd_search(cfg: &RunConfig) -> Result<String, CliError> {
    let strategy = cfg.strategy().map_err(|(k, m)| CliError::Input(format!("key `{k}`: {m}")))?;
    let ev = build_evaluator(cfg, cfg.max_nodes, 9)?;
    let spec = reward_spec(cfg, &ev, cfg.max_nodes)?;
    let ramp = cfg
        .ramp
        .as_ref()
        .map(|stages| ThresholdRamp::new(stages).map_err(|e| CliError::Input(format!("ramp.schedule: {e}"))))
        .transpose()?;
    let warm_start = match &cfg.warm_start {
        Some(p) => Some(
            Checkpoint::from_json(&read(p)?)
                .and_then(|c| c.policy(controller_kinds(&strategy)[0], cfg.max_nodes))
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        ),
        None => None,
    };
    let config = SearchConfig {
        strategy,
        steps: cfg.steps,
        max_nodes: cfg.max_nodes,
        controller: cfg.controller,
        seed: cfg.seed,
        batch_size: cfg.batch_size,
        initial_hw: cfg.initial_hw,
        warm_start,
    };
    ensure_dir(&cfg.out)?;
    let log_path = cfg.out.join("steps.jsonl");
    let mut log = BufWriter::new(fs::File::create(&log_path).map_err(|e| CliError::io(&log_path, e))?);
    let mut write_error = None;
    let (mut feasible, mut invalid, mut hits) = (0u64, 0u64, 0u64);
    let outcome = run_search(&ev, &Scenario { reward: spec, ramp }, &config, |r| {
        feasible += r.feasible as u64;
        invalid += !r.valid as u64;
        hits += r.cache_hit as u64;
        if write_error.is_none() {
            write_error = steplog::write_line(&mut log, r).err();
        }
    });
    let flushed = log.flush();
    if let Some(e) = write_error.or(flushed.err()) {
        return Err(CliError::io(&log_path, e));
    }
    let outcome = outcome?;

    let mut s = String::new();
    writeln!(s, "strategy={}", strategy_name(&strategy)).unwrap();
    writeln!(s, "steps={}", outcome.trajectory.len()).unwrap();
    writeln!(s, "seed={}", cfg.seed).unwrap();
    for (name, b) in METRICS.iter().zip(spec.norm) {
        writeln!(s, "norm.{name}={},{}", b.min, b.max).unwrap();
    }
    writeln!(s, "feasible_steps={feasible}").unwrap();
    writeln!(s, "invalid_steps={invalid}").unwrap();
    writeln!(s, "cache_hits={hits}").unwrap();
    writeln!(s, "feasible_found={}", outcome.best.is_some()).unwrap();
    if let Some(b) = &outcome.best {
        writeln!(s, "best_step={}", b.step).unwrap();
        writeln!(s, "best_point={}", b.point).unwrap();
        writeln!(s, "best_area_mm2={}", b.metrics.area_mm2).unwrap();
        writeln!(s, "best_latency_ms={}", b.metrics.latency_ms).unwrap();
        writeln!(s, "best_accuracy={}", b.metrics.accuracy).unwrap();
        writeln!(s, "best_perf_per_area={}", perf_per_area(&b.metrics)).unwrap();
        writeln!(s, "best_reward={}", b.reward).unwrap();
    }
    write(&cfg.out.join("summary.txt"), &s)?;

    let policies: Vec<(SpaceKind, &codesign_core::Policy)> =
        controller_kinds(&strategy).iter().copied().zip(outcome.policies.iter()).collect();
    let ck = Checkpoint::new(strategy_name(&strategy), cfg.steps, &outcome.rng, cfg.max_nodes, &policies);
    write(&cfg.out.join("checkpoint.json"), &ck.to_json())?;
    Ok(s)
}

/// Enumerates the configured cells × accelerators, writing `frontier.csv`
/// and `pareto_stats.txt`. Fails when the verification pass finds an
/// uncovered point.
pub fn cmd_pareto(cfg: &RunConfig) -> Result<FrontierStats, CliError> {
    let p = &cfg.pareto;
    let ev = build_evaluator(cfg, p.max_nodes, p.max_edges)?;
    let cells = match p.cells {
        Sample::All => codesign_core::enumerate_cells(p.max_nodes, p.max_edges).collect(),
        Sample::Count(n) => sample_cells(n, p.max_nodes, p.max_edges, p.seed),
    };
    let hws = sample_hw(match p.hw {
        Sample::All => None,
        Sample::Count(n) => Some(n),
    }, p.seed);
    let total = cells.len();
    let step = (total / 10).max(1);
    let progress = |done: usize| {
        if done % step == 0 || done == total {
            eprintln!("pareto: {done}/{total} cells");
        }
    };
    let result = enumerate_joint(&ev, &cells, &hws, &progress)?;
    if p.verify {
        if let Some(u) = verify_joint(&ev, &cells, &hws, &result.frontier)? {
            return Err(CliError::Failed(format!("verification failed: {} is not dominated by the frontier", u.point)));
        }
    }
    ensure_dir(&cfg.out)?;
    let path = cfg.out.join("frontier.csv");
    let mut csv = Vec::new();
    formats::write_frontier_csv(&mut csv, &result.frontier).expect("in-memory write");
    fs::write(&path, csv).map_err(|e| CliError::io(&path, e))?;
    let stats = FrontierStats::of(&result.frontier, cells.len(), hws.len(), result.points);
    write(&cfg.out.join("pareto_stats.txt"), &stats.to_text())?;
    Ok(stats)
}

/// Metrics, perf/area and feasibility of one encoded point.
pub fn cmd_eval(cfg: &RunConfig, text: &str) -> Result<String, CliError> {
    let raw: SearchPoint = text.trim().parse().map_err(|e| CliError::Input(format!("cannot parse point: {e}")))?;
    let cell = validate_cell(&raw.cell).map_err(|e| CliError::Input(format!("invalid cell: {e}")))?;
    let max_nodes = cell.num_nodes().max(cfg.max_nodes);
    let ev = build_evaluator(cfg, max_nodes, 9)?;
    let point = SearchPoint::new(cell, raw.hw);
    let m = ev.evaluate(&point)?;
    let spec = reward_spec(cfg, &ev, cfg.max_nodes)?;
    let mut spec_now = spec;
    if let Some(stages) = &cfg.ramp {
        spec_now.thresholds.perf_per_area_min = Some(stages[0].0);
    }
    let r = reward(&m, &spec_now);
    let mut s = String::new();
    writeln!(s, "point={point}").unwrap();
    writeln!(s, "area_mm2={}", m.area_mm2).unwrap();
    writeln!(s, "latency_ms={}", m.latency_ms).unwrap();
    writeln!(s, "accuracy={}", m.accuracy).unwrap();
    writeln!(s, "perf_per_area={}", perf_per_area(&m)).unwrap();
    writeln!(s, "feasible={}", r.feasible).unwrap();
    writeln!(s, "reward={}", r.value).unwrap();
    Ok(s)
}

/// Reads `steps.jsonl` from `dir` and writes `reward.csv`, `scatter.csv`
/// and `best.csv` next to it. Returns the number of log lines.
pub fn cmd_report(cfg: &RunConfig, dir: &Path) -> Result<usize, CliError> {
    let path = dir.join("steps.jsonl");
    let text = fs::read_to_string(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let log = steplog::read_log(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    write(&dir.join("reward.csv"), &report::reward_csv(&log, cfg.report_window))?;
    write(&dir.join("scatter.csv"), &report::scatter_csv(&log))?;
    write(&dir.join("best.csv"), &report::best_csv(&log, cfg.report_top))?;
    Ok(log.len())
}
