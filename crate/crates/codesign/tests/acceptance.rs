//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p codesign --test acceptance -- 3 8` runs only the listed
//! criteria.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use codesign::commands::cmd_search;
use codesign::enumerate::{enumerate_joint, verify_joint};
use codesign::sampling::sample_cells;
use codesign::{CachedEvaluator, RunConfig};
use codesign_core::accuracy::SurrogateParams;
use codesign_core::area::{clb_equivalents_to_mm2, ResourceVector};
use codesign_core::latency::{build_latency_table_for, LatencySource};
use codesign_core::reward::normalize_oriented;
use codesign_core::schedule::{list_schedule, Dag};
use codesign_core::space::{enumerate_hw, HW_RADIX};
use codesign_core::{
    area, dominates, enumerate_cells, frontier, perf_per_area, reward, run_search, validate_cell, AccuracyOracle,
    AreaParams, CellOp, CellSpec, ControllerConfig, HwConfig, LatencyProjection, Metrics, NormBounds, PointModel,
    Policy, RewardSpec, Scenario, SearchConfig, SearchPoint, SkeletonSpec, Strategy, SyntheticLatencyParams,
    ThresholdRamp, Thresholds,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

// ---------------------------------------------------------------- 1

/// Isomorphism class key by brute force: the least relabeled encoding over
/// every permutation of the intermediate nodes.
fn brute_key(cell: &CellSpec) -> (usize, Vec<(usize, usize)>, Vec<u8>) {
    let n = cell.num_nodes();
    let mut mids: Vec<usize> = (1..n - 1).collect();
    let mut best = None;
    permute(&mut mids, 0, &mut |perm| {
        let mut pos = vec![0; n];
        pos[n - 1] = n - 1;
        for (k, &v) in perm.iter().enumerate() {
            pos[v] = k + 1;
        }
        let mut edges: Vec<(usize, usize)> = cell.edges().map(|(i, j)| (pos[i], pos[j])).collect();
        edges.sort();
        let mut ops = vec![0u8; n.saturating_sub(2)];
        for v in 1..n - 1 {
            ops[pos[v] - 1] = cell.op(v).unwrap().index();
        }
        let key = (n, edges, ops);
        if best.as_ref().is_none_or(|b| &key < b) {
            best = Some(key);
        }
    });
    best.unwrap()
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let hws: Vec<HwConfig> = enumerate_hw().collect();
    let hw_time = t.elapsed();
    let distinct: BTreeSet<usize> = hws.iter().map(|h| h.ordinal()).collect();
    let product: usize = HW_RADIX.iter().map(|&r| r as usize).product();

    let t = Instant::now();
    let mut oracle = BTreeSet::new();
    for n in 2..=5usize {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0u32..1 << slots.len() {
            let edges: Vec<(usize, usize)> =
                slots.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
            for code in 0..3usize.pow(n as u32 - 2) {
                let ops: Vec<CellOp> = (0..n - 2).map(|k| CellOp::ALL[code / 3usize.pow(k as u32) % 3]).collect();
                if let Ok(cell) = validate_cell(&CellSpec::from_edges(n, &edges, &ops).unwrap()) {
                    oracle.insert(brute_key(&cell));
                }
            }
        }
    }
    let listed: Vec<CellSpec> = enumerate_cells(5, 9).collect();
    let listed_keys: BTreeSet<_> = listed.iter().map(brute_key).collect();
    let cells_ok = listed.len() == oracle.len() && listed_keys == oracle;
    let pass = hws.len() == 8640 && distinct.len() == 8640 && product == 8640 && hw_time < Duration::from_secs(1) && cells_ok;
    verdict(
        pass,
        format!(
            "{} hw configs in {}; {} cell classes at <=5 nodes vs {} brute-force classes ({})",
            hws.len(),
            secs(hw_time),
            listed.len(),
            oracle.len(),
            secs(t.elapsed())
        ),
    )
}

// ---------------------------------------------------------------- 2

fn oracle_frontier(ms: &[Metrics]) -> BTreeSet<[u64; 3]> {
    let key = |m: &Metrics| [m.area_mm2.to_bits(), m.latency_ms.to_bits(), m.accuracy.to_bits()];
    (0..ms.len())
        .filter(|&i| !ms.iter().any(|o| dominates(o, &ms[i])))
        .map(|i| key(&ms[i]))
        .collect()
}

fn frontier_keys(f: &[codesign_core::FrontierEntry]) -> Vec<[u64; 3]> {
    f.iter().map(|e| [e.metrics.area_mm2.to_bits(), e.metrics.latency_ms.to_bits(), e.metrics.accuracy.to_bits()]).collect()
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut sizes = Vec::new();
    let mut failures = 0;
    for set in 0..100 {
        // every other set is quantized so that exact ties occur
        let levels = if set % 2 == 0 { None } else { Some(20.0) };
        let ms: Vec<Metrics> = (0..10_000)
            .map(|_| {
                let mut v = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
                if let Some(l) = levels {
                    v.iter_mut().for_each(|x| *x = (*x * l).floor() / l);
                }
                Metrics::new(1.0 + v[0], 1.0 + v[1], v[2])
            })
            .collect();
        let points: Vec<(SearchPoint, Metrics)> = ms
            .iter()
            .enumerate()
            .map(|(i, m)| (SearchPoint::new(CellSpec::identity(), HwConfig::from_ordinal(i % 8640).unwrap()), *m))
            .collect();
        let f = frontier(points.iter().copied());
        let keys = frontier_keys(&f);
        let set_keys: BTreeSet<[u64; 3]> = keys.iter().copied().collect();
        let again = frontier_keys(&frontier(f.iter().map(|e| (e.point, e.metrics))));
        let mut shuffled = points.clone();
        shuffled.shuffle(&mut rng);
        let permuted: BTreeSet<[u64; 3]> = frontier_keys(&frontier(shuffled)).into_iter().collect();
        if set_keys != oracle_frontier(&ms) || keys.len() != set_keys.len() || again != keys || permuted != set_keys {
            failures += 1;
        }
        sizes.push(f.len());
    }
    let elapsed = t.elapsed();
    verdict(
        failures == 0 && elapsed < Duration::from_secs(60),
        format!(
            "100 sets x 10,000 triples, {failures} mismatches, frontier sizes {}..{}, {}",
            sizes.iter().min().unwrap(),
            sizes.iter().max().unwrap(),
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------- 3

fn model(max_nodes: usize) -> PointModel {
    let skeleton = SkeletonSpec::default();
    PointModel {
        area_params: AreaParams::default(),
        skeleton,
        table: build_latency_table_for(&skeleton, max_nodes, 9, LatencySource::Synthetic(SyntheticLatencyParams::default()))
            .unwrap(),
        oracle: AccuracyOracle::Synthetic { params: SurrogateParams::default(), seed: 0 },
    }
}

fn criterion_3() -> Verdict {
    let ev = CachedEvaluator::new(model(7), 1, None);
    let cells = sample_cells(500, 7, 9, 3);
    let hws: Vec<HwConfig> = enumerate_hw().collect();
    let t = Instant::now();
    let result = enumerate_joint(&ev, &cells, &hws, &|_| {}).unwrap();
    let enumerate_time = t.elapsed();
    let t = Instant::now();
    let uncovered = verify_joint(&ev, &cells, &hws, &result.frontier).unwrap();
    let verify_time = t.elapsed();
    let internal = result.frontier.iter().all(|a| !result.frontier.iter().any(|b| dominates(&b.metrics, &a.metrics)));
    let stats = codesign::formats::FrontierStats::of(&result.frontier, cells.len(), hws.len(), result.points);
    verdict(
        cells.len() == 500 && result.points == 4_320_000 && uncovered.is_none() && internal && enumerate_time < Duration::from_secs(300),
        format!(
            "{} points enumerated in {}, frontier {} ({} cells, {} hw), verification {} in {}",
            result.points,
            secs(enumerate_time),
            stats.frontier,
            stats.distinct_cells,
            stats.distinct_hw,
            if uncovered.is_none() { "clean" } else { "found an uncovered point" },
            secs(verify_time)
        ),
    )
}

// ---------------------------------------------------------------- 4

fn serial_sgs(dag: &Dag, units: &[usize], durations: &[f64], order: &[usize]) -> f64 {
    let mut finish = vec![0.0f64; dag.len()];
    let mut busy: Vec<Vec<(f64, f64)>> = vec![Vec::new(); 3];
    for &t in order {
        let ready = dag.preds(t).iter().map(|&p| finish[p]).fold(0.0, f64::max);
        let slots = &mut busy[units[t]];
        slots.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut start = ready;
        for &(s, e) in slots.iter() {
            if start + durations[t] <= s {
                break;
            }
            start = start.max(e);
        }
        slots.push((start, start + durations[t]));
        finish[t] = start + durations[t];
    }
    finish.into_iter().fold(0.0, f64::max)
}

fn optimum(dag: &Dag, units: &[usize], durations: &[f64]) -> f64 {
    fn walk(dag: &Dag, u: &[usize], d: &[f64], order: &mut Vec<usize>, placed: &mut [bool], best: &mut f64) {
        if order.len() == dag.len() {
            *best = best.min(serial_sgs(dag, u, d, order));
            return;
        }
        for t in 0..dag.len() {
            if !placed[t] && dag.preds(t).iter().all(|&p| placed[p]) {
                placed[t] = true;
                order.push(t);
                walk(dag, u, d, order, placed, best);
                order.pop();
                placed[t] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    walk(dag, units, durations, &mut Vec::new(), &mut vec![false; dag.len()], &mut best);
    best
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bounded = true;
    let mut ratios = Vec::new();
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let unit_count = rng.gen_range(1..=3);
        let p = rng.gen_range(0.1..0.6);
        let preds: Vec<Vec<usize>> = (0..n).map(|t| (0..t).filter(|_| rng.gen_bool(p)).collect()).collect();
        let units: Vec<usize> = (0..n).map(|_| rng.gen_range(0..unit_count)).collect();
        let durations: Vec<f64> = (0..n).map(|_| rng.gen_range(1..10) as f64).collect();
        let dag = Dag::from_preds(&preds);
        let s = list_schedule(&dag, &units, &durations);
        let serial: f64 = durations.iter().sum();
        bounded &= s.makespan >= dag.critical_path(&durations) - 1e-9 && s.makespan <= serial + 1e-9;
        ratios.push(s.makespan / optimum(&dag, &units, &durations));
    }
    let mut chains = true;
    for n in 1..12 {
        let preds: Vec<Vec<usize>> = (0..n).map(|t| if t == 0 { vec![] } else { vec![t - 1] }).collect();
        let units: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let durations: Vec<f64> = (0..n).map(|_| rng.gen_range(1..10) as f64).collect();
        chains &= list_schedule(&Dag::from_preds(&preds), &units, &durations).makespan == durations.iter().sum::<f64>();
    }
    let optimal = ratios.iter().filter(|&&r| r <= 1.0 + 1e-9).count();
    ratios.sort_by(f64::total_cmp);
    let q = |f: f64| ratios[((ratios.len() - 1) as f64 * f) as usize];
    verdict(
        bounded && chains && optimal >= 700 && ratios[0] >= 1.0 - 1e-9,
        format!(
            "optimal on {optimal}/1000; makespan/optimum p50 {:.3} p90 {:.3} p99 {:.3} max {:.3}; bounds {}, chains {}",
            q(0.5),
            q(0.9),
            q(0.99),
            ratios[ratios.len() - 1],
            if bounded { "hold" } else { "violated" },
            if chains { "exact" } else { "inexact" }
        ),
    )
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Verdict {
    let one_clb = ResourceVector::new(1, 0, 0).area_mm2();
    let total = clb_equivalents_to_mm2(64_922.0);
    let t = Instant::now();
    let params = AreaParams::default();
    let mut monotone = true;
    for hw in enumerate_hw() {
        let here = area(&hw, &params).1;
        for (field, &radix) in HW_RADIX.iter().enumerate() {
            let idx = hw.indices()[field];
            if idx + 1 < radix {
                monotone &= area(&hw.with_index(field, idx + 1).unwrap(), &params).1 >= here;
            }
        }
    }
    let elapsed = t.elapsed();
    let rel = (total - 286.0).abs() / 286.0;
    verdict(
        one_clb == 0.0044 && rel <= 0.002 && monotone && elapsed < Duration::from_secs(10),
        format!("1 CLB -> {one_clb} mm2; 64,922 CLB-eq -> {total:.2} mm2 ({:.3}% off); monotone over 8640 configs in {}", rel * 100.0, secs(elapsed)),
    )
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut check = |name: &str, cond: bool| {
        if !cond {
            notes.push(name.to_string());
        }
        ok &= cond;
    };
    check("endpoints", normalize_oriented(2.0, 2.0, 6.0) == 0.0 && normalize_oriented(6.0, 2.0, 6.0) == 1.0);
    check("midpoint", normalize_oriented(4.0, 2.0, 6.0) == 0.5);
    check("clamp", normalize_oriented(1.0, 2.0, 6.0) == 0.0 && normalize_oriented(7.0, 2.0, 6.0) == 1.0);
    // area 150, latency 150, accuracy 0.85 sit at the middle of these bounds
    let norm = [NormBounds::new(100.0, 200.0), NormBounds::new(100.0, 200.0), NormBounds::new(0.8, 0.9)];
    let mid = Metrics::new(150.0, 150.0, 0.85);
    let r = reward(&mid, &RewardSpec::new([0.1, 0.8, 0.1], norm));
    check("weighted sum", r.feasible && (r.value - 0.5).abs() < 1e-12);
    let one = RewardSpec { thresholds: Thresholds { latency_max: Some(100.0), ..Thresholds::default() }, ..RewardSpec::new([0.1, 0.0, 0.9], norm) };
    let r = reward(&Metrics::new(150.0, 150.0, 0.9), &one);
    check("latency constraint", !r.feasible && r.value < 0.0);
    check("strict latency", !reward(&Metrics::new(150.0, 100.0, 0.9), &one).feasible);
    let two = RewardSpec {
        thresholds: Thresholds { accuracy_min: Some(0.92), area_max: Some(100.0), ..Thresholds::default() },
        ..RewardSpec::new([0.0, 1.0, 0.0], [NormBounds::new(10.0, 300.0), NormBounds::new(1.0, 200.0), NormBounds::new(0.7, 0.96)])
    };
    let r = reward(&Metrics::new(90.0, 50.0, 0.95), &two);
    check("two constraints", r.feasible && r.value == r.normalized[1] && r.value == (200.0 - 50.0) / 199.0);
    check("strict accuracy", !reward(&Metrics::new(90.0, 50.0, 0.92), &two).feasible);
    check("strict area", !reward(&Metrics::new(100.0, 50.0, 0.95), &two).feasible);
    check("perf/area", (perf_per_area(&Metrics::new(186.0, 42.0, 0.9)) - 12.8).abs() < 0.05
        && (perf_per_area(&Metrics::new(132.0, 41.8, 0.9)) - 18.1).abs() < 0.05);

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut stable = 0;
    for _ in 0..1000 {
        let ms: Vec<Metrics> = (0..20)
            .map(|_| Metrics::new(rng.gen_range(20.0..300.0), rng.gen_range(1.0..200.0), rng.gen_range(0.7..0.96)))
            .collect();
        let raw: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        let sum: f64 = raw.iter().sum();
        let w = raw.map(|x| x / sum);
        let k: f64 = rng.gen_range(0.01..100.0);
        let scaled = w.map(|x| x * k);
        let ssum: f64 = scaled.iter().sum();
        let w2 = scaled.map(|x| x / ssum);
        let norm = [NormBounds::new(20.0, 300.0), NormBounds::new(1.0, 200.0), NormBounds::new(0.7, 0.96)];
        let argmax = |w: [f64; 3]| {
            let spec = RewardSpec::new(w, norm);
            let v: Vec<f64> = ms.iter().map(|m| reward(m, &spec).value).collect();
            let best = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            v.iter().map(|x| best - x < 1e-12).collect::<Vec<bool>>()
        };
        stable += (argmax(w) == argmax(w2)) as u32;
    }
    check("argmax invariance", stable == 1000);
    verdict(
        ok,
        if notes.is_empty() {
            format!("all reward examples exact; argmax unchanged on {stable}/1000 rescaled weight sets")
        } else {
            format!("failed: {}", notes.join(", "))
        },
    )
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Verdict {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let config = ControllerConfig { hidden: 4, embedding: 3, entropy_weight: 0.1 * seed as f64, ..ControllerConfig::default() };
        let mut policy = Policy::new(&[3, 2, 4], config, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in policy.params_mut() {
            *p += rng.gen_range(-0.5..0.5);
        }
        let choices = [rng.gen_range(0..3), rng.gen_range(0..2), rng.gen_range(0..4)];
        let adv = rng.gen_range(-1.0..1.0);
        let grad = policy.gradient(&choices, adv);
        for k in 0..grad.len() {
            let orig = policy.params()[k];
            let eps = 1e-5;
            policy.params_mut()[k] = orig + eps;
            let up = policy.objective(&choices, adv);
            policy.params_mut()[k] = orig - eps;
            let down = policy.objective(&choices, adv);
            policy.params_mut()[k] = orig;
            let fd = (up - down) / (2.0 * eps);
            let scale = fd.abs().max(grad[k].abs()).max(1e-2);
            worst = worst.max((fd - grad[k]).abs() / scale);
        }
    }
    let mut converged = 0;
    let mut needed = Vec::new();
    for seed in 0..10u64 {
        let mut policy = Policy::new(&[2], ControllerConfig::default(), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let mut hit = None;
        for step in 1..=2000 {
            let s = policy.sample(&mut rng);
            policy.update(&s.choices, if s.choices[0] == 1 { 1.0 } else { 0.0 }).unwrap();
            if hit.is_none() && policy.distributions(&[1])[0][1] >= 0.99 {
                hit = Some(step);
            }
        }
        if policy.distributions(&[1])[0][1] >= 0.99 {
            converged += 1;
        }
        needed.push(hit.map_or("-".to_string(), |s| s.to_string()));
    }
    let elapsed = t.elapsed();
    verdict(
        worst <= 1e-4 && converged >= 9 && elapsed < Duration::from_secs(60),
        format!(
            "worst gradient relative error {worst:.2e}; bandit at p>=0.99 on {converged}/10 seeds (first reached at steps {}) in {}",
            needed.join(","),
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------- 8

struct Toy {
    model: PointModel,
    /// `(cell, accuracy, latency per hw)` for every cell of the space.
    cells: Vec<(CellSpec, f64, Vec<f64>)>,
    areas: Vec<f64>,
    norm: [NormBounds; 3],
}

fn toy() -> Toy {
    let model = model(4);
    let hws: Vec<HwConfig> = enumerate_hw().collect();
    let areas: Vec<f64> = hws.iter().map(|h| model.area_mm2(h)).collect();
    let mut cells = Vec::new();
    for cell in enumerate_cells(4, 9) {
        let acc = model.accuracy(&cell).unwrap().accuracy;
        let compiled = model.compile(&cell);
        let by_proj: Vec<f64> = LatencyProjection::all().map(|p| compiled.latency(&p).unwrap()).collect();
        let lat: Vec<f64> = hws.iter().map(|h| by_proj[LatencyProjection::of(h).index()]).collect();
        cells.push((cell, acc, lat));
    }
    let range = |it: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        NormBounds::new(lo, hi)
    };
    let norm = [
        range(&mut areas.iter().copied()),
        range(&mut cells.iter().flat_map(|c| c.2.iter().copied())),
        range(&mut cells.iter().map(|c| c.1)),
    ];
    Toy { model, cells, areas, norm }
}

fn search_best(toy: &Toy, spec: &RewardSpec, strategy: Strategy, seed: u64) -> Option<f64> {
    let ev = CachedEvaluator::new(toy.model.clone(), 1, None);
    let config = SearchConfig { strategy, steps: 10_000, max_nodes: 4, seed, ..SearchConfig::default() };
    let out = run_search(&ev, &Scenario { reward: *spec, ramp: None }, &config, |_| {}).unwrap();
    out.best.map(|b| b.reward)
}

fn criterion_8() -> Verdict {
    let t = Instant::now();
    let toy = toy();
    let total = toy.cells.len() * toy.areas.len();

    let unconstrained = RewardSpec::new([0.1, 0.8, 0.1], toy.norm);
    let mut all: Vec<f64> = Vec::with_capacity(total);
    for (_, acc, lat) in &toy.cells {
        for (a, l) in toy.areas.iter().zip(lat) {
            all.push(reward(&Metrics::new(*a, *l, *acc), &unconstrained).value);
        }
    }
    all.sort_by(|a, b| b.total_cmp(a));
    let cutoff = all[total.div_ceil(1000) - 1];
    let mut top = 0;
    for seed in 0..10 {
        if search_best(&toy, &unconstrained, Strategy::Combined, seed).is_some_and(|r| r >= cutoff) {
            top += 1;
        }
    }

    // The threshold sits below what the five most accurate cells can reach
    // on any accelerator, so accuracy-first search lands outside it.
    let mut by_acc: Vec<&(CellSpec, f64, Vec<f64>)> = toy.cells.iter().collect();
    by_acc.sort_by(|a, b| b.1.total_cmp(&a.1));
    let fastest = |c: &(CellSpec, f64, Vec<f64>)| c.2.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = 0.9 * by_acc.iter().take(5).map(|c| fastest(c)).fold(f64::INFINITY, f64::min);
    let feasible_cells = toy.cells.iter().filter(|c| fastest(c) < threshold).count();
    let constrained = RewardSpec {
        thresholds: Thresholds { latency_max: Some(threshold), ..Thresholds::default() },
        ..RewardSpec::new([0.1, 0.0, 0.9], toy.norm)
    };
    let mut feasible = BTreeMap::new();
    for (name, strategy) in [("combined", Strategy::Combined), ("phase", Strategy::PHASE_DEFAULT), ("separate", Strategy::SEPARATE_DEFAULT)] {
        let n = (0..10).filter(|&seed| search_best(&toy, &constrained, strategy, seed).is_some()).count();
        feasible.insert(name, n);
    }
    let (c, p, s) = (feasible["combined"], feasible["phase"], feasible["separate"]);
    verdict(
        top >= 9 && c >= 8 && p >= 8 && s < c.min(p),
        format!(
            "toy space {} cells x 8640 hw; unconstrained top-0.1% (reward >= {cutoff:.4}) on {top}/10 seeds; \
             latency < {threshold:.3} ms ({feasible_cells} cells can meet it): feasible best on combined {c}/10, phase {p}/10, separate {s}/10; {}",
            toy.cells.len(),
            secs(t.elapsed())
        ),
    )
}

// ---------------------------------------------------------------- 9

fn run_log(dir: &Path, strategy: &str, parallelism: usize) -> Vec<u8> {
    let text = format!(
        "strategy = {strategy}\nsearch.steps = 1500\nsearch.cnn_steps = 200\nsearch.hw_steps = 100\nsearch.batch_size = 8\n\
         search.max_nodes = 5\nseed = 99\nreward.threshold.latency = 60\nparallelism = {parallelism}\nout = run\n"
    );
    let cfg = RunConfig::parse(&text, dir).unwrap();
    cmd_search(&cfg).unwrap();
    std::fs::read(dir.join("run/steps.jsonl")).unwrap()
}

fn criterion_9() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut same = 0;
    let mut lines = 0;
    for strategy in ["combined", "phase"] {
        let a = run_log(tmp.path(), strategy, 1);
        let b = run_log(tmp.path(), strategy, 1);
        let c = run_log(tmp.path(), strategy, 8);
        lines += a.iter().filter(|&&b| b == b'\n').count();
        same += (a == b) as u32 + (a == c) as u32;
    }
    verdict(same == 4, format!("{same}/4 log pairs byte-identical (repeat run and parallelism 1 vs 8, {lines} lines per setting)"))
}

// ---------------------------------------------------------------- 10

fn criterion_10() -> Verdict {
    let stages = [(2.0, 300u32), (8.0, 400), (16.0, 500), (30.0, 600), (40.0, 1000)];
    let mut ramp = ThresholdRamp::new(&stages).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut feasible_in_stage = 0u32;
    let mut stage = 0usize;
    let mut mismatches = 0;
    let mut advanced_at = Vec::new();
    for step in 0..10_000u32 {
        if ramp.current() != stages[stage].0 || ramp.stage() != stage {
            mismatches += 1;
        }
        let feasible = rng.gen_bool(0.4);
        ramp.record(feasible);
        if feasible {
            feasible_in_stage += 1;
            if stage + 1 < stages.len() && feasible_in_stage == stages[stage].1 {
                stage += 1;
                feasible_in_stage = 0;
                advanced_at.push(step);
            }
        }
    }
    let single = {
        let mut r = ThresholdRamp::new(&[(5.0, 10)]).unwrap();
        (0..100).all(|_| {
            r.record(true);
            r.current() == 5.0
        })
    };
    verdict(
        mismatches == 0 && stage == 4 && single,
        format!("thresholds 2,8,16,30,40 advanced at steps {advanced_at:?} with {mismatches} mismatches over 10,000 steps"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Verdict); 10] = [
        (1, "space cardinality", criterion_1),
        (2, "pareto correctness", criterion_2),
        (3, "desk-scale frontier", criterion_3),
        (4, "scheduler", criterion_4),
        (5, "area model", criterion_5),
        (6, "reward", criterion_6),
        (7, "policy gradient", criterion_7),
        (8, "search quality", criterion_8),
        (9, "reproducibility", criterion_9),
        (10, "threshold ramp", criterion_10),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, f) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let v = f();
        println!("criterion {n:>2} {name:<20} {}  {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += !v.pass as u32;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
