//! Plot-ready tables derived from a step log.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::steplog::StepLine;

/// Feasible steps only: `step,phase,reward,reward_ema`. The moving average
/// uses `alpha = 2 / (window + 1)` and starts at the first reward.
pub fn reward_csv(log: &[StepLine], window: usize) -> String {
    let alpha = 2.0 / (window.max(1) as f64 + 1.0);
    let mut s = String::from("step,phase,reward,reward_ema\n");
    let mut ema: Option<f64> = None;
    for l in log.iter().filter(|l| l.feasible) {
        let e = match ema {
            None => l.reward,
            Some(prev) => alpha * l.reward + (1.0 - alpha) * prev,
        };
        ema = Some(e);
        writeln!(s, "{},{},{},{}", l.step, l.phase, l.reward, e).unwrap();
    }
    s
}

/// Every step with full metrics, flagged by feasibility.
pub fn scatter_csv(log: &[StepLine]) -> String {
    let mut s = String::from("step,phase,accuracy,latency_ms,area_mm2,perf_per_area,reward,feasible\n");
    for l in log {
        if let (Some(a), Some(lat), Some(acc)) = (l.area_mm2, l.latency_ms, l.accuracy) {
            let ppa = 1000.0 / lat / (a / 100.0);
            writeln!(s, "{},{},{acc},{lat},{a},{ppa},{},{}", l.step, l.phase, l.reward, l.feasible as u8).unwrap();
        }
    }
    s
}

/// Top `k` distinct feasible points by reward; earlier steps win ties.
pub fn best_csv(log: &[StepLine], k: usize) -> String {
    let mut ranked: Vec<&StepLine> = log.iter().filter(|l| l.feasible && l.area_mm2.is_some()).collect();
    ranked.sort_by(|a, b| b.reward.total_cmp(&a.reward).then(a.step.cmp(&b.step)));
    let mut seen = BTreeSet::new();
    let mut s = String::from("rank,step,phase,point,area_mm2,latency_ms,accuracy,perf_per_area,reward\n");
    for l in ranked {
        if seen.len() == k {
            break;
        }
        if !seen.insert(l.point.as_str()) {
            continue;
        }
        let (a, lat, acc) = (l.area_mm2.unwrap(), l.latency_ms.unwrap(), l.accuracy.unwrap());
        let ppa = 1000.0 / lat / (a / 100.0);
        writeln!(s, "{},{},{},\"{}\",{a},{lat},{acc},{ppa},{}", seen.len(), l.step, l.phase, l.point, l.reward).unwrap();
    }
    s
}
