//! JSONL step log: one schema-versioned object per search step.

use std::io::{self, Write};

use codesign_core::{Phase, StepRecord};
use serde::{Deserialize, Serialize};

use crate::formats::FormatError;

pub const LOG_VERSION: u32 = 1;

/// Metrics are `null` where the step did not produce them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepLine {
    pub v: u32,
    pub step: u64,
    pub phase: String,
    pub point: String,
    pub area_mm2: Option<f64>,
    pub latency_ms: Option<f64>,
    pub accuracy: Option<f64>,
    pub reward: f64,
    pub feasible: bool,
    pub cache_hit: bool,
}

impl From<&StepRecord> for StepLine {
    fn from(r: &StepRecord) -> Self {
        StepLine {
            v: LOG_VERSION,
            step: r.step,
            phase: r.phase.name().to_string(),
            point: r.point.to_string(),
            area_mm2: r.area_mm2,
            latency_ms: r.latency_ms,
            accuracy: r.accuracy,
            reward: r.reward,
            feasible: r.feasible,
            cache_hit: r.cache_hit,
        }
    }
}

pub fn write_line<W: Write>(mut w: W, record: &StepRecord) -> io::Result<()> {
    serde_json::to_writer(&mut w, &StepLine::from(record))?;
    w.write_all(b"\n")
}

pub fn read_log(text: &str) -> Result<Vec<StepLine>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| FormatError { line: i + 1, message };
        let l: StepLine = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        if l.v != LOG_VERSION {
            return Err(bad(format!("unsupported log version {}", l.v)));
        }
        if Phase::from_name(&l.phase).is_none() {
            return Err(bad(format!("unknown phase {:?}", l.phase)));
        }
        out.push(l);
    }
    Ok(out)
}
