//! Text file formats: latency import CSV, accuracy TSV, frontier CSV and the
//! enumeration stats block.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, Write};

use codesign_core::latency::LatencyEntry;
use codesign_core::{
    cell_hash, perf_per_area, AccuracyTable, CellDigest, FrontierEntry, LatencyProjection, Metrics, OpKind, OpVariant,
    SearchPoint, validate_cell,
};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn bad(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, message: message.into() }
}

/// Non-blank lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

pub const LATENCY_HEADER: &str = "kind,h,w,cin,cout,filter_par,pixel_par,mem_width,ratio,pool_en,latency_ms";

fn ratio_text(hundredths: u8) -> String {
    match hundredths {
        100 => "1".into(),
        r if r % 10 == 0 => format!("0.{}", r / 10),
        r => format!("0.{r:02}"),
    }
}

pub fn read_latency_csv(text: &str) -> Result<Vec<LatencyEntry>, FormatError> {
    let mut rows = lines(text);
    match rows.next() {
        Some((_, h)) if h.replace(' ', "") == LATENCY_HEADER => {}
        Some((n, _)) => return Err(bad(n, format!("expected header `{LATENCY_HEADER}`"))),
        None => return Err(bad(1, "missing header")),
    }
    let mut out = Vec::new();
    for (n, row) in rows {
        let f: Vec<&str> = row.split(',').map(str::trim).collect();
        if f.len() != 11 {
            return Err(bad(n, format!("expected 11 fields, got {}", f.len())));
        }
        fn num<T: std::str::FromStr>(n: usize, name: &str, s: &str) -> Result<T, FormatError> {
            s.parse().map_err(|_| bad(n, format!("{name}: cannot parse {s:?}")))
        }
        let kind = OpKind::from_name(f[0]).ok_or_else(|| bad(n, format!("unknown op kind {:?}", f[0])))?;
        let variant = OpVariant::new(kind, num(n, "h", f[1])?, num(n, "w", f[2])?, num(n, "cin", f[3])?, num(n, "cout", f[4])?);
        let ratio: f64 = num(n, "ratio", f[8])?;
        let hundredths = (ratio * 100.0).round();
        let pool_en = match f[9] {
            "0" | "false" => false,
            "1" | "true" => true,
            v => return Err(bad(n, format!("pool_en: cannot parse {v:?}"))),
        };
        let projection = LatencyProjection::from_values(
            num(n, "filter_par", f[5])?,
            num(n, "pixel_par", f[6])?,
            num(n, "mem_width", f[7])?,
            if (0.0..=100.0).contains(&hundredths) && (ratio * 100.0 - hundredths).abs() < 1e-6 { hundredths as u8 } else { 0 },
            pool_en,
        )
        .ok_or_else(|| bad(n, "accelerator values are not in the design space"))?;
        let latency_ms: f64 = num(n, "latency_ms", f[10])?;
        if !(latency_ms.is_finite() && latency_ms > 0.0) {
            return Err(bad(n, "latency_ms must be positive"));
        }
        out.push(LatencyEntry { variant, projection, latency_ms });
    }
    Ok(out)
}

pub fn write_latency_csv<'a, W: Write>(
    mut w: W,
    entries: impl IntoIterator<Item = &'a LatencyEntry>,
) -> io::Result<()> {
    writeln!(w, "{LATENCY_HEADER}")?;
    for e in entries {
        let (v, p) = (&e.variant, &e.projection);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            v.kind.name(),
            v.height,
            v.width,
            v.in_channels,
            v.out_channels,
            p.filter_par(),
            p.pixel_par(),
            p.mem_interface_width(),
            ratio_text(p.ratio_hundredths()),
            p.pool_en() as u8,
            e.latency_ms
        )?;
    }
    Ok(())
}

pub const ACCURACY_HEADER: &str = "#codesign-acc-v1";

pub fn read_accuracy_tsv(text: &str) -> Result<AccuracyTable, FormatError> {
    let mut rows = lines(text);
    match rows.next() {
        Some((_, ACCURACY_HEADER)) => {}
        Some((n, _)) => return Err(bad(n, format!("expected header `{ACCURACY_HEADER}`"))),
        None => return Err(bad(1, "missing header")),
    }
    let mut table = AccuracyTable::new();
    for (n, row) in rows {
        let (digest, acc) = row.split_once('\t').ok_or_else(|| bad(n, "expected `digest<TAB>accuracy`"))?;
        let digest: CellDigest = digest.trim().parse().map_err(|e| bad(n, format!("{e}")))?;
        let acc: f64 = acc.trim().parse().map_err(|_| bad(n, format!("cannot parse accuracy {acc:?}")))?;
        table.insert(digest, acc).map_err(|e| bad(n, e.to_string()))?;
    }
    Ok(table)
}

pub fn write_accuracy_tsv<W: Write>(mut w: W, table: &AccuracyTable) -> io::Result<()> {
    writeln!(w, "{ACCURACY_HEADER}")?;
    for (digest, acc) in table.iter() {
        writeln!(w, "{digest}\t{acc}")?;
    }
    Ok(())
}

pub const FRONTIER_HEADER: &str = "#codesign-frontier-v1";
pub const FRONTIER_COLUMNS: &str = "point,area_mm2,latency_ms,accuracy,perf_per_area";

/// One frontier row. The point is quoted since its hardware part has commas.
pub fn frontier_row(point: &SearchPoint, m: &Metrics) -> String {
    format!("\"{point}\",{},{},{},{}", m.area_mm2, m.latency_ms, m.accuracy, perf_per_area(m))
}

pub fn write_frontier_csv<W: Write>(mut w: W, frontier: &[FrontierEntry]) -> io::Result<()> {
    writeln!(w, "{FRONTIER_HEADER}")?;
    writeln!(w, "{FRONTIER_COLUMNS}")?;
    for e in frontier {
        writeln!(w, "{}", frontier_row(&e.point, &e.metrics))?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrontierRow {
    pub point: SearchPoint,
    pub metrics: Metrics,
    pub perf_per_area: f64,
}

pub fn read_frontier_csv(text: &str) -> Result<Vec<FrontierRow>, FormatError> {
    let mut rows = lines(text);
    for expected in [FRONTIER_HEADER, FRONTIER_COLUMNS] {
        match rows.next() {
            Some((_, h)) if h == expected => {}
            Some((n, _)) => return Err(bad(n, format!("expected `{expected}`"))),
            None => return Err(bad(1, format!("missing `{expected}`"))),
        }
    }
    let mut out = Vec::new();
    for (n, row) in rows {
        let rest = row.strip_prefix('"').ok_or_else(|| bad(n, "point must be quoted"))?;
        let (point, rest) = rest.split_once('"').ok_or_else(|| bad(n, "unterminated quote"))?;
        let mut point: SearchPoint = point.parse().map_err(|e| bad(n, format!("{e}")))?;
        point.cell = validate_cell(&point.cell).map_err(|e| bad(n, format!("{e}")))?;
        let nums: Vec<f64> = rest
            .strip_prefix(',')
            .ok_or_else(|| bad(n, "expected `,` after the point"))?
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(n, format!("cannot parse {s:?}"))))
            .collect::<Result<_, _>>()?;
        if nums.len() != 4 {
            return Err(bad(n, format!("expected 4 numeric fields, got {}", nums.len())));
        }
        out.push(FrontierRow { point, metrics: Metrics::new(nums[0], nums[1], nums[2]), perf_per_area: nums[3] });
    }
    Ok(out)
}

/// Counts reported alongside a frontier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FrontierStats {
    pub cells: usize,
    pub hw: usize,
    pub points: u64,
    pub frontier: usize,
    pub distinct_cells: usize,
    pub distinct_hw: usize,
}

pub const STATS_HEADER: &str = "#codesign-pareto-stats-v1";

impl FrontierStats {
    /// Distinct cells are counted up to isomorphism.
    pub fn of(frontier: &[FrontierEntry], cells: usize, hw: usize, points: u64) -> Self {
        let distinct_cells: BTreeSet<CellDigest> = frontier.iter().map(|e| cell_hash(&e.point.cell)).collect();
        let distinct_hw: BTreeSet<usize> = frontier.iter().map(|e| e.point.hw.ordinal()).collect();
        FrontierStats {
            cells,
            hw,
            points,
            frontier: frontier.len(),
            distinct_cells: distinct_cells.len(),
            distinct_hw: distinct_hw.len(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{STATS_HEADER}").unwrap();
        for (k, v) in self.fields() {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }

    fn fields(&self) -> [(&'static str, u64); 6] {
        [
            ("cells", self.cells as u64),
            ("hw", self.hw as u64),
            ("points", self.points),
            ("frontier", self.frontier as u64),
            ("distinct_cells", self.distinct_cells as u64),
            ("distinct_hw", self.distinct_hw as u64),
        ]
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut rows = lines(text);
        match rows.next() {
            Some((_, STATS_HEADER)) => {}
            Some((n, _)) => return Err(bad(n, format!("expected header `{STATS_HEADER}`"))),
            None => return Err(bad(1, "missing header")),
        }
        let mut s = FrontierStats::default();
        let mut seen = 0;
        for (n, row) in rows {
            let (k, v) = row.split_once('=').ok_or_else(|| bad(n, "expected `key=value`"))?;
            let v: u64 = v.parse().map_err(|_| bad(n, format!("cannot parse {v:?}")))?;
            match k {
                "cells" => s.cells = v as usize,
                "hw" => s.hw = v as usize,
                "points" => s.points = v,
                "frontier" => s.frontier = v as usize,
                "distinct_cells" => s.distinct_cells = v as usize,
                "distinct_hw" => s.distinct_hw = v as usize,
                _ => return Err(bad(n, format!("unknown key {k:?}"))),
            }
            seen += 1;
        }
        if seen != 6 {
            return Err(bad(1, "incomplete stats block"));
        }
        Ok(s)
    }
}
