//! Operation latency lookup table, the synthetic roofline model used to fill
//! it, and network unrolling onto the accelerator's execution units.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::area::conv_dsp_split;
use crate::schedule::{Dag, DagBuilder, ListScheduler};
use crate::space::{CellOp, CellSpec, HwConfig, SkeletonError, SkeletonSpec, MAX_EDGES, MAX_NODES};
use crate::space::{FILTER_PAR, MEM_INTERFACE_WIDTH, PIXEL_PAR, POOL_EN, RATIO_CONV_ENGINES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Conv3x3,
    Conv1x1,
    MaxPool3x3,
    EltwiseAdd,
    Concat,
    StemConv,
    Downsample,
}

impl OpKind {
    pub const ALL: [OpKind; 7] = [
        OpKind::Conv3x3,
        OpKind::Conv1x1,
        OpKind::MaxPool3x3,
        OpKind::EltwiseAdd,
        OpKind::Concat,
        OpKind::StemConv,
        OpKind::Downsample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Conv3x3 => "conv3x3",
            OpKind::Conv1x1 => "conv1x1",
            OpKind::MaxPool3x3 => "maxpool3x3",
            OpKind::EltwiseAdd => "eltwise_add",
            OpKind::Concat => "concat",
            OpKind::StemConv => "stem_conv",
            OpKind::Downsample => "downsample",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(name))
    }

    fn from_cell_op(op: CellOp) -> Self {
        match op {
            CellOp::Conv3x3 => OpKind::Conv3x3,
            CellOp::Conv1x1 => OpKind::Conv1x1,
            CellOp::MaxPool3x3 => OpKind::MaxPool3x3,
        }
    }
}

/// One concrete operation shape. For `EltwiseAdd` and `Concat`,
/// `in_channels` is the summed width of all inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpVariant {
    pub kind: OpKind,
    pub height: u32,
    pub width: u32,
    pub in_channels: u32,
    pub out_channels: u32,
}

impl OpVariant {
    pub fn new(kind: OpKind, height: u32, width: u32, in_channels: u32, out_channels: u32) -> Self {
        OpVariant { kind, height, width, in_channels, out_channels }
    }
}

impl fmt::Display for OpVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}x{}, {}->{}]", self.kind.name(), self.height, self.width, self.in_channels, self.out_channels)
    }
}

/// Execution units of the accelerator SoC.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unit {
    ConvGeneral,
    Conv3x3,
    Conv1x1,
    PoolEngine,
    Cpu,
}

impl Unit {
    pub const COUNT: usize = 5;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Unit::ConvGeneral => "conv_general",
            Unit::Conv3x3 => "conv_3x3",
            Unit::Conv1x1 => "conv_1x1",
            Unit::PoolEngine => "pool_engine",
            Unit::Cpu => "cpu",
        }
    }
}

/// The accelerator fields that affect latency (buffer depths do not).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatencyProjection {
    idx: [u8; 5],
}

const PROJECTION_RADIX: [u8; 5] = [2, 5, 2, 6, 2];

impl LatencyProjection {
    /// Number of distinct projections.
    pub const COUNT: usize = 240;

    pub fn of(hw: &HwConfig) -> Self {
        let i = hw.indices();
        LatencyProjection { idx: [i[0], i[1], i[5], i[7], i[6]] }
    }

    pub fn from_values(
        filter_par: u16,
        pixel_par: u16,
        mem_interface_width: u16,
        ratio_hundredths: u8,
        pool_en: bool,
    ) -> Option<Self> {
        Some(LatencyProjection {
            idx: [
                FILTER_PAR.iter().position(|&v| v == filter_par)? as u8,
                PIXEL_PAR.iter().position(|&v| v == pixel_par)? as u8,
                MEM_INTERFACE_WIDTH.iter().position(|&v| v == mem_interface_width)? as u8,
                RATIO_CONV_ENGINES.iter().position(|&v| v == ratio_hundredths)? as u8,
                POOL_EN.iter().position(|&v| v == pool_en)? as u8,
            ],
        })
    }

    pub fn index(&self) -> usize {
        self.idx.iter().zip(PROJECTION_RADIX.iter()).fold(0, |acc, (&i, &r)| acc * r as usize + i as usize)
    }

    pub fn from_index(mut index: usize) -> Option<Self> {
        if index >= Self::COUNT {
            return None;
        }
        let mut idx = [0u8; 5];
        for k in (0..5).rev() {
            idx[k] = (index % PROJECTION_RADIX[k] as usize) as u8;
            index /= PROJECTION_RADIX[k] as usize;
        }
        Some(LatencyProjection { idx })
    }

    pub fn all() -> impl Iterator<Item = LatencyProjection> {
        (0..Self::COUNT).map(|i| Self::from_index(i).expect("in range"))
    }

    /// A representative full configuration (minimum buffer depths).
    pub fn to_hw(&self) -> HwConfig {
        let i = self.idx;
        HwConfig::from_indices([i[0], i[1], 0, 0, 0, i[2], i[4], i[3]]).expect("valid indices")
    }

    pub fn filter_par(&self) -> u16 {
        FILTER_PAR[self.idx[0] as usize]
    }
    pub fn pixel_par(&self) -> u16 {
        PIXEL_PAR[self.idx[1] as usize]
    }
    pub fn mem_interface_width(&self) -> u16 {
        MEM_INTERFACE_WIDTH[self.idx[2] as usize]
    }
    pub fn ratio_hundredths(&self) -> u8 {
        RATIO_CONV_ENGINES[self.idx[3] as usize]
    }
    pub fn pool_en(&self) -> bool {
        POOL_EN[self.idx[4] as usize]
    }

    /// Unit an operation of `kind` runs on under this configuration.
    pub fn unit_for(&self, kind: OpKind) -> Unit {
        let split = self.ratio_hundredths() < 100;
        match kind {
            OpKind::Conv3x3 | OpKind::StemConv if split => Unit::Conv3x3,
            OpKind::Conv1x1 if split => Unit::Conv1x1,
            OpKind::Conv3x3 | OpKind::StemConv | OpKind::Conv1x1 => Unit::ConvGeneral,
            OpKind::MaxPool3x3 | OpKind::Downsample if self.pool_en() => Unit::PoolEngine,
            OpKind::MaxPool3x3 | OpKind::Downsample => Unit::Cpu,
            OpKind::EltwiseAdd | OpKind::Concat => Unit::Cpu,
        }
    }

    /// DSPs owned by a convolution unit.
    pub fn unit_dsps(&self, unit: Unit) -> u64 {
        let (general, conv3, conv1) = conv_dsp_split(&self.to_hw());
        match unit {
            Unit::ConvGeneral => general,
            Unit::Conv3x3 => conv3,
            Unit::Conv1x1 => conv1,
            Unit::PoolEngine | Unit::Cpu => 0,
        }
    }
}

/// Constants of the synthetic roofline latency model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticLatencyParams {
    pub f_clk_mhz: f64,
    pub f_mem_mhz: f64,
    pub bytes_per_element: f64,
    /// Fixed per-operation cost on the accelerator.
    pub accel_overhead_ms: f64,
    pub cpu_bandwidth_gbps: f64,
    /// Fixed per-operation cost on the CPU.
    pub cpu_overhead_ms: f64,
}

impl Default for SyntheticLatencyParams {
    fn default() -> Self {
        SyntheticLatencyParams {
            f_clk_mhz: 200.0,
            f_mem_mhz: 200.0,
            bytes_per_element: 2.0,
            accel_overhead_ms: 0.01,
            cpu_bandwidth_gbps: 1.0,
            cpu_overhead_ms: 0.05,
        }
    }
}

impl SyntheticLatencyParams {
    /// Roofline estimate: `overhead + max(compute, memory)` on accelerator
    /// units, `overhead + bytes / bandwidth` on the CPU. Milliseconds.
    pub fn latency_ms(&self, op: &OpVariant, projection: &LatencyProjection) -> f64 {
        let unit = projection.unit_for(op.kind);
        let (h, w) = (op.height as f64, op.width as f64);
        let (cin, cout) = (op.in_channels as f64, op.out_channels as f64);
        let (oh, ow) = if op.kind == OpKind::Downsample { (libm::floor(h / 2.0), libm::floor(w / 2.0)) } else { (h, w) };
        let moved = (h * w * cin + oh * ow * cout) * self.bytes_per_element;
        if unit == Unit::Cpu {
            return self.cpu_overhead_ms + moved / (self.cpu_bandwidth_gbps * 1e9) * 1e3;
        }
        let mem_bytes_per_cycle = projection.mem_interface_width() as f64 / 8.0;
        let (work, lanes, bytes) = match op.kind {
            OpKind::Conv3x3 | OpKind::StemConv | OpKind::Conv1x1 => {
                let k2 = if op.kind == OpKind::Conv1x1 { 1.0 } else { 9.0 };
                let macs = h * w * k2 * cin * cout;
                let weights = k2 * cin * cout * self.bytes_per_element;
                (macs, projection.unit_dsps(unit).max(1) as f64, moved + weights)
            }
            _ => {
                // pooling engine: one comparison per window element
                let window = if op.kind == OpKind::Downsample { 4.0 } else { 9.0 };
                let lanes = projection.filter_par() as f64 * projection.pixel_par() as f64;
                (oh * ow * cin * window, lanes, moved)
            }
        };
        let compute_ms = work / (lanes * self.f_clk_mhz * 1e6) * 1e3;
        let memory_ms = bytes / (mem_bytes_per_cycle * self.f_mem_mhz * 1e6) * 1e3;
        self.accel_overhead_ms + compute_ms.max(memory_ms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatencyProvenance {
    MeasuredImport,
    Synthetic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatencyEntry {
    pub variant: OpVariant,
    pub projection: LatencyProjection,
    pub latency_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LatencyError {
    #[error("no latency entry for {variant} under projection {projection:?}")]
    CoverageGap { variant: OpVariant, projection: LatencyProjection },
    #[error("latency for {variant} must be positive and finite, got {latency_ms}")]
    NonPositive { variant: OpVariant, latency_ms: f64 },
    #[error("duplicate latency entry for {variant} under projection {projection:?}")]
    DuplicateEntry { variant: OpVariant, projection: LatencyProjection },
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
}

/// Where table entries come from.
#[derive(Clone, Copy, Debug)]
pub enum LatencySource<'a> {
    Synthetic(SyntheticLatencyParams),
    /// Imported measurements, optionally completed by the synthetic model.
    Import { entries: &'a [LatencyEntry], fallback: Option<SyntheticLatencyParams> },
}

/// Latency lookup table over `(OpVariant, LatencyProjection)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatencyTable {
    variants: Vec<OpVariant>,
    /// `variants.len() * LatencyProjection::COUNT` entries, NaN when absent.
    latencies: Vec<f64>,
    provenance: Vec<Option<LatencyProvenance>>,
    fallback: Option<SyntheticLatencyParams>,
}

impl LatencyTable {
    pub fn variants(&self) -> &[OpVariant] {
        &self.variants
    }

    pub fn variant_count(&self) -> usize {
        self.variants.len()
    }

    pub fn fallback(&self) -> Option<&SyntheticLatencyParams> {
        self.fallback.as_ref()
    }

    pub fn variant_index(&self, variant: &OpVariant) -> Option<usize> {
        self.variants.binary_search(variant).ok()
    }

    fn slot(&self, variant_index: usize, projection: &LatencyProjection) -> usize {
        variant_index * LatencyProjection::COUNT + projection.index()
    }

    /// Stored entry, without falling back to the synthetic model.
    pub fn entry(&self, variant: &OpVariant, projection: &LatencyProjection) -> Option<(f64, LatencyProvenance)> {
        let vi = self.variant_index(variant)?;
        let slot = self.slot(vi, projection);
        self.provenance[slot].map(|p| (self.latencies[slot], p))
    }

    /// Latency of `variant` under `projection`, using the synthetic fallback
    /// for entries the table does not hold.
    pub fn lookup(&self, variant: &OpVariant, projection: &LatencyProjection) -> Result<f64, LatencyError> {
        match self.variant_index(variant) {
            Some(vi) => self.lookup_indexed(vi, variant, projection),
            None => self.fallback_for(variant, projection),
        }
    }

    fn lookup_indexed(&self, vi: usize, variant: &OpVariant, projection: &LatencyProjection) -> Result<f64, LatencyError> {
        let v = self.latencies[self.slot(vi, projection)];
        if v.is_nan() {
            self.fallback_for(variant, projection)
        } else {
            Ok(v)
        }
    }

    fn fallback_for(&self, variant: &OpVariant, projection: &LatencyProjection) -> Result<f64, LatencyError> {
        match &self.fallback {
            Some(params) => Ok(params.latency_ms(variant, projection)),
            None => Err(LatencyError::CoverageGap { variant: *variant, projection: *projection }),
        }
    }

    /// All stored entries in variant then projection order.
    pub fn entries(&self) -> impl Iterator<Item = (LatencyEntry, LatencyProvenance)> + '_ {
        self.variants.iter().enumerate().flat_map(move |(vi, variant)| {
            LatencyProjection::all().filter_map(move |projection| {
                let slot = vi * LatencyProjection::COUNT + projection.index();
                self.provenance[slot]
                    .map(|p| (LatencyEntry { variant: *variant, projection, latency_ms: self.latencies[slot] }, p))
            })
        })
    }
}

/// Largest fan-in of an intermediate node and of OUTPUT over fully live cells
/// within the bounds.
fn max_fan_in(max_nodes: usize, max_edges: usize) -> (usize, usize) {
    let mut intermediate = 0;
    let mut output = 1;
    let ops = [CellOp::Conv3x3; 5];
    for n in 3..=max_nodes {
        let slots = n * (n - 1) / 2;
        for mask in 1u32..(1 << slots) {
            if mask.count_ones() as usize > max_edges {
                continue;
            }
            let cell = CellSpec::from_edge_mask(n, mask, &ops[..n - 2]).expect("in-range mask");
            if cell.live_mask().count_ones() as usize != n {
                continue;
            }
            for v in 1..n - 1 {
                intermediate = intermediate.max(cell.in_mask(v).count_ones() as usize);
            }
            output = output.max(cell.in_mask(n - 1).count_ones() as usize);
        }
    }
    (intermediate, output)
}

/// Every operation shape a valid cell within the bounds can produce once
/// unrolled into `skeleton`, sorted.
pub fn reachable_variants(skeleton: &SkeletonSpec, max_nodes: usize, max_edges: usize) -> Vec<OpVariant> {
    let (add_fan_in, concat_fan_in) = max_fan_in(max_nodes, max_edges);
    let mut out = Vec::new();
    let (r0, c0) = skeleton.stack_shape(0);
    out.push(OpVariant::new(OpKind::StemConv, r0, r0, 3, c0));
    for s in 0..skeleton.num_stacks {
        let (r, c) = skeleton.stack_shape(s);
        if s > 0 {
            let (rp, cp) = skeleton.stack_shape(s - 1);
            out.push(OpVariant::new(OpKind::Downsample, rp, rp, cp, c));
        }
        if max_nodes >= 3 {
            for kind in [OpKind::Conv3x3, OpKind::Conv1x1, OpKind::MaxPool3x3] {
                out.push(OpVariant::new(kind, r, r, c, c));
            }
        }
        for k in 2..=add_fan_in as u32 {
            out.push(OpVariant::new(OpKind::EltwiseAdd, r, r, k * c, c));
        }
        for k in 2..=concat_fan_in as u32 {
            out.push(OpVariant::new(OpKind::Concat, r, r, k * c, c));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Builds the table for every variant reachable from cells of the full space
/// (7 nodes, 9 edges).
pub fn build_latency_table(skeleton: &SkeletonSpec, source: LatencySource<'_>) -> Result<LatencyTable, LatencyError> {
    build_latency_table_for(skeleton, MAX_NODES, MAX_EDGES, source)
}

/// Builds the table for cells with at most `max_nodes` nodes and `max_edges`
/// edges. Imported entries outside the reachable set are kept.
pub fn build_latency_table_for(
    skeleton: &SkeletonSpec,
    max_nodes: usize,
    max_edges: usize,
    source: LatencySource<'_>,
) -> Result<LatencyTable, LatencyError> {
    skeleton.validate()?;
    let required = reachable_variants(skeleton, max_nodes, max_edges);
    let mut variants = required.clone();
    let (imports, fallback): (&[LatencyEntry], Option<SyntheticLatencyParams>) = match source {
        LatencySource::Synthetic(params) => (&[], Some(params)),
        LatencySource::Import { entries, fallback } => (entries, fallback),
    };
    variants.extend(imports.iter().map(|e| e.variant));
    variants.sort();
    variants.dedup();

    let slots = variants.len() * LatencyProjection::COUNT;
    let mut table = LatencyTable {
        variants,
        latencies: vec![f64::NAN; slots],
        provenance: vec![None; slots],
        fallback,
    };
    for e in imports {
        if !(e.latency_ms.is_finite() && e.latency_ms > 0.0) {
            return Err(LatencyError::NonPositive { variant: e.variant, latency_ms: e.latency_ms });
        }
        let vi = table.variant_index(&e.variant).expect("inserted above");
        let slot = table.slot(vi, &e.projection);
        if table.provenance[slot].is_some() {
            return Err(LatencyError::DuplicateEntry { variant: e.variant, projection: e.projection });
        }
        table.latencies[slot] = e.latency_ms;
        table.provenance[slot] = Some(LatencyProvenance::MeasuredImport);
    }
    for variant in &required {
        let vi = table.variant_index(variant).expect("required variant present");
        for projection in LatencyProjection::all() {
            let slot = table.slot(vi, &projection);
            if table.provenance[slot].is_some() {
                continue;
            }
            match &fallback {
                Some(params) => {
                    table.latencies[slot] = params.latency_ms(variant, &projection);
                    table.provenance[slot] = Some(LatencyProvenance::Synthetic);
                }
                None => return Err(LatencyError::CoverageGap { variant: *variant, projection }),
            }
        }
    }
    Ok(table)
}

/// A cell unrolled into the full network: stem, stacks of repeated cells and
/// downsampling between stacks. Operations are in topological order.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    ops: Vec<OpVariant>,
    dag: Dag,
}

impl Network {
    /// Unrolls a pruned cell. Within a cell, an intermediate node with several
    /// inputs gets an element-wise add in front of its op, and OUTPUT with
    /// several inputs becomes a concatenation; single inputs pass through.
    pub fn unroll(cell: &CellSpec, skeleton: &SkeletonSpec) -> Self {
        let n = cell.num_nodes();
        let mut ops = Vec::new();
        let mut dag = DagBuilder::default();
        let mut push = |ops: &mut Vec<OpVariant>, variant: OpVariant, preds: &[usize]| {
            ops.push(variant);
            dag.push(preds)
        };
        let (r0, c0) = skeleton.stack_shape(0);
        let mut current = push(&mut ops, OpVariant::new(OpKind::StemConv, r0, r0, 3, c0), &[]);
        let mut producer = [0usize; MAX_NODES];
        let mut inputs: Vec<usize> = Vec::with_capacity(MAX_NODES);
        for s in 0..skeleton.num_stacks {
            let (r, c) = skeleton.stack_shape(s);
            if s > 0 {
                let (rp, cp) = skeleton.stack_shape(s - 1);
                current = push(&mut ops, OpVariant::new(OpKind::Downsample, rp, rp, cp, c), &[current]);
            }
            for _ in 0..skeleton.cells_per_stack {
                producer[0] = current;
                for j in 1..n {
                    inputs.clear();
                    let mask = cell.in_mask(j);
                    inputs.extend((0..j).filter(|&i| mask & (1 << i) != 0).map(|i| producer[i]));
                    let k = inputs.len() as u32;
                    if j + 1 < n {
                        let source: Vec<usize> = if k >= 2 {
                            let add = push(&mut ops, OpVariant::new(OpKind::EltwiseAdd, r, r, k * c, c), &inputs);
                            vec![add]
                        } else {
                            inputs.clone()
                        };
                        let kind = OpKind::from_cell_op(cell.op(j).expect("intermediate node"));
                        producer[j] = push(&mut ops, OpVariant::new(kind, r, r, c, c), &source);
                    } else if k >= 2 {
                        producer[j] = push(&mut ops, OpVariant::new(OpKind::Concat, r, r, k * c, c), &inputs);
                    } else {
                        producer[j] = inputs.first().copied().unwrap_or(current);
                    }
                }
                current = producer[n - 1];
            }
        }
        Network { ops, dag: dag.build() }
    }

    pub fn ops(&self) -> &[OpVariant] {
        &self.ops
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }
}

/// One scheduled operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduledOp {
    pub variant: OpVariant,
    pub unit: Unit,
    pub start_ms: f64,
    pub finish_ms: f64,
}

/// A network bound to a latency table, ready to be evaluated under many
/// accelerator projections.
#[derive(Clone, Debug)]
pub struct CompiledNetwork<'t> {
    network: Network,
    table: &'t LatencyTable,
    variant_index: Vec<Option<usize>>,
}

impl<'t> CompiledNetwork<'t> {
    pub fn new(network: Network, table: &'t LatencyTable) -> Self {
        let variant_index = network.ops.iter().map(|v| table.variant_index(v)).collect();
        CompiledNetwork { network, table, variant_index }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    /// Durations and unit indices of every op under `projection`.
    pub fn bind(
        &self,
        projection: &LatencyProjection,
        durations: &mut Vec<f64>,
        units: &mut Vec<usize>,
    ) -> Result<(), LatencyError> {
        durations.clear();
        units.clear();
        for (op, vi) in self.network.ops.iter().zip(&self.variant_index) {
            let d = match vi {
                Some(vi) => self.table.lookup_indexed(*vi, op, projection)?,
                None => self.table.fallback_for(op, projection)?,
            };
            durations.push(d);
            units.push(projection.unit_for(op.kind).index());
        }
        Ok(())
    }

    /// Makespan under `projection`, reusing the caller's scratch state.
    pub fn latency_with(
        &self,
        projection: &LatencyProjection,
        scratch: &mut LatencyScratch,
    ) -> Result<f64, LatencyError> {
        self.bind(projection, &mut scratch.durations, &mut scratch.units)?;
        Ok(scratch.scheduler.run(&self.network.dag, &scratch.units, &scratch.durations))
    }

    pub fn latency(&self, projection: &LatencyProjection) -> Result<f64, LatencyError> {
        self.latency_with(projection, &mut LatencyScratch::default())
    }

    pub fn schedule(&self, projection: &LatencyProjection) -> Result<(f64, Vec<ScheduledOp>), LatencyError> {
        let mut scratch = LatencyScratch::default();
        let makespan = self.latency_with(projection, &mut scratch)?;
        let ops = self
            .network
            .ops
            .iter()
            .enumerate()
            .map(|(t, variant)| ScheduledOp {
                variant: *variant,
                unit: projection.unit_for(variant.kind),
                start_ms: scratch.scheduler.start()[t],
                finish_ms: scratch.scheduler.finish()[t],
            })
            .collect();
        Ok((makespan, ops))
    }
}

/// Reusable buffers for repeated latency evaluation.
#[derive(Clone, Debug, Default)]
pub struct LatencyScratch {
    durations: Vec<f64>,
    units: Vec<usize>,
    scheduler: ListScheduler,
}

/// Unrolls `cell` and list-schedules it on `hw`. Returns the makespan and
/// the per-op schedule.
pub fn schedule(
    cell: &CellSpec,
    skeleton: &SkeletonSpec,
    hw: &HwConfig,
    table: &LatencyTable,
) -> Result<(f64, Vec<ScheduledOp>), LatencyError> {
    CompiledNetwork::new(Network::unroll(cell, skeleton), table).schedule(&LatencyProjection::of(hw))
}

/// Total network latency in milliseconds.
pub fn latency(cell: &CellSpec, skeleton: &SkeletonSpec, hw: &HwConfig, table: &LatencyTable) -> Result<f64, LatencyError> {
    CompiledNetwork::new(Network::unroll(cell, skeleton), table).latency(&LatencyProjection::of(hw))
}
