//! Cell space, accelerator space and the decision schemas that map the joint
//! space onto a sequence of categorical controller decisions.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Maximum number of nodes in a cell, INPUT and OUTPUT included.
pub const MAX_NODES: usize = 7;
/// Maximum number of edges in a (pruned) cell.
pub const MAX_EDGES: usize = 9;
/// Number of intermediate (operation) nodes in a full-size cell.
pub const MAX_OPS: usize = MAX_NODES - 2;
/// Number of upper-triangular adjacency entries in a full-size cell.
pub const MAX_EDGE_SLOTS: usize = MAX_NODES * (MAX_NODES - 1) / 2;

/// Operation carried by an intermediate cell node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellOp {
    #[default]
    Conv3x3,
    Conv1x1,
    MaxPool3x3,
}

impl CellOp {
    pub const ALL: [CellOp; 3] = [CellOp::Conv3x3, CellOp::Conv1x1, CellOp::MaxPool3x3];

    pub fn index(self) -> u8 {
        match self {
            CellOp::Conv3x3 => 0,
            CellOp::Conv1x1 => 1,
            CellOp::MaxPool3x3 => 2,
        }
    }

    pub fn from_index(index: u8) -> Option<Self> {
        Self::ALL.get(index as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            CellOp::Conv3x3 => "conv3x3",
            CellOp::Conv1x1 => "conv1x1",
            CellOp::MaxPool3x3 => "maxpool3x3",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("cell has {count} edges after pruning, at most {MAX_EDGES} allowed")]
    TooManyEdges { count: usize },
    #[error("no path from INPUT to OUTPUT")]
    Disconnected,
    #[error("malformed adjacency matrix: {0}")]
    MalformedMatrix(&'static str),
}

/// A cell: an upper-triangular DAG over `num_nodes` nodes. Node 0 is INPUT,
/// node `num_nodes - 1` is OUTPUT and every node in between carries a
/// [`CellOp`].
///
/// The value is not necessarily valid; see [`validate_cell`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellSpec {
    num_nodes: u8,
    /// Bit `j` of `rows[i]` is set when node `i` feeds node `j`.
    rows: [u8; MAX_NODES],
    /// Op of intermediate node `k + 1`; unused slots hold the default op.
    ops: [CellOp; MAX_OPS],
}

impl CellSpec {
    /// Builds a cell from an explicit edge list. Edges must satisfy `i < j < num_nodes`.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)], ops: &[CellOp]) -> Result<Self, CellError> {
        let mut cell = Self::empty(num_nodes, ops)?;
        for &(i, j) in edges {
            if i >= j {
                return Err(CellError::MalformedMatrix("edge is not strictly upper-triangular"));
            }
            if j >= num_nodes {
                return Err(CellError::MalformedMatrix("edge endpoint out of range"));
            }
            cell.rows[i] |= 1 << j;
        }
        Ok(cell)
    }

    /// Builds a cell from a dense square 0/1 matrix.
    pub fn from_matrix(matrix: &[Vec<bool>], ops: &[CellOp]) -> Result<Self, CellError> {
        let n = matrix.len();
        let mut cell = Self::empty(n, ops)?;
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(CellError::MalformedMatrix("matrix is not square"));
            }
            for (j, &set) in row.iter().enumerate() {
                if set {
                    if j <= i {
                        return Err(CellError::MalformedMatrix("entry on or below the diagonal"));
                    }
                    cell.rows[i] |= 1 << j;
                }
            }
        }
        Ok(cell)
    }

    /// Builds a cell from a bit mask over the upper-triangular entries in
    /// row-major order (bit 0 is edge (0,1), bit 1 is edge (0,2), ...).
    pub fn from_edge_mask(num_nodes: usize, mask: u32, ops: &[CellOp]) -> Result<Self, CellError> {
        let mut cell = Self::empty(num_nodes, ops)?;
        let slots = num_nodes * (num_nodes - 1) / 2;
        if slots < 32 && mask >> slots != 0 {
            return Err(CellError::MalformedMatrix("edge mask has bits beyond the matrix"));
        }
        let mut bit = 0;
        for i in 0..num_nodes {
            for j in i + 1..num_nodes {
                if mask & (1 << bit) != 0 {
                    cell.rows[i] |= 1 << j;
                }
                bit += 1;
            }
        }
        Ok(cell)
    }

    fn empty(num_nodes: usize, ops: &[CellOp]) -> Result<Self, CellError> {
        if !(2..=MAX_NODES).contains(&num_nodes) {
            return Err(CellError::MalformedMatrix("node count must be in 2..=7"));
        }
        if ops.len() != num_nodes - 2 {
            return Err(CellError::MalformedMatrix("op count must equal node count minus two"));
        }
        let mut slots = [CellOp::default(); MAX_OPS];
        slots[..ops.len()].copy_from_slice(ops);
        Ok(CellSpec { num_nodes: num_nodes as u8, rows: [0; MAX_NODES], ops: slots })
    }

    /// The two-node cell INPUT -> OUTPUT.
    pub fn identity() -> Self {
        CellSpec::from_edges(2, &[(0, 1)], &[]).expect("identity cell")
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes as usize
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        from < MAX_NODES && to < MAX_NODES && self.rows[from] & (1 << to) != 0
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Successor bit mask of `node`.
    pub fn out_mask(&self, node: usize) -> u8 {
        self.rows[node]
    }

    /// Predecessor bit mask of `node`.
    pub fn in_mask(&self, node: usize) -> u8 {
        let mut mask = 0u8;
        for i in 0..node {
            if self.rows[i] & (1 << node) != 0 {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Op of an intermediate node, `None` for INPUT and OUTPUT.
    pub fn op(&self, node: usize) -> Option<CellOp> {
        if node == 0 || node + 1 >= self.num_nodes() {
            None
        } else {
            Some(self.ops[node - 1])
        }
    }

    /// Ops of the intermediate nodes in node order.
    pub fn ops(&self) -> &[CellOp] {
        &self.ops[..self.num_nodes() - 2]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.num_nodes();
        (0..n).flat_map(move |i| (i + 1..n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    /// Row-major upper-triangular edge mask (inverse of [`CellSpec::from_edge_mask`]).
    pub fn edge_mask(&self) -> u32 {
        let n = self.num_nodes();
        let mut mask = 0u32;
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.has_edge(i, j) {
                    mask |= 1 << bit;
                }
                bit += 1;
            }
        }
        mask
    }

    /// Nodes that lie on some INPUT -> OUTPUT path, as a bit mask.
    pub fn live_mask(&self) -> u8 {
        let n = self.num_nodes();
        let mut forward = 1u8;
        for j in 1..n {
            if self.in_mask(j) & forward != 0 {
                forward |= 1 << j;
            }
        }
        let mut backward = 1u8 << (n - 1);
        for i in (0..n - 1).rev() {
            if self.rows[i] & backward != 0 {
                backward |= 1 << i;
            }
        }
        forward & backward
    }

    /// Longest INPUT -> OUTPUT path counted in intermediate nodes. Assumes a
    /// pruned cell.
    pub fn depth(&self) -> usize {
        let n = self.num_nodes();
        let mut longest = [0usize; MAX_NODES];
        for j in 1..n {
            let preds = self.in_mask(j);
            let best = (0..j).filter(|&i| preds & (1 << i) != 0).map(|i| longest[i]).max().unwrap_or(0);
            longest[j] = if j + 1 < n { best + 1 } else { best };
        }
        longest[n - 1]
    }

    /// Embeds the cell into the full 7-node frame: nodes keep their index
    /// except OUTPUT, which moves to node 6. Padding nodes have no edges.
    pub fn to_full_frame(&self) -> ([bool; MAX_EDGE_SLOTS], [CellOp; MAX_OPS]) {
        let n = self.num_nodes();
        let map = |node: usize| if node == n - 1 { MAX_NODES - 1 } else { node };
        let mut bits = [false; MAX_EDGE_SLOTS];
        for (i, j) in self.edges() {
            bits[edge_slot(MAX_NODES, map(i), map(j))] = true;
        }
        let mut ops = [CellOp::default(); MAX_OPS];
        ops[..n - 2].copy_from_slice(self.ops());
        (bits, ops)
    }
}

impl fmt::Debug for CellSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellSpec(n={}, edges=[", self.num_nodes)?;
        for (k, (i, j)) in self.edges().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}->{j}")?;
        }
        write!(f, "], ops=[")?;
        for (k, op) in self.ops().iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", op.name())?;
        }
        write!(f, "])")
    }
}

/// Index of edge `(i, j)` in row-major upper-triangular order for an
/// `n`-node matrix.
pub fn edge_slot(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Checks a cell and returns its pruned form.
///
/// Nodes that are not on an INPUT -> OUTPUT path are removed (keeping the
/// relative order of the survivors). The edge limit applies to the pruned
/// graph.
pub fn validate_cell(cell: &CellSpec) -> Result<CellSpec, CellError> {
    let n = cell.num_nodes();
    if (0..n).any(|i| cell.rows[i] & ((1u16 << (i + 1)) - 1) as u8 != 0) || cell.rows[n..].iter().any(|&r| r != 0) {
        return Err(CellError::MalformedMatrix("entry on or below the diagonal"));
    }
    if (0..n).any(|i| (cell.rows[i] as u16) >> n != 0) {
        return Err(CellError::MalformedMatrix("edge endpoint out of range"));
    }
    let live = cell.live_mask();
    if live & (1 << (n - 1)) == 0 {
        return Err(CellError::Disconnected);
    }
    let kept: Vec<usize> = (0..n).filter(|&i| live & (1 << i) != 0).collect();
    let mut new_index = [usize::MAX; MAX_NODES];
    for (k, &old) in kept.iter().enumerate() {
        new_index[old] = k;
    }
    let ops: Vec<CellOp> = kept[1..kept.len() - 1].iter().map(|&old| cell.ops[old - 1]).collect();
    let edges: Vec<(usize, usize)> = cell
        .edges()
        .filter(|&(i, j)| live & (1 << i) != 0 && live & (1 << j) != 0)
        .map(|(i, j)| (new_index[i], new_index[j]))
        .collect();
    if edges.len() > MAX_EDGES {
        return Err(CellError::TooManyEdges { count: edges.len() });
    }
    CellSpec::from_edges(kept.len(), &edges, &ops)
}

pub const FILTER_PAR: [u16; 2] = [8, 16];
pub const PIXEL_PAR: [u16; 5] = [4, 8, 16, 32, 64];
pub const INPUT_BUFFER_DEPTH: [u32; 4] = [1024, 2048, 4096, 8192];
pub const WEIGHTS_BUFFER_DEPTH: [u32; 3] = [1024, 2048, 4096];
pub const OUTPUT_BUFFER_DEPTH: [u32; 3] = [1024, 2048, 4096];
pub const MEM_INTERFACE_WIDTH: [u16; 2] = [256, 512];
pub const POOL_EN: [bool; 2] = [false, true];
/// `ratio_conv_engines` in hundredths.
pub const RATIO_CONV_ENGINES: [u8; 6] = [100, 75, 67, 50, 33, 25];

/// Option count of every accelerator field, in decision order.
pub const HW_RADIX: [u8; 8] = [2, 5, 4, 3, 3, 2, 2, 6];
/// Number of distinct accelerator configurations.
pub const HW_SPACE_SIZE: usize = 8640;

pub const HW_FIELD_NAMES: [&str; 8] = [
    "filter_par",
    "pixel_par",
    "input_buffer_depth",
    "weights_buffer_depth",
    "output_buffer_depth",
    "mem_interface_width",
    "pool_en",
    "ratio_conv_engines",
];

/// One accelerator configuration, stored as option indices into the field
/// tables above (in field order).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HwConfig {
    idx: [u8; 8],
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{field} has no option {value}")]
pub struct HwFieldError {
    pub field: &'static str,
    pub value: String,
}

impl HwConfig {
    pub fn from_indices(idx: [u8; 8]) -> Result<Self, HwFieldError> {
        for (k, (&i, &radix)) in idx.iter().zip(HW_RADIX.iter()).enumerate() {
            if i >= radix {
                return Err(HwFieldError { field: HW_FIELD_NAMES[k], value: format!("index {i}") });
            }
        }
        Ok(HwConfig { idx })
    }

    /// Builds a configuration from field values. `ratio_conv_engines` is
    /// given in hundredths (100, 75, 67, 50, 33 or 25).
    #[allow(clippy::too_many_arguments)]
    pub fn from_values(
        filter_par: u16,
        pixel_par: u16,
        input_buffer_depth: u32,
        weights_buffer_depth: u32,
        output_buffer_depth: u32,
        mem_interface_width: u16,
        pool_en: bool,
        ratio_hundredths: u8,
    ) -> Result<Self, HwFieldError> {
        fn find<T: PartialEq + fmt::Display>(field: &'static str, options: &[T], value: T) -> Result<u8, HwFieldError> {
            options
                .iter()
                .position(|o| *o == value)
                .map(|p| p as u8)
                .ok_or_else(|| HwFieldError { field, value: format!("{value}") })
        }
        Ok(HwConfig {
            idx: [
                find(HW_FIELD_NAMES[0], &FILTER_PAR, filter_par)?,
                find(HW_FIELD_NAMES[1], &PIXEL_PAR, pixel_par)?,
                find(HW_FIELD_NAMES[2], &INPUT_BUFFER_DEPTH, input_buffer_depth)?,
                find(HW_FIELD_NAMES[3], &WEIGHTS_BUFFER_DEPTH, weights_buffer_depth)?,
                find(HW_FIELD_NAMES[4], &OUTPUT_BUFFER_DEPTH, output_buffer_depth)?,
                find(HW_FIELD_NAMES[5], &MEM_INTERFACE_WIDTH, mem_interface_width)?,
                find(HW_FIELD_NAMES[6], &POOL_EN, pool_en)?,
                find(HW_FIELD_NAMES[7], &RATIO_CONV_ENGINES, ratio_hundredths)?,
            ],
        })
    }

    /// Configuration with the given position in [`enumerate_hw`] order.
    pub fn from_ordinal(mut ordinal: usize) -> Option<Self> {
        if ordinal >= HW_SPACE_SIZE {
            return None;
        }
        let mut idx = [0u8; 8];
        for k in (0..8).rev() {
            let radix = HW_RADIX[k] as usize;
            idx[k] = (ordinal % radix) as u8;
            ordinal /= radix;
        }
        Some(HwConfig { idx })
    }

    /// Position in [`enumerate_hw`] order (first field most significant).
    pub fn ordinal(&self) -> usize {
        self.idx.iter().zip(HW_RADIX.iter()).fold(0usize, |acc, (&i, &r)| acc * r as usize + i as usize)
    }

    pub fn indices(&self) -> [u8; 8] {
        self.idx
    }

    pub fn filter_par(&self) -> u16 {
        FILTER_PAR[self.idx[0] as usize]
    }
    pub fn pixel_par(&self) -> u16 {
        PIXEL_PAR[self.idx[1] as usize]
    }
    pub fn input_buffer_depth(&self) -> u32 {
        INPUT_BUFFER_DEPTH[self.idx[2] as usize]
    }
    pub fn weights_buffer_depth(&self) -> u32 {
        WEIGHTS_BUFFER_DEPTH[self.idx[3] as usize]
    }
    pub fn output_buffer_depth(&self) -> u32 {
        OUTPUT_BUFFER_DEPTH[self.idx[4] as usize]
    }
    pub fn mem_interface_width(&self) -> u16 {
        MEM_INTERFACE_WIDTH[self.idx[5] as usize]
    }
    pub fn pool_en(&self) -> bool {
        POOL_EN[self.idx[6] as usize]
    }
    /// DSP split between the 3x3 and 1x1 engines, in hundredths.
    pub fn ratio_hundredths(&self) -> u8 {
        RATIO_CONV_ENGINES[self.idx[7] as usize]
    }
    pub fn ratio_conv_engines(&self) -> f64 {
        self.ratio_hundredths() as f64 / 100.0
    }
    /// `true` when the accelerator has two specialized convolution engines.
    pub fn split_engines(&self) -> bool {
        self.ratio_hundredths() < 100
    }

    /// Copy with one field set to another option index.
    pub fn with_index(&self, field: usize, index: u8) -> Option<Self> {
        let mut idx = self.idx;
        idx[field] = index;
        HwConfig::from_indices(idx).ok()
    }
}

impl fmt::Debug for HwConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HwConfig({self})")
    }
}

impl fmt::Display for HwConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ratio = self.ratio_hundredths();
        write!(
            f,
            "{},{},{},{},{},{},{},",
            self.filter_par(),
            self.pixel_par(),
            self.input_buffer_depth(),
            self.weights_buffer_depth(),
            self.output_buffer_depth(),
            self.mem_interface_width(),
            self.pool_en() as u8
        )?;
        match ratio {
            100 => write!(f, "1"),
            r if r % 10 == 0 => write!(f, "0.{}", r / 10),
            r => write!(f, "0.{r:02}"),
        }
    }
}

impl FromStr for HwConfig {
    type Err = PointParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fields: Vec<&str> = s.split(',').map(str::trim).collect();
        if fields.len() != 8 {
            return Err(PointParseError::Hw(format!("expected 8 comma-separated values, got {}", fields.len())));
        }
        fn int<T: FromStr>(name: &str, s: &str) -> Result<T, PointParseError> {
            s.parse().map_err(|_| PointParseError::Hw(format!("{name}: cannot parse {s:?}")))
        }
        let pool_en = match fields[6] {
            "0" | "false" => false,
            "1" | "true" => true,
            other => return Err(PointParseError::Hw(format!("pool_en: cannot parse {other:?}"))),
        };
        let ratio: f64 = int("ratio_conv_engines", fields[7])?;
        let hundredths = libm::round(ratio * 100.0);
        if !(0.0..=100.0).contains(&hundredths) || libm::fabs(ratio * 100.0 - hundredths) > 1e-6 {
            return Err(PointParseError::Hw(format!("ratio_conv_engines: {ratio} is not an option")));
        }
        HwConfig::from_values(
            int("filter_par", fields[0])?,
            int("pixel_par", fields[1])?,
            int("input_buffer_depth", fields[2])?,
            int("weights_buffer_depth", fields[3])?,
            int("output_buffer_depth", fields[4])?,
            int("mem_interface_width", fields[5])?,
            pool_en,
            hundredths as u8,
        )
        .map_err(|e| PointParseError::Hw(format!("{e}")))
    }
}

/// All accelerator configurations in odometer order over the fields
/// (`filter_par` slowest, `ratio_conv_engines` fastest; each field's options
/// in table order).
pub fn enumerate_hw() -> impl Iterator<Item = HwConfig> + Clone {
    (0..HW_SPACE_SIZE).map(|o| HwConfig::from_ordinal(o).expect("ordinal in range"))
}

/// Fixed outer network hosting the searched cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SkeletonSpec {
    pub num_stacks: u32,
    pub cells_per_stack: u32,
    pub stem_channels: u32,
    pub input_resolution: u32,
}

impl Default for SkeletonSpec {
    fn default() -> Self {
        SkeletonSpec { num_stacks: 3, cells_per_stack: 3, stem_channels: 128, input_resolution: 32 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid skeleton: {0}")]
pub struct SkeletonError(pub &'static str);

impl SkeletonSpec {
    pub fn validate(&self) -> Result<(), SkeletonError> {
        if self.num_stacks == 0 || self.num_stacks > 16 {
            return Err(SkeletonError("num_stacks must be in 1..=16"));
        }
        if self.cells_per_stack == 0 {
            return Err(SkeletonError("cells_per_stack must be positive"));
        }
        if self.stem_channels == 0 {
            return Err(SkeletonError("stem_channels must be positive"));
        }
        if self.input_resolution >> (self.num_stacks - 1) == 0 {
            return Err(SkeletonError("input_resolution too small for the number of stacks"));
        }
        Ok(())
    }

    /// `(resolution, channels)` seen by the cells of stack `stack`.
    pub fn stack_shape(&self, stack: u32) -> (u32, u32) {
        (self.input_resolution >> stack, self.stem_channels << stack)
    }
}

/// Which part of the joint space a schema covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Cell,
    Hw,
    Joint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub name: String,
    pub options: u8,
}

/// Ordered list of categorical decisions.
///
/// Cell decisions come first: one binary decision per upper-triangular
/// adjacency entry (row-major), then one ternary op decision per intermediate
/// node. Accelerator decisions follow in field order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionSchema {
    kind: SpaceKind,
    max_nodes: usize,
    decisions: Vec<Decision>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("expected {expected} decisions, got {got}")]
    Length { expected: usize, got: usize },
    #[error("decision {index} has option {value} but only {options} options")]
    OutOfRange { index: usize, value: u8, options: u8 },
}

/// A decision vector decoded into (possibly invalid) space elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub cell: Option<CellSpec>,
    pub hw: Option<HwConfig>,
}

impl DecisionSchema {
    /// Schema for the full-size space (7-node cells).
    pub fn new(kind: SpaceKind) -> Self {
        Self::with_max_nodes(kind, MAX_NODES)
    }

    /// Schema whose cell part spans cells with up to `max_nodes` nodes.
    pub fn with_max_nodes(kind: SpaceKind, max_nodes: usize) -> Self {
        assert!((2..=MAX_NODES).contains(&max_nodes), "max_nodes must be in 2..=7");
        let mut decisions = Vec::new();
        if kind != SpaceKind::Hw {
            for i in 0..max_nodes {
                for j in i + 1..max_nodes {
                    decisions.push(Decision { name: format!("edge_{i}_{j}"), options: 2 });
                }
            }
            for node in 1..max_nodes - 1 {
                decisions.push(Decision { name: format!("op_{node}"), options: 3 });
            }
        }
        if kind != SpaceKind::Cell {
            for (name, &radix) in HW_FIELD_NAMES.iter().zip(HW_RADIX.iter()) {
                decisions.push(Decision { name: String::from(*name), options: radix });
            }
        }
        DecisionSchema { kind, max_nodes, decisions }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn max_nodes(&self) -> usize {
        self.max_nodes
    }

    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn option_counts(&self) -> Vec<u8> {
        self.decisions.iter().map(|d| d.options).collect()
    }

    /// Product of option counts, as a float (the full joint product does
    /// not fit comfortably in an integer).
    pub fn raw_size(&self) -> f64 {
        self.decisions.iter().map(|d| d.options as f64).product()
    }

    fn cell_decisions(&self) -> usize {
        match self.kind {
            SpaceKind::Hw => 0,
            _ => self.max_nodes * (self.max_nodes - 1) / 2 + self.max_nodes - 2,
        }
    }

    /// Stable 64-bit fingerprint over decision names and option counts.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |b: u8| {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        };
        for d in &self.decisions {
            d.name.bytes().for_each(&mut feed);
            feed(0);
            feed(d.options);
        }
        h
    }

    /// Decodes a decision vector. The cell is returned unvalidated.
    pub fn decode(&self, choices: &[u8]) -> Result<Decoded, DecodeError> {
        if choices.len() != self.decisions.len() {
            return Err(DecodeError::Length { expected: self.decisions.len(), got: choices.len() });
        }
        for (index, (&value, d)) in choices.iter().zip(&self.decisions).enumerate() {
            if value >= d.options {
                return Err(DecodeError::OutOfRange { index, value, options: d.options });
            }
        }
        let split = self.cell_decisions();
        let cell = if self.kind == SpaceKind::Hw {
            None
        } else {
            let n = self.max_nodes;
            let slots = n * (n - 1) / 2;
            let mask = choices[..slots].iter().enumerate().fold(0u32, |m, (b, &c)| m | ((c as u32) << b));
            let ops: Vec<CellOp> =
                choices[slots..split].iter().map(|&c| CellOp::from_index(c).expect("checked range")).collect();
            Some(CellSpec::from_edge_mask(n, mask, &ops).expect("schema-shaped cell"))
        };
        let hw = if self.kind == SpaceKind::Cell {
            None
        } else {
            let mut idx = [0u8; 8];
            idx.copy_from_slice(&choices[split..]);
            Some(HwConfig::from_indices(idx).expect("checked range"))
        };
        Ok(Decoded { cell, hw })
    }

    /// Inverse of [`DecisionSchema::decode`] for the parts this schema covers.
    /// Returns `None` when the cell has more nodes than the schema allows.
    pub fn encode(&self, cell: Option<&CellSpec>, hw: Option<&HwConfig>) -> Option<Vec<u8>> {
        let mut out = Vec::with_capacity(self.decisions.len());
        if self.kind != SpaceKind::Hw {
            let cell = cell?;
            let n = self.max_nodes;
            let m = cell.num_nodes();
            if m > n {
                return None;
            }
            let map = |node: usize| if node == m - 1 { n - 1 } else { node };
            let mut bits = alloc::vec![0u8; n * (n - 1) / 2];
            for (i, j) in cell.edges() {
                bits[edge_slot(n, map(i), map(j))] = 1;
            }
            out.extend(bits);
            let mut ops = alloc::vec![0u8; n - 2];
            for (k, op) in cell.ops().iter().enumerate() {
                ops[k] = op.index();
            }
            out.extend(ops);
        }
        if self.kind != SpaceKind::Cell {
            out.extend_from_slice(&hw?.indices());
        }
        Some(out)
    }
}

/// One point of the joint space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SearchPoint {
    pub cell: CellSpec,
    pub hw: HwConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PointParseError {
    #[error("malformed point encoding: {0}")]
    Syntax(String),
    #[error("malformed cell encoding: {0}")]
    Cell(String),
    #[error("malformed accelerator encoding: {0}")]
    Hw(String),
}

impl SearchPoint {
    pub fn new(cell: CellSpec, hw: HwConfig) -> Self {
        SearchPoint { cell, hw }
    }
}

/// `cell=<21 edge bits>:<5 op digits> hw=<8 values>`. Cells are written in the
/// 7-node frame; smaller cells keep their node indices and move OUTPUT to
/// node 6.
impl fmt::Display for SearchPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (bits, ops) = self.cell.to_full_frame();
        write!(f, "cell=")?;
        for b in bits {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ":")?;
        for op in ops {
            write!(f, "{}", op.index())?;
        }
        write!(f, " hw={}", self.hw)
    }
}

impl FromStr for SearchPoint {
    type Err = PointParseError;

    /// Parses the text encoding. The cell comes back in the raw 7-node frame;
    /// run [`validate_cell`] to prune it.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let (cell_part, hw_part) = match (parts.next(), parts.next(), parts.next()) {
            (Some(c), Some(h), None) => (c, h),
            _ => return Err(PointParseError::Syntax(String::from("expected `cell=... hw=...`"))),
        };
        let cell_text = cell_part
            .strip_prefix("cell=")
            .ok_or_else(|| PointParseError::Syntax(String::from("missing `cell=` prefix")))?;
        let hw_text =
            hw_part.strip_prefix("hw=").ok_or_else(|| PointParseError::Syntax(String::from("missing `hw=` prefix")))?;
        let (bits, ops) = cell_text
            .split_once(':')
            .ok_or_else(|| PointParseError::Cell(String::from("missing `:` between edges and ops")))?;
        if bits.len() != MAX_EDGE_SLOTS || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(PointParseError::Cell(format!("edge bitstring must be {MAX_EDGE_SLOTS} binary digits")));
        }
        if ops.len() != MAX_OPS || !ops.bytes().all(|b| (b'0'..=b'2').contains(&b)) {
            return Err(PointParseError::Cell(format!("op string must be {MAX_OPS} digits in 0..=2")));
        }
        let mask = bits.bytes().enumerate().fold(0u32, |m, (k, b)| m | (((b - b'0') as u32) << k));
        let ops: Vec<CellOp> = ops.bytes().map(|b| CellOp::from_index(b - b'0').expect("checked digit")).collect();
        let cell = CellSpec::from_edge_mask(MAX_NODES, mask, &ops).map_err(|e| PointParseError::Cell(format!("{e}")))?;
        Ok(SearchPoint { cell, hw: hw_text.parse()? })
    }
}
