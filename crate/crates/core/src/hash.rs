//! Isomorphism-invariant cell identity and exact enumeration of the cell space.
//!
//! Node colors are refined Weisfeiler-Leman style (seed color = in-degree,
//! out-degree, label; each round folds in the sorted colors of predecessors
//! and successors). Nodes are then ordered by final color, and remaining ties
//! inside a color class are broken by trying every permutation of the class
//! and keeping the smallest encoding. At most five nodes can share a class,
//! so the canonical form is exact and cheap.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use sha2::{Digest, Sha256};

use crate::space::{CellOp, CellSpec, MAX_NODES};

/// 128-bit isomorphism-invariant digest of a valid cell.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellDigest(pub [u8; 16]);

impl fmt::Display for CellDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CellDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellDigest({self})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("digest must be 32 hex characters")]
pub struct DigestParseError;

impl FromStr for CellDigest {
    type Err = DigestParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 32 {
            return Err(DigestParseError);
        }
        let nibble = |c: u8| -> Result<u8, DigestParseError> {
            match c {
                b'0'..=b'9' => Ok(c - b'0'),
                b'a'..=b'f' => Ok(c - b'a' + 10),
                b'A'..=b'F' => Ok(c - b'A' + 10),
                _ => Err(DigestParseError),
            }
        };
        let mut out = [0u8; 16];
        for (k, byte) in out.iter_mut().enumerate() {
            *byte = (nibble(bytes[2 * k])? << 4) | nibble(bytes[2 * k + 1])?;
        }
        Ok(CellDigest(out))
    }
}

const INPUT_LABEL: u8 = 3;
const OUTPUT_LABEL: u8 = 4;

fn label(cell: &CellSpec, node: usize) -> u8 {
    if node == 0 {
        INPUT_LABEL
    } else if node + 1 == cell.num_nodes() {
        OUTPUT_LABEL
    } else {
        cell.op(node).map(CellOp::index).unwrap_or(0)
    }
}

fn mix(mut h: u64, v: u64) -> u64 {
    // splitmix64 finalizer over the running state
    h ^= v.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

fn refine_colors(cell: &CellSpec) -> [u64; MAX_NODES] {
    let n = cell.num_nodes();
    let mut colors = [0u64; MAX_NODES];
    let mut preds = [0u8; MAX_NODES];
    for v in 0..n {
        preds[v] = cell.in_mask(v);
        let seed = mix(mix(mix(0, preds[v].count_ones() as u64), cell.out_mask(v).count_ones() as u64), label(cell, v) as u64);
        colors[v] = seed;
    }
    let mut scratch = [0u64; MAX_NODES];
    for _ in 0..n {
        let mut next = [0u64; MAX_NODES];
        for v in 0..n {
            let mut h = mix(colors[v], 0x11);
            let mut len = 0;
            for u in 0..n {
                if preds[v] & (1 << u) != 0 {
                    scratch[len] = colors[u];
                    len += 1;
                }
            }
            scratch[..len].sort_unstable();
            for &c in &scratch[..len] {
                h = mix(h, c);
            }
            h = mix(h, 0x22);
            len = 0;
            for w in 0..n {
                if cell.out_mask(v) & (1 << w) != 0 {
                    scratch[len] = colors[w];
                    len += 1;
                }
            }
            scratch[..len].sort_unstable();
            for &c in &scratch[..len] {
                h = mix(h, c);
            }
            next[v] = h;
        }
        colors = next;
    }
    colors
}

fn encode_order(cell: &CellSpec, order: &[usize]) -> u128 {
    let n = cell.num_nodes();
    let mut key = n as u128;
    for &v in order {
        key = (key << 3) | label(cell, v) as u128;
    }
    for &v in order {
        for &w in order {
            key = (key << 1) | cell.has_edge(v, w) as u128;
        }
    }
    key
}

struct Best {
    key: u128,
    order: [usize; MAX_NODES],
}

fn permute_classes(cell: &CellSpec, order: &mut [usize], classes: &[(usize, usize)], best: &mut Best) {
    match classes.split_first() {
        None => {
            let key = encode_order(cell, order);
            if key < best.key {
                best.key = key;
                best.order[..order.len()].copy_from_slice(order);
            }
        }
        Some((&(start, end), rest)) => {
            if end - start == 1 {
                permute_classes(cell, order, rest, best);
                return;
            }
            // Heap's algorithm over order[start..end]
            let len = end - start;
            let mut counters = [0usize; MAX_NODES];
            permute_classes(cell, order, rest, best);
            let mut i = 0;
            while i < len {
                if counters[i] < i {
                    if i % 2 == 0 {
                        order.swap(start, start + i);
                    } else {
                        order.swap(start + counters[i], start + i);
                    }
                    permute_classes(cell, order, rest, best);
                    counters[i] += 1;
                    i = 0;
                } else {
                    counters[i] = 0;
                    i += 1;
                }
            }
        }
    }
}

fn canonical_order(cell: &CellSpec) -> Best {
    let n = cell.num_nodes();
    let colors = refine_colors(cell);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (colors[v], v));
    let mut classes: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || colors[order[k]] != colors[order[start]] {
            classes.push((start, k));
            start = k;
        }
    }
    let mut best = Best { key: u128::MAX, order: [0; MAX_NODES] };
    permute_classes(cell, &mut order, &classes, &mut best);
    best
}

/// Canonical 128-bit key of a cell: equal for two cells iff they are
/// isomorphic (relabeling nodes while keeping op labels, INPUT and OUTPUT).
/// The cell should already be pruned.
pub fn canonical_key(cell: &CellSpec) -> u128 {
    canonical_order(cell).key
}

/// The representative labeling of a pruned cell's isomorphism class:
/// isomorphic cells map to identical specs. Nodes are numbered by a
/// topological sort that breaks ties by canonical position.
pub fn canonical_cell(cell: &CellSpec) -> CellSpec {
    let n = cell.num_nodes();
    let best = canonical_order(cell);
    let order = &best.order[..n];
    let mut placed = [false; MAX_NODES];
    let mut new_index = [0usize; MAX_NODES];
    for next in 0..n {
        // lowest canonical position whose predecessors are all placed
        let pos = (0..n)
            .find(|&p| !placed[p] && (0..n).all(|q| placed[q] || !cell.has_edge(order[q], order[p])))
            .expect("pruned cells are acyclic");
        placed[pos] = true;
        new_index[order[pos]] = next;
    }
    let edges: Vec<(usize, usize)> = cell.edges().map(|(i, j)| (new_index[i], new_index[j])).collect();
    let mut ops = [CellOp::Conv3x3; MAX_NODES];
    for v in 1..n.saturating_sub(1) {
        ops[new_index[v]] = cell.op(v).expect("intermediate node");
    }
    CellSpec::from_edges(n, &edges, &ops[1..n.saturating_sub(1)]).expect("relabeling keeps validity")
}

/// Digest of a valid (pruned) cell, stable across runs and platforms.
pub fn cell_hash(cell: &CellSpec) -> CellDigest {
    let key = canonical_key(cell);
    let mut hasher = Sha256::new();
    hasher.update(b"codesign-cell-v1");
    hasher.update(key.to_be_bytes());
    let full = hasher.finalize();
    let mut out = [0u8; 16];
    out.copy_from_slice(&full[..16]);
    CellDigest(out)
}

/// Streams one representative of every isomorphism class of valid cells with
/// at most `max_nodes` nodes and `max_edges` edges.
///
/// Representatives are fully live cells (nothing to prune) and are produced
/// in order of node count, then edge mask, then op labeling; the first member
/// of each class met in that order is the one yielded.
pub fn enumerate_cells(max_nodes: usize, max_edges: usize) -> CellEnumerator {
    assert!((2..=MAX_NODES).contains(&max_nodes), "max_nodes must be in 2..=7");
    CellEnumerator {
        max_nodes,
        max_edges,
        nodes: 2,
        mask: 0,
        labeling: 0,
        structure_ok: false,
        seen: BTreeSet::new(),
    }
}

pub struct CellEnumerator {
    max_nodes: usize,
    max_edges: usize,
    nodes: usize,
    mask: u64,
    labeling: u32,
    structure_ok: bool,
    seen: BTreeSet<u128>,
}

impl CellEnumerator {
    fn labelings(&self) -> u32 {
        3u32.pow((self.nodes - 2) as u32)
    }

    fn advance_structure(&mut self) -> bool {
        loop {
            let slots = self.nodes * (self.nodes - 1) / 2;
            self.mask += 1;
            if self.mask >= 1u64 << slots {
                self.nodes += 1;
                if self.nodes > self.max_nodes {
                    return false;
                }
                self.mask = 0;
                continue;
            }
            if self.mask.count_ones() as usize > self.max_edges {
                continue;
            }
            let cell = CellSpec::from_edge_mask(self.nodes, self.mask as u32, &[CellOp::Conv3x3; 5][..self.nodes - 2])
                .expect("in-range mask");
            if cell.live_mask().count_ones() as usize == self.nodes {
                self.labeling = 0;
                return true;
            }
        }
    }
}

impl Iterator for CellEnumerator {
    type Item = CellSpec;

    fn next(&mut self) -> Option<CellSpec> {
        loop {
            if !self.structure_ok || self.labeling >= self.labelings() {
                if self.nodes > self.max_nodes || !self.advance_structure() {
                    self.nodes = self.max_nodes + 1;
                    return None;
                }
                self.structure_ok = true;
            }
            let mut ops = [CellOp::Conv3x3; 5];
            let mut code = self.labeling;
            for op in ops.iter_mut().take(self.nodes - 2) {
                *op = CellOp::from_index((code % 3) as u8).expect("digit");
                code /= 3;
            }
            self.labeling += 1;
            let cell = CellSpec::from_edge_mask(self.nodes, self.mask as u32, &ops[..self.nodes - 2])
                .expect("in-range mask");
            if self.seen.insert(canonical_key(&cell)) {
                return Some(cell);
            }
        }
    }
}
