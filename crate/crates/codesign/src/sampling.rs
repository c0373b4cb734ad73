//! Seeded samples of cells, accelerators and joint points.

use std::collections::BTreeSet;

use codesign_core::hash::canonical_key;
use codesign_core::space::{enumerate_hw, HW_SPACE_SIZE};
use codesign_core::{canonical_cell, enumerate_cells, validate_cell, CellOp, CellSpec, HwConfig, SearchPoint};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// Up to this many nodes the space is small enough to enumerate and shuffle.
const ENUMERATE_UP_TO: usize = 5;

/// A uniformly drawn raw cell that survives pruning, returned pruned. Node
/// count is uniform over `2..=max_nodes`, each edge present with probability
/// one half.
pub fn random_valid_cell<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> CellSpec {
    loop {
        let n = rng.gen_range(2..=max_nodes);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(0.5) {
                    edges.push((i, j));
                }
            }
        }
        let ops: Vec<CellOp> = (0..n - 2).map(|_| CellOp::ALL[rng.gen_range(0..3)]).collect();
        let Ok(raw) = CellSpec::from_edges(n, &edges, &ops) else { continue };
        if let Ok(cell) = validate_cell(&raw) {
            if cell.edge_count() <= max_edges {
                return cell;
            }
        }
    }
}

/// `count` pairwise non-isomorphic cells in canonical form, or fewer when
/// the space is smaller. Deterministic in `seed`.
pub fn sample_cells(count: usize, max_nodes: usize, max_edges: usize, seed: u64) -> Vec<CellSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if max_nodes <= ENUMERATE_UP_TO {
        let mut all: Vec<CellSpec> = enumerate_cells(max_nodes, max_edges).collect();
        all.shuffle(&mut rng);
        all.truncate(count);
        return all;
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    let mut misses = 0usize;
    while out.len() < count && misses < 100_000 {
        let cell = random_valid_cell(&mut rng, max_nodes, max_edges);
        if seen.insert(canonical_key(&cell)) {
            out.push(canonical_cell(&cell));
            misses = 0;
        } else {
            misses += 1;
        }
    }
    out
}

/// Every accelerator in ordinal order, or a seeded subset of `count` of them
/// kept in ordinal order.
pub fn sample_hw(count: Option<usize>, seed: u64) -> Vec<HwConfig> {
    match count {
        Some(n) if n < HW_SPACE_SIZE => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, HW_SPACE_SIZE, n).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|o| HwConfig::from_ordinal(o).expect("in range")).collect()
        }
        _ => enumerate_hw().collect(),
    }
}

pub fn random_points(count: usize, max_nodes: usize, max_edges: usize, seed: u64) -> Vec<SearchPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let cell = random_valid_cell(&mut rng, max_nodes, max_edges);
            let hw = HwConfig::from_ordinal(rng.gen_range(0..HW_SPACE_SIZE)).expect("in range");
            SearchPoint::new(cell, hw)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_distinct_valid_and_seeded() {
        for max_nodes in [4, 7] {
            let a = sample_cells(60, max_nodes, 9, 1);
            assert_eq!(a.len(), 60);
            let keys: BTreeSet<u128> = a.iter().map(canonical_key).collect();
            assert_eq!(keys.len(), 60);
            assert!(a.iter().all(|c| validate_cell(c).as_ref() == Ok(c) && c.num_nodes() <= max_nodes));
            assert_eq!(a, sample_cells(60, max_nodes, 9, 1));
            assert_ne!(a, sample_cells(60, max_nodes, 9, 2));
        }
    }

    #[test]
    fn small_spaces_cap_the_sample() {
        let all = enumerate_cells(3, 9).count();
        assert_eq!(sample_cells(1000, 3, 9, 0).len(), all);
        assert!(sample_cells(0, 7, 9, 0).is_empty());
    }

    #[test]
    fn hw_subsets() {
        assert_eq!(sample_hw(None, 0).len(), HW_SPACE_SIZE);
        let s = sample_hw(Some(50), 3);
        assert_eq!(s.len(), 50);
        assert!(s.windows(2).all(|w| w[0].ordinal() < w[1].ordinal()));
    }
}
