//! Accuracy oracles: exact lookup in a precomputed table, or a deterministic
//! synthetic surrogate driven by cell structure.

use alloc::collections::BTreeMap;

use thiserror::Error;

use crate::hash::{cell_hash, CellDigest};
use crate::space::{CellOp, CellSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccuracySource {
    Table,
    Synthetic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccuracyRecord {
    pub cell_digest: CellDigest,
    pub accuracy: f64,
    pub source: AccuracySource,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AccuracyError {
    #[error("cell {0} is not in the accuracy table")]
    NotInTable(CellDigest),
    #[error("duplicate digest {0} in accuracy table")]
    DuplicateDigest(CellDigest),
    #[error("accuracy {accuracy} for {digest} is outside [0, 1]")]
    OutOfRange { digest: CellDigest, accuracy: f64 },
}

/// Precomputed accuracies keyed by cell digest.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AccuracyTable {
    map: BTreeMap<CellDigest, f64>,
}

impl AccuracyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, digest: CellDigest, accuracy: f64) -> Result<(), AccuracyError> {
        if !(0.0..=1.0).contains(&accuracy) {
            return Err(AccuracyError::OutOfRange { digest, accuracy });
        }
        if self.map.contains_key(&digest) {
            return Err(AccuracyError::DuplicateDigest(digest));
        }
        self.map.insert(digest, accuracy);
        Ok(())
    }

    pub fn get(&self, digest: &CellDigest) -> Option<f64> {
        self.map.get(digest).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Records in digest order.
    pub fn iter(&self) -> impl Iterator<Item = (&CellDigest, &f64)> {
        self.map.iter()
    }
}

/// Constants of the synthetic surrogate
/// `σ(bias + depth·effective_depth + conv3x3·n3 + conv1x1·n1 − pool·np) + ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurrogateParams {
    pub bias: f64,
    pub depth_weight: f64,
    pub conv3x3_weight: f64,
    pub conv1x1_weight: f64,
    pub pool_weight: f64,
    /// Half-width of the uniform noise term.
    pub noise: f64,
}

impl Default for SurrogateParams {
    fn default() -> Self {
        SurrogateParams {
            bias: 1.0,
            depth_weight: 0.35,
            conv3x3_weight: 0.25,
            conv1x1_weight: 0.10,
            pool_weight: 0.15,
            noise: 0.005,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

impl SurrogateParams {
    /// Surrogate accuracy without the noise term. Assumes a pruned cell.
    pub fn noise_free(&self, cell: &CellSpec) -> f64 {
        let count = |op: CellOp| cell.ops().iter().filter(|&&o| o == op).count() as f64;
        sigmoid(
            self.bias + self.depth_weight * cell.depth() as f64 + self.conv3x3_weight * count(CellOp::Conv3x3)
                + self.conv1x1_weight * count(CellOp::Conv1x1)
                - self.pool_weight * count(CellOp::MaxPool3x3),
        )
    }

    /// Noise in `[-noise, noise)`, a pure function of the digest and seed.
    pub fn noise_term(&self, digest: &CellDigest, seed: u64) -> f64 {
        let mut h = seed ^ 0x6a09_e667_f3bc_c908;
        for chunk in digest.0.chunks(8) {
            let mut word = [0u8; 8];
            word.copy_from_slice(chunk);
            h = splitmix(h ^ u64::from_le_bytes(word));
        }
        let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
        self.noise * (2.0 * unit - 1.0)
    }

    pub fn accuracy(&self, cell: &CellSpec, digest: &CellDigest, seed: u64) -> f64 {
        (self.noise_free(cell) + self.noise_term(digest, seed)).clamp(0.0, 1.0)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Source of `acc(s)`. Accuracy depends on the cell only.
#[derive(Clone, Debug, PartialEq)]
pub enum AccuracyOracle {
    Table(AccuracyTable),
    Synthetic { params: SurrogateParams, seed: u64 },
}

impl AccuracyOracle {
    /// Accuracy of a valid, pruned cell.
    pub fn accuracy(&self, cell: &CellSpec) -> Result<AccuracyRecord, AccuracyError> {
        let digest = cell_hash(cell);
        self.accuracy_with_digest(cell, digest)
    }

    /// As [`AccuracyOracle::accuracy`] with a precomputed digest.
    pub fn accuracy_with_digest(&self, cell: &CellSpec, digest: CellDigest) -> Result<AccuracyRecord, AccuracyError> {
        match self {
            AccuracyOracle::Table(table) => table
                .get(&digest)
                .map(|accuracy| AccuracyRecord { cell_digest: digest, accuracy, source: AccuracySource::Table })
                .ok_or(AccuracyError::NotInTable(digest)),
            AccuracyOracle::Synthetic { params, seed } => Ok(AccuracyRecord {
                cell_digest: digest,
                accuracy: params.accuracy(cell, &digest, *seed),
                source: AccuracySource::Synthetic,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lookup_and_errors() {
        let a = CellSpec::identity();
        let b = CellSpec::from_edges(3, &[(0, 1), (1, 2)], &[CellOp::Conv3x3]).unwrap();
        let mut table = AccuracyTable::new();
        table.insert(cell_hash(&a), 0.91).unwrap();
        assert_eq!(table.insert(cell_hash(&a), 0.5), Err(AccuracyError::DuplicateDigest(cell_hash(&a))));
        assert!(matches!(table.insert(cell_hash(&b), 1.5), Err(AccuracyError::OutOfRange { .. })));
        let oracle = AccuracyOracle::Table(table);
        assert_eq!(oracle.accuracy(&a).unwrap().accuracy, 0.91);
        assert_eq!(oracle.accuracy(&b), Err(AccuracyError::NotInTable(cell_hash(&b))));
    }

    #[test]
    fn synthetic_is_seeded() {
        let cell = CellSpec::from_edges(3, &[(0, 1), (1, 2)], &[CellOp::Conv3x3]).unwrap();
        let oracle = AccuracyOracle::Synthetic { params: SurrogateParams::default(), seed: 7 };
        let x = oracle.accuracy(&cell).unwrap().accuracy;
        assert_eq!(x.to_bits(), oracle.accuracy(&cell).unwrap().accuracy.to_bits());
        let other = AccuracyOracle::Synthetic { params: SurrogateParams::default(), seed: 8 };
        assert_ne!(x, other.accuracy(&cell).unwrap().accuracy);
        let p = SurrogateParams::default();
        assert!((x - p.noise_free(&cell)).abs() <= p.noise);
    }
}
