//! Controller checkpoints: JSON holding every policy with the fingerprint of
//! the decision schema it was trained on, plus the sampling RNG state.

use codesign_core::{ControllerConfig, DecisionSchema, Policy, SpaceKind};
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("malformed checkpoint: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("no {0} controller in checkpoint")]
    Missing(&'static str),
    #[error("{kind} controller was trained on schema {found}, expected {expected}")]
    SchemaMismatch { kind: &'static str, found: String, expected: String },
    #[error("{kind} controller: {message}")]
    Invalid { kind: &'static str, message: String },
}

fn kind_name(kind: SpaceKind) -> &'static str {
    match kind {
        SpaceKind::Cell => "cell",
        SpaceKind::Hw => "hw",
        SpaceKind::Joint => "joint",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub kind: String,
    pub max_nodes: usize,
    pub schema_fingerprint: String,
    pub options: Vec<u8>,
    pub hidden: usize,
    pub embedding: usize,
    pub learning_rate: f64,
    pub baseline_decay: f64,
    pub entropy_weight: f64,
    pub init_scale: f64,
    pub baseline: f64,
    pub updates: u64,
    pub param_count: usize,
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RngState {
    /// The 32-byte ChaCha key as hex.
    pub seed: String,
    pub stream: u64,
    /// 68-bit word position, as a decimal string.
    pub word_pos: String,
}

impl RngState {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        RngState {
            seed: rng.get_seed().iter().map(|b| format!("{b:02x}")).collect(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos().to_string(),
        }
    }

    pub fn restore(&self) -> Option<ChaCha8Rng> {
        if self.seed.len() != 64 {
            return None;
        }
        let mut seed = [0u8; 32];
        for (k, b) in seed.iter_mut().enumerate() {
            *b = u8::from_str_radix(self.seed.get(2 * k..2 * k + 2)?, 16).ok()?;
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos.parse().ok()?);
        Some(rng)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub strategy: String,
    pub steps: u64,
    pub rng: RngState,
    pub controllers: Vec<ControllerState>,
}

impl Checkpoint {
    /// `policies` pairs each policy with the space it decides.
    pub fn new(strategy: &str, steps: u64, rng: &ChaCha8Rng, max_nodes: usize, policies: &[(SpaceKind, &Policy)]) -> Self {
        let controllers = policies
            .iter()
            .map(|&(kind, p)| {
                let c = p.config();
                ControllerState {
                    kind: kind_name(kind).to_string(),
                    max_nodes,
                    schema_fingerprint: format!("{:016x}", DecisionSchema::with_max_nodes(kind, max_nodes).fingerprint()),
                    options: p.options().to_vec(),
                    hidden: c.hidden,
                    embedding: c.embedding,
                    learning_rate: c.learning_rate,
                    baseline_decay: c.baseline_decay,
                    entropy_weight: c.entropy_weight,
                    init_scale: c.init_scale,
                    baseline: p.baseline(),
                    updates: p.steps(),
                    param_count: p.params().len(),
                    params: p.params().to_vec(),
                }
            })
            .collect();
        Checkpoint { version: CHECKPOINT_VERSION, strategy: strategy.to_string(), steps, rng: RngState::capture(rng), controllers }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, CheckpointError> {
        let c: Checkpoint = serde_json::from_str(text)?;
        if c.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version(c.version));
        }
        Ok(c)
    }

    /// The stored policy for `kind`, checked against the schema of a
    /// `max_nodes` space.
    pub fn policy(&self, kind: SpaceKind, max_nodes: usize) -> Result<Policy, CheckpointError> {
        let name = kind_name(kind);
        let s = self.controllers.iter().find(|s| s.kind == name).ok_or(CheckpointError::Missing(name))?;
        let schema = DecisionSchema::with_max_nodes(kind, max_nodes);
        let expected = format!("{:016x}", schema.fingerprint());
        if s.schema_fingerprint != expected || s.max_nodes != max_nodes || s.options != schema.option_counts() {
            return Err(CheckpointError::SchemaMismatch { kind: name, found: s.schema_fingerprint.clone(), expected });
        }
        if s.params.len() != s.param_count {
            return Err(CheckpointError::Invalid { kind: name, message: "param_count does not match params".into() });
        }
        let config = ControllerConfig {
            hidden: s.hidden,
            embedding: s.embedding,
            learning_rate: s.learning_rate,
            baseline_decay: s.baseline_decay,
            entropy_weight: s.entropy_weight,
            init_scale: s.init_scale,
        };
        Policy::from_parts(&s.options, config, s.params.clone(), s.baseline, s.updates)
            .map_err(|e| CheckpointError::Invalid { kind: name, message: e.to_string() })
    }
}
