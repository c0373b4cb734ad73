//! Autoregressive LSTM controller trained with REINFORCE.
//!
//! One LSTM cell is unrolled once per decision. The first step reads a
//! learned start embedding, later steps read the embedding of the previous
//! decision's choice. Each decision has its own linear head over the hidden
//! state; heads start at zero, so a fresh policy is uniform.
//!
//! Parameters live in one flat vector so updates, finiteness checks and
//! checkpoints are plain slice operations.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerConfig {
    pub hidden: usize,
    pub embedding: usize,
    pub learning_rate: f64,
    pub baseline_decay: f64,
    pub entropy_weight: f64,
    /// Half-width of the uniform initialization of LSTM weights and embeddings.
    pub init_scale: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            hidden: 64,
            embedding: 16,
            learning_rate: 0.01,
            baseline_decay: 0.95,
            entropy_weight: 0.0,
            init_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PolicyError {
    #[error("non-finite gradient or parameter after update {step}; lower the learning rate")]
    NonFiniteGradient { step: u64 },
    #[error("reward {0} is not finite")]
    NonFiniteReward(f64),
    #[error("parameter vector has {got} entries, this shape needs {expected}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// A sampled decision vector with the log-probability of each choice.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub choices: Vec<u8>,
    pub log_probs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
struct Layout {
    start: usize,
    /// Offset of each decision's embedding rows.
    emb: Vec<usize>,
    lstm_w: usize,
    lstm_b: usize,
    /// Offset of each decision's head (weights then bias).
    head: Vec<usize>,
    len: usize,
}

impl Layout {
    fn new(options: &[u8], e: usize, h: usize) -> Self {
        let mut at = 0;
        let start = at;
        at += e;
        let emb = options
            .iter()
            .map(|&n| {
                let o = at;
                at += n as usize * e;
                o
            })
            .collect();
        let lstm_w = at;
        at += 4 * h * (e + h);
        let lstm_b = at;
        at += 4 * h;
        let head = options
            .iter()
            .map(|&n| {
                let o = at;
                at += n as usize * (h + 1);
                o
            })
            .collect();
        Layout { start, emb, lstm_w, lstm_b, head, len: at }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    options: Vec<u8>,
    config: ControllerConfig,
    layout: Layout,
    params: Vec<f64>,
    baseline: f64,
    steps: u64,
}

/// Activations of one teacher-forced pass, kept for backpropagation.
struct Forward {
    /// Input offset into the parameter vector for each step.
    x_at: Vec<usize>,
    /// Hidden and cell states, `D + 1` rows of `H`; row 0 is the zero state.
    h: Vec<f64>,
    c: Vec<f64>,
    /// Post-activation gates (i, f, g, o), `D` rows of `4H`.
    gates: Vec<f64>,
    tanh_c: Vec<f64>,
    /// Softmax of each head, concatenated.
    probs: Vec<f64>,
    prob_at: Vec<usize>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += a * x`
fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += a * x;
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

fn softmax_into(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for l in logits.iter_mut() {
        *l = libm::exp(*l - max);
        sum += *l;
    }
    for l in logits.iter_mut() {
        *l /= sum;
    }
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&q| q > 0.0).map(|&q| q * libm::log(q)).sum::<f64>()
}

impl Policy {
    /// Fresh policy for decisions with the given option counts. `seed` only
    /// drives initialization.
    pub fn new(options: &[u8], config: ControllerConfig, seed: u64) -> Self {
        let (e, h) = (config.embedding, config.hidden);
        let layout = Layout::new(options, e, h);
        let mut params = vec![0.0; layout.len];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = config.init_scale;
        // embeddings and LSTM weights are contiguous; biases and heads stay zero
        for p in &mut params[..layout.lstm_b] {
            *p = if s > 0.0 { rng.gen_range(-s..s) } else { 0.0 };
        }
        Policy { options: options.to_vec(), config, layout, params, baseline: 0.0, steps: 0 }
    }

    /// Rebuilds a policy from checkpointed parts.
    pub fn from_parts(
        options: &[u8],
        config: ControllerConfig,
        params: Vec<f64>,
        baseline: f64,
        steps: u64,
    ) -> Result<Self, PolicyError> {
        let layout = Layout::new(options, config.embedding, config.hidden);
        if params.len() != layout.len {
            return Err(PolicyError::ShapeMismatch { expected: layout.len, got: params.len() });
        }
        if params.iter().any(|p| !p.is_finite()) || !baseline.is_finite() {
            return Err(PolicyError::NonFiniteGradient { step: steps });
        }
        Ok(Policy { options: options.to_vec(), config, layout, params, baseline, steps })
    }

    pub fn options(&self) -> &[u8] {
        &self.options
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Mutable parameter access, for finite-difference checks.
    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn embedding_at(&self, d: usize, choice: u8) -> usize {
        self.layout.emb[d] + choice as usize * self.config.embedding
    }

    /// One LSTM step plus head `d`; writes row `d` of the caches.
    fn step(&self, fw: &mut Forward, d: usize, x_at: usize) {
        let (e, h) = (self.config.embedding, self.config.hidden);
        let p = &self.params;
        let x = &p[x_at..x_at + e];
        let (h_prev, h_rest) = fw.h.split_at_mut((d + 1) * h);
        let h_prev = &h_prev[d * h..];
        let (c_prev, c_rest) = fw.c.split_at_mut((d + 1) * h);
        let c_prev = &c_prev[d * h..];
        let gates = &mut fw.gates[d * 4 * h..(d + 1) * 4 * h];
        let w = &p[self.layout.lstm_w..self.layout.lstm_b];
        let b = &p[self.layout.lstm_b..self.layout.lstm_b + 4 * h];
        for (r, row) in w.chunks_exact(e + h).enumerate() {
            let z = b[r] + dot(&row[..e], x) + dot(&row[e..], h_prev);
            gates[r] = if (2 * h..3 * h).contains(&r) { libm::tanh(z) } else { sigmoid(z) };
        }
        let h_next = &mut h_rest[..h];
        let c_next = &mut c_rest[..h];
        let tanh_c = &mut fw.tanh_c[d * h..(d + 1) * h];
        for k in 0..h {
            let (i, f, g, o) = (gates[k], gates[h + k], gates[2 * h + k], gates[3 * h + k]);
            c_next[k] = f * c_prev[k] + i * g;
            tanh_c[k] = libm::tanh(c_next[k]);
            h_next[k] = o * tanh_c[k];
        }
        let n = self.options[d] as usize;
        let head = self.layout.head[d];
        let at = fw.prob_at[d];
        for j in 0..n {
            let row = &p[head + j * h..head + (j + 1) * h];
            fw.probs[at + j] = p[head + n * h + j] + dot(row, h_next);
        }
        softmax_into(&mut fw.probs[at..at + n]);
        fw.x_at[d] = x_at;
    }

    fn empty_forward(&self) -> Forward {
        let d = self.options.len();
        let h = self.config.hidden;
        let mut prob_at = Vec::with_capacity(d);
        let mut total = 0;
        for &n in &self.options {
            prob_at.push(total);
            total += n as usize;
        }
        Forward {
            x_at: vec![0; d],
            h: vec![0.0; (d + 1) * h],
            c: vec![0.0; (d + 1) * h],
            gates: vec![0.0; d * 4 * h],
            tanh_c: vec![0.0; d * h],
            probs: vec![0.0; total],
            prob_at,
        }
    }

    fn forward(&self, choices: &[u8]) -> Forward {
        assert_eq!(choices.len(), self.options.len(), "decision vector length");
        let mut fw = self.empty_forward();
        for d in 0..choices.len() {
            let x_at = if d == 0 { self.layout.start } else { self.embedding_at(d - 1, choices[d - 1]) };
            self.step(&mut fw, d, x_at);
        }
        fw
    }

    /// Draws one decision vector. Consumes one uniform variate per decision.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        let mut fw = self.empty_forward();
        let mut choices = Vec::with_capacity(self.options.len());
        let mut log_probs = Vec::with_capacity(self.options.len());
        for d in 0..self.options.len() {
            let x_at = if d == 0 { self.layout.start } else { self.embedding_at(d - 1, choices[d - 1]) };
            self.step(&mut fw, d, x_at);
            let n = self.options[d] as usize;
            let probs = &fw.probs[fw.prob_at[d]..fw.prob_at[d] + n];
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (j, &q) in probs.iter().enumerate() {
                acc += q;
                if u < acc {
                    pick = j;
                    break;
                }
            }
            choices.push(pick as u8);
            log_probs.push(libm::log(probs[pick]));
        }
        Sample { choices, log_probs }
    }

    /// Per-decision softmax distributions along a given decision vector.
    pub fn distributions(&self, choices: &[u8]) -> Vec<Vec<f64>> {
        let fw = self.forward(choices);
        self.options
            .iter()
            .enumerate()
            .map(|(d, &n)| fw.probs[fw.prob_at[d]..fw.prob_at[d] + n as usize].to_vec())
            .collect()
    }

    /// `log π(choices)`, summed over decisions.
    pub fn log_prob(&self, choices: &[u8]) -> f64 {
        let fw = self.forward(choices);
        choices.iter().enumerate().map(|(d, &a)| libm::log(fw.probs[fw.prob_at[d] + a as usize])).sum()
    }

    /// The surrogate objective `advantage · log π(choices) + β · Σ entropy`
    /// whose gradient [`Policy::gradient`] returns.
    pub fn objective(&self, choices: &[u8], advantage: f64) -> f64 {
        let fw = self.forward(choices);
        let mut j = 0.0;
        for (d, &a) in choices.iter().enumerate() {
            let p = &fw.probs[fw.prob_at[d]..fw.prob_at[d] + self.options[d] as usize];
            j += advantage * libm::log(p[a as usize]) + self.config.entropy_weight * entropy(p);
        }
        j
    }

    /// Gradient of [`Policy::objective`] by backpropagation through time.
    pub fn gradient(&self, choices: &[u8], advantage: f64) -> Vec<f64> {
        let mut grad = vec![0.0; self.params.len()];
        self.accumulate_gradient(choices, advantage, 1.0, &mut grad);
        grad
    }

    fn accumulate_gradient(&self, choices: &[u8], advantage: f64, scale: f64, grad: &mut [f64]) {
        let fw = self.forward(choices);
        let (e, h) = (self.config.embedding, self.config.hidden);
        let beta = self.config.entropy_weight;
        let p = &self.params;
        let w_at = self.layout.lstm_w;
        let b_at = self.layout.lstm_b;
        let mut dh_next = vec![0.0; h];
        let mut dc_next = vec![0.0; h];
        let mut dh = vec![0.0; h];
        let mut dz = vec![0.0; 4 * h];
        let mut g_logits = Vec::new();
        for d in (0..choices.len()).rev() {
            let n = self.options[d] as usize;
            let probs = &fw.probs[fw.prob_at[d]..fw.prob_at[d] + n];
            let ent = entropy(probs);
            g_logits.clear();
            for (j, &q) in probs.iter().enumerate() {
                let onehot = if j == choices[d] as usize { 1.0 } else { 0.0 };
                let mut g = advantage * (onehot - q);
                if beta != 0.0 && q > 0.0 {
                    g -= beta * q * (libm::log(q) + ent);
                }
                g_logits.push(g * scale);
            }
            let h_t = &fw.h[(d + 1) * h..(d + 2) * h];
            let head = self.layout.head[d];
            dh.copy_from_slice(&dh_next);
            for (j, &g) in g_logits.iter().enumerate() {
                if g == 0.0 {
                    continue;
                }
                let row = head + j * h;
                axpy(&mut grad[row..row + h], g, h_t);
                axpy(&mut dh, g, &p[row..row + h]);
                grad[head + n * h + j] += g;
            }
            let gates = &fw.gates[d * 4 * h..(d + 1) * 4 * h];
            let tanh_c = &fw.tanh_c[d * h..(d + 1) * h];
            let c_prev = &fw.c[d * h..(d + 1) * h];
            for k in 0..h {
                let (i, f, g, o) = (gates[k], gates[h + k], gates[2 * h + k], gates[3 * h + k]);
                let tc = tanh_c[k];
                let dc = dc_next[k] + dh[k] * o * (1.0 - tc * tc);
                dz[k] = dc * g * i * (1.0 - i);
                dz[h + k] = dc * c_prev[k] * f * (1.0 - f);
                dz[2 * h + k] = dc * i * (1.0 - g * g);
                dz[3 * h + k] = dh[k] * tc * o * (1.0 - o);
                dc_next[k] = dc * f;
            }
            let x_at = fw.x_at[d];
            let h_prev = &fw.h[d * h..(d + 1) * h];
            dh_next.iter_mut().for_each(|v| *v = 0.0);
            for r in 0..4 * h {
                let z = dz[r];
                if z == 0.0 {
                    continue;
                }
                let row = w_at + r * (e + h);
                axpy(&mut grad[row..row + e], z, &p[x_at..x_at + e]);
                axpy(&mut grad[x_at..x_at + e], z, &p[row..row + e]);
                axpy(&mut grad[row + e..row + e + h], z, h_prev);
                axpy(&mut dh_next, z, &p[row + e..row + e + h]);
                grad[b_at + r] += z;
            }
        }
    }

    /// One REINFORCE step: ascend `(reward − baseline) · ∇ log π(choices)`,
    /// then fold `reward` into the moving-average baseline. Returns the
    /// advantage used. Parameters are left untouched on error.
    pub fn update(&mut self, choices: &[u8], reward: f64) -> Result<f64, PolicyError> {
        let adv = self.update_batch(&[(choices, reward)])?;
        Ok(adv[0])
    }

    /// Averages the gradients of several samples taken from the current
    /// parameters, applies them once, then folds the rewards into the
    /// baseline in order. Every sample's advantage uses the pre-batch baseline.
    pub fn update_batch(&mut self, batch: &[(&[u8], f64)]) -> Result<Vec<f64>, PolicyError> {
        if let Some(&(_, r)) = batch.iter().find(|(_, r)| !r.is_finite()) {
            return Err(PolicyError::NonFiniteReward(r));
        }
        if batch.is_empty() {
            return Ok(Vec::new());
        }
        let scale = 1.0 / batch.len() as f64;
        let mut grad = vec![0.0; self.params.len()];
        let mut advantages = Vec::with_capacity(batch.len());
        for &(choices, r) in batch {
            let adv = r - self.baseline;
            advantages.push(adv);
            if adv != 0.0 || self.config.entropy_weight != 0.0 {
                self.accumulate_gradient(choices, adv, scale, &mut grad);
            }
        }
        let lr = self.config.learning_rate;
        let next: Vec<f64> = self.params.iter().zip(&grad).map(|(p, g)| p + lr * g).collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(PolicyError::NonFiniteGradient { step: self.steps });
        }
        self.params = next;
        let decay = self.config.baseline_decay;
        for &(_, r) in batch {
            self.baseline = decay * self.baseline + (1.0 - decay) * r;
        }
        self.steps += batch.len() as u64;
        Ok(advantages)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ControllerConfig {
        ControllerConfig { hidden: 4, embedding: 3, init_scale: 0.5, ..ControllerConfig::default() }
    }

    #[test]
    fn fresh_policy_is_uniform() {
        let policy = Policy::new(&[2, 3, 6], ControllerConfig::default(), 1);
        for dist in policy.distributions(&[1, 2, 0]) {
            let n = dist.len() as f64;
            for q in dist {
                assert!((q - 1.0 / n).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let policy = Policy::new(&[2, 3, 6, 2], tiny(), 3);
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let s = policy.sample(&mut a);
            assert_eq!(s, policy.sample(&mut b));
            assert!(s.log_probs.iter().all(|l| l.is_finite() && *l <= 0.0));
            let total: f64 = s.log_probs.iter().sum();
            assert!((total - policy.log_prob(&s.choices)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_advantage_leaves_params() {
        let mut policy = Policy::new(&[3, 2], tiny(), 5);
        let before = policy.params().to_vec();
        policy.update(&[1, 0], 0.0).unwrap();
        assert_eq!(policy.params(), &before[..]);
    }

    #[test]
    fn positive_advantage_raises_choice() {
        let mut policy = Policy::new(&[4], tiny(), 2);
        let before = policy.distributions(&[2])[0][2];
        policy.update(&[2], 1.0).unwrap();
        assert!(policy.distributions(&[2])[0][2] > before);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let config = ControllerConfig { entropy_weight: 0.3, ..tiny() };
        let mut policy = Policy::new(&[3, 2], config, 11);
        // move heads off zero so every path carries gradient
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in policy.params_mut() {
            *p += rng.gen_range(-0.3..0.3);
        }
        let choices = [2u8, 1];
        let adv = 0.7;
        let grad = policy.gradient(&choices, adv);
        let eps = 1e-6;
        for k in 0..grad.len() {
            let orig = policy.params()[k];
            policy.params_mut()[k] = orig + eps;
            let up = policy.objective(&choices, adv);
            policy.params_mut()[k] = orig - eps;
            let down = policy.objective(&choices, adv);
            policy.params_mut()[k] = orig;
            let fd = (up - down) / (2.0 * eps);
            let tol = 1e-4 * fd.abs().max(grad[k].abs()).max(1e-3);
            assert!((fd - grad[k]).abs() <= tol, "param {k}: analytic {} fd {fd}", grad[k]);
        }
    }

    #[test]
    fn non_finite_reward_rejected() {
        let mut policy = Policy::new(&[2], tiny(), 0);
        assert!(matches!(policy.update(&[0], f64::NAN), Err(PolicyError::NonFiniteReward(_))));
        let huge = ControllerConfig { learning_rate: f64::MAX, ..tiny() };
        let mut policy = Policy::new(&[2], huge, 0);
        let before = policy.params().to_vec();
        assert!(matches!(policy.update(&[0], 1e300), Err(PolicyError::NonFiniteGradient { .. })));
        assert_eq!(policy.params(), &before[..]);
    }
}
