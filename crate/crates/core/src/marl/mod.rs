//! Independent deep Q-learners bidding into the day-ahead market.

mod replay;
mod report;
mod trainer;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hybridnet::{QValues, VqcGradient};

pub use replay::{ReplayBuffer, Transition};
pub use report::{
    AgentFrequencies, EpisodeRecord, EquilibriumReport, FrequencyRecorder, StateActionCount,
    StateRewardCount, Timing,
};
pub use trainer::{
    run_experiment, state_features, train_episode, Agent, EpisodeOptions, EpisodeResult,
    ExperimentOutcome, GREEDY,
};

/// Which Q-function approximator the agents use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Classical multi-layer perceptron (MADQN).
    Mlp,
    /// Dense–VQC–dense network (Q-MADQN).
    Hybrid,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Mlp => "mlp",
            Backend::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mlp" => Ok(Backend::Mlp),
            "hybrid" => Ok(Backend::Hybrid),
            other => Err(Error::Config(format!(
                "unknown backend `{other}` (expected mlp or hybrid)"
            ))),
        }
    }
}

/// Which daily reward series the convergence test watches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvergenceSignal {
    /// Total reward of a greedy (ε = 0, no learning) day played after each
    /// training episode: a function of the current networks only.
    #[default]
    Greedy,
    /// Total reward of the exploratory training episode itself.
    Training,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VqcConfig {
    pub n_qubits: usize,
    pub depth: usize,
    pub gradient: VqcGradient,
}

impl Default for VqcConfig {
    fn default() -> Self {
        Self {
            n_qubits: 5,
            depth: 2,
            gradient: VqcGradient::Adjoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainerConfig {
    pub gamma: f64,
    pub learning_rate: f64,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Per-episode multiplicative decay of ε.
    pub eps_decay: f64,
    pub replay_capacity: usize,
    pub batch_size: usize,
    /// Target networks are refreshed after every this many episodes.
    pub target_sync_episodes: usize,
    pub max_episodes: usize,
    /// Convergence is not tested before this many episodes have run.
    pub min_episodes: usize,
    pub convergence_window: usize,
    pub convergence_threshold: f64,
    pub convergence_signal: ConvergenceSignal,
    pub hidden_width: usize,
    /// Rewards enter the loss as `reward / (reward_unit_price · capacity)`,
    /// i.e. in units of this margin (USD/MWh) earned on full capacity.
    pub reward_unit_price: f64,
    /// Width of the reward buckets in the state–reward frequency tables, USD.
    pub reward_bin_usd: f64,
    pub seed: u64,
    pub backend: Backend,
    pub vqc: VqcConfig,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            gamma: 0.9,
            learning_rate: 1e-3,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay: 0.995,
            replay_capacity: 10_000,
            batch_size: 32,
            target_sync_episodes: 10,
            max_episodes: 5000,
            min_episodes: 600,
            convergence_window: 5,
            convergence_threshold: 0.05,
            convergence_signal: ConvergenceSignal::Greedy,
            hidden_width: 32,
            reward_unit_price: 10.0,
            reward_bin_usd: 100.0,
            seed: 0,
            backend: Backend::Mlp,
            vqc: VqcConfig::default(),
        }
    }
}

impl TrainerConfig {
    /// Checks every field, naming the first one that is out of range.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::validation(field, msg));
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("trainer.gamma", format!("{} is outside [0, 1]", self.gamma));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(
                "trainer.learning_rate",
                format!("{} is not positive", self.learning_rate),
            );
        }
        if !(0.0..=1.0).contains(&self.eps_start) {
            return bad(
                "trainer.eps_start",
                format!("{} is outside [0, 1]", self.eps_start),
            );
        }
        if !(0.0 <= self.eps_end && self.eps_end <= self.eps_start) {
            return bad(
                "trainer.eps_end",
                format!("{} is outside [0, eps_start]", self.eps_end),
            );
        }
        if !(self.eps_decay > 0.0 && self.eps_decay <= 1.0) {
            return bad(
                "trainer.eps_decay",
                format!("{} is outside (0, 1]", self.eps_decay),
            );
        }
        if self.replay_capacity == 0 {
            return bad("trainer.replay_capacity", "must be positive".into());
        }
        if self.batch_size == 0 || self.batch_size > self.replay_capacity {
            return bad(
                "trainer.batch_size",
                format!("{} is outside [1, replay_capacity]", self.batch_size),
            );
        }
        if self.target_sync_episodes == 0 {
            return bad("trainer.target_sync_episodes", "must be positive".into());
        }
        if self.max_episodes == 0 {
            return bad("trainer.max_episodes", "must be positive".into());
        }
        if self.convergence_window < 2 {
            return bad(
                "trainer.convergence_window",
                format!("{} is below 2", self.convergence_window),
            );
        }
        if !(self.convergence_threshold.is_finite() && self.convergence_threshold > 0.0) {
            return bad(
                "trainer.convergence_threshold",
                format!("{} is not positive", self.convergence_threshold),
            );
        }
        if self.hidden_width == 0 {
            return bad("trainer.hidden_width", "must be positive".into());
        }
        if !(self.reward_unit_price.is_finite() && self.reward_unit_price > 0.0) {
            return bad(
                "trainer.reward_unit_price",
                format!("{} is not positive", self.reward_unit_price),
            );
        }
        if !(self.reward_bin_usd.is_finite() && self.reward_bin_usd > 0.0) {
            return bad(
                "trainer.reward_bin_usd",
                format!("{} is not positive", self.reward_bin_usd),
            );
        }
        if self.vqc.n_qubits == 0 || self.vqc.n_qubits > crate::qsim::MAX_QUBITS {
            return bad(
                "vqc.n_qubits",
                format!(
                    "{} is outside 1..={}",
                    self.vqc.n_qubits,
                    crate::qsim::MAX_QUBITS
                ),
            );
        }
        Ok(())
    }

    /// `max(ε_end, ε_start·decay^episode)`.
    pub fn epsilon(&self, episode: usize) -> f64 {
        let decayed = self.eps_start * self.eps_decay.powf(episode as f64);
        decayed.max(self.eps_end)
    }
}

/// ε-greedy choice: uniform with probability ε, otherwise the lowest-index
/// argmax. The RNG is not touched when ε is 0.
pub fn select_action<R: Rng + ?Sized>(q: &QValues, epsilon: f64, rng: &mut R) -> Result<usize> {
    if q.is_empty() {
        return Err(Error::dim("Q-values", 1, 0));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Argument(format!("epsilon {epsilon} outside [0, 1]")));
    }
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return Ok(rng.gen_range(0..q.len()));
    }
    Ok(q.argmax().expect("non-empty"))
}

/// True when each of the last `window` relative changes
/// `|R_t − R_{t−1}| / max(|R_{t−1}|, 1)` is below `threshold`.
///
/// Histories shorter than `window + 1` never count as converged.
pub fn check_convergence(history: &[f64], window: usize, threshold: f64) -> bool {
    if window == 0 || history.len() < window + 1 {
        return false;
    }
    history[history.len() - window - 1..]
        .windows(2)
        .all(|w| (w[1] - w[0]).abs() / w[0].abs().max(1.0) < threshold)
}

/// Shannon entropy in nats of the distribution given by `counts`.
pub fn action_entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Argument(
            "entropy of an empty frequency table".into(),
        ));
    }
    let total = total as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum();
    Ok(h.max(0.0))
}
