use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{action_entropy, Backend};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateActionCount {
    pub hour: usize,
    /// MW
    pub demand: f64,
    pub action: usize,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRewardCount {
    pub hour: usize,
    /// MW
    pub demand: f64,
    /// Bucket center, USD.
    pub reward: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentFrequencies {
    pub state_action: Vec<StateActionCount>,
    pub state_reward: Vec<StateRewardCount>,
    /// Entropy of the agent's action distribution over all visits, nats.
    pub action_entropy: f64,
}

impl AgentFrequencies {
    pub fn visits(&self) -> u64 {
        self.state_action.iter().map(|c| c.count).sum()
    }
}

/// Accumulates per-agent visit counts during training.
#[derive(Debug, Clone)]
pub struct FrequencyRecorder {
    n_actions: usize,
    reward_bin: f64,
    demand: Vec<f64>,
    actions: Vec<BTreeMap<(usize, usize), u64>>,
    rewards: Vec<BTreeMap<(usize, i64), u64>>,
}

impl FrequencyRecorder {
    pub fn new(n_agents: usize, n_actions: usize, reward_bin: f64, hourly_demand: &[f64]) -> Self {
        Self {
            n_actions,
            reward_bin,
            demand: hourly_demand.to_vec(),
            actions: vec![BTreeMap::new(); n_agents],
            rewards: vec![BTreeMap::new(); n_agents],
        }
    }

    pub fn record(&mut self, agent: usize, hour: usize, action: usize, reward: f64) {
        *self.actions[agent].entry((hour, action)).or_default() += 1;
        let bin = (reward / self.reward_bin).round() as i64;
        *self.rewards[agent].entry((hour, bin)).or_default() += 1;
    }

    pub fn finish(&self) -> Result<Vec<AgentFrequencies>> {
        self.actions
            .iter()
            .zip(&self.rewards)
            .map(|(actions, rewards)| {
                let mut per_action = vec![0u64; self.n_actions];
                for (&(_, a), &c) in actions {
                    per_action[a] += c;
                }
                let action_entropy = if per_action.iter().any(|&c| c > 0) {
                    action_entropy(&per_action)?
                } else {
                    0.0
                };
                Ok(AgentFrequencies {
                    state_action: actions
                        .iter()
                        .map(|(&(hour, action), &count)| StateActionCount {
                            hour,
                            demand: self.demand[hour],
                            action,
                            count,
                        })
                        .collect(),
                    state_reward: rewards
                        .iter()
                        .map(|(&(hour, bin), &count)| StateRewardCount {
                            hour,
                            demand: self.demand[hour],
                            reward: bin as f64 * self.reward_bin,
                            count,
                        })
                        .collect(),
                    action_entropy,
                })
            })
            .collect()
    }
}

/// One row of the per-episode training history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    /// Daily reward of each agent, USD.
    pub rewards: Vec<f64>,
    pub total: f64,
    /// Total reward of the greedy day played after this episode, USD.
    pub greedy_total: f64,
    pub epsilon: f64,
}

/// Wall-clock measurements; these vary between runs and are kept apart
/// from the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Mean seconds per Q-network forward pass during greedy evaluation.
    pub forward_pass_seconds: f64,
    /// Mean seconds per training episode.
    pub episode_seconds: f64,
    pub total_seconds: f64,
}

/// Outcome of one training run, plus the truthful-bidding baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub backend: Backend,
    pub seed: u64,
    pub dataset_name: String,
    pub dataset_fingerprint: String,
    pub converged: bool,
    /// Episodes trained before stopping (converged or not).
    pub episodes_to_converge: usize,
    pub valley_hour: usize,
    pub peak_hour: usize,
    /// Strategic-bid clearing price at the valley hour, USD/MWh.
    pub mc_s_valley: f64,
    /// Strategic-bid clearing price at the peak hour, USD/MWh.
    pub mc_s_peak: f64,
    /// Strategic-bid total daily reward of all agents, USD.
    pub r_s: f64,
    pub mc_a_valley: f64,
    pub mc_a_peak: f64,
    pub r_a: f64,
    /// Greedy action of each agent at each hour, `[agent][hour]`.
    pub equilibrium_actions: Vec<Vec<usize>>,
    /// Bid price of every action, `[agent][action]`, USD/MWh.
    pub action_prices: Vec<Vec<f64>>,
    pub reward_bin_usd: f64,
    pub agents: Vec<AgentFrequencies>,
}

impl EquilibriumReport {
    pub fn mean_action_entropy(&self) -> f64 {
        if self.agents.is_empty() {
            return 0.0;
        }
        self.agents.iter().map(|a| a.action_entropy).sum::<f64>() / self.agents.len() as f64
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
