use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{EpisodeRecord, EquilibriumReport, FrequencyRecorder, Timing};
use super::{
    check_convergence, select_action, Backend, ConvergenceSignal, ReplayBuffer, TrainerConfig,
    Transition,
};
use crate::error::Result;
use crate::hybridnet::{
    adam_step, loss_and_gradients, sync_target, AdamState, HybridQNet, MlpQNet, QNetwork,
};
use crate::market::{
    actual_cost_day, daily_metrics, env_step, ClearingResult, MarketDataset, MarketState, HOURS,
    PEAK_HOUR, VALLEY_HOUR,
};

/// Observation fed to every agent: `(hour / 23, demand / max demand)`.
pub fn state_features(state: &MarketState, max_demand: f64) -> Vec<f64> {
    vec![
        state.hour as f64 / (HOURS - 1) as f64,
        state.demand / max_demand,
    ]
}

/// One independent learner: online and target networks, optimizer and replay.
#[derive(Debug, Clone)]
pub struct Agent<N> {
    pub net: N,
    pub target: N,
    pub optimizer: AdamState,
    pub buffer: ReplayBuffer,
    /// Multiplies USD rewards before they enter the loss.
    pub reward_scale: f64,
}

impl<N: QNetwork> Agent<N> {
    pub fn new(net: N, config: &TrainerConfig, reward_scale: f64) -> Result<Self> {
        let optimizer = AdamState::new(net.param_count(), config.learning_rate);
        Ok(Self {
            target: net.clone(),
            net,
            optimizer,
            buffer: ReplayBuffer::new(config.replay_capacity)?,
            reward_scale,
        })
    }

    /// One Adam step on a freshly sampled batch; returns the batch loss.
    pub fn learn<R: Rng + ?Sized>(
        &mut self,
        batch_size: usize,
        gamma: f64,
        rng: &mut R,
    ) -> Result<f64> {
        let batch: Vec<Transition> = self
            .buffer
            .sample(batch_size, rng)?
            .into_iter()
            .map(|t| Transition {
                reward: t.reward * self.reward_scale,
                ..t.clone()
            })
            .collect();
        let (loss, grad) = loss_and_gradients(&batch, &self.net, &self.target, gamma)?;
        let mut params = self.net.params();
        adam_step(&mut params, &grad, &mut self.optimizer)?;
        self.net.set_params(&params)?;
        Ok(loss)
    }

    pub fn sync_target(&mut self) {
        sync_target(&self.net, &mut self.target);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOptions {
    pub epsilon: f64,
    /// Store transitions and take gradient steps.
    pub learn: bool,
}

/// Frozen networks, no exploration: consumes no randomness.
pub const GREEDY: EpisodeOptions = EpisodeOptions {
    epsilon: 0.0,
    learn: false,
};

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    /// Sum of each agent's 24 hourly rewards, USD.
    pub rewards: Vec<f64>,
    /// `[hour][agent]`
    pub actions: Vec<Vec<usize>>,
    pub clearings: Vec<ClearingResult>,
}

/// Plays one 24-hour day. With `learn` set, every agent stores its
/// transition each hour and then takes one gradient step once its buffer
/// holds a full batch.
pub fn train_episode<N: QNetwork, R: Rng + ?Sized>(
    dataset: &MarketDataset,
    agents: &mut [Agent<N>],
    config: &TrainerConfig,
    options: EpisodeOptions,
    rng: &mut R,
    mut recorder: Option<&mut FrequencyRecorder>,
) -> Result<EpisodeResult> {
    let max_demand = dataset.profile().max_demand();
    let mut state = MarketState::at_hour(dataset, 0)?;
    let mut rewards = vec![0.0; agents.len()];
    let mut actions = Vec::with_capacity(HOURS);
    let mut clearings = Vec::with_capacity(HOURS);
    for _ in 0..HOURS {
        let features = state_features(&state, max_demand);
        let joint = agents
            .iter()
            .map(|agent| select_action(&agent.net.forward(&features)?, options.epsilon, rng))
            .collect::<Result<Vec<_>>>()?;
        let outcome = env_step(&state, &joint, dataset)?;
        let next_features = state_features(&outcome.next, max_demand);
        for (i, agent) in agents.iter_mut().enumerate() {
            let reward = outcome.rewards[i];
            rewards[i] += reward;
            if let Some(rec) = recorder.as_deref_mut() {
                rec.record(i, state.hour, joint[i], reward);
            }
            if options.learn {
                agent.buffer.push(Transition {
                    state: features.clone(),
                    action: joint[i],
                    reward,
                    next_state: next_features.clone(),
                    done: outcome.done,
                });
            }
        }
        if options.learn {
            for agent in agents.iter_mut() {
                if agent.buffer.len() >= config.batch_size {
                    agent.learn(config.batch_size, config.gamma, rng)?;
                }
            }
        }
        actions.push(joint);
        clearings.push(outcome.clearing);
        state = outcome.next;
    }
    Ok(EpisodeResult {
        rewards,
        actions,
        clearings,
    })
}

/// Report, per-episode history and wall-clock timing of one run.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: EquilibriumReport,
    pub history: Vec<EpisodeRecord>,
    pub timing: Timing,
}

/// Trains all agents until the total daily reward settles (or the episode
/// budget runs out), then plays one greedy day to read off the equilibrium.
pub fn run_experiment(
    config: &TrainerConfig,
    dataset: &MarketDataset,
) -> Result<ExperimentOutcome> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_actions = dataset.n_actions();
    let scales: Vec<f64> = dataset
        .gencos()
        .iter()
        .map(|g| 1.0 / (config.reward_unit_price * g.capacity))
        .collect();
    match config.backend {
        Backend::Mlp => {
            let agents = scales
                .iter()
                .map(|&s| {
                    Agent::new(
                        MlpQNet::new(2, config.hidden_width, n_actions, &mut rng),
                        config,
                        s,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            run_with(agents, config, dataset, &mut rng)
        }
        Backend::Hybrid => {
            let agents = scales
                .iter()
                .map(|&s| {
                    let net = HybridQNet::new(
                        2,
                        config.hidden_width,
                        config.vqc.n_qubits,
                        config.vqc.depth,
                        n_actions,
                        &mut rng,
                    )?
                    .with_gradient_method(config.vqc.gradient);
                    Agent::new(net, config, s)
                })
                .collect::<Result<Vec<_>>>()?;
            run_with(agents, config, dataset, &mut rng)
        }
    }
}

fn run_with<N: QNetwork>(
    mut agents: Vec<Agent<N>>,
    config: &TrainerConfig,
    dataset: &MarketDataset,
    rng: &mut ChaCha8Rng,
) -> Result<ExperimentOutcome> {
    let started = Instant::now();
    let mut recorder = FrequencyRecorder::new(
        agents.len(),
        dataset.n_actions(),
        config.reward_bin_usd,
        dataset.profile().hourly_demand(),
    );
    let mut history = Vec::new();
    let mut totals = Vec::new();
    let mut converged = false;
    for episode in 0..config.max_episodes {
        let epsilon = config.epsilon(episode);
        let result = train_episode(
            dataset,
            &mut agents,
            config,
            EpisodeOptions {
                epsilon,
                learn: true,
            },
            rng,
            Some(&mut recorder),
        )?;
        let total: f64 = result.rewards.iter().sum();
        let greedy = train_episode(dataset, &mut agents, config, GREEDY, rng, None)?;
        let greedy_total: f64 = greedy.rewards.iter().sum();
        totals.push(match config.convergence_signal {
            ConvergenceSignal::Greedy => greedy_total,
            ConvergenceSignal::Training => total,
        });
        history.push(EpisodeRecord {
            episode,
            rewards: result.rewards,
            total,
            greedy_total,
            epsilon,
        });
        if (episode + 1) % config.target_sync_episodes == 0 {
            agents.iter_mut().for_each(Agent::sync_target);
        }
        if episode + 1 >= config.min_episodes
            && check_convergence(
                &totals,
                config.convergence_window,
                config.convergence_threshold,
            )
        {
            converged = true;
            break;
        }
    }
    let training_seconds = started.elapsed().as_secs_f64();

    let eval_started = Instant::now();
    let greedy = train_episode(dataset, &mut agents, config, GREEDY, rng, None)?;
    let forward_pass_seconds = eval_started.elapsed().as_secs_f64() / (HOURS * agents.len()) as f64;
    let strategic = daily_metrics(&greedy.clearings)?;
    let truthful = daily_metrics(&actual_cost_day(dataset)?)?;

    let equilibrium_actions = (0..agents.len())
        .map(|i| greedy.actions.iter().map(|hour| hour[i]).collect())
        .collect();
    let report = EquilibriumReport {
        backend: config.backend,
        seed: config.seed,
        dataset_name: dataset.name().to_string(),
        dataset_fingerprint: dataset.fingerprint(),
        converged,
        episodes_to_converge: history.len(),
        valley_hour: VALLEY_HOUR,
        peak_hour: PEAK_HOUR,
        mc_s_valley: strategic.mc_valley,
        mc_s_peak: strategic.mc_peak,
        r_s: strategic.total_reward,
        mc_a_valley: truthful.mc_valley,
        mc_a_peak: truthful.mc_peak,
        r_a: truthful.total_reward,
        equilibrium_actions,
        action_prices: dataset.action_prices(),
        reward_bin_usd: config.reward_bin_usd,
        agents: recorder.finish()?,
    };
    let timing = Timing {
        forward_pass_seconds,
        episode_seconds: training_seconds / history.len().max(1) as f64,
        total_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(ExperimentOutcome {
        report,
        history,
        timing,
    })
}
