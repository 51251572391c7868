//! Day-ahead market environment: generators, hourly demand, price bids and
//! single-bus uniform-price clearing.

mod clearing;
mod dataset;

pub use clearing::{clear_uniform_price, ClearingResult};
pub use dataset::{GencoSpec, LoadProfile, MarketDataset};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hours in one episode.
pub const HOURS: usize = 24;
/// Hour whose clearing price is reported as the off-peak marginal cost.
pub const VALLEY_HOUR: usize = 6;
/// Hour whose clearing price is reported as the peak marginal cost.
pub const PEAK_HOUR: usize = 18;

/// A price-quantity offer from one generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    pub genco: usize,
    /// USD/MWh
    pub price: f64,
    /// MW
    pub quantity: f64,
}

/// Observation shared by all agents: the hour and that hour's demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub hour: usize,
    /// MW
    pub demand: f64,
}

impl MarketState {
    pub fn at_hour(dataset: &MarketDataset, hour: usize) -> Result<Self> {
        let demand = dataset.profile().demand(hour)?;
        Ok(Self { hour, demand })
    }
}

/// Bid price on an evenly spaced grid from marginal cost (action 0) to the
/// price cap (last action). Quantity is always full capacity.
pub fn action_to_bid(
    spec: &GencoSpec,
    action: usize,
    n_actions: usize,
    price_cap: f64,
) -> Result<Bid> {
    if n_actions < 2 {
        return Err(Error::Argument(format!(
            "n_actions must be >= 2, got {n_actions}"
        )));
    }
    if action >= n_actions {
        return Err(Error::Argument(format!(
            "action {action} out of range for {n_actions} actions"
        )));
    }
    let price = if action == n_actions - 1 {
        price_cap
    } else {
        spec.marginal_cost
            + (action as f64 / (n_actions - 1) as f64) * (price_cap - spec.marginal_cost)
    };
    Ok(Bid {
        genco: spec.id,
        price,
        quantity: spec.capacity,
    })
}

/// Every generator offers its full capacity at its marginal cost.
pub fn actual_cost_bids(specs: &[GencoSpec]) -> Vec<Bid> {
    specs
        .iter()
        .map(|s| Bid {
            genco: s.id,
            price: s.marginal_cost,
            quantity: s.capacity,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: MarketState,
    /// USD per generator, indexed like the dataset's generators.
    pub rewards: Vec<f64>,
    pub done: bool,
    pub clearing: ClearingResult,
}

/// Clears one hour given every generator's action.
///
/// After hour 23 the returned `next` state wraps to hour 0 and `done` is set.
pub fn env_step(
    state: &MarketState,
    joint_actions: &[usize],
    dataset: &MarketDataset,
) -> Result<StepOutcome> {
    if state.hour >= HOURS {
        return Err(Error::Index {
            what: "hours",
            index: state.hour,
            len: HOURS,
        });
    }
    let gencos = dataset.gencos();
    if joint_actions.len() != gencos.len() {
        return Err(Error::dim(
            "joint actions",
            gencos.len(),
            joint_actions.len(),
        ));
    }
    let bids = gencos
        .iter()
        .zip(joint_actions)
        .map(|(spec, &a)| action_to_bid(spec, a, dataset.n_actions(), dataset.price_cap()))
        .collect::<Result<Vec<_>>>()?;
    let clearing = clear_uniform_price(&bids, state.demand, gencos, dataset.price_cap())?;
    let done = state.hour + 1 == HOURS;
    let next = MarketState::at_hour(dataset, (state.hour + 1) % HOURS)?;
    Ok(StepOutcome {
        next,
        rewards: clearing.profit.clone(),
        done,
        clearing,
    })
}

/// Headline daily figures from one episode of clearings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyMetrics {
    /// Clearing price at 06:00, USD/MWh.
    pub mc_valley: f64,
    /// Clearing price at 18:00, USD/MWh.
    pub mc_peak: f64,
    /// Sum of every generator's profit over the day, USD.
    pub total_reward: f64,
}

pub fn daily_metrics(results: &[ClearingResult]) -> Result<DailyMetrics> {
    if results.len() != HOURS {
        return Err(Error::Argument(format!(
            "daily metrics need {HOURS} hourly clearings, got {}",
            results.len()
        )));
    }
    Ok(DailyMetrics {
        mc_valley: results[VALLEY_HOUR].clearing_price,
        mc_peak: results[PEAK_HOUR].clearing_price,
        total_reward: results.iter().flat_map(|r| &r.profit).sum(),
    })
}

/// Clears all 24 hours under truthful bids.
pub fn actual_cost_day(dataset: &MarketDataset) -> Result<Vec<ClearingResult>> {
    let bids = actual_cost_bids(dataset.gencos());
    (0..HOURS)
        .map(|h| {
            clear_uniform_price(
                &bids,
                dataset.profile().demand(h)?,
                dataset.gencos(),
                dataset.price_cap(),
            )
        })
        .collect()
}
