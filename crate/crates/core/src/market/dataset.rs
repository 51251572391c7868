use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HOURS;
use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../../data/default_market.toml");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GencoSpec {
    pub id: usize,
    /// MW
    pub capacity: f64,
    /// USD/MWh
    pub marginal_cost: f64,
    /// USD per hour, charged whether or not the unit is dispatched.
    pub fixed_cost: f64,
}

/// 24 hourly demand values in MW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    hourly_demand: Vec<f64>,
}

impl LoadProfile {
    pub fn new(hourly_demand: Vec<f64>) -> Result<Self> {
        if hourly_demand.len() != HOURS {
            return Err(Error::validation(
                "demand",
                format!(
                    "expected {HOURS} hourly values, got {}",
                    hourly_demand.len()
                ),
            ));
        }
        if let Some((h, d)) = hourly_demand
            .iter()
            .enumerate()
            .find(|(_, d)| !(d.is_finite() && **d > 0.0))
        {
            return Err(Error::validation(
                format!("demand[{h}]"),
                format!("{d} is not a positive MW value"),
            ));
        }
        Ok(Self { hourly_demand })
    }

    pub fn demand(&self, hour: usize) -> Result<f64> {
        self.hourly_demand.get(hour).copied().ok_or(Error::Index {
            what: "hours",
            index: hour,
            len: HOURS,
        })
    }

    pub fn hourly_demand(&self) -> &[f64] {
        &self.hourly_demand
    }

    pub fn max_demand(&self) -> f64 {
        self.hourly_demand.iter().copied().fold(f64::MIN, f64::max)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenco {
    capacity: f64,
    marginal_cost: f64,
    fixed_cost: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    name: String,
    price_cap: f64,
    n_actions: usize,
    demand: Vec<f64>,
    gencos: Vec<RawGenco>,
}

/// Supply side, demand profile and bidding rules of one market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketDataset {
    name: String,
    price_cap: f64,
    n_actions: usize,
    gencos: Vec<GencoSpec>,
    profile: LoadProfile,
}

impl MarketDataset {
    pub fn new(
        name: impl Into<String>,
        price_cap: f64,
        n_actions: usize,
        gencos: Vec<GencoSpec>,
        profile: LoadProfile,
    ) -> Result<Self> {
        if !(price_cap.is_finite() && price_cap > 0.0) {
            return Err(Error::validation(
                "price_cap",
                format!("{price_cap} is not a positive price"),
            ));
        }
        if n_actions < 2 {
            return Err(Error::validation(
                "n_actions",
                format!("{n_actions} is below the minimum of 2"),
            ));
        }
        if gencos.is_empty() {
            return Err(Error::validation(
                "gencos",
                "at least one generator is required",
            ));
        }
        for (i, g) in gencos.iter().enumerate() {
            if g.id != i {
                return Err(Error::validation(
                    format!("gencos[{i}].id"),
                    format!("expected {i}, got {}", g.id),
                ));
            }
            if !(g.capacity.is_finite() && g.capacity > 0.0) {
                return Err(Error::validation(
                    format!("gencos[{i}].capacity"),
                    format!("{} is not positive", g.capacity),
                ));
            }
            if !(g.marginal_cost.is_finite() && (0.0..=price_cap).contains(&g.marginal_cost)) {
                return Err(Error::validation(
                    format!("gencos[{i}].marginal_cost"),
                    format!("{} is outside [0, {price_cap}]", g.marginal_cost),
                ));
            }
            if !(g.fixed_cost.is_finite() && g.fixed_cost >= 0.0) {
                return Err(Error::validation(
                    format!("gencos[{i}].fixed_cost"),
                    format!("{} is negative", g.fixed_cost),
                ));
            }
        }
        Ok(Self {
            name: name.into(),
            price_cap,
            n_actions,
            gencos,
            profile,
        })
    }

    /// The six-generator dataset shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_toml_str(BUNDLED).expect("bundled dataset is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawDataset =
            toml::from_str(text).map_err(|e| Error::Config(format!("market dataset: {e}")))?;
        let profile = LoadProfile::new(raw.demand)?;
        let gencos = raw
            .gencos
            .into_iter()
            .enumerate()
            .map(|(id, g)| GencoSpec {
                id,
                capacity: g.capacity,
                marginal_cost: g.marginal_cost,
                fixed_cost: g.fixed_cost,
            })
            .collect();
        Self::new(raw.name, raw.price_cap, raw.n_actions, gencos, profile)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn price_cap(&self) -> f64 {
        self.price_cap
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn gencos(&self) -> &[GencoSpec] {
        &self.gencos
    }

    pub fn profile(&self) -> &LoadProfile {
        &self.profile
    }

    /// Bid price of every action on every generator's grid, `[genco][action]`.
    pub fn action_prices(&self) -> Vec<Vec<f64>> {
        self.gencos
            .iter()
            .map(|g| {
                (0..self.n_actions)
                    .map(|a| {
                        super::action_to_bid(g, a, self.n_actions, self.price_cap).map(|b| b.price)
                    })
                    .collect::<Result<Vec<_>>>()
                    .expect("actions within the grid")
            })
            .collect()
    }

    /// Stable 64-bit FNV-1a hash of the dataset's JSON form, as hex.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("dataset serializes");
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in json.bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}
