//! Run manifests: a TOML config file with `[market]`, `[trainer]`, `[vqc]`
//! and `[run]` sections, overridden by command-line flags.
//!
//! ```toml
//! [market]
//! dataset = "market.toml"   # relative to this file; bundled data if absent
//!
//! [trainer]                 # any TrainerConfig field except seed/backend
//! max_episodes = 5000
//!
//! [vqc]
//! n_qubits = 5
//! depth = 2
//! gradient = "adjoint"      # or "parameter_shift"
//!
//! [run]
//! seeds = [0, 1, 2, 3, 4]
//! backends = ["mlp", "hybrid"]
//! out = "results"
//! timing = false            # write <run>.timing.json sidecars
//! ```
//!
//! Unknown keys anywhere are errors.

use std::fs;
use std::path::{Path, PathBuf};

use qmadqn::market::MarketDataset;
use qmadqn::marl::{Backend, TrainerConfig, VqcConfig};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Keys of `TrainerConfig` that are chosen per run rather than in `[trainer]`.
const PER_RUN_KEYS: [(&str, &str); 3] = [
    ("seed", "seeds are listed in [run] seeds or --seeds"),
    (
        "backend",
        "backends are listed in [run] backends or --backend",
    ),
    ("vqc", "circuit settings belong in the [vqc] section"),
];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConfigFile {
    market: MarketSection,
    trainer: toml::Table,
    vqc: VqcConfig,
    run: RunSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct MarketSection {
    dataset: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RunSection {
    seeds: Option<Vec<u64>>,
    backends: Option<Vec<Backend>>,
    out: Option<PathBuf>,
    timing: bool,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub seeds: Option<Vec<u64>>,
    pub backends: Option<Vec<Backend>>,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

/// Everything `run` needs, fully validated.
#[derive(Debug, Clone)]
pub struct RunManifest {
    /// Shared settings; `seed` and `backend` are replaced for each run.
    pub trainer: TrainerConfig,
    pub dataset: MarketDataset,
    pub seeds: Vec<u64>,
    pub backends: Vec<Backend>,
    pub out: PathBuf,
    /// Also write wall-clock timing sidecars (which differ between reruns).
    pub timing: bool,
}

impl RunManifest {
    pub const DEFAULT_SEEDS: [u64; 1] = [0];
    pub const DEFAULT_OUT: &'static str = "results";

    pub fn resolve(overrides: &Overrides) -> Result<Self> {
        let (file, base) = match &overrides.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::config("--config", format!("{}: {e}", path.display()))
                })?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (parse_config(&text)?, base)
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };

        let mut trainer = trainer_from_table(file.trainer)?;
        trainer.vqc = file.vqc;
        trainer.validate()?;

        let dataset = match (&overrides.dataset, &file.market.dataset) {
            (Some(path), _) => load_dataset(path)?,
            (None, Some(path)) => load_dataset(&base.join(path))?,
            (None, None) => MarketDataset::bundled(),
        };

        let seeds = overrides
            .seeds
            .clone()
            .or(file.run.seeds)
            .unwrap_or_else(|| Self::DEFAULT_SEEDS.to_vec());
        check_unique("run.seeds", &seeds)?;
        let backends = overrides
            .backends
            .clone()
            .or(file.run.backends)
            .unwrap_or_else(|| vec![Backend::Mlp, Backend::Hybrid]);
        check_unique("run.backends", &backends)?;
        let out = match (&overrides.out, file.run.out) {
            (Some(out), _) => out.clone(),
            (None, Some(out)) => base.join(out),
            (None, None) => PathBuf::from(Self::DEFAULT_OUT),
        };

        Ok(Self {
            trainer,
            dataset,
            seeds,
            backends,
            out,
            timing: overrides.timing || file.run.timing,
        })
    }

    /// One trainer config per (backend, seed), backends outermost.
    pub fn runs(&self) -> Vec<TrainerConfig> {
        self.backends
            .iter()
            .flat_map(|&backend| {
                self.seeds.iter().map(move |&seed| TrainerConfig {
                    backend,
                    seed,
                    ..self.trainer.clone()
                })
            })
            .collect()
    }
}

fn parse_config(text: &str) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| CliError::config("config", e.message().to_string()))
}

fn trainer_from_table(table: toml::Table) -> Result<TrainerConfig> {
    for (key, hint) in PER_RUN_KEYS {
        if table.contains_key(key) {
            return Err(CliError::config(format!("trainer.{key}"), hint));
        }
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::config("trainer", e.message().to_string()))
}

fn load_dataset(path: &Path) -> Result<MarketDataset> {
    if !path.is_file() {
        return Err(CliError::config(
            "market.dataset",
            format!("{} does not exist", path.display()),
        ));
    }
    MarketDataset::load(path)
        .map_err(|e| CliError::config("market.dataset", format!("{}: {e}", path.display())))
}

fn check_unique<T: PartialEq + std::fmt::Debug>(key: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(CliError::config(key, "must not be empty"));
    }
    for (i, v) in values.iter().enumerate() {
        if values[..i].contains(v) {
            return Err(CliError::config(key, format!("{v:?} is listed twice")));
        }
    }
    Ok(())
}

/// Parses `--seeds`: a comma-separated list such as `0,1,2`, where an
/// entry `a..b` expands to the half-open range.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = |entry: &str| {
        CliError::config(
            "--seeds",
            format!("`{entry}` is not a seed or a range a..b"),
        )
    };
    let mut seeds = Vec::new();
    for entry in text.split(',').map(str::trim) {
        match entry.split_once("..") {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad(entry))?;
                let b: u64 = b.trim().parse().map_err(|_| bad(entry))?;
                if a >= b {
                    return Err(bad(entry));
                }
                seeds.extend(a..b);
            }
            None => seeds.push(entry.parse().map_err(|_| bad(entry))?),
        }
    }
    check_unique("--seeds", &seeds)?;
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(err: CliError) -> String {
        match err {
            CliError::Config { key, .. } => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0,1,2").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("3..6, 9").unwrap(), vec![3, 4, 5, 9]);
        assert!(parse_seeds("").is_err());
        assert!(parse_seeds("1,x").is_err());
        assert!(parse_seeds("5..5").is_err());
        assert!(parse_seeds("1,1").is_err());
    }

    #[test]
    fn trainer_section_sets_fields() {
        let file =
            parse_config("[trainer]\nmax_episodes = 7\ngamma = 0.5\n[vqc]\ndepth = 1\n").unwrap();
        let cfg = trainer_from_table(file.trainer).unwrap();
        assert_eq!(cfg.max_episodes, 7);
        assert_eq!(cfg.gamma, 0.5);
        assert_eq!(cfg.learning_rate, TrainerConfig::default().learning_rate);
        assert_eq!(file.vqc.depth, 1);
    }

    #[test]
    fn unknown_and_per_run_keys_rejected() {
        assert!(parse_config("[trainer]\ngama = 0.5\n")
            .map(|f| trainer_from_table(f.trainer))
            .unwrap()
            .is_err());
        assert!(parse_config("[run]\nseed = [1]\n").is_err());
        assert!(parse_config("[extra]\n").is_err());
        let file = parse_config("[trainer]\nseed = 3\n").unwrap();
        assert_eq!(
            key_of(trainer_from_table(file.trainer).unwrap_err()),
            "trainer.seed"
        );
    }

    #[test]
    fn missing_dataset_names_key() {
        let overrides = Overrides {
            dataset: Some(PathBuf::from("/nonexistent/market.toml")),
            ..Overrides::default()
        };
        let err = RunManifest::resolve(&overrides).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_USAGE);
        assert_eq!(key_of(err), "market.dataset");
    }

    #[test]
    fn runs_enumerate_backends_then_seeds() {
        let manifest = RunManifest::resolve(&Overrides {
            seeds: Some(vec![4, 2]),
            ..Overrides::default()
        })
        .unwrap();
        let runs: Vec<(Backend, u64)> = manifest
            .runs()
            .iter()
            .map(|c| (c.backend, c.seed))
            .collect();
        assert_eq!(
            runs,
            vec![
                (Backend::Mlp, 4),
                (Backend::Mlp, 2),
                (Backend::Hybrid, 4),
                (Backend::Hybrid, 2)
            ]
        );
    }
}
