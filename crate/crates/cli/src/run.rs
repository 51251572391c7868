//! The `run` verb: trains every (backend, seed) pair and writes its files.
//!
//! Per run, with `<stem>` = `<backend>-seed<seed>`:
//! - `<stem>.report.json`: the equilibrium report;
//! - `<stem>.history.csv`: one row per training episode with columns
//!   `episode, reward_0 … reward_{n−1}, total, greedy_total, epsilon`;
//! - `<stem>.timing.json` (only with timing enabled): wall-clock seconds.
//!
//! Report and history are deterministic functions of the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use qmadqn::marl::{run_experiment, Backend, EpisodeRecord, TrainerConfig};
use rayon::prelude::*;

use crate::config::RunManifest;
use crate::error::{CliError, Result};
use crate::format_f64;

/// Caps the number of runs trained concurrently.
pub const JOBS_ENV: &str = "QMADQN_JOBS";

#[derive(Debug, Clone, PartialEq)]
pub struct RunFiles {
    pub report: PathBuf,
    pub history: PathBuf,
    pub timing: PathBuf,
}

impl RunFiles {
    pub fn new(out: &Path, backend: Backend, seed: u64) -> Self {
        let stem = format!("{backend}-seed{seed}");
        Self {
            report: out.join(format!("{stem}.report.json")),
            history: out.join(format!("{stem}.history.csv")),
            timing: out.join(format!("{stem}.timing.json")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub backend: Backend,
    pub seed: u64,
    pub converged: bool,
    pub episodes: usize,
    pub files: RunFiles,
    pub seconds: f64,
}

/// Number of worker threads: `QMADQN_JOBS` if set, else all cores.
pub fn job_count() -> Result<usize> {
    match std::env::var(JOBS_ENV) {
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::config(
                JOBS_ENV,
                format!("`{text}` is not a positive integer"),
            )),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn cmd_run(manifest: &RunManifest) -> Result<Vec<RunSummary>> {
    fs::create_dir_all(&manifest.out).map_err(|e| CliError::io(&manifest.out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(job_count()?)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker threads: {e}")))?;
    let runs = manifest.runs();
    pool.install(|| {
        runs.par_iter()
            .map(|config| run_one(config, manifest))
            .collect()
    })
}

fn run_one(config: &TrainerConfig, manifest: &RunManifest) -> Result<RunSummary> {
    let outcome = run_experiment(config, &manifest.dataset)?;
    let files = RunFiles::new(&manifest.out, config.backend, config.seed);
    write(&files.report, outcome.report.to_json()? + "\n")?;
    write(&files.history, history_csv(&outcome.history)?)?;
    if manifest.timing {
        let json = serde_json::to_string_pretty(&outcome.timing).map_err(qmadqn::Error::from)?;
        write(&files.timing, json + "\n")?;
    }
    let summary = RunSummary {
        backend: config.backend,
        seed: config.seed,
        converged: outcome.report.converged,
        episodes: outcome.report.episodes_to_converge,
        files,
        seconds: outcome.timing.total_seconds,
    };
    eprintln!(
        "{} seed {}: {} after {} episodes ({:.1} s)",
        summary.backend,
        summary.seed,
        if summary.converged {
            "converged"
        } else {
            "not converged"
        },
        summary.episodes,
        summary.seconds
    );
    Ok(summary)
}

fn write(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Renders the per-episode history; floats carry 17 significant digits.
pub fn history_csv(history: &[EpisodeRecord]) -> Result<String> {
    let n_agents = history.first().map_or(0, |h| h.rewards.len());
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["episode".to_string()];
    header.extend((0..n_agents).map(|i| format!("reward_{i}")));
    header.extend(["total", "greedy_total", "epsilon"].map(String::from));
    let csv_err = |e: csv::Error| CliError::Runtime(format!("writing history: {e}"));
    writer.write_record(&header).map_err(csv_err)?;
    for record in history {
        let mut row = vec![record.episode.to_string()];
        row.extend(record.rewards.iter().map(|&r| format_f64(r)));
        row.extend([record.total, record.greedy_total, record.epsilon].map(format_f64));
        writer.write_record(&row).map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Runtime(format!("writing history: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn history_columns_and_precision() {
        let history = vec![EpisodeRecord {
            episode: 0,
            rewards: vec![0.1, -2.5],
            total: 0.1 - 2.5,
            greedy_total: 1.0 / 3.0,
            epsilon: 1.0,
        }];
        let csv = history_csv(&history).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "episode,reward_0,reward_1,total,greedy_total,epsilon"
        );
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields[0], "0");
        assert_eq!(fields[1].parse::<f64>().unwrap(), 0.1);
        assert_eq!(fields[3].parse::<f64>().unwrap(), 0.1 - 2.5);
        assert_eq!(fields[4].parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn file_names() {
        let files = RunFiles::new(Path::new("out"), Backend::Hybrid, 3);
        assert_eq!(files.report, Path::new("out/hybrid-seed3.report.json"));
        assert_eq!(files.history, Path::new("out/hybrid-seed3.history.csv"));
    }
}
