use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qmadqn::marl::Backend;
use qmadqn_cli::config::parse_seeds;
use qmadqn_cli::{cmd_compare, cmd_plot, cmd_run, Overrides, PlotStyle, Result, RunManifest};

/// Multi-agent deep Q-learning bidding in a day-ahead electricity market,
/// with classical (mlp) and hybrid quantum-classical (hybrid) Q-networks.
#[derive(Debug, Parser)]
#[command(name = "qmadqn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendChoice {
    Mlp,
    Hybrid,
    Both,
}

impl BackendChoice {
    fn backends(self) -> Vec<Backend> {
        match self {
            BackendChoice::Mlp => vec![Backend::Mlp],
            BackendChoice::Hybrid => vec![Backend::Hybrid],
            BackendChoice::Both => vec![Backend::Mlp, Backend::Hybrid],
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train every (backend, seed) pair and write reports and histories.
    Run {
        /// TOML config with [market], [trainer], [vqc] and [run] sections.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Market dataset (TOML); defaults to the bundled six-generator market.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Comma-separated seeds; `a..b` expands to a half-open range.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long, value_enum)]
        backend: Option<BackendChoice>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-run wall-clock timing sidecars.
        #[arg(long)]
        timing: bool,
    },
    /// Summarise reports into per-backend mean ± std tables (CSV and Markdown).
    Compare {
        /// Report files written by `run`.
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Draw state–action and state–reward frequency scatter plots (SVG).
    Plot {
        /// Report file written by `run`.
        report: PathBuf,
        /// Agent (generator) index.
        #[arg(long)]
        agent: usize,
        /// Restrict to one hour 0..=23; all hours when omitted.
        #[arg(long)]
        hour: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            dataset,
            seeds,
            backend,
            out,
            timing,
        } => {
            let overrides = Overrides {
                config,
                dataset,
                seeds: seeds.as_deref().map(parse_seeds).transpose()?,
                backends: backend.map(BackendChoice::backends),
                out,
                timing,
            };
            let manifest = RunManifest::resolve(&overrides)?;
            let summaries = cmd_run(&manifest)?;
            for s in &summaries {
                println!("{}", s.files.report.display());
                println!("{}", s.files.history.display());
            }
        }
        Command::Compare { reports, out } => {
            let (table, paths) = cmd_compare(&reports, &out)?;
            print!("{}", table.to_markdown());
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Plot {
            report,
            agent,
            hour,
            out,
        } => {
            for p in cmd_plot(&report, agent, hour, &out, &PlotStyle::default())? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
