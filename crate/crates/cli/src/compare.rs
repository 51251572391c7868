//! The `compare` verb: a per-backend summary table over many reports.
//!
//! Writes `comparison.csv` (columns `backend, runs, converged`, then
//! `<metric>_mean, <metric>_std` for every metric) and `comparison.md`
//! (one `mean ± std` cell per metric). Std is the population standard
//! deviation over the reports of a backend, so it is 0 for a single seed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use qmadqn::marl::{Backend, EquilibriumReport};

use crate::error::{CliError, Result};
use crate::format_f64;

pub const CSV_FILE: &str = "comparison.csv";
pub const MARKDOWN_FILE: &str = "comparison.md";

/// One column of the table.
pub struct Metric {
    pub key: &'static str,
    pub unit: &'static str,
    pub value: fn(&EquilibriumReport) -> f64,
}

pub const METRICS: [Metric; 8] = [
    Metric {
        key: "mc_s_valley",
        unit: "USD/MWh",
        value: |r| r.mc_s_valley,
    },
    Metric {
        key: "mc_s_peak",
        unit: "USD/MWh",
        value: |r| r.mc_s_peak,
    },
    Metric {
        key: "r_s",
        unit: "USD",
        value: |r| r.r_s,
    },
    Metric {
        key: "mc_a_valley",
        unit: "USD/MWh",
        value: |r| r.mc_a_valley,
    },
    Metric {
        key: "mc_a_peak",
        unit: "USD/MWh",
        value: |r| r.mc_a_peak,
    },
    Metric {
        key: "r_a",
        unit: "USD",
        value: |r| r.r_a,
    },
    Metric {
        key: "episodes",
        unit: "",
        value: |r| r.episodes_to_converge as f64,
    },
    Metric {
        key: "entropy",
        unit: "nats",
        value: |r| r.mean_action_entropy(),
    },
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub backend: Backend,
    pub runs: usize,
    pub converged: usize,
    /// In the order of [`METRICS`].
    pub stats: Vec<Stat>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub dataset_name: String,
    pub valley_hour: usize,
    pub peak_hour: usize,
    pub rows: Vec<ComparisonRow>,
}

/// Groups reports by backend; all must come from the same dataset.
pub fn compare(reports: &[EquilibriumReport]) -> Result<Comparison> {
    let first = reports
        .first()
        .ok_or_else(|| CliError::config("reports", "at least one report is required"))?;
    for (i, r) in reports.iter().enumerate() {
        if r.dataset_fingerprint != first.dataset_fingerprint {
            return Err(qmadqn::Error::Validation {
                field: format!("reports[{i}].dataset_fingerprint"),
                message: format!(
                    "dataset `{}` ({}) differs from `{}` ({})",
                    r.dataset_name,
                    r.dataset_fingerprint,
                    first.dataset_name,
                    first.dataset_fingerprint
                ),
            }
            .into());
        }
    }
    let mut groups: BTreeMap<Backend, Vec<&EquilibriumReport>> = BTreeMap::new();
    for r in reports {
        groups.entry(r.backend).or_default().push(r);
    }
    let rows = groups
        .into_iter()
        .map(|(backend, group)| ComparisonRow {
            backend,
            runs: group.len(),
            converged: group.iter().filter(|r| r.converged).count(),
            stats: METRICS
                .iter()
                .map(|m| Stat::of(&group.iter().map(|r| (m.value)(r)).collect::<Vec<_>>()))
                .collect(),
        })
        .collect();
    Ok(Comparison {
        dataset_name: first.dataset_name.clone(),
        valley_hour: first.valley_hour,
        peak_hour: first.peak_hour,
        rows,
    })
}

impl Comparison {
    pub fn to_csv(&self) -> Result<String> {
        let csv_err = |e: csv::Error| CliError::Runtime(format!("writing comparison: {e}"));
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["backend".to_string(), "runs".into(), "converged".into()];
        for m in &METRICS {
            header.push(format!("{}_mean", m.key));
            header.push(format!("{}_std", m.key));
        }
        writer.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            let mut record = vec![
                row.backend.to_string(),
                row.runs.to_string(),
                row.converged.to_string(),
            ];
            for s in &row.stats {
                record.push(format_f64(s.mean));
                record.push(format_f64(s.std));
            }
            writer.write_record(&record).map_err(csv_err)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Runtime(format!("writing comparison: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
    }

    pub fn to_markdown(&self) -> String {
        let (v, p) = (self.valley_hour, self.peak_hour);
        let labels = [
            format!("MC_S@{v:02} (USD/MWh)"),
            format!("MC_S@{p:02} (USD/MWh)"),
            "R_S (USD)".to_string(),
            format!("MC_A@{v:02} (USD/MWh)"),
            format!("MC_A@{p:02} (USD/MWh)"),
            "R_A (USD)".to_string(),
            "Episodes".to_string(),
            "Entropy (nats)".to_string(),
        ];
        let mut out = format!(
            "Dataset: {}\n\n| Backend | Runs | Converged |",
            self.dataset_name
        );
        for label in &labels {
            out.push_str(&format!(" {label} |"));
        }
        out.push_str("\n|---|---:|---:|");
        out.push_str(&"---:|".repeat(labels.len()));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {} |",
                backend_label(row.backend),
                row.runs,
                row.converged
            ));
            for s in &row.stats {
                out.push_str(&format!(
                    " {} ± {} |",
                    format_cell(s.mean),
                    format_cell(s.std)
                ));
            }
            out.push('\n');
        }
        out
    }
}

pub fn backend_label(backend: Backend) -> &'static str {
    match backend {
        Backend::Mlp => "MADQN (mlp)",
        Backend::Hybrid => "Q-MADQN (hybrid)",
    }
}

/// Human-readable number: at most three decimals, trailing zeros dropped.
pub fn format_cell(x: f64) -> String {
    let text = format!("{x:.3}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    match text {
        "-0" => "0".to_string(),
        t => t.to_string(),
    }
}

pub fn load_report(path: &Path) -> Result<EquilibriumReport> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    EquilibriumReport::from_json(&text)
        .map_err(|e| CliError::config(path.display().to_string(), e.to_string()))
}

/// Reads the reports, writes both tables into `out` and returns their paths.
pub fn cmd_compare(report_paths: &[PathBuf], out: &Path) -> Result<(Comparison, [PathBuf; 2])> {
    let reports = report_paths
        .iter()
        .map(|p| load_report(p))
        .collect::<Result<Vec<_>>>()?;
    let table = compare(&reports)?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let csv_path = out.join(CSV_FILE);
    let md_path = out.join(MARKDOWN_FILE);
    fs::write(&csv_path, table.to_csv()?).map_err(|e| CliError::io(&csv_path, e))?;
    fs::write(&md_path, table.to_markdown()).map_err(|e| CliError::io(&md_path, e))?;
    Ok((table, [csv_path, md_path]))
}
