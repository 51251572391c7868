//! Command-line front end: config ingestion, experiment orchestration
//! across seeds and backends, summary tables and frequency plots.

pub mod compare;
pub mod config;
pub mod error;
pub mod plot;
pub mod run;

pub use compare::{cmd_compare, Comparison};
pub use config::{Overrides, RunManifest};
pub use error::{CliError, Result};
pub use plot::{cmd_plot, PlotStyle};
pub use run::{cmd_run, RunFiles, RunSummary};

/// Full-precision decimal text for CSV cells: 17 significant digits, which
/// round-trips every `f64` exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -11040.0, 1e-300, f64::MAX, 880101.25] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(1.5), "1.5000000000000000e0");
    }
}
