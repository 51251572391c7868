//! The `plot` verb: frequency scatter plots of one agent's training visits.
//!
//! Two SVG files per call, `<stem>.state_action.svg` and
//! `<stem>.state_reward.svg`. The x axis is demand (MW); the y axis is the
//! bid price of the chosen action (USD/MWh) or the bucketed hourly reward
//! (USD). Each visited cell is one circle whose radius is
//! `max_radius · √(count / max_count)`, i.e. proportional to √count, so
//! marker area is proportional to visits; fill darkens and becomes more
//! opaque with the same ratio `count / max_count`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qmadqn::market::HOURS;

use crate::compare::{format_cell, load_report};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotStyle {
    pub width: f64,
    pub height: f64,
    /// Radius of the most visited cell, px.
    pub max_radius: f64,
    /// Fill opacity of a cell visited once as the count tends to zero.
    pub min_opacity: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self {
            width: 640.0,
            height: 480.0,
            max_radius: 16.0,
            min_opacity: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const LIGHT: [f64; 3] = [198.0, 219.0, 239.0];
const DARK: [f64; 3] = [8.0, 48.0, 107.0];

pub fn marker_radius(count: u64, max_count: u64, style: &PlotStyle) -> f64 {
    style.max_radius * (count as f64 / max_count as f64).sqrt()
}

fn marker_fill(count: u64, max_count: u64, style: &PlotStyle) -> (String, f64) {
    let t = count as f64 / max_count as f64;
    let channel = |i: usize| (LIGHT[i] + t * (DARK[i] - LIGHT[i])).round() as u8;
    let color = format!("#{:02x}{:02x}{:02x}", channel(0), channel(1), channel(2));
    (color, style.min_opacity + (1.0 - style.min_opacity) * t)
}

/// Padded data range; a degenerate range is widened around its value.
fn range(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    let pad = if hi > lo {
        0.08 * (hi - lo)
    } else {
        (0.1 * lo.abs()).max(1.0)
    };
    (lo - pad, hi + pad)
}

/// About five round-numbered ticks covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders a frequency scatter plot. Fails on an empty point set.
pub fn scatter_svg(points: &[ScatterPoint], axes: &Axes, style: &PlotStyle) -> Result<String> {
    let max_count = points.iter().map(|p| p.count).max().unwrap_or(0);
    if max_count == 0 {
        return Err(qmadqn::Error::Validation {
            field: "frequency table".into(),
            message: format!("no visits to plot for `{}`", axes.title),
        }
        .into());
    }
    let (x0, x1) = range(points.iter().map(|p| p.x));
    let (y0, y1) = range(points.iter().map(|p| p.y));
    let (w, h) = (style.width, style.height);
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;
    let bottom = MARGIN_TOP + plot_h;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(&axes.title));
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="15">{}</text>"#,
        w / 2.0,
        MARGIN_TOP / 2.0 + 5.0,
        escape(&axes.title)
    );

    let _ = writeln!(svg, r#"<g class="axes" stroke="black" fill="none">"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{MARGIN_LEFT},{MARGIN_TOP} V{bottom} H{}"/>"#,
        MARGIN_LEFT + plot_w
    );
    for t in ticks(x0, x1) {
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}"/>"#,
            bottom + 5.0
        );
    }
    for t in ticks(y0, y1) {
        let y = py(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}"/>"#,
            MARGIN_LEFT - 5.0
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="tick-labels" fill="black">"#);
    for t in ticks(x0, x1) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            px(t),
            bottom + 18.0,
            format_cell(t)
        );
    }
    for t in ticks(y0, y1) {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 8.0,
            py(t) + 4.0,
            format_cell(t)
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        h - 15.0,
        escape(&axes.x_label)
    );
    let (ly, lx) = (MARGIN_TOP + plot_h / 2.0, 20.0);
    let _ = writeln!(
        svg,
        r#"<text class="y-label" x="{lx}" y="{ly}" text-anchor="middle" transform="rotate(-90 {lx} {ly})">{}</text>"#,
        escape(&axes.y_label)
    );

    // most visited first so that rarer cells stay visible on top
    let mut order: Vec<&ScatterPoint> = points.iter().filter(|p| p.count > 0).collect();
    order.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then(a.x.total_cmp(&b.x))
            .then(a.y.total_cmp(&b.y))
    });
    let _ = writeln!(
        svg,
        r##"<g class="markers" stroke="#08306b" stroke-width="0.5">"##
    );
    for p in order {
        let (fill, opacity) = marker_fill(p.count, max_count, style);
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.4}" fill="{fill}" fill-opacity="{opacity:.4}" data-count="{}"><title>{} visits</title></circle>"#,
            px(p.x),
            py(p.y),
            marker_radius(p.count, max_count, style),
            p.count,
            p.count
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<text class="legend" x="{}" y="{}" text-anchor="end" font-size="10">radius ∝ √visits; largest = {max_count} visits</text>"#,
        w - MARGIN_RIGHT,
        MARGIN_TOP - 6.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes the state–action and state–reward plots of `agent`, restricted
/// to `hour` when given, and returns their paths.
pub fn cmd_plot(
    report_path: &Path,
    agent: usize,
    hour: Option<usize>,
    out: &Path,
    style: &PlotStyle,
) -> Result<[PathBuf; 2]> {
    let report = load_report(report_path)?;
    let freq = report.agents.get(agent).ok_or_else(|| {
        CliError::config(
            "--agent",
            format!("{agent} is out of range for {} agents", report.agents.len()),
        )
    })?;
    if let Some(h) = hour {
        if h >= HOURS {
            return Err(CliError::config(
                "--hour",
                format!("{h} is outside 0..={}", HOURS - 1),
            ));
        }
    }
    let keep = |h: usize| hour.is_none_or(|want| want == h);
    let prices = &report.action_prices[agent];
    let actions: Vec<ScatterPoint> = freq
        .state_action
        .iter()
        .filter(|c| keep(c.hour))
        .map(|c| ScatterPoint {
            x: c.demand,
            y: prices[c.action],
            count: c.count,
        })
        .collect();
    let rewards: Vec<ScatterPoint> = freq
        .state_reward
        .iter()
        .filter(|c| keep(c.hour))
        .map(|c| ScatterPoint {
            x: c.demand,
            y: c.reward,
            count: c.count,
        })
        .collect();

    let scope = hour.map_or("all hours".to_string(), |h| format!("{h:02}:00"));
    let suffix = hour.map_or(String::new(), |h| format!("-hour{h:02}"));
    let stem = format!(
        "{}-seed{}-agent{agent}{suffix}",
        report.backend, report.seed
    );
    let x_label = "Demand (MW)".to_string();
    let plots = [
        (
            actions,
            Axes {
                title: format!(
                    "{} seed {}: agent {agent} state–action frequency, {scope}",
                    report.backend, report.seed
                ),
                x_label: x_label.clone(),
                y_label: "Bid price (USD/MWh)".into(),
            },
            out.join(format!("{stem}.state_action.svg")),
        ),
        (
            rewards,
            Axes {
                title: format!(
                    "{} seed {}: agent {agent} state–reward frequency, {scope}",
                    report.backend, report.seed
                ),
                x_label,
                y_label: format!(
                    "Hourly reward (USD, {} USD bins)",
                    format_cell(report.reward_bin_usd)
                ),
            },
            out.join(format!("{stem}.state_reward.svg")),
        ),
    ];
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut written = Vec::with_capacity(2);
    for (points, axes, path) in plots {
        let svg = scatter_svg(&points, &axes, style)?;
        fs::write(&path, svg).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    let [a, b]: [PathBuf; 2] = written.try_into().expect("two plots");
    Ok([a, b])
}
