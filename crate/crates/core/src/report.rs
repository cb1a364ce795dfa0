//! Run reports and their artifacts: JSON with sorted keys, RFC 4180 CSV and
//! self-contained SVG plots. Identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header plus rows, written as CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        let err = |e: csv::Error| LabError::Io(std::io::Error::other(e));
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv of strings is UTF-8"))
    }
}

/// Builds a row from displayable cells.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

/// Pretty JSON with keys sorted at every level.
pub fn to_sorted_json<T: Serialize>(v: &T) -> Result<String> {
    let v = serde_json::to_value(v).map_err(|e| LabError::Io(std::io::Error::other(e)))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| LabError::Io(std::io::Error::other(e)))?;
    s.push('\n');
    Ok(s)
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PlotStyle {
    Line,
    Scatter,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub style: PlotStyle,
    pub series: Vec<Series>,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// SVG text of the plot; version 1 styling.
pub fn render_svg(plot: &Plot) -> Result<String> {
    let pts: Vec<(f64, f64)> = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|&(x, y)| x.is_finite() && y.is_finite() && (!plot.log_x || x > 0.0))
        .collect();
    if pts.is_empty() {
        return Err(LabError::domain("plot needs at least one finite point"));
    }
    let tx = |x: f64| if plot.log_x { x.log10() } else { x };
    let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(tx(p.0)), b.max(tx(p.0))));
    let (mut y0, mut y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if x1 - x0 < 1e-12 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if y1 - y0 < 1e-12 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let sx = |x: f64| LEFT + (tx(x) - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let sy = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(&plot.title));
    let (bx, by) = (H - BOTTOM, W - RIGHT);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{bx}" x2="{by}" y2="{bx}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bx}" stroke="black"/>"#);
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let xv = if plot.log_x { 10f64.powf(fx) } else { fx };
        let px = sx(xv);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{bx}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, bx + 4.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, bx + 16.0, tick_label(xv));
        let yv = y0 + (y1 - y0) * k as f64 / 4.0;
        let py = sy(yv);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>"#, LEFT - 4.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, py + 4.0, tick_label(yv));
    }
    let x_label = if plot.log_x { format!("{} (log scale)", plot.x_label) } else { plot.x_label.clone() };
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (LEFT + W - RIGHT) / 2.0, H - 12.0, escape(&x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0,
        escape(&plot.y_label)
    );
    for (i, ser) in plot.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let p: Vec<(f64, f64)> = ser
            .points
            .iter()
            .copied()
            .filter(|&(x, y)| x.is_finite() && y.is_finite() && (!plot.log_x || x > 0.0))
            .collect();
        match plot.style {
            PlotStyle::Line => {
                let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            }
            PlotStyle::Scatter => {
                for &(x, y) in &p {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y));
                }
            }
        }
        let ly = TOP + 14.0 * i as f64 + 6.0;
        let lx = W - RIGHT - 150.0;
        let _ = writeln!(s, r#"<rect x="{lx:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#, ly - 8.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 14.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg_plot(plot: &Plot, path: &Path) -> Result<()> {
    fs::write(path, render_svg(plot)?)?;
    Ok(())
}

/// Everything one command run produced.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// The normalized configuration; rerunning it reproduces the report.
    pub config: ExperimentConfig,
    pub version: &'static str,
    pub seeds: BTreeMap<String, u64>,
    pub result: Value,
    pub rows: usize,
    /// Only present when timing was requested; never part of reproducible artifacts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    #[serde(skip)]
    pub table: Table,
    #[serde(skip)]
    pub plot: Option<Plot>,
}

impl RunReport {
    pub fn new(config: &ExperimentConfig, result: Value, table: Table) -> Self {
        RunReport {
            command: config.command.clone(),
            config: config.clone(),
            version: VERSION,
            seeds: BTreeMap::new(),
            result,
            rows: table.rows.len(),
            wall_time_ms: None,
            table,
            plot: None,
        }
    }

    pub fn with_plot(mut self, plot: Plot) -> Self {
        self.plot = Some(plot);
        self
    }

    pub fn with_seed(mut self, name: &str, seed: u64) -> Self {
        self.seeds.insert(name.to_string(), seed);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        to_sorted_json(self)
    }

    /// Writes `report.json`, `rows.csv` and `plot.svg` when there is a plot.
    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = vec![dir.join("report.json"), dir.join("rows.csv")];
        fs::write(&out[0], self.to_json()?)?;
        fs::write(&out[1], self.table.to_csv()?)?;
        if let Some(p) = &self.plot {
            let path = dir.join("plot.svg");
            emit_svg_plot(p, &path)?;
            out.push(path);
        }
        Ok(out)
    }
}
