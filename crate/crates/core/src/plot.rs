//! Self-contained SVG line charts from sweep CSV files.

use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::stats::Z_95;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("{path}: no column named `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: no data rows")]
    NoDataRows { path: PathBuf },
    #[error("{path}: line {line}: column `{column}` is not a number")]
    BadNumber { path: PathBuf, line: usize, column: String },
    #[error("no y columns requested")]
    NoSeries,
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Unreadable { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Shaded interval as `(x, low, high)` triples.
pub type Band = Vec<(f64, f64, f64)>;

/// One curve, optionally with a shaded band.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub band: Option<Band>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const PLOT_WIDTH: f64 = 460.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const LEGEND_PAD: f64 = 60.0;
// rough advance of a 12px sans-serif glyph
const CHAR_WIDTH: f64 = 7.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64> + Clone, allow_log: bool) -> Self {
        let lo = values.clone().fold(f64::INFINITY, f64::min);
        let hi = values.fold(f64::NEG_INFINITY, f64::max);
        let log = allow_log && lo > 0.0 && hi / lo >= 100.0;
        let (lo, hi) = if log { (lo.log10(), hi.log10()) } else { (lo, hi) };
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        if log {
            return Self { lo, hi, log };
        }
        let step = nice_step((hi - lo) / 5.0);
        Self { lo: (lo / step).floor() * step, hi: (hi / step).ceil() * step, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            (self.lo.ceil() as i32..=self.hi.floor() as i32).map(|e| 10f64.powi(e)).collect()
        } else {
            let step = nice_step((self.hi - self.lo) / 5.0);
            let n = ((self.hi - self.lo) / step).round() as i64;
            (0..=n).map(|k| self.lo + step * k as f64).collect()
        }
    }
}

/// Smallest of 1, 2 or 5 times a power of ten that is at least `raw`.
fn nice_step(raw: f64) -> f64 {
    let base = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * base).find(|s| *s >= raw * (1.0 - 1e-9)).unwrap_or(10.0 * base)
}

/// Renders the chart as a standalone SVG document.
pub fn render_svg(chart: &Chart) -> String {
    let plot_w = PLOT_WIDTH;
    let longest = chart.series.iter().map(|s| s.label.chars().count()).max().unwrap_or(0);
    let width = (MARGIN_LEFT + plot_w + LEGEND_PAD + CHAR_WIDTH * longest as f64).ceil();
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let xs = chart.series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = chart
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1).chain(s.band.iter().flatten().flat_map(|b| [b.1, b.2])));
    let x_axis = Axis::fit(xs, true);
    let y_axis = Axis::fit(ys, false);
    let px = |x: f64| MARGIN_LEFT + x_axis.unit(x) * plot_w;
    let py = |y: f64| MARGIN_TOP + (1.0 - y_axis.unit(y)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{HEIGHT}" viewBox="0 0 {width} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{width}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(&chart.title)
    );

    // axes and ticks
    let (x0, x1, y0, y1) = (MARGIN_LEFT, MARGIN_LEFT + plot_w, MARGIN_TOP + plot_h, MARGIN_TOP);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for t in x_axis.ticks() {
        let x = px(t);
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 20.0, tick_label(t));
    }
    for t in y_axis.ticks() {
        let y = py(t);
        let _ = writeln!(svg, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#dddddd"/>"##);
        let _ =
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, y + 4.0, tick_label(t));
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        x0 + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(&chart.y_label)
    );

    for (k, s) in chart.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if let Some(band) = &s.band {
            let upper = band.iter().map(|b| format!("{:.2},{:.2}", px(b.0), py(b.2)));
            let lower = band.iter().rev().map(|b| format!("{:.2},{:.2}", px(b.0), py(b.1)));
            let pts: Vec<String> = upper.chain(lower).collect();
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                pts.join(" ")
            );
        }
        let pts: Vec<String> = s.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1))).collect();
        let _ =
            writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, pts.join(" "));
        for p in &s.points {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(p.0), py(p.1));
        }
        let ly = MARGIN_TOP + 10.0 + 20.0 * k as f64;
        let lx = x1 + 15.0;
        let _ = writeln!(svg, r#"<rect x="{lx}" y="{:.2}" width="18" height="4" fill="{color}"/>"#, ly - 2.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}">{}</text>"#, lx + 24.0, ly + 4.0, escape(&s.label));
    }
    svg.push_str("</svg>\n");
    svg
}

struct Table {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> Result<Self, PlotError> {
        let file = File::open(path).map_err(|source| PlotError::Unreadable { path: path.into(), source })?;
        let mut rdr = csv::Reader::from_reader(file);
        let csv_err = |source| PlotError::Csv { path: path.into(), source };
        let header = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(csv_err)?;
        if rows.is_empty() {
            return Err(PlotError::NoDataRows { path: path.into() });
        }
        Ok(Self { path: path.into(), header, rows })
    }

    fn index(&self, column: &str) -> Option<usize> {
        self.header.iter().position(|h| h == column)
    }

    fn numbers(&self, column: &str) -> Result<Vec<f64>, PlotError> {
        let i = self
            .index(column)
            .ok_or_else(|| PlotError::MissingColumn { path: self.path.clone(), column: column.into() })?;
        self.rows
            .iter()
            .enumerate()
            .map(|(k, r)| {
                r[i].parse().map_err(|_| PlotError::BadNumber {
                    path: self.path.clone(),
                    line: k + 2,
                    column: column.into(),
                })
            })
            .collect()
    }

    /// Interval around `mc_mean`: Wilson bounds if present, else a normal band from `mc_stderr`.
    fn band(&self, y_column: &str, xs: &[f64], ys: &[f64]) -> Result<Option<Band>, PlotError> {
        if y_column != "mc_mean" {
            return Ok(None);
        }
        if self.index("mc_ci_low").is_some() && self.index("mc_ci_high").is_some() {
            let lo = self.numbers("mc_ci_low")?;
            let hi = self.numbers("mc_ci_high")?;
            return Ok(Some((0..xs.len()).map(|i| (xs[i], lo[i], hi[i])).collect()));
        }
        if self.index("mc_stderr").is_some() {
            let se = self.numbers("mc_stderr")?;
            return Ok(Some((0..xs.len()).map(|i| (xs[i], ys[i] - Z_95 * se[i], ys[i] + Z_95 * se[i])).collect()));
        }
        Ok(None)
    }
}

/// Builds a chart with one series per (file, y column). Series labels carry
/// the file stem when more than one file is given.
pub fn chart_from_csv(paths: &[PathBuf], x_column: &str, y_columns: &[String]) -> Result<Chart, PlotError> {
    if y_columns.is_empty() || paths.is_empty() {
        return Err(PlotError::NoSeries);
    }
    let mut series = Vec::new();
    let mut x_label = x_column.to_string();
    for path in paths {
        let table = Table::read(path)?;
        if x_column == "sweep_value" {
            if let Some(var) = table.index("sweep_var").map(|i| &table.rows[0][i]) {
                x_label = var.clone();
            }
        }
        let xs = table.numbers(x_column)?;
        for y in y_columns {
            let ys = table.numbers(y)?;
            let mut order: Vec<usize> = (0..xs.len()).collect();
            order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
            let band = table.band(y, &xs, &ys)?.map(|b| order.iter().map(|&i| b[i]).collect::<Vec<_>>());
            let points = order.iter().map(|&i| (xs[i], ys[i])).collect();
            let label = if paths.len() > 1 {
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                format!("{stem}: {y}")
            } else {
                y.clone()
            };
            series.push(Series { label, points, band });
        }
    }
    Ok(Chart { title: "Connection probability".into(), x_label, y_label: "probability".into(), series })
}

/// Reads `csv_paths`, plots `y_columns` against `x_column` and writes the SVG.
pub fn emit_svg_plot(csv_paths: &[PathBuf], x_column: &str, y_columns: &[String], out: &Path) -> Result<(), PlotError> {
    let chart = chart_from_csv(csv_paths, x_column, y_columns)?;
    std::fs::write(out, render_svg(&chart)).map_err(|source| PlotError::Io { path: out.into(), source })
}
