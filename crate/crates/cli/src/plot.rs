//! Static SVG figures from the harness CSV files.
//!
//! Output is a pure function of the CSV contents: coordinates are printed
//! with a fixed number of decimals and nothing time- or host-dependent is
//! embedded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::error::{HarnessError, Result};
use crate::figures::{Fig1Row, Fig2Row, FIG1_COLUMNS, FIG2_COLUMNS};
use crate::output::write_text;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;

const PALETTE: [(&str, &str); 3] = [("GUE", "#1f77b4"), ("GOE", "#d62728"), ("spin-chain", "#2ca02c")];
const FALLBACK_COLORS: [&str; 3] = ["#9467bd", "#8c564b", "#ff7f0e"];

fn color(name: &str, index: usize) -> &'static str {
    PALETTE
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, c)| *c)
        .unwrap_or(FALLBACK_COLORS[index % FALLBACK_COLORS.len()])
}

/// Which figure a CSV file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Fig1,
    Fig2,
}

fn read_rows<T: DeserializeOwned>(path: &Path, reader: &mut csv::Reader<std::fs::File>) -> Result<Vec<T>> {
    let rows = reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| HarnessError::schema(path, format!("row {}: {e}", i + 1))))
        .collect::<Result<Vec<T>>>()?;
    if rows.is_empty() {
        return Err(HarnessError::schema(path, "no data rows"));
    }
    Ok(rows)
}

fn finite(path: &Path, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(HarnessError::schema(path, "non-finite value"))
    }
}

/// Parsed contents of a figure CSV.
pub enum PlotData {
    Fig1(Vec<Fig1Row>),
    Fig2(Vec<Fig2Row>),
}

/// Reads a CSV and identifies its figure from the header.
pub fn read_plot_data(path: &Path) -> Result<PlotData> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let header = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(HarnessError::schema(path, e.to_string())),
    };
    let columns: Vec<&str> = header.iter().collect();
    if columns.is_empty() || columns == [""] {
        return Err(HarnessError::schema(path, "empty file"));
    }
    if columns == FIG1_COLUMNS {
        let rows: Vec<Fig1Row> = read_rows(path, &mut reader)?;
        for r in &rows {
            finite(path, &[r.e_max_mean, r.e_max_std, r.e_min_mean, r.e_min_std])?;
        }
        Ok(PlotData::Fig1(rows))
    } else if columns == FIG2_COLUMNS {
        let rows: Vec<Fig2Row> = read_rows(path, &mut reader)?;
        for r in &rows {
            finite(path, &[r.neg_log2_mean_purity, r.std, r.analytic, r.bound])?;
        }
        Ok(PlotData::Fig2(rows))
    } else {
        Err(HarnessError::schema(
            path,
            format!("unrecognized columns {columns:?}; expected {FIG1_COLUMNS:?} or {FIG2_COLUMNS:?}"),
        ))
    }
}

/// Renders every CSV to `<out_dir>/<stem>.svg`. All inputs are parsed and
/// rendered before the first file is written.
pub fn emit_plots(csv_paths: &[PathBuf], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut rendered = Vec::new();
    for path in csv_paths {
        let svg = match read_plot_data(path)? {
            PlotData::Fig1(rows) => render_fig1(&rows),
            PlotData::Fig2(rows) => render_fig2(&rows),
        };
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "plot".into());
        rendered.push((out_dir.join(format!("{stem}.svg")), svg));
    }
    for (target, svg) in &rendered {
        write_text(target, svg)?;
    }
    Ok(rendered.into_iter().map(|(p, _)| p).collect())
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let fraction = raw / magnitude;
    let nice = if fraction <= 1.0 {
        1.0
    } else if fraction <= 2.0 {
        2.0
    } else if fraction <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * magnitude
}

/// Axis limits padded to whole tick steps, with the ticks.
fn axis(lo: f64, hi: f64, integer: bool) -> ((f64, f64), Vec<f64>) {
    let (lo, hi) = if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    };
    let mut step = nice_step(hi - lo, 6);
    if integer {
        step = step.max(1.0).round();
    }
    let start = (lo / step).floor() * step;
    let end = (hi / step).ceil() * step;
    let count = ((end - start) / step).round() as usize;
    let ticks = (0..=count).map(|i| start + i as f64 * step).collect();
    ((start, end), ticks)
}

fn label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Series {
    name: String,
    color: &'static str,
    dashed: bool,
    points: Vec<(f64, f64, f64)>,
}

fn render(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    reference: Option<(&str, Vec<(f64, f64)>)>,
) -> String {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let x_lo = xs.clone().fold(f64::INFINITY, f64::min);
    let x_hi = xs.fold(f64::NEG_INFINITY, f64::max);
    let mut y_lo = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1 - p.2))
        .fold(f64::INFINITY, f64::min);
    let mut y_hi = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1 + p.2))
        .fold(f64::NEG_INFINITY, f64::max);
    if let Some((_, line)) = &reference {
        for &(_, y) in line {
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    let (x_range, x_ticks) = axis(x_lo, x_hi, true);
    let (y_range, y_ticks) = axis(y_lo, y_hi, false);
    let frame = Frame { x: x_range, y: y_range };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (px0, px1) = (frame.sx(x_range.0), frame.sx(x_range.1));
    let (py0, py1) = (frame.sy(y_range.0), frame.sy(y_range.1));
    let _ = writeln!(
        svg,
        r#"<rect x="{px0:.2}" y="{py1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        px1 - px0,
        py0 - py1
    );
    for &t in &x_ticks {
        let x = frame.sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{py0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            py0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            py0 + 19.0,
            label(t)
        );
    }
    for &t in &y_ticks {
        let y = frame.sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{px0:.2}" y1="{y:.2}" x2="{px1:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            px0 - 6.0,
            y + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (px0 + px1) / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (py0 + py1) / 2.0,
        (py0 + py1) / 2.0,
        escape(y_label)
    );

    let mut legend: Vec<(String, &str, bool)> = Vec::new();
    if let Some((name, line)) = &reference {
        let pts: Vec<String> = line
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.sx(x), frame.sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5" stroke-dasharray="8 4"/>"#,
            pts.join(" ")
        );
        legend.push((name.to_string(), "black", true));
    }
    for s in series {
        let dash = if s.dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y, _)| format!("{:.2},{:.2}", frame.sx(x), frame.sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            pts.join(" "),
            s.color
        );
        for &(x, y, e) in &s.points {
            let (cx, cy) = (frame.sx(x), frame.sy(y));
            if e > 0.0 {
                let (top, bottom) = (frame.sy(y + e), frame.sy(y - e));
                let _ = writeln!(
                    svg,
                    r#"<path d="M{cx:.2},{top:.2}V{bottom:.2}M{:.2},{top:.2}H{:.2}M{:.2},{bottom:.2}H{:.2}" stroke="{}" fill="none"/>"#,
                    cx - 3.0,
                    cx + 3.0,
                    cx - 3.0,
                    cx + 3.0,
                    s.color
                );
            }
            let _ = writeln!(svg, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="{}"/>"#, s.color);
        }
        legend.push((s.name.clone(), s.color, s.dashed));
    }
    let lx = px1 - 170.0;
    for (i, (name, color, dashed)) in legend.iter().enumerate() {
        let y = py1 + 16.0 + 16.0 * i as f64;
        let dash = if *dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            y + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn ordered_names<'a>(names: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for n in names {
        if !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

/// Mean `e_max` (solid) and `e_min` (dashed) against `N`, error bars one
/// standard deviation.
pub fn render_fig1(rows: &[Fig1Row]) -> String {
    let mut series = Vec::new();
    for (i, name) in ordered_names(rows.iter().map(|r| r.ensemble.as_str()))
        .into_iter()
        .enumerate()
    {
        let mut group: Vec<&Fig1Row> = rows.iter().filter(|r| r.ensemble == name).collect();
        group.sort_by_key(|r| r.n);
        let c = color(name, i);
        series.push(Series {
            name: format!("{name} e_max"),
            color: c,
            dashed: false,
            points: group.iter().map(|r| (r.n as f64, r.e_max_mean, r.e_max_std)).collect(),
        });
        series.push(Series {
            name: format!("{name} e_min"),
            color: c,
            dashed: true,
            points: group.iter().map(|r| (r.n as f64, r.e_min_mean, r.e_min_std)).collect(),
        });
    }
    render("Extremal eigenvalues of the VCM", "N", "eigenvalue", &series, None)
}

/// `-log2` of the mean purity against `m` for every source, with the
/// `min(m, N - m)` bound.
pub fn render_fig2(rows: &[Fig2Row]) -> String {
    let names = ordered_names(rows.iter().map(|r| r.source.as_str()));
    let series: Vec<Series> = names
        .iter()
        .enumerate()
        .map(|(i, &name)| {
            let mut group: Vec<&Fig2Row> = rows.iter().filter(|r| r.source == name).collect();
            group.sort_by_key(|r| r.m);
            Series {
                name: name.to_string(),
                color: color(name, i),
                dashed: false,
                points: group
                    .iter()
                    .map(|r| (r.m as f64, r.neg_log2_mean_purity, r.std))
                    .collect(),
            }
        })
        .collect();
    let mut bound: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        if !bound.iter().any(|&(m, _)| m == r.m as f64) {
            bound.push((r.m as f64, r.bound));
        }
    }
    bound.sort_by(|a, b| a.0.total_cmp(&b.0));
    render(
        "Subsystem purity",
        "m",
        "-log2 mean Tr rho_m^2",
        &series,
        Some(("min(m, N - m)", bound)),
    )
}
