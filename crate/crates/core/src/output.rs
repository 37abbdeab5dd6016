//! Run manifests, CSV curve files, JSON summaries and SVG plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Everything needed to reproduce one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
    /// Seconds; `None` unless timing was requested, so outputs stay byte-identical.
    pub wall_clock_seconds: Option<f64>,
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            tolerances: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: None,
            seed: None,
        }
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }
}

/// Table of numeric rows keyed by a strictly increasing first column.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CurveFile {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return invalid("curve file needs at least one column");
        }
        if let Some(k) = rows.iter().position(|r| r.len() != columns.len()) {
            return invalid(format!(
                "row {k} has {} values, expected {}",
                rows[k].len(),
                columns.len()
            ));
        }
        if rows.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return invalid(format!(
                "primary key column {:?} must be strictly increasing",
                columns[0]
            ));
        }
        Ok(Self { columns, rows })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `# manifest <json>`, a header row, then rows with 17 significant digits.
    pub fn to_csv(&self, manifest: &RunManifest) -> String {
        let mut out = String::new();
        let m = serde_json::to_string(manifest).expect("manifest serializes");
        let _ = writeln!(out, "# manifest {m}");
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Parses text produced by [`CurveFile::to_csv`].
    pub fn from_csv(text: &str) -> Result<(RunManifest, Self)> {
        let mut lines = text.lines();
        let bad = |m: &str| Error::InvalidParams(format!("malformed curve file: {m}"));
        let first = lines.next().ok_or_else(|| bad("empty"))?;
        let json = first
            .strip_prefix("# manifest ")
            .ok_or_else(|| bad("missing manifest line"))?;
        let manifest: RunManifest = serde_json::from_str(json).map_err(|e| bad(&e.to_string()))?;
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let rows = lines
            .map(|l| {
                l.split(',')
                    .map(|c| c.parse::<f64>().map_err(|e| bad(&e.to_string())))
                    .collect()
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok((manifest, Self::new(columns, rows)?))
    }
}

/// Scientific notation with 17 significant digits; round-trips every finite `f64`.
pub fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// `{"manifest": ..., "result": ...}` pretty-printed with a trailing newline.
pub fn summary_json<T: Serialize>(manifest: &RunManifest, result: &T) -> String {
    #[derive(Serialize)]
    struct Summary<'a, T> {
        manifest: &'a RunManifest,
        result: &'a T,
    }
    let mut s =
        serde_json::to_string_pretty(&Summary { manifest, result }).expect("summary serializes");
    s.push('\n');
    s
}

/// Line plot description.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Vec<(f64, f64)>>,
    /// Fixed `((x0, x1), (y0, y1))`; fitted to the data when `None`.
    pub bounds: Option<((f64, f64), (f64, f64))>,
    /// Draw the square `[0, 1] x [0, 1]`.
    pub unit_box: bool,
}

const SVG_SIZE: f64 = 480.0;
const SVG_MARGIN: f64 = 40.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

impl Plot {
    pub fn to_svg(&self) -> String {
        let finite: Vec<(f64, f64)> = self
            .series
            .iter()
            .flatten()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        let ((x0, x1), (y0, y1)) = self.bounds.unwrap_or_else(|| {
            let fold = |f: fn(&(f64, f64)) -> f64| {
                finite
                    .iter()
                    .map(f)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                        (a.min(v), b.max(v))
                    })
            };
            let widen = |(a, b): (f64, f64)| {
                if a < b {
                    (a, b)
                } else if a.is_finite() {
                    (a - 0.5, a + 0.5)
                } else {
                    (0.0, 1.0)
                }
            };
            (widen(fold(|p| p.0)), widen(fold(|p| p.1)))
        });
        let inner = SVG_SIZE - 2.0 * SVG_MARGIN;
        let px = |x: f64| SVG_MARGIN + (x - x0) / (x1 - x0) * inner;
        let py = |y: f64| SVG_SIZE - SVG_MARGIN - (y - y0) / (y1 - y0) * inner;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">"#
        );
        let _ = writeln!(
            s,
            r#"<rect x="0" y="0" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>"#
        );
        let _ = writeln!(
            s,
            r##"<rect x="{m}" y="{m}" width="{inner}" height="{inner}" fill="none" stroke="#999" stroke-width="0.5"/>"##,
            m = SVG_MARGIN
        );
        if self.unit_box {
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="black" stroke-width="1"/>"#,
                px(0.0),
                py(1.0),
                px(1.0) - px(0.0),
                py(0.0) - py(1.0)
            );
        }
        for (k, series) in self.series.iter().enumerate() {
            let mut d = String::new();
            let mut pen_down = false;
            for &(x, y) in series {
                if !(x.is_finite() && y.is_finite()) {
                    pen_down = false;
                    continue;
                }
                let _ = write!(
                    d,
                    "{}{:.3},{:.3} ",
                    if pen_down { 'L' } else { 'M' },
                    px(x),
                    py(y)
                );
                pen_down = true;
            }
            let _ = writeln!(
                s,
                r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.2"/>"#,
                d.trim_end(),
                COLORS[k % COLORS.len()]
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            SVG_SIZE / 2.0,
            SVG_SIZE - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="12" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 12 {:.1})">{}</text>"#,
            SVG_SIZE / 2.0,
            SVG_SIZE / 2.0,
            escape(&self.y_label)
        );
        for (label, x, y, anchor) in [
            (
                format_tick(x0),
                SVG_MARGIN,
                SVG_SIZE - SVG_MARGIN + 14.0,
                "start",
            ),
            (
                format_tick(x1),
                SVG_SIZE - SVG_MARGIN,
                SVG_SIZE - SVG_MARGIN + 14.0,
                "end",
            ),
            (
                format_tick(y0),
                SVG_MARGIN - 4.0,
                SVG_SIZE - SVG_MARGIN,
                "end",
            ),
            (format_tick(y1), SVG_MARGIN - 4.0, SVG_MARGIN + 10.0, "end"),
        ] {
            let _ = writeln!(
                s,
                r#"<text x="{x:.1}" y="{y:.1}" font-size="10" text-anchor="{anchor}">{label}</text>"#
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn format_tick(v: f64) -> String {
    format!("{v:.4}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
