//! Deterministic SVG line plots for trace files.
//!
//! The renderer is intentionally small: stacked panels, linear axes, fixed
//! colors, and fixed-precision coordinates so identical input bytes produce
//! identical output bytes.

use std::path::Path;

use crate::{Error, Result};

/// A parsed trace file: named columns of optional floats plus metadata.
#[derive(Debug, Clone)]
pub struct TraceTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub law: Option<String>,
    pub truncated: Option<String>,
}

impl TraceTable {
    pub fn read(path: &Path) -> Result<TraceTable> {
        let text = std::fs::read_to_string(path)?;
        let name = path.display().to_string();
        let mut columns: Vec<String> = Vec::new();
        let mut rows = Vec::new();
        let mut law = None;
        let mut truncated = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if let Some(meta) = line.strip_prefix('#') {
                let meta = meta.trim();
                if let Some(v) = meta.strip_prefix("law=") {
                    law = Some(v.to_string());
                } else if let Some(v) = meta.strip_prefix("truncated=") {
                    truncated = Some(v.to_string());
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if columns.is_empty() {
                columns = line.split(',').map(|c| c.trim().to_string()).collect();
                continue;
            }
            let cells: Vec<Option<f64>> = line
                .split(',')
                .map(|c| {
                    let c = c.trim();
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>().map(Some).map_err(|_| {
                            Error::parse(
                                format!("{name}:{line_no}"),
                                format!("invalid number '{c}'"),
                            )
                        })
                    }
                })
                .collect::<Result<_>>()?;
            if cells.len() != columns.len() {
                return Err(Error::parse(
                    format!("{name}:{line_no}"),
                    format!("expected {} cells, got {}", columns.len(), cells.len()),
                ));
            }
            rows.push(cells);
        }
        if columns.is_empty() {
            return Err(Error::parse(name, "no header line found"));
        }
        Ok(TraceTable {
            columns,
            rows,
            law,
            truncated,
        })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// (x, y) pairs for one column against another, skipping empty cells.
    pub fn series(&self, x: usize, y: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| match (r[x], r[y]) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            })
            .collect()
    }
}

/// One curve within a panel.
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// One stacked plot panel.
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 240.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 30.0;

/// Renders stacked panels to a standalone SVG document.
///
/// `marker` draws a dashed vertical line with a label at a given x in every
/// panel (used for truncation times).
pub fn render(panels: &[Panel], marker: Option<(f64, &str)>) -> String {
    let total_height = PANEL_HEIGHT * panels.len() as f64;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{total_height}\" \
         viewBox=\"0 0 {WIDTH} {total_height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut svg, panel, i as f64 * PANEL_HEIGHT, marker);
    }
    svg.push_str("</svg>\n");
    svg
}

fn render_panel(svg: &mut String, panel: &Panel, y_off: f64, marker: Option<(f64, &str)>) {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in &panel.series {
        for &(x, y) in &s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if let Some((mx, _)) = marker {
        x_min = x_min.min(mx);
        x_max = x_max.max(mx);
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if x_max - x_min < 1e-300 {
        x_max = x_min + 1.0;
    }
    // Pad the value range so flat curves sit mid-panel.
    let pad = ((y_max - y_min) * 0.05).max(1e-12 * y_max.abs().max(1.0));
    y_min -= pad;
    y_max += pad;

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w,
            y_off + MARGIN_TOP + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h,
        )
    };

    svg.push_str(&format!(
        "<text x=\"{MARGIN_LEFT}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"14\" \
         font-weight=\"bold\">{}</text>\n",
        y_off + 18.0,
        escape(&panel.title)
    ));

    // Frame and tick labels.
    let (fx0, fy1) = to_px(x_min, y_min);
    let (fx1, fy0) = to_px(x_max, y_max);
    svg.push_str(&format!(
        "<rect x=\"{fx0:.2}\" y=\"{fy0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" \
         stroke=\"#888\" stroke-width=\"1\"/>\n",
        fx1 - fx0,
        fy1 - fy0
    ));
    for frac in [0.0, 0.5, 1.0] {
        let xv = x_min + frac * (x_max - x_min);
        let yv = y_min + frac * (y_max - y_min);
        let (px, _) = to_px(xv, y_min);
        let (_, py) = to_px(x_min, yv);
        svg.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" \
             text-anchor=\"middle\" fill=\"#444\">{}</text>\n",
            fy1 + 14.0,
            format_tick(xv)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" \
             text-anchor=\"end\" fill=\"#444\">{}</text>\n",
            fx0 - 6.0,
            py + 3.0,
            format_tick(yv)
        ));
    }

    for (i, s) in panel.series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (j, &(x, y)) in s.points.iter().enumerate() {
            let (px, py) = to_px(x, y);
            d.push_str(if j == 0 { "M" } else { " L" });
            d.push_str(&format!("{px:.2} {py:.2}"));
        }
        svg.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            s.color
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"{}\">{}</text>\n",
            fx0 + 8.0 + 120.0 * i as f64,
            fy0 + 14.0,
            s.color,
            escape(&s.label)
        ));
    }

    if let Some((mx, label)) = marker {
        let (px, _) = to_px(mx, y_min);
        svg.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{fy0:.2}\" x2=\"{px:.2}\" y2=\"{fy1:.2}\" \
             stroke=\"#c00\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" \
             fill=\"#c00\" text-anchor=\"end\">{}</text>\n",
            px - 4.0,
            fy0 + 12.0,
            escape(label)
        ));
    }
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 0.01 && v.abs() < 10000.0 {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
