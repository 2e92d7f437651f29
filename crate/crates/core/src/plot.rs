//! Self-contained SVG line and scatter plots of result tables.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::steady::{ss_ideal_homog, ss_ideal_inhomog};
use crate::table::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotStyle {
    Line,
    Scatter,
}

/// Analytic J̃z/(N/2) curves against r = Ω_d/Ω_c^h, drawn in black. Both
/// join the zero branch above their critical drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceCurve {
    IdealHomog,
    IdealInhomog,
}

impl ReferenceCurve {
    pub fn eval(self, r: f64) -> Option<f64> {
        if !(r.is_finite() && r >= 0.0) {
            return None;
        }
        let sol = match self {
            ReferenceCurve::IdealHomog => ss_ideal_homog(r),
            ReferenceCurve::IdealInhomog => ss_ideal_inhomog(r),
        }
        .ok()?;
        Some(if sol.exists { sol.j_z_weighted? } else { 0.0 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub x: String,
    pub y: Vec<String>,
    pub style: PlotStyle,
    pub reference: Option<ReferenceCurve>,
    pub title: Option<String>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
const REFERENCE_SAMPLES: usize = 400;

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

/// Tick positions at 1, 2 or 5 times a power of ten, about `target` of them.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let d = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - d, hi + d)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Renders the columns named in `spec` as an SVG document. Rows with an
/// empty x or y cell are skipped.
pub fn emit_plot(table: &ResultTable, spec: &PlotSpec) -> Result<String> {
    if table.is_empty() {
        return Err(Error::Table("cannot plot an empty table".into()));
    }
    if spec.y.is_empty() {
        return Err(Error::Table("no y columns selected".into()));
    }
    let xs = table.numeric_column(&spec.x)?;
    let mut series = Vec::with_capacity(spec.y.len());
    for name in &spec.y {
        let ys = table.numeric_column(name)?;
        let points: Vec<(f64, f64)> = xs
            .iter()
            .zip(&ys)
            .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        series.push(Series { name: name.clone(), points });
    }
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Table("no finite data points".into()));
    }
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    let reference: Vec<(f64, f64)> = match spec.reference {
        Some(c) => (0..REFERENCE_SAMPLES)
            .filter_map(|i| {
                let x = x_lo + (x_hi - x_lo) * i as f64 / (REFERENCE_SAMPLES - 1) as f64;
                c.eval(x).map(|y| (x, y))
            })
            .collect(),
        None => Vec::new(),
    };
    for &(_, y) in &reference {
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    let (x_lo, x_hi) = padded_range(x_lo, x_hi);
    let (y_lo, y_hi) = padded_range(y_lo, y_hi);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * ph;

    let mut svg = String::new();
    let w = &mut svg;
    // Writing to a String cannot fail.
    let _ = writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if let Some(t) = &spec.title {
        let _ = writeln!(w, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(t));
    }
    let _ = writeln!(w, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for t in ticks(x_lo, x_hi, 6) {
        let x = sx(t);
        let _ = writeln!(w, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(w, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, fmt_tick(t));
    }
    for t in ticks(y_lo, y_hi, 6) {
        let y = sy(t);
        let _ = writeln!(w, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, fmt_tick(t));
    }
    let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 12.0, escape(&spec.x));
    let y_label = spec.y.join(", ");
    let _ = writeln!(
        w,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + ph / 2.0,
        escape(&y_label)
    );
    if reference.len() > 1 {
        let pts: Vec<String> = reference.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(w, r#"<polyline class="reference" fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
    }
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(w, r#"<g class="series" data-name="{}">"#, escape(&s.name));
        match spec.style {
            PlotStyle::Line => {
                let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(w, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
            }
            PlotStyle::Scatter => {
                for &(x, y) in &s.points {
                    let _ = writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
                }
            }
        }
        let ly = TOP + 16.0 + 16.0 * i as f64;
        let _ = writeln!(w, r#"<text x="{:.2}" y="{ly:.2}" fill="{color}" text-anchor="end">{}</text>"#, LEFT + pw - 8.0, escape(&s.name));
        let _ = writeln!(w, "</g>");
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        ResultTable::from_csv_str("r,jz,note\n0.1,-0.99,a\n0.5,-0.86,b\n1.2,0.0,\n").unwrap()
    }

    fn spec(y: &str) -> PlotSpec {
        PlotSpec { x: "r".into(), y: vec![y.into()], style: PlotStyle::Scatter, reference: Some(ReferenceCurve::IdealHomog), title: Some("a < b".into()) }
    }

    #[test]
    fn scatter_with_reference() {
        let svg = emit_plot(&table(), &spec("jz")).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("class=\"reference\"").count(), 1);
        assert!(svg.contains("a &lt; b"));
    }

    #[test]
    fn reference_branches_join_at_zero() {
        let c = ReferenceCurve::IdealHomog;
        assert_eq!(c.eval(0.0), Some(-1.0));
        assert!((c.eval(0.6).unwrap() + 0.8).abs() < 1e-12);
        assert_eq!(c.eval(1.5), Some(0.0));
        let c = ReferenceCurve::IdealInhomog;
        assert_eq!(c.eval(0.9), Some(0.0));
        assert!(c.eval(0.8).unwrap() < -0.2);
    }

    #[test]
    fn errors() {
        assert!(emit_plot(&table(), &spec("note")).is_err());
        assert!(emit_plot(&table(), &spec("missing")).is_err());
        let empty = ResultTable::new(["r", "jz"]).unwrap();
        assert!(emit_plot(&empty, &spec("jz")).is_err());
    }

    #[test]
    fn tick_spacing() {
        assert_eq!(ticks(0.0, 1.0, 5), [0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(fmt_tick(-0.0), "0");
        assert_eq!(fmt_tick(0.25), "0.25");
    }
}
