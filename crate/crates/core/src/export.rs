//! JSON, CSV and SVG renderings of barcodes, spectra and Wu reports.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::homology::{Barcode, WuReport};
use crate::spectral::{Parameter, SpectrumSeries};

pub const BARCODE_SCHEMA: &str = include_str!("../schemas/barcode.schema.json");
pub const SPECTRUM_SCHEMA: &str = include_str!("../schemas/spectrum.schema.json");
pub const WU_SCHEMA: &str = include_str!("../schemas/wu.schema.json");

fn death_value(d: f64) -> Value {
    if d.is_infinite() {
        json!("inf")
    } else {
        json!(d)
    }
}

/// `[{"degree": p, "bars": [{"birth": x, "death": y | "inf"}]}]` for the given degrees.
pub fn barcode_json(barcode: &Barcode, degrees: &[usize]) -> Value {
    Value::Array(
        degrees
            .iter()
            .map(|&p| {
                let bars: Vec<Value> =
                    barcode.bars(p).iter().map(|b| json!({"birth": b.birth, "death": death_value(b.death)})).collect();
                json!({"degree": p, "bars": bars})
            })
            .collect(),
    )
}

pub fn barcode_csv(barcode: &Barcode, degrees: &[usize]) -> String {
    let mut out = String::from("degree,birth,death\n");
    for &p in degrees {
        for b in barcode.bars(p) {
            let death = if b.death.is_infinite() { "inf".to_string() } else { b.death.to_string() };
            let _ = writeln!(out, "{p},{},{death}", b.birth);
        }
    }
    out
}

pub fn spectrum_json(series: &SpectrumSeries) -> Value {
    serde_json::to_value(&series.entries).expect("spectrum entries serialize")
}

/// `t,degree,nullity,gap` for snapshot curves, `a,b,degree,nullity,gap` for pairs.
pub fn spectrum_csv(series: &SpectrumSeries) -> String {
    let pairs = matches!(series.entries.first().map(|e| e.parameter), Some(Parameter::Pair { .. }));
    let mut out = String::from(if pairs { "a,b,degree,nullity,gap\n" } else { "t,degree,nullity,gap\n" });
    for e in &series.entries {
        match e.parameter {
            Parameter::Snapshot { t } => {
                let _ = write!(out, "{t},");
            }
            Parameter::Pair { a, b } => {
                let _ = write!(out, "{a},{b},");
            }
        }
        let _ = writeln!(out, "{},{},{}", e.degree, e.nullity, e.gap);
    }
    out
}

pub fn wu_json(report: &WuReport) -> Value {
    serde_json::to_value(report).expect("wu report serializes")
}

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 40.0;

fn svg_open(height: f64, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\">\n\
         <title>{}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn axis(out: &mut String, y: f64, x_max: f64) {
    let _ = writeln!(
        out,
        "<line x1=\"{MARGIN}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"black\"/>",
        WIDTH - MARGIN
    );
    for k in 0..=4 {
        let v = x_max * k as f64 / 4.0;
        let x = MARGIN + (WIDTH - 2.0 * MARGIN) * k as f64 / 4.0;
        let _ = writeln!(out, "<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">{v:.3}</text>", y + 14.0);
    }
}

/// Horizontal segments, one row per bar. Infinite bars run to the right edge.
pub fn barcode_svg(barcode: &Barcode, p: usize) -> String {
    let bars = barcode.bars(p);
    let x_max = barcode.endpoints().last().copied().unwrap_or(1.0).max(1e-9) * 1.1;
    let row = 12.0;
    let height = 2.0 * MARGIN + row * bars.len().max(1) as f64;
    let scale = |v: f64| MARGIN + (WIDTH - 2.0 * MARGIN) * (v.min(x_max) / x_max);
    let mut out = svg_open(height, &format!("barcode, degree {p}"));
    for (k, b) in bars.iter().enumerate() {
        let y = MARGIN + row * (k as f64 + 0.5);
        let x2 = if b.death.is_infinite() { WIDTH - MARGIN } else { scale(b.death) };
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{x2:.2}\" y2=\"{y:.2}\" stroke=\"steelblue\" stroke-width=\"6\"/>",
            scale(b.birth)
        );
    }
    axis(&mut out, height - MARGIN + 8.0, x_max);
    out.push_str("</svg>\n");
    out
}

/// Step plot of the spectral gap against the filtration parameter (or `b`
/// for persistent pairs).
pub fn spectrum_svg(series: &SpectrumSeries) -> String {
    let height = 320.0;
    let pts: Vec<(f64, f64)> = series
        .entries
        .iter()
        .map(|e| match e.parameter {
            Parameter::Snapshot { t } => (t, e.gap),
            Parameter::Pair { b, .. } => (b, e.gap),
        })
        .collect();
    let x_max = pts.iter().map(|p| p.0).fold(0.0, f64::max).max(1e-9);
    let y_max = pts.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-9) * 1.1;
    let sx = |v: f64| MARGIN + (WIDTH - 2.0 * MARGIN) * v / x_max;
    let sy = |v: f64| height - MARGIN - (height - 2.0 * MARGIN) * v / y_max;
    let mut out = svg_open(height, &format!("spectral gap, degree {}", series.degree));
    let mut path = String::new();
    for (k, &(x, y)) in pts.iter().enumerate() {
        if k == 0 {
            let _ = write!(path, "{:.2},{:.2}", sx(x), sy(y));
        } else {
            let _ = write!(path, " {:.2},{:.2} {:.2},{:.2}", sx(x), sy(pts[k - 1].1), sx(x), sy(y));
        }
    }
    let _ = writeln!(out, "<polyline points=\"{path}\" fill=\"none\" stroke=\"firebrick\" stroke-width=\"2\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{MARGIN}\" y=\"{:.1}\" font-size=\"10\">max gap {:.4}</text>",
        MARGIN - 10.0,
        y_max / 1.1
    );
    axis(&mut out, height - MARGIN, x_max);
    out.push_str("</svg>\n");
    out
}
