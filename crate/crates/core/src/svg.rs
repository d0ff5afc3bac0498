//! Minimal self-contained SVG line charts.

use std::fmt::Write;

use crate::solver::SeriesRecord;

const WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 240.0;
const MARGIN: f64 = 48.0;

/// One plotted curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
}

fn bounds(points: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
        b.0 = b.0.min(x);
        b.1 = b.1.max(x);
        b.2 = b.2.min(y);
        b.3 = b.3.max(y);
    }
    if !b.0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if b.1 <= b.0 {
        b.1 = b.0 + 1.0;
    }
    if b.3 <= b.2 {
        b.3 = b.2 + 1.0;
    }
    b
}

fn panel(out: &mut String, curve: &Curve, top: f64) {
    let (x0, x1, y0, y1) = bounds(&curve.points);
    let w = WIDTH - 2.0 * MARGIN;
    let h = PANEL_HEIGHT - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * w;
    let py = |y: f64| top + MARGIN + (1.0 - (y - y0) / (y1 - y0)) * h;
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="#888"/>"##,
        top + MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{:.1}" font-size="13">{}</text>"#,
        top + MARGIN - 8.0,
        curve.label
    );
    for (val, y) in [(y1, py(y1)), (y0, py(y0))] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{val:.3e}</text>"#,
            MARGIN - 4.0,
            y + 3.0
        );
    }
    for (val, x) in [(x0, px(x0)), (x1, px(x1))] {
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" font-size="10" text-anchor="middle">{val:.3}</text>"#,
            top + PANEL_HEIGHT - MARGIN + 14.0
        );
    }
    let path: Vec<String> = curve
        .points
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
        curve.color,
        path.join(" ")
    );
}

/// Stacks each curve in its own panel with a shared width.
pub fn stacked_chart(curves: &[Curve]) -> String {
    let height = PANEL_HEIGHT * curves.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, c) in curves.iter().enumerate() {
        panel(&mut out, c, k as f64 * PANEL_HEIGHT);
    }
    out.push_str("</svg>\n");
    out
}

/// Front position and peak infection against time.
pub fn series_chart(series: &[SeriesRecord]) -> String {
    stacked_chart(&[
        Curve {
            label: "h(t)".into(),
            points: series.iter().map(|r| (r.t, r.h)).collect(),
            color: "#1f77b4",
        },
        Curve {
            label: "sup I(t)".into(),
            points: series.iter().map(|r| (r.t, r.sup_i)).collect(),
            color: "#d62728",
        },
    ])
}
