//! Minimal deterministic SVG line plots.

use std::fmt::Write;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points }
    }
}

#[derive(Debug, Clone)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self { title: String::new(), x_label: "y".into(), y_label: "F".into(), width: 640.0, height: 420.0 }
    }
}

impl PlotStyle {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), ..Self::default() }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(series: &[Series]) -> ([f64; 2], [f64; 2]) {
    let mut x = [f64::INFINITY, f64::NEG_INFINITY];
    let mut y = x;
    for (px, py) in series.iter().flat_map(|s| &s.points).filter(|(a, b)| a.is_finite() && b.is_finite()) {
        x = [x[0].min(*px), x[1].max(*px)];
        y = [y[0].min(*py), y[1].max(*py)];
    }
    let widen = |r: [f64; 2]| {
        if !r[0].is_finite() {
            [0.0, 1.0]
        } else if r[1] - r[0] <= 1e-300 {
            [r[0] - 0.5, r[1] + 0.5]
        } else {
            let pad = 0.04 * (r[1] - r[0]);
            [r[0] - pad, r[1] + pad]
        }
    };
    (widen(x), widen(y))
}

fn tick_label(v: f64, span: f64) -> String {
    if v.abs() < 1e-12 * span {
        return "0".into();
    }
    if span < 1e-3 || span > 1e5 {
        format!("{v:.2e}")
    } else {
        let digits = (2.0 - span.log10().floor()).clamp(0.0, 6.0) as usize;
        format!("{v:.digits$}")
    }
}

/// Standalone SVG with axes, tick labels, axis labels and a legend.
pub fn emit_svg(series: &[Series], style: &PlotStyle) -> String {
    let (w, h) = (style.width, style.height);
    let (left, right, top, bottom) = (70.0, 20.0, 36.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let ([x0, x1], [y0, y1]) = bounds(series);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (y1 - y) / (y1 - y0) * ph;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r##"<rect x="{left:.2}" y="{top:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#000"/>"##);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000"/>"##, top + ph, top + ph + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            top + ph + 18.0,
            tick_label(xv, x1 - x0)
        );
        let _ = writeln!(s, r##"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="#000"/>"##, left - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            left - 8.0,
            py + 4.0,
            tick_label(yv, y1 - y0)
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(s, r##"<line x1="{left:.2}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="#bbb" stroke-dasharray="4 3"/>"##, sy(0.0), left + pw);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#, left + 0.5 * pw, h - 12.0, escape(&style.x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {0:.2})">{1}</text>"#,
        top + 0.5 * ph,
        escape(&style.y_label)
    );
    if !style.title.is_empty() {
        let _ = writeln!(s, r#"<text x="{:.2}" y="22" font-size="14" text-anchor="middle">{}</text>"#, 0.5 * w, escape(&style.title));
    }
    for (k, ser) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|&(a, b)| format!("{:.2},{:.2}", sx(a), sy(b)))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        }
        let ly = top + 14.0 + 16.0 * k as f64;
        let lx = left + pw - 150.0;
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#, lx + 22.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#, lx + 28.0, ly + 4.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_labelled() {
        let ser = vec![Series::new("F", vec![(0.0, 1.0), (0.5, 0.6), (1.0, 0.0)])];
        let a = emit_svg(&ser, &PlotStyle::default());
        assert_eq!(a, emit_svg(&ser, &PlotStyle::default()));
        assert!(a.starts_with("<svg") && a.contains("polyline") && a.contains(">F</text>") && a.contains(">y</text>"));
    }
}
