// SPDX-License-Identifier: Apache-2.0

//! Static SVG line charts.

use std::fmt::Write as _;

use msnet::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 48.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self { label: label.into(), values }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders equal-length series against their index.
pub fn emit_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<String> {
    let Some(first) = series.first() else {
        return Err(Error::InvalidArgument("plot needs at least one series".into()));
    };
    let len = first.values.len();
    if len == 0 || series.iter().any(|s| s.values.len() != len) {
        return Err(Error::InvalidArgument("plot series must be non-empty and of equal length".into()));
    }
    if series.iter().flat_map(|s| &s.values).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("plot values must be finite".into()));
    }
    let mut lo = series.iter().flat_map(|s| &s.values).copied().fold(f64::INFINITY, f64::min);
    let mut hi = series.iter().flat_map(|s| &s.values).copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 0.0 { lo.abs() * 0.1 } else { 0.5 };
        lo -= pad;
        hi += pad;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |k: usize| if len == 1 { LEFT + plot_w / 2.0 } else { LEFT + plot_w * k as f64 / (len - 1) as f64 };
    let y = |v: f64| TOP + plot_h * (hi - v) / (hi - lo);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black"><line x1="{LEFT}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{b}"/></g>"#,
        b = TOP + plot_h,
        r = LEFT + plot_w
    );
    for k in 0..5 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.3}</text>"#, LEFT - 6.0, y(v) + 4.0);
    }
    let ticks = len.min(10);
    for k in 0..ticks {
        let idx = if ticks == 1 { 0 } else { k * (len - 1) / (ticks - 1) };
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{idx}</text>"#, x(idx), TOP + plot_h + 16.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, LEFT + plot_w / 2.0, HEIGHT - 10.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{c:.1}" text-anchor="middle" transform="rotate(-90 16 {c:.1})">{}</text>"#,
        escape(y_label),
        c = TOP + plot_h / 2.0
    );
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        for (i, &v) in ser.values.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, x(i), y(v));
        }
        if len == 1 {
            let _ = write!(d, " L{:.2},{:.2}", x(0) + 1.0, y(ser.values[0]));
        }
        let _ = writeln!(s, r#"<path class="series" d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#);
    }
    let _ = writeln!(s, r#"<g class="legend">"#);
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let ly = TOP + 16.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><rect x="{lx}" y="{ly}" width="12" height="3" fill="{color}"/><text x="{}" y="{}">{}</text></g>"#,
            lx + 18.0,
            ly + 5.0,
            escape(&ser.label)
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_horizontal() {
        let svg = emit_plot("t", "x", "y", &[Series::new("flat", vec![2.0; 4])]).unwrap();
        let path = svg.lines().find(|l| l.contains("class=\"series\"")).unwrap();
        let d = path.split("d=\"").nth(1).unwrap().split('"').next().unwrap();
        let ys: Vec<&str> = d.split(' ').map(|p| p.trim_start_matches(['M', 'L']).split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(emit_plot("t", "x", "y", &[]).is_err());
        assert!(emit_plot("t", "x", "y", &[Series::new("a", vec![1.0]), Series::new("b", vec![1.0, 2.0])]).is_err());
        assert!(emit_plot("t", "x", "y", &[Series::new("a", vec![])]).is_err());
    }

    #[test]
    fn labels_are_escaped() {
        let svg = emit_plot("a<b", "x", "y", &[Series::new("p&q", vec![0.0, 1.0])]).unwrap();
        assert!(svg.contains("a&lt;b") && svg.contains("p&amp;q"));
    }
}
