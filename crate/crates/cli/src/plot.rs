//! Static SVG line charts: the observed series as a solid line, each
//! method's test-window predictions dashed, and a divider at the forecast
//! origin. Rendering is a pure function of its inputs, so a rerun writes
//! byte-identical files.

use std::fmt::Write as _;

use epicast_core::calendar::CalendarMonth;
use epicast_core::series::TimeSeries;

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const TOP: f64 = 40.0;
const PLOT_W: f64 = 620.0;
const PLOT_H: f64 = 300.0;
const LEGEND_X: f64 = 704.0;

const OBSERVED_COLOR: &str = "#111827";
const METHOD_COLORS: [&str; 3] = ["#b45309", "#b91c1c", "#1d4ed8"];

/// One region's chart. `observed` should span the history plus the test
/// window; each prediction series covers the test window from `test_start`.
pub fn region_chart(
    region: &str,
    observed: &TimeSeries,
    test_start: CalendarMonth,
    predictions: &[(String, Vec<f64>)],
) -> String {
    let n = observed.len();
    let denom = (n.saturating_sub(1)).max(1) as f64;
    let x = |i: f64| LEFT + i / denom * PLOT_W;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let points = observed
        .values()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)));
    for (_, v) in points.clone() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for v in predictions.iter().flat_map(|(_, p)| p) {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
    let (lo, hi) = (lo - pad, hi + pad);
    let y = |v: f64| TOP + (1.0 - (v - lo) / (hi - lo)) * PLOT_H;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}" font-family="sans-serif">"##
    );
    let _ = writeln!(
        svg,
        r##"<rect width="{WIDTH:.0}" height="{HEIGHT:.0}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<text x="{LEFT:.0}" y="24" font-size="15" font-weight="bold" fill="#111827">{}</text>"##,
        escape(region)
    );

    // horizontal gridlines with value labels
    for k in 0..5 {
        let v = lo + (hi - lo) * f64::from(k) / 4.0;
        let yy = y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#e5e7eb"/>"##,
            LEFT + PLOT_W
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end" fill="#374151">{v:.1}</text>"##,
            LEFT - 8.0,
            yy + 4.0
        );
    }

    // January ticks, thinned when the span is long
    let januaries: Vec<usize> = (0..n)
        .filter(|&i| observed.month_at(i).month() == 1)
        .collect();
    let stride = januaries.len().div_ceil(12).max(1);
    for (k, &i) in januaries.iter().enumerate() {
        let xx = x(i as f64);
        let base = TOP + PLOT_H;
        let _ = writeln!(
            svg,
            r##"<line x1="{xx:.2}" y1="{base:.2}" x2="{xx:.2}" y2="{:.2}" stroke="#9ca3af"/>"##,
            base + 5.0
        );
        if k % stride == 0 {
            let _ = writeln!(
                svg,
                r##"<text x="{xx:.2}" y="{:.2}" font-size="11" text-anchor="middle" fill="#374151">{}</text>"##,
                base + 20.0,
                observed.month_at(i)
            );
        }
    }

    // forecast origin divider
    let split_index = test_start.months_since(observed.start()) as f64 - 0.5;
    if split_index > 0.0 {
        let xx = x(split_index);
        let _ = writeln!(
            svg,
            r##"<line x1="{xx:.2}" y1="{TOP:.2}" x2="{xx:.2}" y2="{:.2}" stroke="#9ca3af" stroke-dasharray="2 4"/>"##,
            TOP + PLOT_H
        );
    }

    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="{OBSERVED_COLOR}" stroke-width="1.5" points="{}"/>"##,
        polyline(points.map(|(i, v)| (x(i as f64), y(v))))
    );

    let offset = test_start.months_since(observed.start()) as usize;
    for (k, (_, values)) in predictions.iter().enumerate() {
        let color = METHOD_COLORS[k % METHOD_COLORS.len()];
        let pts = values
            .iter()
            .enumerate()
            .map(|(j, &v)| (x((offset + j) as f64), y(v)));
        let _ = writeln!(
            svg,
            r##"<polyline fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 3" points="{}"/>"##,
            polyline(pts)
        );
    }

    // legend
    let mut row = 0;
    let mut legend = |label: &str, color: &str, dashed: bool, svg: &mut String| {
        let yy = TOP + 14.0 * f64::from(row) + 6.0;
        let dash = if dashed { r##" stroke-dasharray="6 3""## } else { "" };
        let _ = writeln!(
            svg,
            r##"<line x1="{LEGEND_X:.0}" y1="{yy:.2}" x2="{:.0}" y2="{yy:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"##,
            LEGEND_X + 26.0
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.0}" y="{:.2}" font-size="11" fill="#374151">{}</text>"##,
            LEGEND_X + 32.0,
            yy + 4.0,
            escape(label)
        );
        row += 1;
    };
    legend("observed", OBSERVED_COLOR, false, &mut svg);
    for (k, (label, _)) in predictions.iter().enumerate() {
        legend(label, METHOD_COLORS[k % METHOD_COLORS.len()], true, &mut svg);
    }

    svg.push_str("</svg>\n");
    svg
}

fn polyline(points: impl Iterator<Item = (f64, f64)>) -> String {
    let mut out = String::new();
    for (px, py) in points {
        if !out.is_empty() {
            out.push(' ');
        }
        let _ = write!(out, "{px:.2},{py:.2}");
    }
    out
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}
