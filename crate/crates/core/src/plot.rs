//! Deterministic SVG figures: heatmaps of 2-axis grids, line plots of
//! 1-axis sweeps and F₁/F₂ time series.
//!
//! Output depends only on the input numbers; coordinates are printed with a
//! fixed number of decimals.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::result::RunResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Map `[lo, hi]` to `[a, b]`; a degenerate range maps to the midpoint.
fn scale(x: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (x - lo) / (hi - lo) * (b - a)
    } else {
        0.5 * (a + b)
    }
}

fn range(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    })
}

/// Five evenly spaced ticks over `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    if hi > lo {
        (0..5).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
    } else {
        vec![lo]
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str, xr: (f64, f64), yr: (f64, f64)) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for t in ticks(xr.0, xr.1) {
        let x = scale(t, xr.0, xr.1, x0, x1);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y0:.1}" x2="{x:.2}" y2="{:.1}" stroke="black"/><text x="{x:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            tick(t)
        );
    }
    for t in ticks(yr.0, yr.1) {
        let y = scale(t, yr.0, yr.1, y0, y1);
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{y:.2}" x2="{x0:.1}" y2="{y:.2}" stroke="black"/><text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            tick(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        0.5 * (y0 + y1),
        0.5 * (y0 + y1),
        escape(y_label)
    );
}

/// Blue-to-yellow colour ramp on `[0, 1]`.
fn ramp(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let stops = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let pos = v * (stops.len() - 1) as f64;
    let i = (pos.floor() as usize).min(stops.len() - 2);
    let f = pos - i as f64;
    let lerp = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    let (a, b) = (stops[i], stops[i + 1]);
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(a.0, b.0),
        lerp(a.1, b.1),
        lerp(a.2, b.2)
    )
}

/// Heatmap of `values[iy][ix]` over the grid `xs × ys`. `None` cells (failed
/// points) are drawn grey. The colour scale spans `[0, 1]`.
pub fn heatmap(
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<Option<f64>>],
    x_label: &str,
    y_label: &str,
    title: &str,
) -> Result<String> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Empty("heatmap axes"));
    }
    if values.len() != ys.len() || values.iter().any(|r| r.len() != xs.len()) {
        return Err(Error::invalid(
            "values",
            "shape must be ys.len() x xs.len()",
        ));
    }
    let mut out = String::new();
    header(&mut out, title);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let cw = (x1 - x0) / xs.len() as f64;
    let ch = (y0 - y1) / ys.len() as f64;
    for (iy, row) in values.iter().enumerate() {
        for (ix, v) in row.iter().enumerate() {
            let x = x0 + ix as f64 * cw;
            let y = y0 - (iy + 1) as f64 * ch;
            let fill = v.map(ramp).unwrap_or_else(|| "#bbbbbb".into());
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="{fill}"><title>{}</title></rect>"#,
                v.map(|f| format!("{f:.4}"))
                    .unwrap_or_else(|| "failed".into())
            );
        }
    }
    // cell-centred ticks
    let half_x = if xs.len() > 1 {
        (xs[xs.len() - 1] - xs[0]) / (2.0 * (xs.len() - 1) as f64)
    } else {
        0.5
    };
    let half_y = if ys.len() > 1 {
        (ys[ys.len() - 1] - ys[0]) / (2.0 * (ys.len() - 1) as f64)
    } else {
        0.5
    };
    axes(
        &mut out,
        x_label,
        y_label,
        (xs[0] - half_x, xs[xs.len() - 1] + half_x),
        (ys[0] - half_y, ys[ys.len() - 1] + half_y),
    );
    // colour bar
    let bx = WIDTH - RIGHT + 25.0;
    for k in 0..50 {
        let v = k as f64 / 49.0;
        let y = scale(v, 0.0, 1.0, y0, y1) - (y0 - y1) / 50.0;
        let _ = writeln!(
            out,
            r#"<rect x="{bx:.1}" y="{y:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            (y0 - y1) / 50.0 + 0.5,
            ramp(v)
        );
    }
    for t in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.2}">{}</text>"#,
            bx + 24.0,
            scale(t, 0.0, 1.0, y0, y1) + 4.0,
            tick(t)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Line plot of one or more named series over shared `xs`. `None` entries
/// break the line.
pub fn line_plot(
    xs: &[f64],
    series: &[(&str, Vec<Option<f64>>)],
    x_label: &str,
    y_label: &str,
    title: &str,
) -> Result<String> {
    if xs.is_empty() || series.is_empty() {
        return Err(Error::Empty("line plot data"));
    }
    if series.iter().any(|(_, ys)| ys.len() != xs.len()) {
        return Err(Error::invalid(
            "series",
            "every series must match xs in length",
        ));
    }
    let xr = range(xs.iter().copied());
    let yr = range(
        series
            .iter()
            .flat_map(|(_, ys)| ys.iter().flatten().copied()),
    );
    let yr = if yr.0 > yr.1 {
        (0.0, 1.0)
    } else {
        (yr.0.min(0.0), yr.1.max(1.0))
    };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x_label, y_label, xr, yr);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for (&x, y) in xs.iter().zip(ys) {
            match y {
                Some(y) => segments
                    .last_mut()
                    .unwrap()
                    .push((scale(x, xr.0, xr.1, x0, x1), scale(*y, yr.0, yr.1, y0, y1))),
                None => segments.push(Vec::new()),
            }
        }
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
            if xs.len() <= 40 {
                for (x, y) in seg {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#
                    );
                }
            }
        }
        let ly = TOP + 16.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 10.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// `F₁(t)` and `F₂(t)` of one run.
pub fn trace_plot(result: &RunResult, title: &str) -> Result<String> {
    if result.is_empty() {
        return Err(Error::Empty("run result"));
    }
    let f1: Vec<Option<f64>> = result.f1.iter().map(|&x| Some(x)).collect();
    let f2: Vec<Option<f64>> = result.f2.iter().map(|&x| Some(x)).collect();
    line_plot(
        &result.times,
        &[("F1", f1), ("F2", f2)],
        "t",
        "population",
        title,
    )
}
