//! Minimal SVG line plot of x(t) and y(t).

use std::fmt::Write;

use nniquad::TrajectoryLog;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const TICKS: usize = 5;

fn polyline(t: &[f64], v: &[f64], sx: impl Fn(f64) -> f64, sy: impl Fn(f64) -> f64) -> String {
    let mut pts = String::with_capacity(t.len() * 16);
    for (ti, vi) in t.iter().zip(v) {
        let _ = write!(pts, "{:.2},{:.2} ", sx(*ti), sy(*vi));
    }
    pts.trim_end().to_owned()
}

pub fn render_svg(log: &TrajectoryLog) -> String {
    let cols = log.columns();
    let (t0, t1) = match (cols.t.first(), cols.t.last()) {
        (Some(a), Some(b)) if b > a => (*a, *b),
        (Some(a), _) => (*a, *a + 1.0),
        _ => (0.0, 1.0),
    };
    let (mut lo, mut hi) = cols
        .x
        .iter()
        .chain(&cols.y)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    if !(lo.is_finite() && hi.is_finite()) {
        (lo, hi) = (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);

    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |t: f64| MARGIN + (t - t0) / (t1 - t0) * plot_w;
    let sy = |v: f64| HEIGHT - MARGIN - (v - lo) / (hi - lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (t, v) = (t0 + f * (t1 - t0), lo + f * (hi - lo));
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t:.3}</text>"#,
            sx(t),
            HEIGHT - MARGIN + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            MARGIN - 6.0,
            sy(v) + 4.0
        );
    }
    if lo < 0.0 && hi > 0.0 {
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
            sy(0.0),
            WIDTH - MARGIN
        );
    }
    for (name, series, color) in [("x", &cols.x, "#1f77b4"), ("y", &cols.y, "#d62728")] {
        let _ = writeln!(
            svg,
            r#"<polyline id="{name}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            polyline(&cols.t, series, sx, sy)
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">time (s)</text>"##,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="16" y="{:.2}" transform="rotate(-90 16 {:.2})" text-anchor="middle">position (m)</text>"##,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let lx = WIDTH - MARGIN - 70.0;
    let _ = writeln!(
        svg,
        r##"<line x1="{lx}" y1="{0}" x2="{1}" y2="{0}" stroke="#1f77b4" stroke-width="2"/><text x="{2}" y="{3}">x</text>"##,
        MARGIN + 16.0,
        lx + 20.0,
        lx + 26.0,
        MARGIN + 20.0
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{lx}" y1="{0}" x2="{1}" y2="{0}" stroke="#d62728" stroke-width="2"/><text x="{2}" y="{3}">y</text>"##,
        MARGIN + 34.0,
        lx + 20.0,
        lx + 26.0,
        MARGIN + 38.0
    );
    svg.push_str("</svg>\n");
    svg
}
