//! Deterministic SVG rendering of a traced curve and a point set.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use tran_core::contour::CurveSegments;

const PLOT_SIZE: f64 = 640.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const TICK_TARGET: f64 = 6.0;

/// Write [`render_svg`] to `out_path`.
pub fn emit_svg(segments: &CurveSegments, points: &[Complex64], out_path: &Path) -> std::io::Result<()> {
    std::fs::write(out_path, render_svg(segments, points))
}

/// Standalone SVG of `segments.bbox` at equal aspect: curve polylines,
/// filled circles at `points`, and labelled axes.
pub fn render_svg(segments: &CurveSegments, points: &[Complex64]) -> String {
    let b = segments.bbox;
    let scale = PLOT_SIZE / b.width().max(b.height());
    let (pw, ph) = (b.width() * scale, b.height() * scale);
    let (w, h) = (LEFT + pw + RIGHT, TOP + ph + BOTTOM);
    let px = |x: f64| LEFT + (x - b.re_min) * scale;
    let py = |y: f64| TOP + (b.im_max - y) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<defs><clipPath id="plot"><rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}"/></clipPath></defs>"#);
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{w:.2}" height="{h:.2}" fill="#ffffff"/>"##);

    // zero axes inside the plot
    if b.re_min < 0.0 && 0.0 < b.re_max {
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{y:.2}" stroke="#cccccc"/>"##, x = px(0.0), y = TOP + ph);
    }
    if b.im_min < 0.0 && 0.0 < b.im_max {
        let _ = writeln!(s, r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{x:.2}" y2="{y:.2}" stroke="#cccccc"/>"##, x = LEFT + pw, y = py(0.0));
    }

    // ticks
    for (v, label) in ticks(b.re_min, b.re_max) {
        let x = px(v);
        let y = TOP + ph;
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000000"/>"##, y + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, y + 18.0);
    }
    for (v, label) in ticks(b.im_min, b.im_max) {
        let y = py(v);
        let _ = writeln!(s, r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="#000000"/>"##, LEFT - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 8.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Re z</text>"#, LEFT + pw / 2.0, h - 8.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{y:.2}" text-anchor="middle" transform="rotate(-90 14 {y:.2})">Im z</text>"#,
        y = TOP + ph / 2.0
    );

    let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);
    for line in segments.segments.iter().filter(|l| l.len() >= 2) {
        let pts: Vec<String> = line.iter().map(|z| format!("{:.2},{:.2}", px(z.re), py(z.im))).collect();
        let _ = writeln!(s, r##"<polyline fill="none" stroke="#1f77b4" stroke-width="1.2" points="{}"/>"##, pts.join(" "));
    }
    for z in points.iter().filter(|z| z.is_finite()) {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#d62728"/>"##, px(z.re), py(z.im));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#000000"/>"##);
    s.push_str("</svg>\n");
    s
}

/// Round tick positions (steps of 1, 2 or 5 times a power of ten) with labels.
fn ticks(lo: f64, hi: f64) -> Vec<(f64, String)> {
    let raw = (hi - lo) / TICK_TARGET;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last)
        .map(|i| {
            let v = i as f64 * step;
            (v, format!("{:.*}", decimals, if i == 0 { 0.0 } else { v }))
        })
        .collect()
}
