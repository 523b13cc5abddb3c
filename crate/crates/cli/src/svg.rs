//! Heatmap rendering of dependence surfaces as standalone SVG.
//!
//! Cells are drawn row-major (`axis_x` outer, `axis_y` inner) inside
//! `<g id="cells">`, with `axis_x` running left to right and `axis_y`
//! bottom to top. Colours follow a diverging blue-white-red scale anchored
//! at `-1`, `0` and `+1`; covariance surfaces are first divided by their
//! largest absolute value. Degenerate cells are grey.

use std::fmt::Write;

use gcor_core::DependenceSurface;

const PLOT: f64 = 480.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const LEGEND_GAP: f64 = 30.0;
const LEGEND_WIDTH: f64 = 18.0;
const RIGHT: f64 = 80.0;
const MAX_TICKS: usize = 9;

const NEGATIVE: [f64; 3] = [33.0, 102.0, 172.0];
const NEUTRAL: [f64; 3] = [247.0, 247.0, 247.0];
const POSITIVE: [f64; 3] = [178.0, 24.0, 43.0];
const DEGENERATE: &str = "#bdbdbd";

/// Colour of a value on the `[-1, 1]` scale; values outside are clamped.
pub fn colour(value: f64) -> String {
    let t = value.clamp(-1.0, 1.0);
    let (end, w) = if t < 0.0 { (NEGATIVE, -t) } else { (POSITIVE, t) };
    let c: Vec<u8> = (0..3).map(|k| (NEUTRAL[k] + (end[k] - NEUTRAL[k]) * w).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn scale(surface: &DependenceSurface) -> f64 {
    if surface.measure.is_correlation() {
        return 1.0;
    }
    let max = surface.values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if max > 0.0 {
        max
    } else {
        1.0
    }
}

fn tick_indices(len: usize) -> Vec<usize> {
    if len <= MAX_TICKS {
        return (0..len).collect();
    }
    let step = len.div_ceil(MAX_TICKS);
    (0..len).step_by(step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Renders `surface` as an SVG document; output depends only on the input.
pub fn render(surface: &DependenceSurface) -> String {
    let (nx, ny) = (surface.axis_x.len(), surface.axis_y.len());
    let (cw, ch) = (PLOT / nx.max(1) as f64, PLOT / ny.max(1) as f64);
    let width = LEFT + PLOT + LEGEND_GAP + LEGEND_WIDTH + RIGHT;
    let height = TOP + PLOT + BOTTOM;
    let s = scale(surface);
    let mut out = String::new();
    let w = &mut out;

    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(w, r#"<title>{}</title>"#, surface.measure);

    let _ = writeln!(w, r#"<g id="cells" shape-rendering="crispEdges">"#);
    for i in 0..nx {
        for j in 0..ny {
            let x = LEFT + i as f64 * cw;
            let y = TOP + PLOT - (j + 1) as f64 * ch;
            let fill = if surface.degenerate[i][j] { DEGENERATE.to_string() } else { colour(surface.values[i][j] / s) };
            let _ = writeln!(w, r#"<rect x="{x:.3}" y="{y:.3}" width="{cw:.3}" height="{ch:.3}" fill="{fill}"/>"#);
        }
    }
    let _ = writeln!(w, "</g>");

    let _ = writeln!(w, r#"<g id="axes" stroke="black" fill="black">"#);
    let _ = writeln!(w, r#"<path d="M{LEFT} {} H{} M{LEFT} {TOP} V{}" fill="none"/>"#, TOP + PLOT, LEFT + PLOT, TOP + PLOT);
    for i in tick_indices(nx) {
        let x = LEFT + (i as f64 + 0.5) * cw;
        let y = TOP + PLOT;
        let _ = writeln!(w, r#"<path d="M{x:.3} {y} v5"/>"#);
        let _ = writeln!(w, r#"<text x="{x:.3}" y="{}" text-anchor="middle" stroke="none">{}</text>"#, y + 18.0, label(surface.axis_x[i]));
    }
    for j in tick_indices(ny) {
        let y = TOP + PLOT - (j as f64 + 0.5) * ch;
        let _ = writeln!(w, r#"<path d="M{LEFT} {y:.3} h-5"/>"#);
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{:.3}" text-anchor="end" stroke="none">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            label(surface.axis_y[j])
        );
    }
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle" stroke="none">x</text>"#, LEFT + PLOT / 2.0, TOP + PLOT + 42.0);
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle" stroke="none">y</text>"#, LEFT - 50.0, TOP + PLOT / 2.0);
    let _ = writeln!(w, "</g>");

    let lx = LEFT + PLOT + LEGEND_GAP;
    let _ = writeln!(w, r#"<g id="legend">"#);
    let _ = writeln!(w, r#"<defs><linearGradient id="scale" x1="0" y1="1" x2="0" y2="0">"#);
    for (offset, v) in [(0.0, -1.0), (0.5, 0.0), (1.0, 1.0)] {
        let _ = writeln!(w, r#"<stop offset="{offset}" stop-color="{}"/>"#, colour(v));
    }
    let _ = writeln!(w, "</linearGradient></defs>");
    let _ = writeln!(w, r#"<path d="M{lx} {TOP} h{LEGEND_WIDTH} v{PLOT} h-{LEGEND_WIDTH} z" fill="url(#scale)" stroke="black"/>"#);
    for (frac, v) in [(0.0, -s), (0.5, 0.0), (1.0, s)] {
        let y = TOP + PLOT * (1.0 - frac);
        let _ = writeln!(w, r#"<text x="{}" y="{:.3}">{}</text>"#, lx + LEGEND_WIDTH + 6.0, y + 4.0, label(v));
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, "</svg>");
    out
}
