//! Static SVG stress–strain plot.
//!
//! Axis ranges are the data extent of the plotted points plus a 10% margin on
//! each side; model lines are clipped to the plot area.

use std::fmt::Write as _;

use crate::analysis::FitResult;
use crate::reduction::StressStrainPoint;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One curve: reduced points plus, optionally, the fit drawn over them.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [StressStrainPoint],
    pub fit: Option<&'a FitResult>,
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
    (lo - 0.1 * span, hi + 0.1 * span)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Render the series; strain on x, stress in MPa on y.
pub fn stress_strain_svg(series: &[Series<'_>]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = extent(all().map(|p| p.strain));
    let (y0, y1) = extent(all().map(|p| p.stress * 1e-6));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        w,
        r#"<defs><clipPath id="area"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath></defs>"#
    )
    .unwrap();
    writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    )
    .unwrap();

    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        writeln!(
            w,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.4}</text>"##,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0
        )
        .unwrap();
        writeln!(
            w,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.0}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0
        )
        .unwrap();
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">logarithmic strain</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        w,
        r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">stress (MPa)</text>"#,
        TOP + ph / 2.0
    )
    .unwrap();

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        writeln!(w, r#"<g clip-path="url(#area)">"#).unwrap();
        if let Some(fit) = s.fit {
            let e = fit.elastic_modulus_used;
            let ey = fit.yield_strength / e;
            writeln!(
                w,
                r#"<polyline fill="none" stroke="{color}" stroke-dasharray="4 3" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}"/>"#,
                sx(0.0),
                sy(0.0),
                sx(ey),
                sy(fit.yield_strength * 1e-6),
                sx(x1),
                sy(fit.plastic_line.at(x1) * 1e-6)
            )
            .unwrap();
        }
        for p in s.points {
            writeln!(
                w,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(p.strain),
                sy(p.stress * 1e-6)
            )
            .unwrap();
        }
        writeln!(w, "</g>").unwrap();
        let ly = TOP + 15.0 + 20.0 * k as f64;
        let lx = LEFT + pw + 15.0;
        writeln!(
            w,
            r#"<circle cx="{lx:.2}" cy="{:.2}" r="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            ly - 4.0,
            lx + 10.0,
            ly,
            escape(s.label)
        )
        .unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    svg
}
