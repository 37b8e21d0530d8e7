//! Hand-written SVG: histogram bars with the analytic density overlaid.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `edges`/`bars` describe the histogram as densities per unit length;
/// `xs`/`curve` the analytic density.
pub fn overlay(edges: &[f64], bars: &[f64], xs: &[f64], curve: &[f64], title: &str) -> String {
    let x0 = edges[0];
    let x1 = *edges.last().unwrap();
    let ymax = bars
        .iter()
        .chain(curve)
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.05;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN - y.min(ymax) / ymax * plot_h;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="30" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
    s.push_str(r##"<g fill="#9ecae1" stroke="#3182bd" stroke-width="0.5">"##);
    s.push('\n');
    for (b, &v) in bars.iter().enumerate() {
        let (l, r) = (sx(edges[b]), sx(edges[b + 1]));
        let top = sy(v);
        writeln!(
            s,
            r#"<rect x="{l:.2}" y="{top:.2}" width="{:.2}" height="{:.2}"/>"#,
            r - l,
            HEIGHT - MARGIN - top
        )
        .unwrap();
    }
    s.push_str("</g>\n");
    let points: Vec<String> = xs
        .iter()
        .zip(curve)
        .filter(|(_, y)| y.is_finite())
        .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    writeln!(
        s,
        r##"<polyline fill="none" stroke="#d62728" stroke-width="2" points="{}"/>"##,
        points.join(" ")
    )
    .unwrap();
    // axes and ticks
    let (left, bottom) = (MARGIN, HEIGHT - MARGIN);
    writeln!(
        s,
        r#"<path d="M{left},{} V{bottom} H{}" stroke="black" fill="none"/>"#,
        MARGIN,
        WIDTH - MARGIN
    )
    .unwrap();
    for i in 0..=5 {
        let x = x0 + (x1 - x0) * i as f64 / 5.0;
        let px = sx(x);
        writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{x:.3}</text>"#,
            bottom + 5.0,
            bottom + 20.0
        )
        .unwrap();
        let y = ymax * i as f64 / 5.0;
        let py = sy(y);
        writeln!(
            s,
            r#"<line x1="{}" y1="{py:.2}" x2="{left}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{y:.3}</text>"#,
            left - 5.0,
            left - 8.0,
            py + 4.0
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
