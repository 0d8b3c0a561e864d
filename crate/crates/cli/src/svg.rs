//! Plain SVG emitters for recall curves and the free-recall histogram.
//!
//! Both figures share the vertical probability axis so they can sit side by
//! side: curves plot `P` against distortion `d` (cue intensity `q = 1 - d` on
//! the top axis), the histogram draws one horizontal bar per free-recall
//! value with a logarithmic percent scale.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 56.0;
const BOTTOM: f64 = 56.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Percent range of the histogram axis, as powers of ten.
const LOG_MIN: f64 = -4.0;
const LOG_MAX: f64 = 2.0;

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn y_of(p: f64) -> f64 {
    TOP + (1.0 - p.clamp(0.0, 1.0)) * plot_h()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(svg: &mut String) {
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
"#
    );
}

fn probability_axis(svg: &mut String) {
    let x0 = LEFT;
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{x0}" y1="{TOP}" x2="{x0}" y2="{:.2}" stroke="black"/>"#,
        TOP + plot_h()
    );
    for k in 0..=5 {
        let p = k as f64 / 5.0;
        let y = y_of(p);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{p:.1}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" transform="rotate(-90 16 {:.2})" text-anchor="middle">P</text>"#,
        TOP + plot_h() / 2.0,
        TOP + plot_h() / 2.0
    );
}

/// Overlay of recall curves; each entry is a label and `(d, P)` points.
pub fn curves_svg(curves: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut svg = String::new();
    open(&mut svg);
    probability_axis(&mut svg);
    let bottom = TOP + plot_h();
    let x_of = |d: f64| LEFT + d.clamp(0.0, 1.0) * plot_w();
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{LEFT}" y1="{bottom:.2}" x2="{:.2}" y2="{bottom:.2}" stroke="black"/>"#,
        LEFT + plot_w()
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{LEFT}" y1="{TOP}" x2="{:.2}" y2="{TOP}" stroke="black"/>"#,
        LEFT + plot_w()
    );
    for k in 0..=5 {
        let d = k as f64 / 5.0;
        let x = x_of(d);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{d:.1}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{:.1}</text>"#,
            TOP - 5.0,
            TOP - 9.0,
            1.0 - d
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">distortion d</text><text x="{:.2}" y="{:.2}" text-anchor="middle">cue intensity q</text>"#,
        LEFT + plot_w() / 2.0,
        HEIGHT - 12.0,
        LEFT + plot_w() / 2.0,
        TOP - 26.0
    );
    for (i, (label, points)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> =
            points.iter().map(|&(d, p)| format!("{:.2},{:.2}", x_of(d), y_of(p))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="curve" fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            coords.join(" "),
            escape(label)
        );
        for &(d, p) in points {
            let _ = writeln!(
                svg,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                x_of(d),
                y_of(p)
            );
        }
        let ly = TOP + 14.0 + 14.0 * i as f64;
        let lx = LEFT + plot_w() - 150.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 18.0,
            lx + 22.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Horizontal bars: one per `(P_FR, frequency in percent)`.
pub fn histogram_svg(bins: &[(f64, f64)]) -> String {
    let mut svg = String::new();
    open(&mut svg);
    probability_axis(&mut svg);
    let bottom = TOP + plot_h();
    let x_of = |pct: f64| {
        let l = if pct > 0.0 { pct.log10().clamp(LOG_MIN, LOG_MAX) } else { LOG_MIN };
        LEFT + (l - LOG_MIN) / (LOG_MAX - LOG_MIN) * plot_w()
    };
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{LEFT}" y1="{bottom:.2}" x2="{:.2}" y2="{bottom:.2}" stroke="black"/>"#,
        LEFT + plot_w()
    );
    for e in (LOG_MIN as i32)..=(LOG_MAX as i32) {
        let pct = 10f64.powi(e);
        let x = x_of(pct);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 18.0,
            if e >= 0 { format!("{pct:.0}") } else { format!("{pct}") }
        );
    }
    for threshold in [0.1, 1.0, 10.0] {
        let x = x_of(threshold);
        let _ = writeln!(
            svg,
            r#"<line class="threshold" x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{bottom:.2}" stroke="gray" stroke-dasharray="2,3"/>"#
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">D(P_FR), %</text>"#,
        LEFT + plot_w() / 2.0,
        HEIGHT - 12.0
    );
    for &(p, pct) in bins {
        let y = y_of(p);
        let _ = writeln!(
            svg,
            r##"<rect class="bar" x="{LEFT}" y="{:.2}" width="{:.2}" height="2" fill="#1f77b4"><title>P_FR {p:.5}: {pct:.6}%</title></rect>"##,
            y - 1.0,
            (x_of(pct) - LEFT).max(1.0)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_curve_has_one_polyline_and_its_markers() {
        let pts: Vec<(f64, f64)> = (0..10).map(|m| (1.0 - m as f64 / 9.0, m as f64 / 9.0)).collect();
        let svg = curves_svg(&[("intact".into(), pts)]);
        assert_eq!(svg.matches(r#"class="curve""#).count(), 1);
        assert_eq!(svg.matches(r#"class="marker""#).count(), 10);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn empty_histogram_draws_axes_only() {
        let svg = histogram_svg(&[]);
        assert!(svg.contains(r#"class="axis""#));
        assert_eq!(svg.matches(r#"class="bar""#).count(), 0);
    }

    #[test]
    fn labels_are_escaped() {
        let svg = curves_svg(&[("a<b".into(), vec![(0.0, 0.5)])]);
        assert!(svg.contains("a&lt;b"));
    }
}
