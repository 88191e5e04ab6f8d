//! Scatter plots of responses against instance complexity, as standalone SVG.
//!
//! Four panels: completion time and accuracy against signal and against
//! `ln(noise)`. Each group type gets its own color and least-squares trend
//! line. Noise-free instances have no `ln(noise)` and are left out of the
//! noise panels.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use tic_core::evaluation::GroupType;

#[derive(Clone, Debug, PartialEq)]
pub struct PlotPoint {
    pub group_type: GroupType,
    pub signal: f64,
    pub noise: f64,
    pub accuracy: f64,
    pub time_s: f64,
}

const W: f64 = 900.0;
const H: f64 = 700.0;
const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 240.0;

fn color(g: GroupType) -> &'static str {
    match g {
        GroupType::Individual => "#009E73",
        GroupType::AdHocPair => "#E69F00",
        GroupType::NominalPair => "#0072B2",
    }
}

/// Evenly spaced ticks at a 1-2-5 step covering `[lo, hi]`; the first tick
/// is at most `lo` and the last at least `hi`.
pub fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let start = (lo / step).floor() as i64;
    let end = (hi / step).ceil() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Panel<'a> {
    x0: f64,
    y0: f64,
    title: &'a str,
    x_label: &'a str,
    y_label: &'a str,
    class: &'a str,
}

fn draw_panel(svg: &mut String, p: &Panel, series: &BTreeMap<GroupType, Vec<(f64, f64)>>) {
    let all: Vec<(f64, f64)> = series.values().flatten().copied().collect();
    let (xmin, xmax) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(x, _)| (a.min(x), b.max(x)));
    let (ymin, ymax) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, y)| (a.min(y), b.max(y)));
    let _ = writeln!(svg, r#"<g class="panel {}">"#, p.class);
    let _ = writeln!(
        svg,
        r##"<rect x="{}" y="{}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##,
        p.x0, p.y0
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#, p.x0 + PANEL_W / 2.0, p.y0 - 8.0, p.title);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, p.x0 + PANEL_W / 2.0, p.y0 + PANEL_H + 36.0, p.x_label);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>"#,
        p.x0 - 44.0,
        p.y0 + PANEL_H / 2.0,
        p.x0 - 44.0,
        p.y0 + PANEL_H / 2.0,
        p.y_label
    );
    if all.is_empty() {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">no data</text>"#, p.x0 + PANEL_W / 2.0, p.y0 + PANEL_H / 2.0);
        svg.push_str("</g>\n");
        return;
    }
    let xt = nice_ticks(xmin, xmax);
    let yt = nice_ticks(ymin, ymax);
    let (xa, xb) = (xt[0], *xt.last().unwrap());
    let (ya, yb) = (yt[0], *yt.last().unwrap());
    let sx = |x: f64| p.x0 + (x - xa) / (xb - xa) * PANEL_W;
    let sy = |y: f64| p.y0 + PANEL_H - (y - ya) / (yb - ya) * PANEL_H;
    for &t in &xt {
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#444"/><text class="tick-x" data-value="{t}" x="{x:.2}" y="{}" font-size="10" text-anchor="middle">{}</text>"##,
            p.y0 + PANEL_H,
            p.y0 + PANEL_H + 5.0,
            p.y0 + PANEL_H + 17.0,
            fmt_tick(t),
            x = sx(t)
        );
    }
    for &t in &yt {
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#444"/><text class="tick-y" data-value="{t}" x="{}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"##,
            p.x0 - 5.0,
            p.x0,
            p.x0 - 7.0,
            sy(t) + 3.0,
            fmt_tick(t),
            y = sy(t)
        );
    }
    for (g, pts) in series {
        for &(x, y) in pts {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.7"/>"#, sx(x), sy(y), color(*g));
        }
        if let Some((a, b)) = least_squares(pts) {
            let _ = writeln!(
                svg,
                r#"<line class="trend" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2" clip-path="url(#clip-{})"/>"#,
                sx(xa),
                sy(a + b * xa),
                sx(xb),
                sy(a + b * xb),
                color(*g),
                p.class
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<clipPath id="clip-{}"><rect x="{}" y="{}" width="{PANEL_W}" height="{PANEL_H}"/></clipPath>"#,
        p.class, p.x0, p.y0
    );
    svg.push_str("</g>\n");
}

/// Intercept and slope of the least-squares line, if `x` varies.
fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

pub fn render(points: &[PlotPoint], stamp: &str) -> String {
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(svg, "<!-- {stamp} -->");
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if points.is_empty() {
        let _ = writeln!(svg, r#"<text class="placeholder" x="{}" y="{}" font-size="18" text-anchor="middle">no responses to plot</text>"#, W / 2.0, H / 2.0);
        svg.push_str("</svg>\n");
        return svg;
    }
    let pick = |f: &dyn Fn(&PlotPoint) -> Option<(f64, f64)>| {
        let mut m: BTreeMap<GroupType, Vec<(f64, f64)>> = BTreeMap::new();
        for p in points {
            if let Some(v) = f(p) {
                m.entry(p.group_type).or_default().push(v);
            }
        }
        m
    };
    let ln_noise = |p: &PlotPoint| (p.noise > 0.0).then(|| p.noise.ln());
    let panels = [
        (Panel { x0: 80.0, y0: 60.0, title: "Time vs signal", x_label: "signal", y_label: "time (s)", class: "time-signal" },
            pick(&|p| Some((p.signal, p.time_s)))),
        (Panel { x0: 520.0, y0: 60.0, title: "Time vs noise", x_label: "ln(noise)", y_label: "time (s)", class: "time-noise" },
            pick(&|p| ln_noise(p).map(|x| (x, p.time_s)))),
        (Panel { x0: 80.0, y0: 380.0, title: "Accuracy vs signal", x_label: "signal", y_label: "accuracy", class: "accuracy-signal" },
            pick(&|p| Some((p.signal, p.accuracy)))),
        (Panel { x0: 520.0, y0: 380.0, title: "Accuracy vs noise", x_label: "ln(noise)", y_label: "accuracy", class: "accuracy-noise" },
            pick(&|p| ln_noise(p).map(|x| (x, p.accuracy)))),
    ];
    for (panel, series) in &panels {
        draw_panel(&mut svg, panel, series);
    }
    let groups: Vec<GroupType> = pick(&|p| Some((p.signal, p.time_s))).into_keys().collect();
    for (i, g) in groups.iter().enumerate() {
        let y = 672.0;
        let x = 80.0 + 180.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<circle cx="{x}" cy="{}" r="5" fill="{}"/><text x="{}" y="{}" font-size="12">{}</text>"#,
            y - 4.0,
            color(*g),
            x + 10.0,
            y,
            g.as_str()
        );
    }
    let free = points.iter().filter(|p| p.noise <= 0.0).count();
    if free > 0 {
        let _ = writeln!(svg, r#"<text x="{}" y="692" font-size="10" text-anchor="end">{free} noise-free responses omitted from noise panels</text>"#, W - 20.0);
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_cover_the_range() {
        for (lo, hi) in [(0.0, 1.0), (-3.7, 2.2), (12.0, 12.0), (0.013, 0.029), (-120.0, -3.0)] {
            let t = nice_ticks(lo, hi);
            assert!(t[0] <= lo && *t.last().unwrap() >= hi, "{lo} {hi} {t:?}");
            assert!(t.len() >= 2 && t.len() <= 12);
        }
    }

    #[test]
    fn empty_plot_is_placeholder() {
        let svg = render(&[], "seed 0");
        assert!(svg.contains("no responses"));
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn least_squares_recovers_line() {
        let (a, b) = least_squares(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
        assert!(least_squares(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }
}
