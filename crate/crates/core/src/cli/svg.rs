//! Static SVG panels drawn from a stored [`OutlierReport`].

use std::fmt::Write as _;

use crate::boxplot::{Component, ComponentBoxplot, OutlierReport};
use crate::fda::{grid, integrate_square, from_srsf, Srsf};

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 40.0;

const GREY: &str = "#b0b0b0";
const RED: &str = "#d62728";
const BLUE: &str = "#1f77b4";
const ORANGE: &str = "#ff7f0e";
const BLACK: &str = "#000000";

/// A rectangle of the canvas with data ranges mapped onto it.
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y.0) / (self.y.1 - self.y.0) * self.height
    }
}

fn range<'a>(curves: impl IntoIterator<Item = &'a [f64]>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in curves {
        for &v in c {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
    (lo - pad, hi + pad)
}

struct Svg {
    body: String,
}

impl Svg {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(body, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            body,
            r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Self { body }
    }

    fn frame(&mut self, f: &Frame, label: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{BLACK}" stroke-width="0.5"/>"#,
            f.left, f.top, f.width, f.height
        );
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
            f.left + 4.0,
            f.top + 12.0,
            escape(label)
        );
        for (v, anchor) in [(f.y.0, f.top + f.height), (f.y.1, f.top + 10.0)] {
            let _ = writeln!(
                self.body,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="9" text-anchor="end">{v:.3}</text>"#,
                f.left - 3.0,
                anchor
            );
        }
    }

    fn curve(&mut self, f: &Frame, ys: &[f64], color: &str, width: f64, dashed: bool) {
        let t = grid::nodes(ys.len());
        let pts: Vec<String> = t
            .iter()
            .zip(ys)
            .map(|(t, y)| format!("{:.2},{:.2}", f.px(*t), f.py(*y)))
            .collect();
        let dash = if dashed { r#" stroke-dasharray="6,3""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"{dash}/>"#,
            pts.join(" ")
        );
    }

    fn hline(&mut self, f: &Frame, x0: f64, x1: f64, y: f64, color: &str, dashed: bool) {
        let dash = if dashed { r#" stroke-dasharray="6,3""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            f.px(x0),
            f.py(y),
            f.px(x1),
            f.py(y)
        );
    }

    fn dot(&mut self, f: &Frame, x: f64, y: f64, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
            f.px(x),
            f.py(y)
        );
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn frames(yl: (f64, f64), yr: (f64, f64), right_x: (f64, f64)) -> (Frame, Frame) {
    let w = (WIDTH - 3.0 * MARGIN) / 2.0;
    let h = HEIGHT - 2.0 * MARGIN;
    (
        Frame { left: MARGIN, top: MARGIN, width: w, height: h, x: (0.0, 1.0), y: yl },
        Frame { left: 2.0 * MARGIN + w, top: MARGIN, width: w, height: h, x: right_x, y: yr },
    )
}

/// Sample curves in grey with outliers drawn last in red.
fn spaghetti(svg: &mut Svg, f: &Frame, curves: &[Vec<f64>], flags: &[bool]) {
    for (c, _) in curves.iter().zip(flags).filter(|(_, &o)| !o) {
        svg.curve(f, c, GREY, 0.6, false);
    }
    for (c, _) in curves.iter().zip(flags).filter(|(_, &o)| o) {
        svg.curve(f, c, RED, 1.2, false);
    }
}

fn flags(b: &ComponentBoxplot) -> Vec<bool> {
    crate::boxplot::classify(b)
}

fn translation_panel(r: &OutlierReport, coord: &str) -> String {
    let b = &r.translation;
    let fl = flags(b);
    let mut svg = Svg::new(&format!("{coord}(t): samples and translation boxplot"));
    let yl = range(r.curves.functions.iter().map(|c| c.as_slice()));
    let all = [b.values.as_slice(), &b.whisker1, &b.whisker3];
    let yr = range(all);
    let (left, right) = frames(yl, yr, (0.0, 1.0));
    svg.frame(&left, "samples");
    spaghetti(&mut svg, &left, &r.curves.functions, &fl);
    svg.frame(&right, "translation");
    let (q1, q3, med) = (b.q1[0], b.q3[0], b.median[0]);
    let _ = writeln!(
        svg.body,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{BLUE}" stroke-width="1.5"/>"#,
        right.px(0.35),
        right.py(q3),
        right.px(0.65) - right.px(0.35),
        (right.py(q1) - right.py(q3)).max(0.5)
    );
    svg.hline(&right, 0.35, 0.65, med, BLACK, false);
    svg.hline(&right, 0.4, 0.6, b.whisker1[0], ORANGE, true);
    svg.hline(&right, 0.4, 0.6, b.whisker3[0], ORANGE, true);
    for e in [b.extreme1, b.extreme3].into_iter().flatten() {
        svg.hline(&right, 0.42, 0.58, b.values[e], BLUE, false);
    }
    let n = b.values.len().max(2);
    for (i, (v, o)) in b.values.iter().zip(&fl).enumerate() {
        let x = 0.1 + 0.8 * i as f64 / (n - 1) as f64;
        if *o {
            svg.dot(&right, x, *v, RED);
        }
    }
    svg.finish()
}

fn amplitude_panel(r: &OutlierReport, coord: &str) -> String {
    let b = &r.amplitude;
    let fl = flags(b);
    let mut svg = Svg::new(&format!("{coord}(t): amplitude boxplot"));
    let f0 = r.curves.median_function.first().copied().unwrap_or(0.0);
    let as_function = |q: &[f64]| -> Vec<f64> {
        Srsf::new(q.to_vec())
            .and_then(|q| from_srsf(&q, f0))
            .map(|f| f.into_values())
            .unwrap_or_else(|_| vec![f0; q.len()])
    };
    let q1 = as_function(&b.q1);
    let q3 = as_function(&b.q3);
    let w1 = as_function(&b.whisker1);
    let w3 = as_function(&b.whisker3);
    let med = r.curves.median_function.clone();
    let yl = range(r.curves.aligned.iter().map(|c| c.as_slice()));
    let yr = range([med.as_slice(), &q1, &q3, &w1, &w3]);
    let (left, right) = frames(yl, yr, (0.0, 1.0));
    svg.frame(&left, "aligned samples");
    spaghetti(&mut svg, &left, &r.curves.aligned, &fl);
    svg.frame(&right, "median, quartiles, cutoffs");
    svg.curve(&right, &w1, ORANGE, 1.2, true);
    svg.curve(&right, &w3, ORANGE, 1.2, true);
    svg.curve(&right, &q1, BLUE, 1.5, false);
    svg.curve(&right, &q3, BLUE, 1.5, false);
    svg.curve(&right, &med, BLACK, 2.0, false);
    svg.finish()
}

fn phase_panel(r: &OutlierReport, coord: &str) -> String {
    let b = &r.phase;
    let fl = flags(b);
    let mut svg = Svg::new(&format!("{coord}(t): phase boxplot"));
    let med = integrate_square(&b.median);
    let q1 = integrate_square(&b.q1);
    let q3 = integrate_square(&b.q3);
    let w1 = integrate_square(&b.whisker1);
    let w3 = integrate_square(&b.whisker3);
    let (left, right) = frames((0.0, 1.0), (0.0, 1.0), (0.0, 1.0));
    svg.frame(&left, "warping functions");
    spaghetti(&mut svg, &left, &r.curves.warps, &fl);
    svg.frame(&right, "median, quartiles, cutoffs");
    svg.curve(&right, &w1, ORANGE, 1.2, true);
    svg.curve(&right, &w3, ORANGE, 1.2, true);
    svg.curve(&right, &q1, BLUE, 1.5, false);
    svg.curve(&right, &q3, BLUE, 1.5, false);
    svg.curve(&right, &med, BLACK, 2.0, false);
    svg.finish()
}

/// The SVG document for one component of a coordinate report.
pub fn render_panel(report: &OutlierReport, component: Component, coord: &str) -> String {
    match component {
        Component::Translation => translation_panel(report, coord),
        Component::Amplitude => amplitude_panel(report, coord),
        Component::Phase => phase_panel(report, coord),
    }
}
