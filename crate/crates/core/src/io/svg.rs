//! Minimal SVG 1.1 charts: histograms, line overlays and scatter plots.

use std::fmt::Write as _;

use crate::evaluation::Histogram;

const WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 220.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Doc {
    body: String,
    height: f64,
}

impl Doc {
    fn new(height: f64, title: &str) -> Self {
        let mut d = Doc {
            body: String::new(),
            height,
        };
        d.text(WIDTH / 2.0, 20.0, title, "middle", 14.0);
        d
    }

    fn text(&mut self, x: f64, y: f64, s: &str, anchor: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}" stroke="none"/>"#
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64) {
        let _ = writeln!(
            self.body,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#444" stroke-width="1"/>"##
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], color: &str, dashed: bool) {
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let dash = if dashed {
            r#" stroke-dasharray="4 3""#
        } else {
            ""
        };
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            coords.join(" ")
        );
    }

    fn circle(&mut self, x: f64, y: f64, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}" fill-opacity="0.7"/>"#
        );
    }

    fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{h}\" viewBox=\"0 0 {WIDTH} {h}\">\n\
             <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{h}\" fill=\"white\"/>\n{body}</svg>\n",
            h = self.height,
            body = self.body
        )
    }
}

/// Maps data ranges onto a panel whose top edge is at `top`.
struct Frame {
    top: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(top: f64, x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(lo, hi): (f64, f64)| {
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        Frame {
            top,
            x: widen(x),
            y: widen(y),
        }
    }

    fn px(&self, v: f64) -> f64 {
        MARGIN + (v - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, v: f64) -> f64 {
        let bottom = self.top + PANEL_HEIGHT - MARGIN;
        bottom - (v - self.y.0) / (self.y.1 - self.y.0) * (PANEL_HEIGHT - 2.0 * MARGIN)
    }

    fn axes(&self, doc: &mut Doc, x_label: &str, y_label: &str) {
        let bottom = self.top + PANEL_HEIGHT - MARGIN;
        doc.line(MARGIN, bottom, WIDTH - MARGIN, bottom);
        doc.line(MARGIN, self.top + MARGIN, MARGIN, bottom);
        doc.text(
            MARGIN,
            bottom + 16.0,
            &format!("{:.3}", self.x.0),
            "middle",
            10.0,
        );
        doc.text(
            WIDTH - MARGIN,
            bottom + 16.0,
            &format!("{:.3}", self.x.1),
            "middle",
            10.0,
        );
        doc.text(
            MARGIN - 4.0,
            bottom,
            &format!("{:.3}", self.y.0),
            "end",
            10.0,
        );
        doc.text(
            MARGIN - 4.0,
            self.top + MARGIN + 4.0,
            &format!("{:.3}", self.y.1),
            "end",
            10.0,
        );
        doc.text(WIDTH / 2.0, bottom + 30.0, x_label, "middle", 11.0);
        doc.text(MARGIN, self.top + MARGIN - 8.0, y_label, "start", 11.0);
    }
}

fn range<'a, I: IntoIterator<Item = &'a f64>>(values: I) -> (f64, f64) {
    values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        })
}

pub fn histogram(title: &str, hist: &Histogram, x_label: &str) -> String {
    let mut doc = Doc::new(PANEL_HEIGHT + 20.0, title);
    let max = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let lo = hist.edges[0];
    let hi = hist.edges[hist.edges.len() - 1];
    let f = Frame::new(20.0, (lo, hi), (0.0, max));
    for (i, &c) in hist.counts.iter().enumerate() {
        let x0 = f.px(hist.edges[i]);
        let x1 = f.px(hist.edges[i + 1]);
        let y = f.py(c as f64);
        doc.rect(x0, y, (x1 - x0 - 1.0).max(0.5), f.py(0.0) - y, PALETTE[0]);
    }
    f.axes(&mut doc, x_label, "count");
    doc.finish()
}

/// Two stacked panels: attributions on top, series below, each showing the
/// original (solid) and perturbed (dashed) version.
pub fn overlay(title: &str, series: (&[f64], &[f64]), attributions: (&[f64], &[f64])) -> String {
    let mut doc = Doc::new(2.0 * PANEL_HEIGHT + 20.0, title);
    let panels = [
        ("attribution", attributions, 20.0),
        ("value", series, 20.0 + PANEL_HEIGHT),
    ];
    for (label, (orig, pert), top) in panels {
        let n = orig.len().max(pert.len()).max(2);
        let f = Frame::new(top, (0.0, (n - 1) as f64), range(orig.iter().chain(pert)));
        let pts = |v: &[f64]| -> Vec<(f64, f64)> {
            v.iter()
                .enumerate()
                .map(|(i, y)| (f.px(i as f64), f.py(*y)))
                .collect()
        };
        doc.polyline(&pts(orig), PALETTE[0], false);
        doc.polyline(&pts(pert), PALETTE[1], true);
        f.axes(&mut doc, "time point", label);
    }
    doc.text(
        WIDTH - MARGIN,
        36.0,
        "original (solid) / perturbed (dashed)",
        "end",
        10.0,
    );
    doc.finish()
}

pub fn scatter(title: &str, points: &[[f64; 2]], labels: &[usize]) -> String {
    let mut doc = Doc::new(PANEL_HEIGHT * 2.0, title);
    let f = Frame::new(
        20.0,
        range(points.iter().map(|p| &p[0])),
        range(points.iter().map(|p| &p[1])),
    );
    // Scatter uses a double-height panel.
    let py = |v: f64| {
        let bottom = 2.0 * PANEL_HEIGHT - MARGIN;
        bottom - (v - f.y.0) / (f.y.1 - f.y.0) * (2.0 * PANEL_HEIGHT - 2.0 * MARGIN - 20.0)
    };
    for (p, &l) in points.iter().zip(labels) {
        doc.circle(f.px(p[0]), py(p[1]), PALETTE[l % PALETTE.len()]);
    }
    let bottom = 2.0 * PANEL_HEIGHT - MARGIN;
    doc.line(MARGIN, bottom, WIDTH - MARGIN, bottom);
    doc.line(MARGIN, MARGIN, MARGIN, bottom);
    doc.text(WIDTH / 2.0, bottom + 30.0, "component 1", "middle", 11.0);
    doc.text(MARGIN, MARGIN - 8.0, "component 2", "start", 11.0);
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    for (k, c) in classes.iter().enumerate() {
        let y = MARGIN + 14.0 * k as f64;
        doc.circle(WIDTH - MARGIN - 60.0, y - 4.0, PALETTE[c % PALETTE.len()]);
        doc.text(
            WIDTH - MARGIN - 50.0,
            y,
            &format!("class {c}"),
            "start",
            10.0,
        );
    }
    doc.finish()
}
