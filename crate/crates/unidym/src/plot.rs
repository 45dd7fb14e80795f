//! Self-contained SVG plots of result records; no display server needed.

use std::fmt::Write as _;

use crate::error::{HarnessError, Result};
use crate::record::ResultRecord;

/// Available plot kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Histogram of the `margin` column over all records.
    MarginHistogram,
    /// Step plot of pack counts against the sweep parameter.
    CensusVsParameter,
    /// Monotone contraction envelopes, one polyline per multiplicity.
    RhoEnvelope,
}

impl PlotKind {
    /// Kebab-case name used in file names and the CLI.
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::MarginHistogram => "margin-histogram",
            PlotKind::CensusVsParameter => "census-vs-parameter",
            PlotKind::RhoEnvelope => "rho-envelope",
        }
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        // Pad degenerate ranges so the scales stay invertible.
        let (x_lo, x_hi) = pad(x_lo, x_hi);
        let (y_lo, y_hi) = pad(y_lo, y_hi);
        Frame { x_lo, x_hi, y_lo, y_hi }
    }

    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - TOP - BOTTOM)
    }
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let c = lo;
        (c - 0.5, c + 0.5)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let x0 = LEFT;
    let x1 = WIDTH - RIGHT;
    let y0 = HEIGHT - BOTTOM;
    let y1 = TOP;
    let _ = writeln!(
        out,
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x0:.1}\" y2=\"{y1:.1}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{x0:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{:.6}</text>\n\
         <text x=\"{x1:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{:.6}</text>",
        y0 + 16.0,
        f.x_lo,
        y0 + 16.0,
        f.x_hi
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{y0:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{:.6}</text>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{:.6}</text>",
        x0 - 6.0,
        f.y_lo,
        x0 - 6.0,
        y1 + 4.0,
        f.y_hi
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">{x_label}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
         transform=\"rotate(-90 16 {:.1})\" text-anchor=\"middle\">{y_label}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str) {
    if pts.is_empty() {
        return;
    }
    let path = pts
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(
        out,
        "<polyline points=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>"
    );
}

/// Renders the requested plot; `records` must be non-empty and contain the
/// row kinds the plot needs.
pub fn render(kind: PlotKind, records: &[ResultRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(HarnessError::Usage(
            "cannot plot an empty record list".into(),
        ));
    }
    match kind {
        PlotKind::MarginHistogram => margin_histogram(records),
        PlotKind::CensusVsParameter => census_vs_parameter(records),
        PlotKind::RhoEnvelope => rho_envelope(records),
    }
}

fn margin_histogram(records: &[ResultRecord]) -> Result<String> {
    let margins: Vec<f64> = records
        .iter()
        .map(|r| r.margin)
        .filter(|m| m.is_finite())
        .collect();
    if margins.is_empty() {
        return Err(HarnessError::Usage("no finite margins to plot".into()));
    }
    let lo = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = pad(lo, hi);
    const BINS: usize = 32;
    let mut counts = [0usize; BINS];
    for &m in &margins {
        let t = ((m - lo) / (hi - lo) * BINS as f64).floor() as isize;
        let i = t.clamp(0, BINS as isize - 1) as usize;
        counts[i] += 1;
    }
    let peak = *counts.iter().max().expect("non-empty") as f64;
    let f = Frame::new(lo, hi, 0.0, peak);
    let mut out = svg_open(&format!(
        "margin histogram — {} records",
        margins.len()
    ));
    axes(&mut out, &f, "margin", "count");
    let bw = (hi - lo) / BINS as f64;
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let x0 = f.x(lo + i as f64 * bw);
        let x1 = f.x(lo + (i + 1) as f64 * bw);
        let y = f.y(c as f64);
        let base = f.y(0.0);
        let _ = writeln!(
            out,
            "<rect x=\"{x0:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"steelblue\" stroke=\"white\" stroke-width=\"0.5\"/>",
            (x1 - x0).max(0.5),
            (base - y).max(0.0)
        );
    }
    if lo < 0.0 && hi > 0.0 {
        let xz = f.x(0.0);
        let _ = writeln!(
            out,
            "<line x1=\"{xz:.2}\" y1=\"{:.1}\" x2=\"{xz:.2}\" y2=\"{:.1}\" \
             stroke=\"firebrick\" stroke-dasharray=\"4 3\"/>",
            HEIGHT - BOTTOM,
            TOP
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// X value of a sweep row: its first numeric parameter.
fn sweep_x(r: &ResultRecord) -> Option<f64> {
    r.params.iter().find_map(|(k, _)| r.param_f64(k))
}

fn census_vs_parameter(records: &[ResultRecord]) -> Result<String> {
    let mut pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.kind == "pack-count")
        .filter_map(|r| sweep_x(r).map(|x| (x, r.measured)))
        .collect();
    if pts.is_empty() {
        return Err(HarnessError::Usage(
            "census-vs-parameter needs rows of kind `pack-count`".into(),
        ));
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    let x_lo = pts.first().expect("non-empty").0;
    let x_hi = pts.last().expect("non-empty").0;
    let y_hi = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    let f = Frame::new(x_lo, x_hi, 0.0, y_hi);
    let mut out = svg_open("pack count vs. parameter");
    axes(&mut out, &f, "parameter", "packs");
    // Step rendering: hold each value until the next parameter.
    let mut path = Vec::with_capacity(2 * pts.len());
    for w in pts.windows(2) {
        path.push((f.x(w[0].0), f.y(w[0].1)));
        path.push((f.x(w[1].0), f.y(w[0].1)));
    }
    if let Some(last) = pts.last() {
        path.push((f.x(last.0), f.y(last.1)));
    }
    polyline(&mut out, &path, "steelblue");
    out.push_str("</svg>\n");
    Ok(out)
}

fn rho_envelope(records: &[ResultRecord]) -> Result<String> {
    let rows: Vec<&ResultRecord> = records
        .iter()
        .filter(|r| r.kind == "rho-envelope")
        .collect();
    if rows.is_empty() {
        return Err(HarnessError::Usage(
            "rho-envelope needs rows of kind `rho-envelope`".into(),
        ));
    }
    let mut series: Vec<(i64, Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        let n = match r.param_f64("n") {
            Some(v) => v as i64,
            None => continue,
        };
        let input = match r.param_f64("input") {
            Some(v) => v,
            None => continue,
        };
        match series.iter_mut().find(|(m, _)| *m == n) {
            Some((_, pts)) => pts.push((input, r.measured)),
            None => series.push((n, vec![(input, r.measured)])),
        }
    }
    series.sort_by_key(|(n, _)| *n);
    if series.is_empty() {
        return Err(HarnessError::Usage(
            "rho-envelope rows lack `n` and `input` parameters".into(),
        ));
    }
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for (_, pts) in &mut series {
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
        for &(x, y) in pts.iter() {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    let f = Frame::new(x_lo, x_hi, y_lo, y_hi);
    let mut out = svg_open("contraction envelopes per multiplicity");
    axes(&mut out, &f, "input cross-ratio", "envelope");
    const COLORS: [&str; 5] = ["steelblue", "firebrick", "seagreen", "darkorange", "purple"];
    for (i, (n, pts)) in series.iter().enumerate() {
        let path: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (f.x(x), f.y(y))).collect();
        let color = COLORS[i % COLORS.len()];
        polyline(&mut out, &path, color);
        if let Some(&(x, y)) = pts.last() {
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 fill=\"{color}\">N={n}</text>",
                f.x(x) + 4.0,
                f.y(y)
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
