//! Deterministic SVG plots of 2-D projections of reach cells, Monte-Carlo
//! images and the safe box.
//!
//! Reach cells are the only `<rect>` elements in the document; the safe box is
//! drawn as a `<polygon>` outline and the legend uses lines, so element counts
//! can be checked directly in tests.

use std::fmt::Write;

use crate::error::{usage, CliResult};

pub const FULL_COLOR: &str = "#1f4fd1";
pub const BOUNDARY_COLOR: &str = "#d1261f";
pub const SAFE_COLOR: &str = "#1a9a2e";
pub const MC_COLOR: &str = "#e6c300";

const SIZE: f64 = 600.0;
const MARGIN: f64 = 60.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    /// Cells from a full-set run.
    Full,
    /// Cells from a boundary or subset run.
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub kind: CellKind,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Plot {
    pub cells: Vec<Rect>,
    pub points: Vec<[f64; 2]>,
    pub safe: Option<Rect>,
    pub labels: [String; 2],
}

/// Output dimensions to draw: `proj` if given, else `(0, 1)`; more than two
/// dimensions require an explicit projection.
pub fn projection(dim: usize, proj: Option<[usize; 2]>) -> CliResult<[usize; 2]> {
    match proj {
        Some([i, j]) if i < dim && j < dim && i != j => Ok([i, j]),
        Some([i, j]) => Err(usage(format!("projection ({i}, {j}) is invalid for {dim} output dimensions"))),
        None if dim == 2 => Ok([0, 1]),
        None if dim == 1 => Err(usage("one-dimensional data cannot be plotted")),
        None => Err(usage(format!("data has {dim} output dimensions; choose two with --proj i j"))),
    }
}

fn columns(header: &str) -> Vec<&str> {
    header.split(',').map(str::trim).collect()
}

fn column(cols: &[&str], name: &str) -> CliResult<usize> {
    cols.iter().position(|c| *c == name).ok_or_else(|| usage(format!("CSV has no `{name}` column")))
}

fn count_outputs(cols: &[&str], suffix: &str) -> usize {
    (0..).take_while(|k| cols.contains(&format!("out{k}{suffix}").as_str())).count()
}

fn parse_row(line: &str, n: usize) -> CliResult<Vec<f64>> {
    let vals: Vec<f64> = line
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| usage(format!("bad CSV value in `{line}`"))))
        .collect::<CliResult<_>>()?;
    if vals.len() != n {
        return Err(usage(format!("CSV row has {} fields, header has {n}", vals.len())));
    }
    Ok(vals)
}

/// Reads a reach-cell CSV (`idx…,out0_lo,out0_hi,…`).
pub fn read_cells(csv: &str, kind: CellKind, proj: Option<[usize; 2]>) -> CliResult<Vec<Rect>> {
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    let Some(head) = lines.next() else { return Ok(Vec::new()) };
    let cols = columns(head);
    let [i, j] = projection(count_outputs(&cols, "_lo"), proj)?;
    let at = |k: usize, s: &str| column(&cols, &format!("out{k}{s}"));
    let (xl, xh, yl, yh) = (at(i, "_lo")?, at(i, "_hi")?, at(j, "_lo")?, at(j, "_hi")?);
    lines
        .map(|l| {
            let v = parse_row(l, cols.len())?;
            Ok(Rect { x: [v[xl], v[xh]], y: [v[yl], v[yh]], kind })
        })
        .collect()
}

/// Reads a Monte-Carlo CSV (`in…,out0,out1,…`).
pub fn read_points(csv: &str, proj: Option<[usize; 2]>) -> CliResult<Vec<[f64; 2]>> {
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    let Some(head) = lines.next() else { return Ok(Vec::new()) };
    let cols = columns(head);
    let [i, j] = projection(count_outputs(&cols, ""), proj)?;
    let (xi, yi) = (column(&cols, &format!("out{i}"))?, column(&cols, &format!("out{j}"))?);
    lines
        .map(|l| {
            let v = parse_row(l, cols.len())?;
            Ok([v[xi], v[yi]])
        })
        .collect()
}

struct Frame {
    x: [f64; 2],
    y: [f64; 2],
}

impl Frame {
    fn new(plot: &Plot) -> Frame {
        let mut x = [f64::INFINITY, f64::NEG_INFINITY];
        let mut y = x;
        let mut grow = |px: [f64; 2], py: [f64; 2]| {
            x = [x[0].min(px[0]), x[1].max(px[1])];
            y = [y[0].min(py[0]), y[1].max(py[1])];
        };
        for r in plot.cells.iter().chain(&plot.safe) {
            grow(r.x, r.y);
        }
        for p in &plot.points {
            grow([p[0]; 2], [p[1]; 2]);
        }
        let pad = |r: [f64; 2]| {
            if !r[0].is_finite() {
                [0.0, 1.0]
            } else if r[1] - r[0] <= 0.0 {
                [r[0] - 0.5, r[1] + 0.5]
            } else {
                let m = 0.05 * (r[1] - r[0]);
                [r[0] - m, r[1] + m]
            }
        };
        Frame { x: pad(x), y: pad(y) }
    }

    fn sx(&self, v: f64) -> f64 {
        MARGIN + (v - self.x[0]) / (self.x[1] - self.x[0]) * (SIZE - 2.0 * MARGIN)
    }

    /// SVG y grows downwards.
    fn sy(&self, v: f64) -> f64 {
        SIZE - MARGIN - (v - self.y[0]) / (self.y[1] - self.y[0]) * (SIZE - 2.0 * MARGIN)
    }
}

pub fn render(plot: &Plot) -> String {
    let f = Frame::new(plot);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<g id="cells" stroke-width="0.5">"#);
    for r in &plot.cells {
        let color = match r.kind {
            CellKind::Full => FULL_COLOR,
            CellKind::Boundary => BOUNDARY_COLOR,
        };
        let (x0, x1) = (f.sx(r.x[0]), f.sx(r.x[1]));
        let (y0, y1) = (f.sy(r.y[1]), f.sy(r.y[0]));
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="{color}" fill-opacity="0.35" stroke="{color}"/>"#,
            x1 - x0,
            y1 - y0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="samples" fill="{MC_COLOR}">"#);
    for p in &plot.points {
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="1.2"/>"#, f.sx(p[0]), f.sy(p[1]));
    }
    let _ = writeln!(s, "</g>");
    if let Some(r) = &plot.safe {
        let (x0, x1, y0, y1) = (f.sx(r.x[0]), f.sx(r.x[1]), f.sy(r.y[1]), f.sy(r.y[0]));
        let _ = writeln!(
            s,
            r#"<polygon id="safe" points="{x0:.3},{y0:.3} {x1:.3},{y0:.3} {x1:.3},{y1:.3} {x0:.3},{y1:.3}" fill="none" stroke="{SAFE_COLOR}" stroke-width="2"/>"#
        );
    }
    axes(&mut s, &f, &plot.labels);
    legend(&mut s);
    s.push_str("</svg>\n");
    s
}

fn axes(s: &mut String, f: &Frame, labels: &[String; 2]) {
    let (left, right, top, bottom) = (MARGIN, SIZE - MARGIN, MARGIN, SIZE - MARGIN);
    let _ = writeln!(s, r#"<g id="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}"/>"#);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="ticks" fill="black">"#);
    let _ = writeln!(s, r#"<text x="{left}" y="{}" text-anchor="middle">{:.4}</text>"#, bottom + 16.0, f.x[0]);
    let _ = writeln!(s, r#"<text x="{right}" y="{}" text-anchor="middle">{:.4}</text>"#, bottom + 16.0, f.x[1]);
    let _ = writeln!(s, r#"<text x="{}" y="{bottom}" text-anchor="end">{:.4}</text>"#, left - 4.0, f.y[0]);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{:.4}</text>"#, left - 4.0, top + 4.0, f.y[1]);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, SIZE / 2.0, bottom + 36.0, labels[0]);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        labels[1]
    );
    let _ = writeln!(s, "</g>");
}

fn legend(s: &mut String) {
    let entries = [("full", FULL_COLOR), ("boundary/subset", BOUNDARY_COLOR), ("safe", SAFE_COLOR), ("MC", MC_COLOR)];
    let _ = writeln!(s, r#"<g id="legend">"#);
    for (k, (name, color)) in entries.iter().enumerate() {
        let y = 20.0 + 16.0 * k as f64;
        let x = SIZE - 150.0;
        let _ = writeln!(s, r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="6"/>"#, x + 18.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{name}</text>"#, x + 24.0, y + 4.0);
    }
    let _ = writeln!(s, "</g>");
}
