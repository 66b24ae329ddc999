//! Machine-readable verdicts and CSV / table renderings.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use setreach::{IntervalBox, Mode, MonteCarlo, Status, SubsetExtraction, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    /// Cells propagated.
    pub cells: usize,
    pub cells_total: usize,
    pub certified: usize,
    pub certified_interior: usize,
    pub kept: usize,
    pub refinement_level: usize,
    pub grid: Vec<usize>,
    pub wall_ms: f64,
    pub path: Mode,
    pub assumes_invertible: bool,
    pub fallback_full: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub status: Status,
    pub stats: StatsReport,
    pub output_hull: Vec<[f64; 2]>,
    pub counterexample: Option<Vec<f64>>,
    pub refinement_level: usize,
}

impl VerdictReport {
    pub fn new(v: &Verdict) -> VerdictReport {
        let s = &v.stats;
        VerdictReport {
            status: v.status,
            stats: StatsReport {
                cells: s.cells_propagated,
                cells_total: s.cells_total,
                certified: s.cells_certified,
                certified_interior: s.cells_certified_interior,
                kept: s.cells_kept,
                refinement_level: s.refinement_level,
                grid: s.grid.clone(),
                wall_ms: s.wall_ms,
                path: s.path,
                assumes_invertible: s.assumes_invertible,
                fallback_full: s.fallback_full,
            },
            output_hull: bounds(&v.output_hull),
            counterexample: v.counterexample.clone(),
            refinement_level: s.refinement_level,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes") + "\n"
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Safe => 0,
        Status::Unknown => 1,
        Status::Falsified => 2,
    }
}

pub fn bounds(b: &IntervalBox) -> Vec<[f64; 2]> {
    b.iter().map(|d| [d.lo(), d.hi()]).collect()
}

fn header(prefix: &str, n: usize, suffixes: &[&str]) -> Vec<String> {
    (0..n)
        .flat_map(|k| suffixes.iter().map(move |s| format!("{prefix}{k}{s}")))
        .collect()
}

/// One row per propagated cell: grid index, then the hull of its reach set.
pub fn cells_csv(v: &Verdict) -> String {
    let n = v.stats.grid.len();
    let m = v.output_hull.dim();
    let mut cols = header("idx", n, &[""]);
    cols.extend(header("out", m, &["_lo", "_hi"]));
    let mut out = cols.join(",") + "\n";
    for r in &v.reach {
        let mut row: Vec<String> = r.index.iter().map(|i| i.to_string()).collect();
        for d in r.set.hull().iter() {
            row.push(d.lo().to_string());
            row.push(d.hi().to_string());
        }
        out += &(row.join(",") + "\n");
    }
    out
}

pub fn certify_csv(ex: &SubsetExtraction) -> String {
    let mut cols = header("idx", ex.grid.counts().len(), &[""]);
    cols.extend(["det_lo", "det_hi", "certified"].map(String::from));
    let mut out = cols.join(",") + "\n";
    for c in &ex.cells {
        let mut row: Vec<String> = c.index.iter().map(|i| i.to_string()).collect();
        row.push(c.det_interval.lo().to_string());
        row.push(c.det_interval.hi().to_string());
        row.push(c.certified.to_string());
        out += &(row.join(",") + "\n");
    }
    out
}

pub fn certify_summary(ex: &SubsetExtraction) -> String {
    let c = &ex.counts;
    format!(
        "cells {}  certified {} ({:.2}%)  certified_interior {}  kept {}",
        c.total,
        c.certified,
        100.0 * c.certified as f64 / c.total as f64,
        c.certified_interior,
        c.kept
    )
}

pub fn mc_csv(mc: &MonteCarlo) -> String {
    let n = mc.points.first().map_or(0, Vec::len);
    let m = mc.images.first().map_or(0, Vec::len);
    let mut cols = header("in", n, &[""]);
    cols.extend(header("out", m, &[""]));
    let mut out = cols.join(",") + "\n";
    for (x, y) in mc.points.iter().zip(&mc.images) {
        let row: Vec<String> = x.iter().chain(y).map(|v| v.to_string()).collect();
        out += &(row.join(",") + "\n");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub mode: Mode,
    pub cells: usize,
    pub cells_total: usize,
    pub certified_interior: usize,
    pub kept: usize,
    pub verdict: Status,
    pub wall_ms: f64,
    pub hull: Vec<[f64; 2]>,
}

impl CompareRow {
    pub fn new(mode: Mode, v: &Verdict) -> CompareRow {
        CompareRow {
            mode,
            cells: v.stats.cells_propagated,
            cells_total: v.stats.cells_total,
            certified_interior: v.stats.cells_certified_interior,
            kept: v.stats.cells_kept,
            verdict: v.status,
            wall_ms: v.stats.wall_ms,
            hull: bounds(&v.output_hull),
        }
    }
}

pub fn compare_table(rows: &[CompareRow]) -> String {
    let mut out = format!("{:<9} {:>9} {:>9} {:>10} {:>11}  {}\n", "mode", "cells", "kept", "verdict", "time_ms", "hull");
    for r in rows {
        let hull: Vec<String> = r.hull.iter().map(|[lo, hi]| format!("[{lo:.6}, {hi:.6}]")).collect();
        // Only subset runs extract a kept set.
        let kept = if r.mode == Mode::Subset { r.kept.to_string() } else { "-".into() };
        let _ = writeln!(
            out,
            "{:<9} {:>9} {:>9} {:>10} {:>11.3}  {}",
            r.mode.to_string(),
            r.cells,
            kept,
            r.verdict.to_string(),
            r.wall_ms,
            hull.join(" x ")
        );
    }
    out
}
