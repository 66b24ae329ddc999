//! Safety verification drivers.
//!
//! * [`verify_boundary`] propagates only the faces of the input box. A `Safe`
//!   answer is valid when the network is a homeomorphism on the input; called
//!   directly, the verdict records that assumption.
//! * [`verify_subset`] removes the certified interior cells and propagates the rest.
//! * [`verify_full`] propagates every grid cell.
//! * [`verify_auto`] certifies the whole input, picks boundary or subset mode,
//!   and doubles the grid on `Unknown`.
//!
//! Every driver tries Monte-Carlo falsification before returning `Unknown`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{check_inclusion, propagate, union_hull, Domain, ReachSet};
use crate::error::{check_dim, Error, Result};
use crate::interval::{IntervalBox, MAX_DET_DIM};
use crate::montecarlo::monte_carlo;
use crate::network::Network;
use crate::topology::{certify_homeomorphism, extract_subset, partition, CellGrid, ExtractionCounts};

/// Default number of samples drawn when trying to falsify an `Unknown` verdict.
pub const DEFAULT_FALSIFY_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Boundary,
    Subset,
    Full,
    Auto,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boundary" => Ok(Mode::Boundary),
            "subset" => Ok(Mode::Subset),
            "full" => Ok(Mode::Full),
            "auto" => Ok(Mode::Auto),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Boundary => "boundary",
            Mode::Subset => "subset",
            Mode::Full => "full",
            Mode::Auto => "auto",
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerificationProblem {
    pub net: Network,
    pub input: IntervalBox,
    pub safe: IntervalBox,
    pub domain: Domain,
    pub mode: Mode,
    /// Per-dimension subdivision counts of the input box.
    pub grid: Vec<usize>,
    pub max_refinements: usize,
    pub seed: u64,
    /// Monte-Carlo samples used to falsify an `Unknown` verdict; 0 disables it.
    pub falsify_samples: usize,
}

impl VerificationProblem {
    /// Box domain, auto mode, a single cell, no refinement.
    pub fn new(net: Network, input: IntervalBox, safe: IntervalBox) -> Result<Self> {
        let grid = vec![1; input.dim()];
        let p = Self {
            net,
            input,
            safe,
            domain: Domain::Box,
            mode: Mode::Auto,
            grid,
            max_refinements: 0,
            seed: 0,
            falsify_samples: DEFAULT_FALSIFY_SAMPLES,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// A single count is applied to every dimension.
    pub fn with_grid(mut self, grid: &[usize]) -> Result<Self> {
        self.grid = if grid.len() == 1 {
            vec![grid[0]; self.input.dim()]
        } else {
            grid.to_vec()
        };
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_refinements(mut self, n: usize) -> Self {
        self.max_refinements = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_falsify_samples(mut self, n: usize) -> Self {
        self.falsify_samples = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.net.input_dim(), self.input.dim(), "input box")?;
        check_dim(self.net.output_dim(), self.safe.dim(), "safe box")?;
        check_dim(self.input.dim(), self.grid.len(), "grid counts")?;
        if self.grid.contains(&0) {
            return Err(Error::InvalidArgument("grid counts must be at least 1".into()));
        }
        Ok(())
    }

    fn grid_at(&self, level: usize) -> Result<CellGrid> {
        let counts: Vec<usize> = self
            .grid
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                if self.input.is_degenerate_dim(k) {
                    1
                } else {
                    c << level
                }
            })
            .collect();
        partition(&self.input, &counts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Safe,
    Unknown,
    Falsified,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Safe => "safe",
            Status::Unknown => "unknown",
            Status::Falsified => "falsified",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stats {
    /// Mode that produced the verdict (never `Auto`).
    pub path: Mode,
    pub cells_propagated: usize,
    /// Cells in the full grid at the final refinement level.
    pub cells_total: usize,
    pub cells_certified: usize,
    pub cells_certified_interior: usize,
    pub cells_kept: usize,
    pub refinement_level: usize,
    pub grid: Vec<usize>,
    pub wall_ms: f64,
    /// Boundary mode was run without discharging the homeomorphism precondition.
    pub assumes_invertible: bool,
    /// Subset mode fell back to full propagation (non-square or too-large network).
    pub fallback_full: bool,
}

/// A propagated cell with its grid index (see [`CellGrid::boundary_cells`] for
/// how face cells are indexed).
#[derive(Clone, Debug, PartialEq)]
pub struct ReachCell {
    pub index: Vec<usize>,
    pub set: ReachSet,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    pub stats: Stats,
    pub output_hull: IntervalBox,
    pub counterexample: Option<Vec<f64>>,
    pub reach: Vec<ReachCell>,
}

fn propagate_cells(
    net: &Network,
    cells: Vec<(Vec<usize>, IntervalBox)>,
    domain: Domain,
) -> Result<Vec<ReachCell>> {
    cells
        .into_par_iter()
        .map(|(index, cell)| {
            let set = propagate(net, &cell, domain)?;
            Ok(ReachCell { index, set })
        })
        .collect()
}

fn assemble(
    p: &VerificationProblem,
    path: Mode,
    grid: &CellGrid,
    reach: Vec<ReachCell>,
    extraction: Option<ExtractionCounts>,
) -> Result<Verdict> {
    let sets: Vec<ReachSet> = reach.iter().map(|r| r.set.clone()).collect();
    let safe = check_inclusion(&sets, &p.safe)?;
    let output_hull = union_hull(&sets)?
        .ok_or_else(|| Error::InvalidArgument("no cells were propagated".into()))?;
    let ex = extraction.unwrap_or(ExtractionCounts {
        total: grid.len(),
        certified: 0,
        certified_interior: 0,
        kept: grid.len(),
    });
    Ok(Verdict {
        status: if safe { Status::Safe } else { Status::Unknown },
        stats: Stats {
            path,
            cells_propagated: reach.len(),
            cells_total: grid.len(),
            cells_certified: ex.certified,
            cells_certified_interior: ex.certified_interior,
            cells_kept: ex.kept,
            refinement_level: 0,
            grid: grid.counts().to_vec(),
            wall_ms: 0.0,
            assumes_invertible: false,
            fallback_full: false,
        },
        output_hull,
        counterexample: None,
        reach,
    })
}

fn run_boundary(p: &VerificationProblem, grid: &CellGrid) -> Result<Verdict> {
    let cells = grid.boundary_cells()?;
    let reach = propagate_cells(&p.net, cells, p.domain)?;
    assemble(p, Mode::Boundary, grid, reach, None)
}

fn run_full(p: &VerificationProblem, grid: &CellGrid) -> Result<Verdict> {
    let reach = propagate_cells(&p.net, grid.iter().collect(), p.domain)?;
    assemble(p, Mode::Full, grid, reach, None)
}

fn certifiable(net: &Network) -> bool {
    net.is_square() && net.input_dim() <= MAX_DET_DIM
}

fn run_subset(p: &VerificationProblem, grid: &CellGrid) -> Result<Verdict> {
    if !certifiable(&p.net) {
        let mut v = run_full(p, grid)?;
        v.stats.fallback_full = true;
        return Ok(v);
    }
    let ex = extract_subset(&p.net, &p.input, grid.counts())?;
    let kept = ex
        .kept_cells()
        .map(|c| (c.index.clone(), c.cell.clone()))
        .collect();
    let reach = propagate_cells(&p.net, kept, p.domain)?;
    let mut v = assemble(p, Mode::Subset, grid, reach, Some(ex.counts))?;
    v.stats.path = Mode::Subset;
    Ok(v)
}

/// Replaces `Unknown` by `Falsified` if sampling finds an input whose exact image leaves the safe box.
fn try_falsify(p: &VerificationProblem, v: &mut Verdict) -> Result<()> {
    if v.status != Status::Unknown || p.falsify_samples == 0 {
        return Ok(());
    }
    let mc = monte_carlo(&p.net, &p.input, p.falsify_samples, p.seed, Some(&p.safe))?;
    if let Some(x) = mc.first_violation() {
        let y = p.net.forward_point(x)?;
        if !p.safe.contains_point(&y)? {
            v.status = Status::Falsified;
            v.counterexample = Some(x.to_vec());
        }
    }
    Ok(())
}

fn timed(
    p: &VerificationProblem,
    run: impl FnOnce(&VerificationProblem) -> Result<Verdict>,
) -> Result<Verdict> {
    p.validate()?;
    let start = Instant::now();
    let mut v = run(p)?;
    try_falsify(p, &mut v)?;
    v.stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(v)
}

/// Boundary-only verification.
pub fn verify_boundary(p: &VerificationProblem) -> Result<Verdict> {
    timed(p, |p| {
        let mut v = run_boundary(p, &p.grid_at(0)?)?;
        v.stats.assumes_invertible = true;
        Ok(v)
    })
}

/// Verification on the cells that remain after removing the certified interior.
pub fn verify_subset(p: &VerificationProblem) -> Result<Verdict> {
    timed(p, |p| run_subset(p, &p.grid_at(0)?))
}

pub fn verify_full(p: &VerificationProblem) -> Result<Verdict> {
    timed(p, |p| run_full(p, &p.grid_at(0)?))
}

/// Certifies the whole input, runs boundary mode if that succeeds and subset
/// mode otherwise, doubling every grid count on `Unknown` up to
/// `max_refinements` times.
pub fn verify_auto(p: &VerificationProblem) -> Result<Verdict> {
    timed(p, |p| {
        let invertible = certifiable(&p.net) && certify_homeomorphism(&p.net, &p.input)?.certified;
        let mut last = None;
        for level in 0..=p.max_refinements {
            let grid = p.grid_at(level)?;
            let mut v = if invertible {
                run_boundary(p, &grid)?
            } else {
                run_subset(p, &grid)?
            };
            v.stats.refinement_level = level;
            if v.status == Status::Safe {
                return Ok(v);
            }
            last = Some(v);
        }
        Ok(last.expect("at least one refinement level runs"))
    })
}

/// Dispatches on `p.mode`.
pub fn verify(p: &VerificationProblem) -> Result<Verdict> {
    match p.mode {
        Mode::Boundary => verify_boundary(p),
        Mode::Subset => verify_subset(p),
        Mode::Full => verify_full(p),
        Mode::Auto => verify_auto(p),
    }
}
