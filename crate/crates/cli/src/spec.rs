//! Problem specifications: an optional JSON file overlaid with command-line flags.

use std::cmp::Ordering;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use setreach::{Domain, IntervalBox, Mode, Network, VerificationProblem};

use crate::error::{read, usage, CliError, CliResult};

/// A verification problem as written on disk. Relative paths are resolved
/// against the directory of the spec file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub model: Option<PathBuf>,
    pub input: Option<Vec<[f64; 2]>>,
    pub safe: Option<Vec<[f64; 2]>>,
    pub domain: Option<Domain>,
    pub mode: Option<Mode>,
    pub grid: Option<Vec<usize>>,
    pub max_refinements: Option<usize>,
    pub seed: Option<u64>,
    pub falsify_samples: Option<usize>,
    /// Verdict JSON destination.
    pub out: Option<PathBuf>,
    /// Reach-cell CSV destination.
    pub cells: Option<PathBuf>,
}

impl ProblemSpec {
    pub fn load(path: &Path) -> CliResult<ProblemSpec> {
        let text = read(path)?;
        let mut spec: ProblemSpec = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse { path: path.to_path_buf(), msg: e.to_string() })?;
        let dir = path.parent().unwrap_or(Path::new(""));
        for p in [&mut spec.model, &mut spec.out, &mut spec.cells].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(spec)
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: ProblemSpec) -> ProblemSpec {
        ProblemSpec {
            model: other.model.or(self.model),
            input: other.input.or(self.input),
            safe: other.safe.or(self.safe),
            domain: other.domain.or(self.domain),
            mode: other.mode.or(self.mode),
            grid: other.grid.or(self.grid),
            max_refinements: other.max_refinements.or(self.max_refinements),
            seed: other.seed.or(self.seed),
            falsify_samples: other.falsify_samples.or(self.falsify_samples),
            out: other.out.or(self.out),
            cells: other.cells.or(self.cells),
        }
    }

    pub fn network(&self) -> CliResult<Network> {
        let path = self.model.as_ref().ok_or_else(|| usage("no model given (--model)"))?;
        Ok(Network::load(path)?)
    }

    pub fn input_box(&self) -> CliResult<IntervalBox> {
        to_box(self.input.as_deref().ok_or_else(|| usage("no input box given (--input)"))?)
    }

    pub fn safe_box(&self) -> CliResult<IntervalBox> {
        to_box(self.safe.as_deref().ok_or_else(|| usage("no safe box given (--safe)"))?)
    }

    pub fn problem(&self) -> CliResult<VerificationProblem> {
        let mut p = VerificationProblem::new(self.network()?, self.input_box()?, self.safe_box()?)?;
        if let Some(d) = self.domain {
            p = p.with_domain(d);
        }
        if let Some(m) = self.mode {
            p = p.with_mode(m);
        }
        if let Some(g) = &self.grid {
            p = p.with_grid(g)?;
        }
        if let Some(n) = self.max_refinements {
            p = p.with_max_refinements(n);
        }
        if let Some(s) = self.seed {
            p = p.with_seed(s);
        }
        if let Some(n) = self.falsify_samples {
            p = p.with_falsify_samples(n);
        }
        Ok(p)
    }
}

fn to_box(bounds: &[[f64; 2]]) -> CliResult<IntervalBox> {
    let pairs: Vec<(f64, f64)> = bounds.iter().map(|b| (b[0], b[1])).collect();
    Ok(IntervalBox::from_bounds(&pairs)?)
}

/// Parses `"lo,hi;lo,hi;…"`.
pub fn parse_box(s: &str) -> Result<Vec<[f64; 2]>, String> {
    let dims: Vec<&str> = s.split(';').map(str::trim).filter(|d| !d.is_empty()).collect();
    if dims.is_empty() {
        return Err("empty box".into());
    }
    dims.iter()
        .map(|d| {
            let parts: Vec<&str> = d.split(',').map(str::trim).collect();
            let [lo, hi] = parts[..] else {
                return Err(format!("`{d}` is not a `lo,hi` pair"));
            };
            let lo: f64 = lo.parse().map_err(|_| format!("bad number `{lo}`"))?;
            let hi: f64 = hi.parse().map_err(|_| format!("bad number `{hi}`"))?;
            if !matches!(lo.partial_cmp(&hi), Some(Ordering::Less | Ordering::Equal)) {
                return Err(format!("`{d}`: lower bound exceeds upper bound"));
            }
            Ok([lo, hi])
        })
        .collect()
}

/// Parses `"k[,k…]"`.
pub fn parse_grid(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|k| {
            let k = k.trim();
            match k.parse::<usize>() {
                Ok(0) => Err("grid counts must be at least 1".to_string()),
                Ok(v) => Ok(v),
                Err(_) => Err(format!("bad grid count `{k}`")),
            }
        })
        .collect()
}
