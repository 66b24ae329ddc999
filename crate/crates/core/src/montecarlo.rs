//! Deterministic Monte-Carlo sampling of network images.
//!
//! Sample `i` draws from its own ChaCha stream (`seed`, stream `i`), so the
//! sample set does not depend on how the work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::interval::IntervalBox;
use crate::network::Network;

/// The `index`-th uniform sample of `region`; degenerate dimensions are pinned.
pub fn sample_point(region: &IntervalBox, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    region
        .iter()
        .map(|d| {
            if d.is_point() {
                d.lo()
            } else {
                rng.gen_range(d.lo()..=d.hi())
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct MonteCarlo {
    pub points: Vec<Vec<f64>>,
    pub images: Vec<Vec<f64>>,
    pub image_hull: IntervalBox,
    /// Indices of samples whose image falls outside the safe box, if one was given.
    pub violations: Vec<usize>,
}

impl MonteCarlo {
    pub fn first_violation(&self) -> Option<&[f64]> {
        self.violations.first().map(|&i| self.points[i].as_slice())
    }
}

pub fn monte_carlo(
    net: &Network,
    region: &IntervalBox,
    n: usize,
    seed: u64,
    safe: Option<&IntervalBox>,
) -> Result<MonteCarlo> {
    if n == 0 {
        return Err(Error::InvalidArgument("Monte-Carlo sample count must be positive".into()));
    }
    check_dim(net.input_dim(), region.dim(), "sampling region")?;
    if let Some(s) = safe {
        check_dim(net.output_dim(), s.dim(), "safe set")?;
    }
    let samples = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = sample_point(region, seed, i as u64);
            let y = net.forward_point(&x)?;
            Ok((x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    let (points, images): (Vec<_>, Vec<_>) = samples.into_iter().unzip();
    let mut lo = images[0].clone();
    let mut hi = images[0].clone();
    for y in &images[1..] {
        for (k, &v) in y.iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    let bounds: Vec<(f64, f64)> = lo.into_iter().zip(hi).collect();
    let image_hull = IntervalBox::from_bounds(&bounds)?;
    let violations = match safe {
        Some(s) => images
            .iter()
            .enumerate()
            .filter(|(_, y)| !s.contains_point(y).unwrap_or(false))
            .map(|(i, _)| i)
            .collect(),
        None => Vec::new(),
    };
    Ok(MonteCarlo {
        points,
        images,
        image_hull,
        violations,
    })
}
