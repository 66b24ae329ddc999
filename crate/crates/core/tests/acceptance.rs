//! Acceptance suite. Runs every criterion at its stated tolerance and time
//! budget, prints one PASS/FAIL line per criterion and exits non-zero if any
//! failed.
//!
//!     cargo test -p setreach --test acceptance

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rayon::prelude::*;
use setreach::{
    certify_homeomorphism, extract_subset, jacobian_interval, monte_carlo, partition, propagate, sample_point,
    verify, verify_boundary, verify_full, Activation, Domain, IntervalBox, Mode, Network, Status,
    VerificationProblem,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

/// A seeded network together with the input box it is studied on.
struct Case {
    name: String,
    net: Network,
    input: IntervalBox,
}

fn case(name: &str, net: Network, input: IntervalBox) -> Case {
    Case { name: name.to_string(), net, input }
}

fn suite() -> Vec<Case> {
    let mut cases = Vec::new();
    for seed in [0, 1, 3, 7] {
        let net = Network::generate(seed, &[2, 5, 2], Activation::Tanh, 0.5).unwrap();
        cases.push(case(&format!("tanh 2-5-2 s{seed}"), net, unit_square()));
    }
    for seed in [9, 17] {
        let net = Network::generate(seed, &[2, 7, 2], Activation::Tanh, 1.0).unwrap();
        cases.push(case(&format!("tanh 2-7-2 s{seed}"), net, sym_square()));
    }
    let net = Network::generate(4, &[2, 6, 6, 2], Activation::Sigmoid, 1.0).unwrap();
    cases.push(case("sigmoid 2-6-6-2 s4", net, sym_square()));
    let net = Network::generate(2, &[3, 5, 3], Activation::Tanh, 0.5).unwrap();
    cases.push(case("tanh 3-5-3 s2", net, IntervalBox::cube(3, 0.0, 0.5).unwrap()));
    let net = Network::generate(2, &[2, 4, 3], Activation::Tanh, 1.0).unwrap();
    cases.push(case("tanh 2-4-3 s2", net, IntervalBox::from_bounds(&[(-1.0, 0.5), (0.0, 1.0)]).unwrap()));
    cases
}

fn grid_for(c: &Case) -> usize {
    if c.input.dim() == 3 { 4 } else { 8 }
}

fn square_nets() -> Vec<Case> {
    let mut cases = Vec::new();
    for seed in 0..12 {
        let net = Network::generate(seed, &[2, 5, 2], Activation::Tanh, 0.5).unwrap();
        cases.push(case(&format!("tanh 2-5-2 s{seed}"), net, unit_square()));
    }
    for seed in [9, 17, 18, 27] {
        let net = Network::generate(seed, &[2, 7, 2], Activation::Tanh, 1.0).unwrap();
        cases.push(case(&format!("tanh 2-7-2 s{seed}"), net, sym_square()));
    }
    for seed in 0..3 {
        let net = Network::generate(seed, &[2, 6, 6, 2], Activation::Sigmoid, 1.0).unwrap();
        cases.push(case(&format!("sigmoid 2-6-6-2 s{seed}"), net, sym_square()));
    }
    for seed in 0..3 {
        let net = Network::generate(seed, &[3, 5, 3], Activation::Tanh, 0.5).unwrap();
        cases.push(case(&format!("tanh 3-5-3 s{seed}"), net, IntervalBox::cube(3, 0.0, 0.5).unwrap()));
    }
    cases
}

fn point_det(m: &[Vec<f64>]) -> f64 {
    leibniz_det(m).0
}

// 1. Partition arithmetic.
fn partition_counts() -> Outcome {
    let grid = partition(&unit_square(), &[100, 100]).map_err(err)?;
    let full = grid.cells().len();
    let boundary = grid.boundary_cells().map_err(err)?.len();
    ensure!(full == 10_000, "{full} full cells");
    ensure!(boundary == 400, "{boundary} boundary cells");
    ensure!(grid.boundary_len() == 400, "boundary_len {}", grid.boundary_len());
    Ok(format!("{full} full cells, {boundary} boundary cells"))
}

/// Cell of `grid` that contains `x` (points on shared edges may belong to either neighbour).
fn locate(lower: &[f64], upper: &[f64], counts: &[usize], x: &[f64]) -> Vec<usize> {
    (0..x.len())
        .map(|k| {
            let t = (x[k] - lower[k]) / (upper[k] - lower[k]) * counts[k] as f64;
            (t.floor().max(0.0) as usize).min(counts[k] - 1)
        })
        .collect()
}

fn neighbours(index: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![index.to_vec()];
    for k in 0..index.len() {
        for d in [-1i64, 1] {
            let v = index[k] as i64 + d;
            if v >= 0 {
                let mut n = index.to_vec();
                n[k] = v as usize;
                out.push(n);
            }
        }
    }
    out
}

// 2. Master soundness.
fn master_soundness() -> Outcome {
    let mut configs = 0;
    let mut safe_verdicts = 0;
    let mut checked_points = 0usize;
    for c in suite() {
        let reference = monte_carlo(&c.net, &c.input, 2_000, 99, None).map_err(err)?.image_hull;
        let safe = inflate_rel(&reference, 0.25);
        let invertible = c.net.is_square() && certify_homeomorphism(&c.net, &c.input).map_err(err)?.certified;
        let k = grid_for(&c);
        let mc = monte_carlo(&c.net, &c.input, 100_000, 2024, Some(&safe)).map_err(err)?;
        for domain in [Domain::Box, Domain::Zono] {
            for mode in [Mode::Boundary, Mode::Subset, Mode::Full, Mode::Auto] {
                if mode == Mode::Boundary && !invertible {
                    continue;
                }
                configs += 1;
                let label = format!("{} {domain} {mode}", c.name);
                let p = VerificationProblem::new(c.net.clone(), c.input.clone(), safe.clone())
                    .map_err(err)?
                    .with_domain(domain)
                    .with_mode(mode)
                    .with_grid(&[k])
                    .map_err(err)?
                    .with_max_refinements(1);
                let v = verify(&p).map_err(err)?;
                match v.status {
                    Status::Safe => {
                        safe_verdicts += 1;
                        ensure!(mc.violations.is_empty(), "{label}: Safe but {} MC violations", mc.violations.len());
                    }
                    Status::Falsified => {
                        let x = v.counterexample.as_ref().ok_or("falsified without counterexample")?;
                        let y = c.net.forward_point(x).map_err(err)?;
                        ensure!(!safe.contains_point(&y).map_err(err)?, "{label}: bogus counterexample");
                    }
                    Status::Unknown => {}
                }
                // Every image lies in the output hull (for boundary/subset runs this
                // is the enclosure of the image of the kept region's boundary).
                for y in &mc.images {
                    ensure!(v.output_hull.contains_point(y).map_err(err)?, "{label}: image {y:?} outside output hull");
                }
                // ...and inside the set propagated from the cell it came from.
                let by_index: HashMap<&[usize], &IntervalBox> =
                    v.reach.iter().map(|r| (r.index.as_slice(), r.set.hull())).collect();
                let (lo, hi) = (c.input.lower(), c.input.upper());
                let counts = &v.stats.grid;
                if v.stats.path != Mode::Boundary {
                    for (x, y) in mc.points.iter().zip(&mc.images) {
                        let idx = locate(&lo, &hi, counts, x);
                        for n in neighbours(&idx) {
                            if let Some(h) = by_index.get(n.as_slice()) {
                                let cell = v.reach.iter().find(|r| r.index == n).unwrap();
                                if cell.set.source_cell.contains_point(x).map_err(err)? {
                                    ensure!(h.contains_point(y).map_err(err)?, "{label}: image outside its cell set");
                                    checked_points += 1;
                                }
                            }
                        }
                    }
                } else {
                    for (i, r) in v.reach.iter().enumerate() {
                        for s in 0..200 {
                            let x = sample_point(&r.set.source_cell, 7, (i * 200 + s) as u64);
                            let y = c.net.forward_point(&x).map_err(err)?;
                            ensure!(r.set.hull().contains_point(&y).map_err(err)?, "{label}: face image outside its set");
                            checked_points += 1;
                        }
                    }
                }
            }
        }
    }
    ensure!(configs >= 50, "only {configs} configurations");
    ensure!(safe_verdicts > 0, "no Safe verdicts to corroborate");
    Ok(format!("{configs} configurations, {safe_verdicts} Safe, {checked_points} per-cell containments, 0 violations"))
}

// 3. Certification validity.
fn certification_validity() -> Outcome {
    let cases = square_nets();
    ensure!(cases.len() >= 20, "only {} square networks", cases.len());
    let mut cells = 0;
    for c in &cases {
        let counts = if c.input.dim() == 3 { vec![2; 3] } else { vec![8; 2] };
        let ex = extract_subset(&c.net, &c.input, &counts).map_err(err)?;
        let certified: Vec<_> = ex.certified_cells().collect();
        cells += certified.len();
        certified
            .par_iter()
            .enumerate()
            .map(|(ci, cell)| {
                let sign = cell.det_interval.lo().signum();
                for s in 0..10_000u64 {
                    let x = sample_point(&cell.cell, 31, ci as u64 * 10_000 + s);
                    let d = point_det(&c.net.point_jacobian(&x).map_err(err)?);
                    ensure!(d != 0.0 && d.signum() == sign, "{}: det sign flips at {x:?}", c.name);
                    ensure!(cell.det_interval.contains(d), "{}: det {d} outside {:?}", c.name, cell.det_interval);
                }
                Ok(())
            })
            .collect::<Result<Vec<_>, String>>()?;
    }
    ensure!(cells > 0, "no certified cells");
    Ok(format!("{} networks, {cells} certified cells x 10^4 samples, 0 violations", cases.len()))
}

// 4. Extraction accounting.
fn extraction_accounting() -> Outcome {
    let mut runs = 0;
    for c in square_nets() {
        let grids: Vec<Vec<usize>> =
            if c.input.dim() == 3 { vec![vec![2; 3], vec![4; 3]] } else { vec![vec![5, 5], vec![20, 20], vec![7, 13]] };
        for counts in grids {
            let ex = extract_subset(&c.net, &c.input, &counts).map_err(err)?;
            let total: usize = counts.iter().product();
            ensure!(ex.counts.total == total, "{}: total {}", c.name, ex.counts.total);
            ensure!(ex.counts.kept + ex.counts.certified_interior == total, "{}: {:?}", c.name, ex.counts);
            ensure!(ex.kept_cells().count() == ex.counts.kept, "{}: kept list/count mismatch", c.name);
            for cell in ex.certified_interior() {
                let on_edge = cell.index.iter().zip(&counts).any(|(&i, &n)| i == 0 || i + 1 == n);
                ensure!(!on_edge, "{}: certified interior cell {:?} touches the boundary", c.name, cell.index);
                ensure!(cell.certified, "{}: uncertified cell removed", c.name);
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} extractions consistent"))
}

fn hull_of(net: &Network, input: &IntervalBox, counts: usize, domain: Domain, mode: Mode) -> Result<IntervalBox, String> {
    let loose = IntervalBox::cube(net.output_dim(), -1e6, 1e6).unwrap();
    let p = VerificationProblem::new(net.clone(), input.clone(), loose)
        .map_err(err)?
        .with_domain(domain)
        .with_grid(&[counts])
        .map_err(err)?
        .with_falsify_samples(0);
    let v = match mode {
        Mode::Boundary => verify_boundary(&p),
        _ => verify_full(&p),
    }
    .map_err(err)?;
    Ok(v.output_hull)
}

// 5. Conservativeness and refinement monotonicity.
fn conservativeness() -> Outcome {
    let mut comparisons = 0;
    for c in suite() {
        for domain in [Domain::Box, Domain::Zono] {
            let ks: &[usize] = if c.input.dim() == 3 { &[1, 2, 4] } else { &[1, 2, 4, 8, 16] };
            let mut prev: Option<(IntervalBox, IntervalBox)> = None;
            for &k in ks {
                let b = hull_of(&c.net, &c.input, k, domain, Mode::Boundary)?;
                let f = hull_of(&c.net, &c.input, k, domain, Mode::Full)?;
                ensure!(within(&b, &f, 1e-9), "{} {domain} k={k}: boundary hull {b:?} not in full hull {f:?}", c.name);
                if let Some((pb, pf)) = &prev {
                    ensure!(within(&f, pf, 1e-9), "{} {domain} k={k}: full hull grew on refinement", c.name);
                    ensure!(within(&b, pb, 1e-9), "{} {domain} k={k}: boundary hull grew on refinement", c.name);
                }
                prev = Some((b, f));
                comparisons += 3;
            }
        }
    }
    Ok(format!("{comparisons} hull comparisons within 1e-9"))
}

// 6. Domain dominance.
fn domain_dominance() -> Outcome {
    let mut cells = 0;
    for c in suite() {
        let grid = partition(&c.input, &vec![4; c.input.dim()]).map_err(err)?;
        for cell in std::iter::once(c.input.clone()).chain(grid.cells()) {
            let z = propagate(&c.net, &cell, Domain::Zono).map_err(err)?;
            let b = propagate(&c.net, &cell, Domain::Box).map_err(err)?;
            ensure!(within(z.hull(), b.hull(), 1e-9), "{}: zonotope hull {:?} exceeds box {:?}", c.name, z.hull(), b.hull());
            cells += 1;
        }
    }
    Ok(format!("{cells} cells, zonotope hull inside box hull"))
}

// 7. Efficiency trend.
fn efficiency() -> Outcome {
    let net = invertible_2_5_2();
    ensure!(certify_homeomorphism(&net, &unit_square()).map_err(err)?.certified, "fixture not certified");
    let safe = inflate_rel(&monte_carlo(&net, &unit_square(), 20_000, 0, None).map_err(err)?.image_hull, 0.1);
    let p = VerificationProblem::new(net, unit_square(), safe).map_err(err)?.with_grid(&[100]).map_err(err)?;
    let (mut tb, mut tf) = (f64::INFINITY, f64::INFINITY);
    let (mut b, mut f) = (None, None);
    for _ in 0..3 {
        let vb = verify_boundary(&p).map_err(err)?;
        let vf = verify_full(&p).map_err(err)?;
        tb = tb.min(vb.stats.wall_ms);
        tf = tf.min(vf.stats.wall_ms);
        b = Some(vb);
        f = Some(vf);
    }
    let (b, f) = (b.unwrap(), f.unwrap());
    ensure!(b.status == Status::Safe && f.status == Status::Safe, "verdicts {} / {}", b.status, f.status);
    let (nb, nf) = (b.stats.cells_propagated, f.stats.cells_propagated);
    ensure!(nb == 400 && nf == 10_000, "cells {nb} / {nf}");
    ensure!(nb * 25 <= nf, "boundary uses more than 4% of the cells");
    ensure!(tb < tf, "boundary {tb:.3} ms not faster than full {tf:.3} ms");
    Ok(format!("both Safe; cells {nb} vs {nf} ({:.1}%); {tb:.2} ms vs {tf:.2} ms", 100.0 * nb as f64 / nf as f64))
}

// 8. Jacobian correctness.
fn jacobian_correctness() -> Outcome {
    let nets: Vec<Network> = (0..10)
        .map(|s| {
            let act = if s % 2 == 0 { Activation::Tanh } else { Activation::Sigmoid };
            Network::generate(100 + s, &[2, 6, 5, 2], act, 1.0).unwrap()
        })
        .collect();
    let region = sym_square();
    let mut worst: f64 = 0.0;
    for (i, net) in nets.iter().enumerate() {
        for s in 0..10 {
            let x = sample_point(&region, 500 + i as u64, s);
            let j = net.point_jacobian(&x).map_err(err)?;
            let fd = fd_jacobian(net, &x, 1e-5);
            let scale = j.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            let e = j.iter().flatten().zip(fd.iter().flatten()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale;
            worst = worst.max(e);
        }
    }
    ensure!(worst < 1e-6, "max relative error {worst:e}");

    let mut tested = 0;
    for (i, net) in nets.iter().enumerate().take(5) {
        let grid = partition(&region, &[3, 3]).map_err(err)?;
        for (ci, cell) in grid.cells().into_iter().enumerate() {
            let jac = jacobian_interval(net, &cell).map_err(err)?;
            for s in 0..1_000 {
                let x = sample_point(&cell, i as u64, (ci * 1_000 + s) as u64);
                ensure!(jac.contains_points(&net.point_jacobian(&x).map_err(err)?), "net {i} cell {ci}: escape at {x:?}");
            }
            tested += 1;
        }
    }
    Ok(format!("100 pairs, max rel err {worst:.1e}; {tested} cells x 10^3 samples contained"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 partition arithmetic", Duration::from_secs(1), partition_counts),
        ("2 master soundness", Duration::from_secs(60), master_soundness),
        ("3 certification validity", Duration::from_secs(60), certification_validity),
        ("4 extraction accounting", Duration::from_secs(5), extraction_accounting),
        ("5 conservativeness & refinement", Duration::from_secs(60), conservativeness),
        ("6 domain dominance", Duration::from_secs(30), domain_dominance),
        ("7 efficiency trend", Duration::from_secs(60), efficiency),
        ("8 jacobian correctness", Duration::from_secs(30), jacobian_correctness),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > budget => Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
