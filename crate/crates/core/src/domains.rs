//! Sound set propagation through a [`Network`] under the box and zonotope domains.
//!
//! The zonotope transformer for tanh and sigmoid is the parallelogram
//! relaxation: with pre-activation hull `[l, u]` and slope
//! `λ = min(act'(l), act'(u))`, `act(x) - λx` is nondecreasing on `[l, u]`, so
//! `act(x) ∈ λx + [μ₁ - μ₂, μ₁ + μ₂]` where
//! `μ₁ = ½(act(u) + act(l) - λ(u + l))` and `μ₂ = ½(act(u) - act(l) - λ(u - l))`.
//!
//! Floating-point rounding in zonotope arithmetic is tracked as a per-dimension
//! error radius, which the next activation folds into its fresh generator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::{check_dim, Error, Result};
use crate::interval::rounding::{add_up, mul_up, sub_down};
use crate::interval::{dot_point_row, Interval, IntervalBox};
use crate::network::{Layer, Network};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Box,
    #[serde(alias = "zonotope")]
    Zono,
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "box" | "interval" => Ok(Domain::Box),
            "zono" | "zonotope" => Ok(Domain::Zono),
            other => Err(Error::InvalidArgument(format!("unknown domain `{other}`"))),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Box => "box",
            Domain::Zono => "zono",
        })
    }
}

fn finite_or_err(values: &[Interval], context: &str) -> Result<()> {
    if values.iter().all(Interval::is_finite) {
        Ok(())
    } else {
        Err(Error::Domain(format!("overflow during {context}")))
    }
}

fn layer_preactivation(layer: &Layer, x: &[Interval]) -> Vec<Interval> {
    layer
        .weights
        .iter()
        .zip(&layer.bias)
        .map(|(row, &b)| dot_point_row(row, x).add_scalar(b))
        .collect()
}

/// Interval forward pass returning the pre-activation enclosure of every layer.
pub fn box_preactivations(net: &Network, cell: &IntervalBox) -> Result<Vec<Vec<Interval>>> {
    check_dim(net.input_dim(), cell.dim(), "cell dimension")?;
    let mut out = Vec::with_capacity(net.layers().len());
    let mut x = cell.dims().to_vec();
    for layer in net.layers() {
        let z = layer_preactivation(layer, &x);
        finite_or_err(&z, "interval propagation")?;
        x = z.iter().map(|&zi| layer.activation.range(zi)).collect();
        out.push(z);
    }
    Ok(out)
}

/// Enclosure of `{N(x) : x ∈ cell}` by interval arithmetic.
pub fn box_propagate(net: &Network, cell: &IntervalBox) -> Result<IntervalBox> {
    check_dim(net.input_dim(), cell.dim(), "cell dimension")?;
    let mut x = cell.dims().to_vec();
    for layer in net.layers() {
        x = layer_preactivation(layer, &x)
            .into_iter()
            .map(|zi| layer.activation.range(zi))
            .collect();
        finite_or_err(&x, "interval propagation")?;
    }
    IntervalBox::new(x)
}

/// `{c + Gε + diag(err)η : ε ∈ [-1,1]^g, η ∈ [-1,1]^d}`.
///
/// `generators` is stored row-wise: one row of length `g` per dimension. The
/// `err` radii are an implicit diagonal generator block holding accumulated
/// rounding error; they are zero for zonotopes built from boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct Zonotope {
    center: Vec<f64>,
    generators: Vec<Vec<f64>>,
    err: Vec<f64>,
}

impl Zonotope {
    pub fn new(center: Vec<f64>, generators: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(center.len(), generators.len(), "zonotope generator rows")?;
        let g = generators.first().map_or(0, Vec::len);
        for row in &generators {
            check_dim(g, row.len(), "ragged generator matrix")?;
        }
        if !center.iter().chain(generators.iter().flatten()).all(|v| v.is_finite()) {
            return Err(Error::Domain("non-finite zonotope entry".into()));
        }
        let err = vec![0.0; center.len()];
        Ok(Self {
            center,
            generators,
            err,
        })
    }

    /// Center at the box midpoints, one axis-aligned generator per
    /// non-degenerate dimension.
    pub fn from_box(cell: &IntervalBox) -> Zonotope {
        let d = cell.dim();
        let active: Vec<usize> = (0..d).filter(|&k| !cell.is_degenerate_dim(k)).collect();
        let mut center = Vec::with_capacity(d);
        let mut generators = vec![vec![0.0; active.len()]; d];
        for (k, iv) in cell.iter().enumerate() {
            let (m, r) = iv.mid_rad();
            center.push(m);
            if let Some(col) = active.iter().position(|&a| a == k) {
                generators[k][col] = r;
            }
        }
        Zonotope {
            center,
            generators,
            err: vec![0.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.first().map_or(0, Vec::len)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Per-dimension rounding-error radius.
    pub fn error_radius(&self) -> &[f64] {
        &self.err
    }

    /// Upper bound on `Σ_k |G_ik| + err_i`.
    fn radius(&self, i: usize) -> f64 {
        self.generators[i].iter().fold(self.err[i], |acc, g| add_up(acc, g.abs()))
    }

    /// Enclosure of dimension `i`.
    pub fn dim_hull(&self, i: usize) -> Interval {
        let r = self.radius(i);
        let c = self.center[i];
        Interval::raw(sub_down(c, r), add_up(c, r))
    }

    pub fn interval_hull(&self) -> Result<IntervalBox> {
        let dims: Vec<Interval> = (0..self.dim()).map(|i| self.dim_hull(i)).collect();
        finite_or_err(&dims, "zonotope hull")?;
        IntervalBox::new(dims)
    }

    /// The point `c + Gε` (ignores the error block).
    pub fn point_at(&self, eps: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.num_generators(), eps.len(), "generator coefficients")?;
        Ok(self
            .center
            .iter()
            .zip(&self.generators)
            .map(|(c, row)| c + row.iter().zip(eps).map(|(g, e)| g * e).sum::<f64>())
            .collect())
    }

    /// Image under `x -> W x + b`.
    pub fn affine(&self, weights: &[Vec<f64>], bias: &[f64]) -> Result<Zonotope> {
        check_dim(weights.len(), bias.len(), "affine bias")?;
        let g = self.num_generators();
        let mut center = Vec::with_capacity(weights.len());
        let mut generators = Vec::with_capacity(weights.len());
        let mut err = Vec::with_capacity(weights.len());
        let c_iv: Vec<Interval> = self.center.iter().map(|&c| Interval::point(c)).collect();
        for (row, &b) in weights.iter().zip(bias) {
            check_dim(self.dim(), row.len(), "affine weight columns")?;
            let (cm, mut e) = dot_point_row(row, &c_iv).add_scalar(b).mid_rad();
            let mut grow = Vec::with_capacity(g);
            for k in 0..g {
                let mut acc = Interval::ZERO;
                for (j, &w) in row.iter().enumerate() {
                    acc = acc + Interval::point(self.generators[j][k]).scale(w);
                }
                let (m, r) = acc.mid_rad();
                grow.push(m);
                e = add_up(e, r);
            }
            for (&w, &ej) in row.iter().zip(&self.err) {
                e = add_up(e, mul_up(w.abs(), ej));
            }
            center.push(cm);
            generators.push(grow);
            err.push(e);
        }
        let out = Zonotope {
            center,
            generators,
            err,
        };
        out.check_finite("zonotope affine map")?;
        Ok(out)
    }

    /// Elementwise activation via the parallelogram relaxation. Adds one fresh
    /// generator per dimension with a nonzero relaxation error; linear is a no-op.
    pub fn activation(&self, act: Activation) -> Result<Zonotope> {
        if act == Activation::Linear {
            return Ok(self.clone());
        }
        let d = self.dim();
        let g = self.num_generators();
        let mut center = Vec::with_capacity(d);
        let mut generators = Vec::with_capacity(d);
        let mut fresh = Vec::with_capacity(d);
        for i in 0..d {
            let pre = self.dim_hull(i);
            let t = SmoothRelaxation::new(act, pre);
            let (cm, mut mag) = (Interval::point(self.center[i]).scale(t.slope) + t.offset).mid_rad();
            let mut row = Vec::with_capacity(g);
            for &gk in &self.generators[i] {
                let (m, r) = Interval::point(gk).scale(t.slope).mid_rad();
                row.push(m);
                mag = add_up(mag, r);
            }
            mag = add_up(mag, mul_up(t.slope, self.err[i]));
            center.push(cm);
            generators.push(row);
            fresh.push(mag);
        }
        let new_cols: Vec<usize> = (0..d).filter(|&i| fresh[i] > 0.0).collect();
        for (i, row) in generators.iter_mut().enumerate() {
            row.extend(new_cols.iter().map(|&j| if j == i { fresh[i] } else { 0.0 }));
        }
        let out = Zonotope {
            center,
            generators,
            err: vec![0.0; d],
        };
        out.check_finite("zonotope activation")?;
        Ok(out)
    }

    fn check_finite(&self, context: &str) -> Result<()> {
        let ok = self
            .center
            .iter()
            .chain(self.generators.iter().flatten())
            .chain(&self.err)
            .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("overflow during {context}")))
        }
    }
}

/// Linear relaxation `act(x) ∈ slope·x + offset` valid for all `x` in a
/// pre-activation interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothRelaxation {
    pub slope: f64,
    /// `[μ₁ - μ₂, μ₁ + μ₂]`.
    pub offset: Interval,
}

impl SmoothRelaxation {
    pub fn new(act: Activation, pre: Interval) -> SmoothRelaxation {
        if act == Activation::Linear {
            return SmoothRelaxation {
                slope: 1.0,
                offset: Interval::ZERO,
            };
        }
        let (l, u) = (pre.lo(), pre.hi());
        if l == u {
            return SmoothRelaxation {
                slope: 0.0,
                offset: act.enclose(l),
            };
        }
        // Lower bound on min(act'(l), act'(u)) keeps act(x) - slope·x nondecreasing.
        let slope = act.enclose_deriv(l).lo().min(act.enclose_deriv(u).lo());
        let lo = (act.enclose(l) - Interval::point(l).scale(slope)).lo();
        let hi = (act.enclose(u) - Interval::point(u).scale(slope)).hi();
        SmoothRelaxation {
            slope,
            offset: Interval::raw(lo, hi.max(lo)),
        }
    }

    /// `(μ₁, μ₂)`.
    pub fn mu(&self) -> (f64, f64) {
        self.offset.mid_rad()
    }
}

/// Output of set propagation for one input cell.
#[derive(Clone, Debug, PartialEq)]
pub enum ReachPayload {
    Box(IntervalBox),
    Zonotope(Zonotope),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReachSet {
    pub payload: ReachPayload,
    /// The input cell this set over-approximates the image of.
    pub source_cell: IntervalBox,
    hull: IntervalBox,
}

impl ReachSet {
    pub fn new(payload: ReachPayload, source_cell: IntervalBox) -> Result<ReachSet> {
        let hull = match &payload {
            ReachPayload::Box(b) => b.clone(),
            ReachPayload::Zonotope(z) => z.interval_hull()?,
        };
        Ok(ReachSet {
            payload,
            source_cell,
            hull,
        })
    }

    pub fn domain(&self) -> Domain {
        match self.payload {
            ReachPayload::Box(_) => Domain::Box,
            ReachPayload::Zonotope(_) => Domain::Zono,
        }
    }

    pub fn hull(&self) -> &IntervalBox {
        &self.hull
    }

    pub fn dim(&self) -> usize {
        self.hull.dim()
    }
}

/// Zonotope propagation: box → zonotope, then affine map and activation per layer.
pub fn zono_propagate(net: &Network, cell: &IntervalBox) -> Result<Zonotope> {
    check_dim(net.input_dim(), cell.dim(), "cell dimension")?;
    let mut z = Zonotope::from_box(cell);
    for layer in net.layers() {
        z = z.affine(&layer.weights, &layer.bias)?.activation(layer.activation)?;
    }
    Ok(z)
}

pub fn propagate(net: &Network, cell: &IntervalBox, domain: Domain) -> Result<ReachSet> {
    let payload = match domain {
        Domain::Box => ReachPayload::Box(box_propagate(net, cell)?),
        Domain::Zono => ReachPayload::Zonotope(zono_propagate(net, cell)?),
    };
    ReachSet::new(payload, cell.clone())
}

/// Whether every set's interval hull lies in the safe box.
pub fn check_inclusion(sets: &[ReachSet], safe: &IntervalBox) -> Result<bool> {
    for s in sets {
        if !safe.contains(s.hull())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Hull of all reach-set hulls, `None` for an empty list.
pub fn union_hull(sets: &[ReachSet]) -> Result<Option<IntervalBox>> {
    IntervalBox::hull_all(sets.iter().map(ReachSet::hull))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bx(b: &[(f64, f64)]) -> IntervalBox {
        IntervalBox::from_bounds(b).unwrap()
    }

    fn tanh_identity(n: usize) -> Network {
        let w = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        Network::new(vec![Layer::new(w, vec![0.0; n], Activation::Tanh).unwrap()]).unwrap()
    }

    #[test]
    fn box_propagation_examples() {
        let id = Network::identity(2).unwrap();
        let unit = bx(&[(0.0, 1.0), (0.0, 1.0)]);
        assert_eq!(box_propagate(&id, &unit).unwrap(), unit);
        let origin = bx(&[(0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(box_propagate(&tanh_identity(2), &origin).unwrap(), origin);
        assert!(box_propagate(&id, &bx(&[(0.0, 1.0)])).is_err());
    }

    #[test]
    fn zonotope_from_box_examples() {
        let z = Zonotope::from_box(&bx(&[(0.0, 2.0), (1.0, 1.0)]));
        assert_eq!(z.center(), &[1.0, 1.0]);
        assert_eq!(z.generators(), &[vec![1.0], vec![0.0]]);
        let p = Zonotope::from_box(&bx(&[(0.5, 0.5), (1.0, 1.0)]));
        assert_eq!(p.num_generators(), 0);
        let c = Zonotope::from_box(&IntervalBox::cube(3, -1.0, 1.0).unwrap());
        assert_eq!(c.center(), &[0.0, 0.0, 0.0]);
        assert_eq!(
            c.generators(),
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]
        );
    }

    #[test]
    fn zonotope_affine_examples() {
        let z = Zonotope::new(vec![0.5, -1.0], vec![vec![1.0, 0.25], vec![0.0, 2.0]]).unwrap();
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(z.affine(&id, &[0.0, 0.0]).unwrap(), z);
        let two = vec![vec![2.0, 0.0], vec![0.0, 2.0]];
        let doubled = z.affine(&two, &[0.0, 0.0]).unwrap();
        assert_eq!(doubled.generators(), &[vec![2.0, 0.5], vec![0.0, 4.0]]);
        assert_eq!(doubled.center(), &[1.0, -2.0]);
        assert!(z.affine(&[vec![1.0, 2.0, 3.0]], &[0.0]).is_err());
    }

    #[test]
    fn affine_hull_is_within_interval_matvec() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let d = rng.gen_range(1..5);
            let g = rng.gen_range(0..6);
            let out = rng.gen_range(1..5);
            let center: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let gens: Vec<Vec<f64>> =
                (0..d).map(|_| (0..g).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let w: Vec<Vec<f64>> =
                (0..out).map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
            let b: Vec<f64> = (0..out).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z = Zonotope::new(center, gens).unwrap();
            let hull = z.interval_hull().unwrap();
            let image = z.affine(&w, &b).unwrap().interval_hull().unwrap();
            let lin = Network::linear(w, b).unwrap();
            let boxed = box_propagate(&lin, &hull).unwrap();
            // both sides carry their own rounding radius: allow a few ulps
            for (zi, bi) in image.iter().zip(boxed.iter()) {
                let slack = 16.0 * f64::EPSILON * (1.0 + bi.mag());
                assert!(zi.lo() >= bi.lo() - slack && zi.hi() <= bi.hi() + slack, "{zi:?} {bi:?}");
            }
        }
    }

    #[test]
    fn tanh_relaxation_symmetric_example() {
        let z = Zonotope::new(vec![0.0], vec![vec![1.0]]).unwrap();
        let t = SmoothRelaxation::new(Activation::Tanh, z.dim_hull(0));
        let (mu1, mu2) = t.mu();
        assert!((t.slope - 0.419_974_341_614_026).abs() < 1e-14);
        assert!(mu1.abs() < 1e-15);
        assert!((mu2 - 0.341_619_814_341_738_8).abs() < 1e-14);
        let out = z.activation(Activation::Tanh).unwrap().interval_hull().unwrap();
        assert!((out[0].hi() - 0.761_594_155_955_764_9).abs() < 1e-14);
        assert!((out[0].lo() + 0.761_594_155_955_764_9).abs() < 1e-14);
    }

    #[test]
    fn degenerate_dimension_maps_to_a_point() {
        let z = Zonotope::from_box(&bx(&[(0.3, 0.3), (-1.0, 1.0)]));
        let t = SmoothRelaxation::new(Activation::Sigmoid, z.dim_hull(0));
        let (mu1, mu2) = t.mu();
        let exact = Activation::Sigmoid.eval(0.3);
        assert_eq!(t.slope, 0.0);
        assert!((mu1 - exact).abs() < 1e-15);
        assert!(mu2 < 1e-15);
        let out = z.activation(Activation::Sigmoid).unwrap();
        assert!(out.interval_hull().unwrap()[0].contains(exact));
    }

    #[test]
    fn activation_output_contains_sampled_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for act in [Activation::Tanh, Activation::Sigmoid] {
            let z = Zonotope::new(
                vec![0.3, -1.2, 2.0],
                vec![vec![0.5, -0.7], vec![1.5, 0.2], vec![0.0, 0.0]],
            )
            .unwrap();
            let out = z.activation(act).unwrap();
            let g = z.num_generators();
            for _ in 0..10_000 {
                let eps: Vec<f64> = (0..g).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let x = z.point_at(&eps).unwrap();
                // shared generators keep their coefficients; fresh ones absorb the rest
                let mut full = eps.clone();
                full.resize(out.num_generators(), 0.0);
                let base = out.point_at(&full).unwrap();
                for i in 0..3 {
                    let fresh: f64 = out.generators()[i][g..].iter().map(|v| v.abs()).sum();
                    let y = act.eval(x[i]);
                    assert!((y - base[i]).abs() <= fresh + 1e-15, "{act} dim {i}");
                }
            }
        }
    }

    #[test]
    fn zonotope_on_identity_network_is_exact() {
        let id = Network::identity(2).unwrap();
        let cell = bx(&[(0.0, 1.0), (-2.0, 3.0)]);
        let r = propagate(&id, &cell, Domain::Zono).unwrap();
        assert_eq!(r.hull(), &cell);
        assert_eq!(propagate(&id, &cell, Domain::Box).unwrap().hull(), &cell);
    }

    #[test]
    fn inclusion_check() {
        let id = Network::identity(2).unwrap();
        let sets = vec![
            propagate(&id, &bx(&[(0.1, 0.2), (0.1, 0.2)]), Domain::Box).unwrap(),
            propagate(&id, &bx(&[(0.5, 0.9), (0.3, 0.4)]), Domain::Zono).unwrap(),
        ];
        assert!(check_inclusion(&sets, &bx(&[(0.0, 1.0), (0.0, 1.0)])).unwrap());
        let tight = bx(&[(0.0, 0.9 - 1e-6), (0.0, 1.0)]);
        assert!(!check_inclusion(&sets, &tight).unwrap());
        assert!(check_inclusion(&sets, &bx(&[(0.0, 1.0)])).is_err());
    }

    #[test]
    fn example_safe_set_is_a_valid_box() {
        let safe = bx(&[(-3.85, -1.85), (-0.9, 1.7)]);
        let id = Network::identity(2).unwrap();
        let inside = propagate(&id, &bx(&[(-3.0, -2.0), (0.0, 1.0)]), Domain::Box).unwrap();
        let outside = propagate(&id, &bx(&[(0.0, 1.0), (0.0, 1.0)]), Domain::Box).unwrap();
        assert!(check_inclusion(std::slice::from_ref(&inside), &safe).unwrap());
        assert!(!check_inclusion(&[inside, outside], &safe).unwrap());
    }
}
