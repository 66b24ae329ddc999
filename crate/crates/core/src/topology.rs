//! Boundary faces, uniform grids, interval Jacobians and homeomorphism
//! certification over boxes.
//!
//! A cell is certified when the interval enclosure of its Jacobian determinant
//! excludes zero. That makes the network a local homeomorphism on the cell, so
//! the image of the cell's interior is open and every boundary point of the
//! image comes from the cell's boundary.

use rayon::prelude::*;

use crate::domains::box_preactivations;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox, IntervalMatrix, MAX_DET_DIM};
use crate::network::Network;

/// The `2n` degenerate faces of a box, ordered by dimension with the lower
/// face first: `[lo,lo] x ..`, `[hi,hi] x ..`, then the next dimension.
pub fn boundary_faces(b: &IntervalBox) -> Result<Vec<IntervalBox>> {
    if let Some(k) = (0..b.dim()).find(|&k| b.is_degenerate_dim(k)) {
        return Err(Error::InvalidArgument(format!(
            "box is degenerate in dimension {k}; its boundary is not a union of faces"
        )));
    }
    let mut faces = Vec::with_capacity(2 * b.dim());
    for k in 0..b.dim() {
        faces.push(b.with_dim(k, Interval::point(b[k].lo())));
        faces.push(b.with_dim(k, Interval::point(b[k].hi())));
    }
    Ok(faces)
}

/// Uniform partition of a box into `Π counts` closed cells.
///
/// Cell `(i_1, .., i_n)` spans `[x_k(i_k), x_k(i_k + 1)]` in dimension `k`,
/// with grid coordinate `x_k(i) = lo_k + (hi_k - lo_k) · (i / counts_k)`.
/// Neighbouring cells share the exact same float endpoint, and the grid
/// coordinates of `counts` reappear unchanged in the grid of `2 · counts`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellGrid {
    base: IntervalBox,
    counts: Vec<usize>,
}

impl CellGrid {
    pub fn new(base: IntervalBox, counts: &[usize]) -> Result<CellGrid> {
        if counts.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: counts.len(),
                context: "grid counts",
            });
        }
        for (k, &c) in counts.iter().enumerate() {
            if c == 0 {
                return Err(Error::InvalidArgument(format!("grid count for dimension {k} is zero")));
            }
            if base.is_degenerate_dim(k) && c != 1 {
                return Err(Error::InvalidArgument(format!(
                    "degenerate dimension {k} must have count 1, got {c}"
                )));
            }
        }
        Ok(CellGrid {
            base,
            counts: counts.to_vec(),
        })
    }

    pub fn base(&self) -> &IntervalBox {
        &self.base
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(&self, k: usize, i: usize) -> f64 {
        let d = self.base[k];
        let n = self.counts[k];
        if i == 0 {
            d.lo()
        } else if i >= n {
            d.hi()
        } else {
            let t = i as f64 / n as f64;
            (d.lo() + (d.hi() - d.lo()) * t).clamp(d.lo(), d.hi())
        }
    }

    /// Row-major multi-index of a flat position (last dimension fastest).
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.counts.len()];
        for k in (0..self.counts.len()).rev() {
            idx[k] = flat % self.counts[k];
            flat /= self.counts[k];
        }
        idx
    }

    pub fn cell(&self, index: &[usize]) -> IntervalBox {
        let dims = index
            .iter()
            .enumerate()
            .map(|(k, &i)| Interval::raw(self.coord(k, i), self.coord(k, i + 1)))
            .collect();
        IntervalBox::from_dims_unchecked(dims)
    }

    /// Whether the cell touches the boundary of the base box (decided by index).
    pub fn touches_boundary(&self, index: &[usize]) -> bool {
        index.iter().zip(&self.counts).any(|(&i, &n)| i == 0 || i + 1 == n)
    }

    /// Cells not touching the boundary: `Π max(counts_k - 2, 0)`.
    pub fn interior_len(&self) -> usize {
        self.counts.iter().map(|&n| n.saturating_sub(2)).product()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, IntervalBox)> + '_ {
        (0..self.len()).map(move |f| {
            let idx = self.multi_index(f);
            let cell = self.cell(&idx);
            (idx, cell)
        })
    }

    pub fn cells(&self) -> Vec<IntervalBox> {
        self.iter().map(|(_, c)| c).collect()
    }

    /// Cells of every boundary face, each face partitioned with the base grid
    /// counts except its pinned dimension (count 1). The pinned dimension's index
    /// is reported as `0` for the lower face and `counts_k` for the upper face.
    pub fn boundary_cells(&self) -> Result<Vec<(Vec<usize>, IntervalBox)>> {
        let faces = boundary_faces(&self.base)?;
        let mut out = Vec::new();
        for (f, face) in faces.into_iter().enumerate() {
            let (k, upper) = (f / 2, f % 2 == 1);
            let mut counts = self.counts.clone();
            counts[k] = 1;
            let face_grid = CellGrid {
                base: face,
                counts,
            };
            for flat in 0..face_grid.len() {
                let mut idx = face_grid.multi_index(flat);
                let cell = self.cell_on_face(&idx, k, upper);
                idx[k] = if upper { self.counts[k] } else { 0 };
                out.push((idx, cell));
            }
        }
        Ok(out)
    }

    /// Face cell built from the base grid's coordinates so it is exactly a face
    /// of the corresponding full cell.
    fn cell_on_face(&self, idx: &[usize], pinned: usize, upper: bool) -> IntervalBox {
        let dims = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                if k == pinned {
                    let v = if upper { self.base[k].hi() } else { self.base[k].lo() };
                    Interval::point(v)
                } else {
                    Interval::raw(self.coord(k, i), self.coord(k, i + 1))
                }
            })
            .collect();
        IntervalBox::from_dims_unchecked(dims)
    }

    /// Number of boundary cells: `Σ_k 2 Π_{j≠k} counts_j`.
    pub fn boundary_len(&self) -> usize {
        (0..self.counts.len())
            .map(|k| {
                2 * self
                    .counts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &c)| c)
                    .product::<usize>()
            })
            .sum()
    }

    /// Same base with every count doubled.
    pub fn refined(&self) -> CellGrid {
        let counts = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, &c)| if self.base.is_degenerate_dim(k) { 1 } else { 2 * c })
            .collect();
        CellGrid {
            base: self.base.clone(),
            counts,
        }
    }
}

pub fn partition(b: &IntervalBox, counts: &[usize]) -> Result<CellGrid> {
    CellGrid::new(b.clone(), counts)
}

fn require_certifiable(net: &Network, cell: &IntervalBox) -> Result<()> {
    if !net.is_square() {
        return Err(Error::Unsupported(format!(
            "Jacobian certification needs a square network, got {} -> {}",
            net.input_dim(),
            net.output_dim()
        )));
    }
    if net.input_dim() > MAX_DET_DIM {
        return Err(Error::Unsupported(format!(
            "Jacobian certification supports at most {MAX_DET_DIM} dimensions, got {}",
            net.input_dim()
        )));
    }
    crate::error::check_dim(net.input_dim(), cell.dim(), "cell dimension")
}

/// Enclosure of `{J(x) : x ∈ cell}`: interval pre-activations per layer, then
/// the product of `diag(act'(z_l)) W_l` from the first layer to the last.
pub fn jacobian_interval(net: &Network, cell: &IntervalBox) -> Result<IntervalMatrix> {
    require_certifiable(net, cell)?;
    let pre = box_preactivations(net, cell)?;
    let mut jac = IntervalMatrix::identity(net.input_dim());
    for (layer, z) in net.layers().iter().zip(&pre) {
        let deriv: Vec<Interval> = z.iter().map(|&zi| layer.activation.deriv_range(zi)).collect();
        jac = IntervalMatrix::left_mul_points(&layer.weights, &jac)?.scale_rows(&deriv)?;
    }
    if !jac.is_finite() {
        return Err(Error::Domain("overflow in interval Jacobian".into()));
    }
    Ok(jac)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationResult {
    pub cell: IntervalBox,
    pub det_interval: Interval,
    /// `0 ∉ det_interval`.
    pub certified: bool,
}

pub fn certify_homeomorphism(net: &Network, cell: &IntervalBox) -> Result<CertificationResult> {
    let det_interval = jacobian_interval(net, cell)?.det()?;
    if !det_interval.is_finite() {
        return Err(Error::Domain("overflow in Jacobian determinant".into()));
    }
    Ok(CertificationResult {
        cell: cell.clone(),
        det_interval,
        certified: !det_interval.contains_zero(),
    })
}

/// One grid cell with its certification outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifiedCell {
    pub index: Vec<usize>,
    pub cell: IntervalBox,
    pub det_interval: Interval,
    pub certified: bool,
    pub touches_boundary: bool,
}

impl ClassifiedCell {
    /// Certified and away from the input boundary: part of the removable set.
    pub fn in_certified_interior(&self) -> bool {
        self.certified && !self.touches_boundary
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExtractionCounts {
    pub total: usize,
    /// All certified cells, including those touching the input boundary.
    pub certified: usize,
    pub certified_interior: usize,
    pub kept: usize,
}

/// Split of a grid into a certified interior set `A` and the kept cells that
/// cover the closure of `input \ A`.
#[derive(Clone, Debug)]
pub struct SubsetExtraction {
    pub grid: CellGrid,
    /// Every grid cell in row-major order.
    pub cells: Vec<ClassifiedCell>,
    pub counts: ExtractionCounts,
}

impl SubsetExtraction {
    pub fn certified_cells(&self) -> impl Iterator<Item = &ClassifiedCell> {
        self.cells.iter().filter(|c| c.certified)
    }

    pub fn certified_interior(&self) -> impl Iterator<Item = &ClassifiedCell> {
        self.cells.iter().filter(|c| c.in_certified_interior())
    }

    pub fn kept_cells(&self) -> impl Iterator<Item = &ClassifiedCell> {
        self.cells.iter().filter(|c| !c.in_certified_interior())
    }

    /// `kept + certified_interior == total` and no removable cell touches the boundary.
    pub fn is_consistent(&self) -> bool {
        let c = &self.counts;
        c.kept + c.certified_interior == c.total
            && c.total == self.grid.len()
            && self.certified_interior().all(|cell| !self.grid.touches_boundary(&cell.index))
    }
}

/// Certifies every cell of the uniform grid and classifies it.
pub fn extract_subset(net: &Network, input: &IntervalBox, counts: &[usize]) -> Result<SubsetExtraction> {
    boundary_faces(input)?;
    require_certifiable(net, input)?;
    let grid = partition(input, counts)?;
    let cells = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let index = grid.multi_index(flat);
            let cell = grid.cell(&index);
            let cert = certify_homeomorphism(net, &cell)?;
            let touches_boundary = grid.touches_boundary(&index);
            Ok(ClassifiedCell {
                index,
                cell,
                det_interval: cert.det_interval,
                certified: cert.certified,
                touches_boundary,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let certified = cells.iter().filter(|c| c.certified).count();
    let certified_interior = cells.iter().filter(|c| c.in_certified_interior()).count();
    let counts = ExtractionCounts {
        total: cells.len(),
        certified,
        certified_interior,
        kept: cells.len() - certified_interior,
    };
    Ok(SubsetExtraction { grid, cells, counts })
}
