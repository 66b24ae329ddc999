use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use super::Interval;
use crate::error::{check_dim, Error, Result};

/// Axis-aligned box: a product of closed intervals. Degenerate dimensions
/// (`lo == hi`) are allowed, which is how boundary faces are represented.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalBox {
    dims: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(dims: Vec<Interval>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("box must have at least one dimension".into()));
        }
        if let Some(bad) = dims.iter().find(|d| !d.is_finite()) {
            return Err(Error::Domain(format!("non-finite box dimension {bad:?}")));
        }
        Ok(Self { dims })
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        let dims = bounds
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    /// Degenerate box at a point.
    pub fn from_point(x: &[f64]) -> Result<Self> {
        Self::new(x.iter().map(|&v| Interval::new(v, v)).collect::<Result<Vec<_>>>()?)
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Interval::new(lo, hi)?; n])
    }

    pub(crate) fn from_dims_unchecked(dims: Vec<Interval>) -> Self {
        debug_assert!(!dims.is_empty());
        Self { dims }
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[Interval] {
        &self.dims
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.dims.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.dims.iter().all(Interval::is_finite)
    }

    pub fn lower(&self) -> Vec<f64> {
        self.dims.iter().map(Interval::lo).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.dims.iter().map(Interval::hi).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.dims.iter().map(Interval::mid).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.dims.iter().map(Interval::width).collect()
    }

    pub fn is_degenerate_dim(&self, k: usize) -> bool {
        self.dims[k].is_point()
    }

    pub fn is_point(&self) -> bool {
        self.dims.iter().all(Interval::is_point)
    }

    /// Componentwise interval hull.
    pub fn hull(&self, other: &IntervalBox) -> Result<IntervalBox> {
        check_dim(self.dim(), other.dim(), "box hull")?;
        Ok(Self::from_dims_unchecked(
            self.dims.iter().zip(&other.dims).map(|(a, b)| a.hull(b)).collect(),
        ))
    }

    /// Hull of a nonempty collection of boxes.
    pub fn hull_all<'a, I>(boxes: I) -> Result<Option<IntervalBox>>
    where
        I: IntoIterator<Item = &'a IntervalBox>,
    {
        let mut acc: Option<IntervalBox> = None;
        for b in boxes {
            acc = Some(match acc {
                None => b.clone(),
                Some(h) => h.hull(b)?,
            });
        }
        Ok(acc)
    }

    /// `other ⊆ self`, componentwise.
    pub fn contains(&self, other: &IntervalBox) -> Result<bool> {
        check_dim(self.dim(), other.dim(), "box containment")?;
        Ok(self.dims.iter().zip(&other.dims).all(|(a, b)| a.encloses(b)))
    }

    pub fn contains_point(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len(), "point containment")?;
        Ok(self.dims.iter().zip(x).all(|(d, &v)| d.contains(v)))
    }

    /// Closed-set intersection test: shared faces or corners count.
    pub fn intersects(&self, other: &IntervalBox) -> Result<bool> {
        check_dim(self.dim(), other.dim(), "box intersection")?;
        Ok(self.dims.iter().zip(&other.dims).all(|(a, b)| a.intersects(b)))
    }

    pub fn inflate(&self, eps: f64) -> IntervalBox {
        Self::from_dims_unchecked(self.dims.iter().map(|d| d.inflate(eps)).collect())
    }

    /// Index of the widest dimension (first one on ties).
    pub fn widest_dim(&self) -> usize {
        let mut best = 0;
        for (k, d) in self.dims.iter().enumerate() {
            if d.width() > self.dims[best].width() {
                best = k;
            }
        }
        best
    }

    /// Bisects the widest dimension. Both halves share the cut face.
    pub fn split(&self) -> (IntervalBox, IntervalBox) {
        let k = self.widest_dim();
        let d = self.dims[k];
        let m = d.mid();
        let mut left = self.dims.clone();
        let mut right = self.dims.clone();
        left[k] = Interval::raw(d.lo(), m);
        right[k] = Interval::raw(m, d.hi());
        (Self::from_dims_unchecked(left), Self::from_dims_unchecked(right))
    }

    /// Replaces dimension `k`.
    pub fn with_dim(&self, k: usize, value: Interval) -> IntervalBox {
        let mut dims = self.dims.clone();
        dims[k] = value;
        Self::from_dims_unchecked(dims)
    }

    /// Keeps only the listed dimensions, in order.
    pub fn project(&self, keep: &[usize]) -> Result<IntervalBox> {
        let dims = keep
            .iter()
            .map(|&k| {
                self.dims.get(k).copied().ok_or(Error::DimensionMismatch {
                    expected: self.dim(),
                    found: k + 1,
                    context: "box projection",
                })
            })
            .collect::<Result<Vec<_>>>()?;
        IntervalBox::new(dims)
    }
}

impl Index<usize> for IntervalBox {
    type Output = Interval;

    fn index(&self, k: usize) -> &Interval {
        &self.dims[k]
    }
}

impl TryFrom<Vec<Interval>> for IntervalBox {
    type Error = Error;

    fn try_from(dims: Vec<Interval>) -> Result<Self> {
        IntervalBox::new(dims)
    }
}

impl From<IntervalBox> for Vec<Interval> {
    fn from(b: IntervalBox) -> Self {
        b.dims
    }
}

impl fmt::Debug for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in self.dims.iter().enumerate() {
            if k > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{d:?}")?;
        }
        Ok(())
    }
}
