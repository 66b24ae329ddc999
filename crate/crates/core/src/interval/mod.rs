//! Validated interval arithmetic.
//!
//! All arithmetic results enclose the exact real result. Sums, products and
//! quotients are rounded outward with error-free residuals (see [`rounding`]),
//! so exact floating results stay exact and inexact ones gain a single ulp.

mod boxes;
mod matrix;
pub mod rounding;

pub use boxes::IntervalBox;
pub use matrix::{IntervalMatrix, MAX_DET_DIM};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use rounding::{add_down, add_up, div_down, div_up, mul_down, mul_up, sub_down, sub_up};

/// A closed interval `[lo, hi]` with finite endpoints.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("non-finite endpoint in [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval `[x, x]`. `x` must be finite.
    pub fn point(x: f64) -> Self {
        debug_assert!(x.is_finite());
        Self { lo: x, hi: x }
    }

    /// Builds an interval without validating the endpoints. Used for
    /// intermediate results whose finiteness is checked by the caller.
    pub(crate) const fn raw(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// A floating point inside the interval (not necessarily the exact midpoint).
    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = self.lo + 0.5 * (self.hi - self.lo);
        if m.is_finite() {
            m.clamp(self.lo, self.hi)
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    /// Midpoint together with an upper bound on the distance from it to either endpoint.
    pub fn mid_rad(&self) -> (f64, f64) {
        let m = self.mid();
        let r = sub_up(self.hi, m).max(sub_up(m, self.lo));
        (m, r)
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `other ⊆ self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed intervals: touching endpoints count as intersecting.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::raw(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Widens both endpoints by `eps` (rounded outward).
    pub fn inflate(&self, eps: f64) -> Interval {
        Interval::raw(sub_down(self.lo, eps), add_up(self.hi, eps))
    }

    pub fn scale(&self, c: f64) -> Interval {
        if c >= 0.0 {
            Interval::raw(mul_down(self.lo, c), mul_up(self.hi, c))
        } else {
            Interval::raw(mul_down(self.hi, c), mul_up(self.lo, c))
        }
    }

    pub fn add_scalar(&self, c: f64) -> Interval {
        Interval::raw(add_down(self.lo, c), add_up(self.hi, c))
    }

    pub fn sqr(&self) -> Interval {
        if self.lo >= 0.0 {
            Interval::raw(mul_down(self.lo, self.lo), mul_up(self.hi, self.hi))
        } else if self.hi <= 0.0 {
            Interval::raw(mul_down(self.hi, self.hi), mul_up(self.lo, self.lo))
        } else {
            let m = self.mag();
            Interval::raw(0.0, mul_up(m, m))
        }
    }

    /// Quotient; the divisor must not contain zero.
    pub fn checked_div(&self, rhs: &Interval) -> Result<Interval> {
        if rhs.contains_zero() {
            return Err(Error::Domain(format!("division by interval {rhs:?} containing zero")));
        }
        let (a, b) = (self, rhs);
        let lo = div_down(a.lo, b.lo)
            .min(div_down(a.lo, b.hi))
            .min(div_down(a.hi, b.lo))
            .min(div_down(a.hi, b.hi));
        let hi = div_up(a.lo, b.lo)
            .max(div_up(a.lo, b.hi))
            .max(div_up(a.hi, b.lo))
            .max(div_up(a.hi, b.hi));
        Ok(Interval::raw(lo, hi))
    }

    /// Clips to `[floor, ceil]`; only valid when the true values are known to lie there.
    pub(crate) fn clamp_to(&self, floor: f64, ceil: f64) -> Interval {
        Interval::raw(self.lo.clamp(floor, ceil), self.hi.clamp(floor, ceil))
    }

    /// Checked binary operation. Operands and result must be finite.
    pub fn combine(op: CombineOp, a: Interval, b: Operand) -> Result<Interval> {
        if !a.is_finite() {
            return Err(Error::Domain(format!("non-finite operand {a:?}")));
        }
        match b {
            Operand::Interval(iv) if !iv.is_finite() => {
                return Err(Error::Domain(format!("non-finite operand {iv:?}")))
            }
            Operand::Scalar(c) if !c.is_finite() => {
                return Err(Error::Domain(format!("non-finite scalar {c}")))
            }
            _ => {}
        }
        let b_iv = match b {
            Operand::Interval(iv) => iv,
            Operand::Scalar(c) => Interval::point(c),
        };
        let out = match op {
            CombineOp::Add => a + b_iv,
            CombineOp::Sub => a - b_iv,
            CombineOp::Mul => a * b_iv,
            CombineOp::Scale => match b {
                Operand::Scalar(c) => a.scale(c),
                Operand::Interval(iv) => a * iv,
            },
            CombineOp::Neg => -a,
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::Domain(format!("overflow in {op:?}")))
        }
    }
}

/// Operations accepted by [`Interval::combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Sub,
    Mul,
    Scale,
    /// Unary; the second operand is ignored.
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Operand {
    Interval(Interval),
    Scalar(f64),
}

impl From<Interval> for Operand {
    fn from(iv: Interval) -> Self {
        Operand::Interval(iv)
    }
}

impl From<f64> for Operand {
    fn from(c: f64) -> Self {
        Operand::Scalar(c)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(iv: Interval) -> Self {
        [iv.lo, iv.hi]
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval::raw(add_down(self.lo, rhs.lo), add_up(self.hi, rhs.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval::raw(sub_down(self.lo, rhs.hi), sub_up(self.hi, rhs.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval::raw(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        let (a, b) = (self, rhs);
        if a.is_point() && b.is_point() {
            return Interval::raw(mul_down(a.lo, b.lo), mul_up(a.lo, b.lo));
        }
        let lo = mul_down(a.lo, b.lo)
            .min(mul_down(a.lo, b.hi))
            .min(mul_down(a.hi, b.lo))
            .min(mul_down(a.hi, b.hi));
        let hi = mul_up(a.lo, b.lo)
            .max(mul_up(a.lo, b.hi))
            .max(mul_up(a.hi, b.lo))
            .max(mul_up(a.hi, b.hi));
        Interval::raw(lo, hi)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;

    fn mul(self, c: f64) -> Interval {
        self.scale(c)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;

    fn add(self, c: f64) -> Interval {
        self.add_scalar(c)
    }
}

/// Interval dot product of a point row with an interval vector.
pub(crate) fn dot_point_row(row: &[f64], xs: &[Interval]) -> Interval {
    let mut acc = Interval::ZERO;
    for (&w, x) in row.iter().zip(xs) {
        acc = acc + x.scale(w);
    }
    acc
}
