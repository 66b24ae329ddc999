//! Smooth activations with point evaluation and validated range enclosures.
//!
//! Enclosures are built from `exp` of a non-positive argument, which keeps the
//! derivative enclosures tight in saturated regions where `1 - tanh²` would
//! cancel to nothing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::interval::Interval;

/// Steps taken outward around a libm `exp` result.
const EXP_ULPS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Sigmoid,
    /// Identity ("purelin").
    Linear,
}

impl Activation {
    pub fn name(&self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => {
                if x >= 0.0 {
                    1.0 / (1.0 + (-x).exp())
                } else {
                    let u = x.exp();
                    u / (1.0 + u)
                }
            }
            Activation::Linear => x,
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let u = (-2.0 * x.abs()).exp();
                4.0 * u / ((1.0 + u) * (1.0 + u))
            }
            Activation::Sigmoid => {
                let u = (-x.abs()).exp();
                u / ((1.0 + u) * (1.0 + u))
            }
            Activation::Linear => 1.0,
        }
    }

    /// Maximum of the derivative over the reals (attained at 0).
    pub fn peak_deriv(&self) -> f64 {
        match self {
            Activation::Tanh | Activation::Linear => 1.0,
            Activation::Sigmoid => 0.25,
        }
    }

    /// Validated enclosure of `act(x)` for a single point.
    pub fn enclose(&self, x: f64) -> Interval {
        match self {
            Activation::Linear => Interval::point(x),
            Activation::Tanh => {
                if x == 0.0 {
                    return Interval::ZERO;
                }
                // tanh|x| = (1 - u) / (1 + u), u = exp(-2|x|)
                let u = exp_nonpositive(-2.0 * x.abs());
                let t = (Interval::ONE - u)
                    .checked_div(&(Interval::ONE + u))
                    .expect("1 + u is positive")
                    .clamp_to(0.0, 1.0);
                if x > 0.0 {
                    t
                } else {
                    -t
                }
            }
            Activation::Sigmoid => {
                let u = exp_nonpositive(-x.abs());
                let denom = Interval::ONE + u;
                let s = if x >= 0.0 {
                    Interval::ONE.checked_div(&denom)
                } else {
                    u.checked_div(&denom)
                };
                s.expect("1 + u is positive").clamp_to(0.0, 1.0)
            }
        }
    }

    /// Validated enclosure of `act'(x)` for a single point.
    pub fn enclose_deriv(&self, x: f64) -> Interval {
        match self {
            Activation::Linear => Interval::ONE,
            Activation::Tanh => {
                let u = exp_nonpositive(-2.0 * x.abs());
                (u.scale(4.0))
                    .checked_div(&(Interval::ONE + u).sqr())
                    .expect("(1 + u)^2 is positive")
                    .clamp_to(0.0, 1.0)
            }
            Activation::Sigmoid => {
                let u = exp_nonpositive(-x.abs());
                u.checked_div(&(Interval::ONE + u).sqr())
                    .expect("(1 + u)^2 is positive")
                    .clamp_to(0.0, 0.25)
            }
        }
    }

    /// Enclosure of `{act(t) : t ∈ x}`; all three activations are monotone increasing.
    pub fn range(&self, x: Interval) -> Interval {
        match self {
            Activation::Linear => x,
            _ => {
                let lo = self.enclose(x.lo()).lo();
                let hi = if x.is_point() {
                    self.enclose(x.lo()).hi()
                } else {
                    self.enclose(x.hi()).hi()
                };
                Interval::raw(lo, hi)
            }
        }
    }

    /// Enclosure of `{act'(t) : t ∈ x}`. The derivatives are even and unimodal with
    /// their peak at 0, so the extremes sit at the endpoints or at 0.
    pub fn deriv_range(&self, x: Interval) -> Interval {
        match self {
            Activation::Linear => Interval::ONE,
            _ => {
                let dl = self.enclose_deriv(x.lo());
                let dh = self.enclose_deriv(x.hi());
                if x.contains_zero() {
                    Interval::raw(dl.lo().min(dh.lo()), self.peak_deriv())
                } else if x.lo() > 0.0 {
                    Interval::raw(dh.lo(), dl.hi())
                } else {
                    Interval::raw(dl.lo(), dh.hi())
                }
            }
        }
    }
}

/// Enclosure of `exp(x)` for `x <= 0`, inside `[0, 1]`.
fn exp_nonpositive(x: f64) -> Interval {
    debug_assert!(x <= 0.0);
    if x == 0.0 {
        return Interval::ONE;
    }
    let e = x.exp();
    let (mut lo, mut hi) = (e, e);
    for _ in 0..EXP_ULPS {
        lo = lo.next_down();
        hi = hi.next_up();
    }
    Interval::raw(lo.max(0.0), hi.min(1.0))
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" | "logsig" => Ok(Activation::Sigmoid),
            "linear" | "purelin" => Ok(Activation::Linear),
            other => Err(Error::UnknownActivation(other.to_string())),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
