//! Directed rounding on top of round-to-nearest hardware arithmetic.
//!
//! Sums and products are computed in the current rounding mode and the exact
//! residual is recovered with an error-free transform (`TwoSum`, or an FMA for
//! products and quotients). The result is stepped one ulp outward only when the
//! residual shows the rounded value lies on the wrong side of the true result.
//! Near the underflow threshold the residual is no longer exact, so the step is
//! taken unconditionally there.

/// Below this magnitude FMA residuals of products may be inexact.
const TINY: f64 = 1e-290;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    if p.abs() < TINY {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    if p.abs() < TINY {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of `a / b - fl(a / b)`, or `None` when the residual cannot be trusted.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if q.abs() < TINY || a.abs() < TINY {
        return None;
    }
    let r = (-q).mul_add(b, a);
    Some(if b > 0.0 { r } else { -r })
}

/// `b` must be nonzero.
#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() {
        return q;
    }
    match div_residual_sign(a, b, q) {
        Some(r) if r >= 0.0 => q,
        _ => q.next_down(),
    }
}

/// `b` must be nonzero.
#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() {
        return q;
    }
    match div_residual_sign(a, b, q) {
        Some(r) if r <= 0.0 => q,
        _ => q.next_up(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_results_are_not_widened() {
        assert_eq!(add_down(1.0, 3.0), 4.0);
        assert_eq!(add_up(2.0, 4.0), 6.0);
        assert_eq!(mul_down(-1.0, 4.0), -4.0);
        assert_eq!(div_up(1.0, 4.0), 0.25);
        assert_eq!(div_down(1.0, 2.0), 0.5);
    }

    #[test]
    fn inexact_results_bracket_the_true_value() {
        // 0.1 + 0.2 is not representable; the bracket must be one ulp wide at most.
        let lo = add_down(0.1, 0.2);
        let hi = add_up(0.1, 0.2);
        assert!(lo < hi);
        assert_eq!(lo.next_up(), hi);
        let lo = div_down(1.0, 3.0);
        let hi = div_up(1.0, 3.0);
        assert_eq!(lo.next_up(), hi);
        assert!(3.0 * lo <= 1.0 && 3.0 * hi >= 1.0);
    }

    #[test]
    fn underflow_is_stepped_outward() {
        let lo = mul_down(1e-200, 1e-200);
        let hi = mul_up(1e-200, 1e-200);
        assert!(lo < 0.0 && hi > 0.0);
    }
}
