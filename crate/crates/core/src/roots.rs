//! Bracketed scalar root finding: Illinois-modified regula falsi with a
//! bisection safeguard, so convergence never depends on derivatives.

use crate::error::{Error, Result};

/// Stopping rule for [`solve_bracketed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootTolerance {
    /// Accept any point with `|f| <= f_tol`.
    pub f_tol: f64,
    /// Accept once the bracket is narrower than this.
    pub x_tol: f64,
    /// Hard cap on function evaluations.
    pub max_iter: usize,
}

impl Default for RootTolerance {
    fn default() -> Self {
        Self {
            f_tol: 1e-12,
            x_tol: 0.0,
            max_iter: 200,
        }
    }
}

/// Finds a root of a continuous `f` on `[lo, hi]` given the end values.
///
/// Works for either orientation of the sign change. When the bracket width
/// falls below `x_tol` (or below floating-point resolution) the end with the
/// smaller `|f|` is returned.
pub fn solve_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    tol: RootTolerance,
) -> Result<f64> {
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NoBracket { lo, hi });
    }
    if f_lo.abs() <= tol.f_tol && f_lo.abs() <= f_hi.abs() {
        return Ok(lo);
    }
    if f_hi.abs() <= tol.f_tol {
        return Ok(hi);
    }
    // side: -1 if the last update replaced lo, +1 if hi
    let mut side = 0i32;
    let mut width_before = (hi - lo).abs();
    for iter in 0..tol.max_iter {
        let width = (hi - lo).abs();
        let tiny = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::MIN_POSITIVE;
        if width <= tol.x_tol || width <= tiny {
            break;
        }
        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        // bisect every third step if the bracket is not shrinking fast enough
        let force_bisect = iter % 3 == 2 && width > 0.5 * width_before;
        if iter % 3 == 2 {
            width_before = width;
        }
        let margin = 1e-3 * width;
        if force_bisect || !x.is_finite() {
            x = 0.5 * (lo + hi);
        } else {
            x = x.clamp(lo.min(hi) + margin, lo.max(hi) - margin);
        }
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::NonFinite {
                what: "bracketed function",
                at: x,
            });
        }
        if fx.abs() <= tol.f_tol {
            return Ok(x);
        }
        if (fx > 0.0) == (f_hi > 0.0) {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        }
    }
    Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi })
}

/// Plain bisection on a predicate that is `false` at `lo` and `true` at `hi`;
/// returns the final `(lo, hi)` once narrower than `width`.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(mut pred: P, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    for _ in 0..200 {
        if (hi - lo).abs() <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= x_tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
