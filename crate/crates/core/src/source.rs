//! Source terms `g(u)` and their one-sided Lipschitz and growth diagnostics.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;

/// Shared scalar function `ℝ → ℝ`.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A zero of `g` known in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KnownZero {
    /// Isolated zero.
    Point(f64),
    /// Interval on which `g ≡ 0`; bounds may be infinite.
    Plateau(f64, f64),
}

/// A continuous source term `g` with optional derivative and zero data.
///
/// The derivative may return `±∞` at isolated points (for example `-u^{1/3}`
/// at the origin returns `-∞`) and NaN where it is undefined.
#[derive(Clone)]
pub struct SourceTerm {
    name: String,
    g: ScalarFn,
    g_prime: Option<ScalarFn>,
    analytic_zeros: Option<Vec<KnownZero>>,
    search_window: (f64, f64),
}

impl fmt::Debug for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceTerm")
            .field("name", &self.name)
            .field("has_derivative", &self.g_prime.is_some())
            .field("analytic_zeros", &self.analytic_zeros)
            .field("search_window", &self.search_window)
            .finish()
    }
}

impl SourceTerm {
    /// Wraps `g` with the default search window `[-16, 16]`.
    pub fn new(name: impl Into<String>, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            g: Arc::new(g),
            g_prime: None,
            analytic_zeros: None,
            search_window: (-16.0, 16.0),
        }
    }

    /// Attaches the derivative `g'`.
    pub fn with_derivative(mut self, gp: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.g_prime = Some(Arc::new(gp));
        self
    }

    /// Supplies the zero set in closed form, bypassing the numeric scan.
    pub fn with_zeros(mut self, zeros: Vec<KnownZero>) -> Self {
        self.analytic_zeros = Some(zeros);
        self
    }

    /// Sets the window scanned for zeros.
    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.search_window = (lo, hi);
        self
    }

    /// Human-readable name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluates `g(u)`.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        (self.g)(u)
    }

    /// Evaluates `g(u)` and rejects non-finite results.
    pub fn eval_checked(&self, u: f64) -> Result<f64> {
        let v = (self.g)(u);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what: "source term",
                at: u,
            })
        }
    }

    /// Evaluates the supplied derivative, if any.
    pub fn derivative(&self, u: f64) -> Option<f64> {
        self.g_prime.as_ref().map(|gp| gp(u))
    }

    /// Zeros supplied in closed form.
    pub fn analytic_zeros(&self) -> Option<&[KnownZero]> {
        self.analytic_zeros.as_deref()
    }

    /// Window used for numeric zero detection.
    pub fn search_window(&self) -> (f64, f64) {
        self.search_window
    }

    /// Shared handle to the function itself.
    pub fn function(&self) -> ScalarFn {
        self.g.clone()
    }
}

/// Supremum of difference quotients `(g(u)-g(v))/(u-v)` over the uniform
/// grid of `n_samples + 1` nodes on `[a, b]`.
///
/// Only adjacent pairs are evaluated: every secant slope over a grid is a
/// convex combination of the adjacent slopes between its endpoints, so the
/// adjacent maximum is the maximum over all grid pairs.
pub fn estimate_right_lipschitz(g: &SourceTerm, a: f64, b: f64, n_samples: usize) -> Result<f64> {
    if !(a < b) || n_samples < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "need a < b and n_samples >= 2 (got [{a}, {b}], {n_samples})"
        )));
    }
    let n = n_samples as f64;
    let node = |i: usize| a + (b - a) * (i as f64) / n;
    let mut prev_u = a;
    let mut prev_g = g.eval_checked(a)?;
    let mut best = f64::NEG_INFINITY;
    for i in 1..=n_samples {
        let u = node(i);
        let gu = g.eval_checked(u)?;
        let q = (gu - prev_g) / (u - prev_u);
        if q > best {
            best = q;
        }
        prev_u = u;
        prev_g = gu;
    }
    Ok(best)
}

/// Right-Lipschitz estimates along a refinement ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzTrend {
    /// `(n_samples, estimate)` pairs in ladder order.
    pub estimates: Vec<(usize, f64)>,
    /// True when the estimate keeps growing under refinement, the signature
    /// of a source that is not right-Lipschitz on the interval.
    pub unbounded: bool,
}

/// Runs [`estimate_right_lipschitz`] on each ladder size and flags an
/// unbounded trend when the last two estimates are positive and grow at
/// least as fast as `ratio^{1/4}` per refinement step of size `ratio`.
pub fn right_lipschitz_trend(g: &SourceTerm, a: f64, b: f64, ladder: &[usize]) -> Result<LipschitzTrend> {
    let mut estimates = Vec::with_capacity(ladder.len());
    for &n in ladder {
        estimates.push((n, estimate_right_lipschitz(g, a, b, n)?));
    }
    let unbounded = match estimates.as_slice() {
        [.., (n0, l0), (n1, l1)] if *l0 > 0.0 && *l1 > 0.0 && n1 > n0 => {
            let ratio = *n1 as f64 / *n0 as f64;
            *l1 >= *l0 * math::powf(ratio, 0.25)
        }
        _ => false,
    };
    Ok(LipschitzTrend { estimates, unbounded })
}

/// Outcome of [`check_growth`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// Largest `g(η)/η` over the outer half of the positive samples.
    pub limsup_estimate_pos: f64,
    /// Largest `g(η)/η` over the outer half of the negative samples.
    pub limsup_estimate_neg: f64,
    /// Whether both one-sided estimates stay bounded toward the window edge.
    pub ok: bool,
}

/// Samples `g(η)/η` at geometrically spaced `|η|` from 1 up to the window
/// edge (the window is widened to contain `[-10, 10]`).
///
/// Only growth matters for blow-up, so the verdict compares the positive
/// part of the ratio on the outer half of the samples with the inner half:
/// `ok` holds when the outer supremum does not exceed the inner one by more
/// than 5% (plus 0.05 absolute).
pub fn check_growth(g: &SourceTerm, window: (f64, f64)) -> GrowthReport {
    const SAMPLES: usize = 64;
    let lo = window.0.min(-10.0);
    let hi = window.1.max(10.0);
    let side = |edge: f64| -> (f64, bool) {
        let mut ratios = Vec::with_capacity(SAMPLES);
        let span = math::ln(edge.abs());
        for k in 0..SAMPLES {
            let r = math::exp(span * (k as f64) / ((SAMPLES - 1) as f64));
            let eta = r * edge.signum();
            ratios.push(g.eval(eta) / eta);
        }
        if ratios.iter().any(|r| !r.is_finite()) {
            return (f64::INFINITY, false);
        }
        let (inner, outer) = ratios.split_at(SAMPLES / 2);
        let sup = |xs: &[f64]| xs.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        let inner_pos = sup(inner).max(0.0);
        let outer_pos = sup(outer).max(0.0);
        (sup(outer), outer_pos <= 1.05 * inner_pos + 0.05)
    };
    let (pos, ok_pos) = side(hi);
    let (neg, ok_neg) = side(lo);
    GrowthReport {
        limsup_estimate_pos: pos,
        limsup_estimate_neg: neg,
        ok: ok_pos && ok_neg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn linear_source_has_unit_constant() {
        let g = catalog::linear_source(1.0);
        let l = estimate_right_lipschitz(&g, 0.0, 1.0, 1000).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
    }

    #[test]
    fn neg_cbrt_is_right_lipschitz_with_nonpositive_constant() {
        let g = catalog::neg_cbrt();
        assert!(estimate_right_lipschitz(&g, 0.5, 1.0, 10_000).unwrap() <= 0.0);
        assert!(estimate_right_lipschitz(&g, -1.0, 1.0, 1000).unwrap() <= 0.0);
    }

    #[test]
    fn pos_cbrt_quotient_blows_up() {
        let g = catalog::pos_cbrt();
        let t = right_lipschitz_trend(&g, -1.0, 1.0, &[10_000, 100_000]).unwrap();
        assert!(t.unbounded);
    }

    #[test]
    fn rejects_bad_arguments_and_non_finite() {
        let g = catalog::linear_source(1.0);
        assert!(estimate_right_lipschitz(&g, 1.0, 0.0, 10).is_err());
        assert!(estimate_right_lipschitz(&g, 0.0, 1.0, 1).is_err());
        let bad = SourceTerm::new("log", |u: f64| libm::log(u));
        assert!(matches!(
            estimate_right_lipschitz(&bad, 0.0, 1.0, 10),
            Err(Error::NonFinite { at, .. }) if at == 0.0
        ));
    }

    #[test]
    fn growth_reports() {
        let r = check_growth(&catalog::neg_cbrt(), (-16.0, 16.0));
        assert!(r.ok);
        assert!(r.limsup_estimate_pos <= 0.0 && r.limsup_estimate_pos > -0.2);
        let r = check_growth(&catalog::linear_source(1.0), (-16.0, 16.0));
        assert!(r.ok);
        assert!((r.limsup_estimate_pos - 1.0).abs() < 1e-12);
        assert!((r.limsup_estimate_neg - 1.0).abs() < 1e-12);
        let sq = SourceTerm::new("u^2", |u| u * u);
        assert!(!check_growth(&sq, (-1e3, 1e3)).ok);
    }
}
