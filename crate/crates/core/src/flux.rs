//! Flux tuples `(f_1, …, f_n)` with their first and second derivatives.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre5;
use crate::source::ScalarFn;

/// One flux component together with its derivatives.
#[derive(Clone)]
pub struct FluxComponent {
    /// `f_i`.
    pub f: ScalarFn,
    /// `f_i'`.
    pub df: ScalarFn,
    /// `f_i''`.
    pub d2f: ScalarFn,
}

impl FluxComponent {
    /// Bundles three closures.
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            df: Arc::new(df),
            d2f: Arc::new(d2f),
        }
    }
}

/// The flux tuple of an `n`-dimensional balance law.
#[derive(Clone)]
pub struct FluxSet {
    name: String,
    components: Vec<FluxComponent>,
}

impl fmt::Debug for FluxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxSet")
            .field("name", &self.name)
            .field("dim", &self.components.len())
            .finish()
    }
}

/// Report of the finite-difference derivative audit.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeAudit {
    /// Worst error at `h = 1e-3` for each checked derivative.
    pub coarse: Vec<f64>,
    /// Worst error at `h = 1e-4`.
    pub fine: Vec<f64>,
}

impl FluxSet {
    /// Builds a flux set without auditing it.
    pub fn new(name: impl Into<String>, components: Vec<FluxComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("a flux set needs at least one component".into()));
        }
        Ok(Self {
            name: name.into(),
            components,
        })
    }

    /// Builds a flux set and checks the supplied derivatives against centered
    /// differences (see [`FluxSet::audit_derivatives`]).
    pub fn validated(name: impl Into<String>, components: Vec<FluxComponent>) -> Result<Self> {
        let s = Self::new(name, components)?;
        s.audit_derivatives()?;
        Ok(s)
    }

    /// Name of the flux set.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Spatial dimension `n`.
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// `f_i(u)`.
    #[inline]
    pub fn f(&self, i: usize, u: f64) -> f64 {
        (self.components[i].f)(u)
    }

    /// `f_i'(u)`.
    #[inline]
    pub fn df(&self, i: usize, u: f64) -> f64 {
        (self.components[i].df)(u)
    }

    /// `f_i''(u)`.
    #[inline]
    pub fn d2f(&self, i: usize, u: f64) -> f64 {
        (self.components[i].d2f)(u)
    }

    /// Divided difference `(f_i(a) - f_i(b)) / (a - b)`, equal to `f_i'(a)`
    /// when `a == b`. Close arguments use Gauss-Legendre quadrature of `f_i'`
    /// to avoid cancellation; the result is symmetric in `(a, b)`.
    pub fn divided_difference(&self, i: usize, a: f64, b: f64) -> f64 {
        let d = a - b;
        if d == 0.0 {
            return self.df(i, a);
        }
        let scale = 1.0 + a.abs().max(b.abs());
        if d.abs() <= 1e-3 * scale {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            gauss_legendre5(|u| self.df(i, u), lo, hi) / (hi - lo)
        } else {
            (self.f(i, a) - self.f(i, b)) / d
        }
    }

    /// Largest `|f_i'(u)|` on `[lo, hi]`, sampled on 257 nodes plus ends.
    pub fn max_speed(&self, i: usize, lo: f64, hi: f64) -> f64 {
        const N: usize = 256;
        let mut m: f64 = 0.0;
        for k in 0..=N {
            let u = lo + (hi - lo) * (k as f64) / (N as f64);
            m = m.max(self.df(i, u).abs());
        }
        m
    }

    /// Largest Euclidean speed `sqrt(Σ f_i'(u)²)` over `|u| <= m_bound`.
    pub fn cone_speed(&self, m_bound: f64) -> f64 {
        const N: usize = 2000;
        let mut best: f64 = 0.0;
        for k in 0..=N {
            let u = -m_bound + 2.0 * m_bound * (k as f64) / (N as f64);
            let s: f64 = (0..self.dim())
                .map(|i| {
                    let d = self.df(i, u);
                    d * d
                })
                .sum();
            best = best.max(s);
        }
        crate::math::sqrt(best)
    }

    /// Checks `f'` against centered differences of `f`, and `f''` against
    /// those of `f'`, on 1000 points of `[-2, 2]` at `h = 1e-3` and `1e-4`.
    ///
    /// A correct derivative shrinks the worst error roughly a hundredfold
    /// between the two step sizes (second-order truncation) until round-off
    /// dominates; a wrong one leaves an `O(1)` error at both.
    pub fn audit_derivatives(&self) -> Result<DerivativeAudit> {
        let mut coarse = Vec::new();
        let mut fine = Vec::new();
        for i in 0..self.dim() {
            let c = &self.components[i];
            for (label, func, deriv) in [("f'", &c.f, &c.df), ("f''", &c.df, &c.d2f)] {
                let worst = |h: f64| -> (f64, f64, f64) {
                    let mut w = (0.0, 0.0, 0.0);
                    for k in 0..1000 {
                        let u = -2.0 + 4.0 * (k as f64 + 0.5) / 1000.0;
                        let fd = (func(u + h) - func(u - h)) / (2.0 * h);
                        let e = (deriv(u) - fd).abs();
                        let scale = func(u).abs() + deriv(u).abs();
                        if !(e <= w.0) {
                            w = (e, u, scale);
                        }
                    }
                    w
                };
                let (e1, _, _) = worst(1e-3);
                let (e2, at, scale) = worst(1e-4);
                let roundoff = 1e-9 * (1.0 + scale);
                if !(e2 <= 0.05 * e1 || e2 <= roundoff) || !e2.is_finite() {
                    return Err(Error::DerivativeMismatch {
                        what: format!("{label} of component {}", i + 1),
                        at,
                        error: e2,
                    });
                }
                coarse.push(e1);
                fine.push(e2);
            }
        }
        Ok(DerivativeAudit { coarse, fine })
    }
}
