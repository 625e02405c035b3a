//! The characteristic flow `dū/dt = g(ū)`, `ū(0, s) = s`: solution values,
//! extinction times, the sensitivity `∂ū/∂s`, characteristic shifts `χ_i`
//! and the shock shift `[χ_i]`.
//!
//! Every computation happens inside one open interval of the zero-set
//! decomposition, where `g` has a fixed sign and the time to travel from `s`
//! to `u` is `G = ∫_s^u dη/g(η)`. The integral is evaluated in a logarithmic
//! chart `ξ` around the relevant zero (`η = z ± e^{-ξ}` toward a zero,
//! `η = a ± e^{ξ}` away from one), which turns the integrable singularity at
//! an absorbing zero into an exponentially decaying integrand that is summed
//! decade by decade.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use crate::error::{Error, Result};
use crate::flux::FluxSet;
use crate::math;
use crate::quad::{integrate, integrate_to_limit, integrate_vec, QuadTolerance, TailOptions};
use crate::source::{check_growth, GrowthReport, SourceTerm};
use crate::zeroset::{
    classify_boundary, decompose_zero_set, BoundaryKind, EdgeKind, Location, OpenInterval, Sign, ZeroSetDecomposition,
};

/// Numerical tolerances of a [`CharFlow`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Resolution of the zero-set scan.
    pub zero_tol: f64,
    /// Absolute tolerance of every quadrature.
    pub quadrature_tol: f64,
    /// Accepted residual `|G(ū, t, s)|` of the root solve.
    pub root_tol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            zero_tol: 1e-12,
            quadrature_tol: 1e-13,
            root_tol: 1e-12,
        }
    }
}

/// Where and when the flow from `s` stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionRecord {
    /// Starting state.
    pub s: f64,
    /// The zero approached in the direction of the flow; `s` itself for
    /// stationary states and `±∞` when the flow runs off to infinity.
    pub target: f64,
    /// Extinction time, `+∞` when the target is never reached.
    pub t_star: f64,
}

/// The solved characteristic semigroup for one source term.
#[derive(Debug, Clone)]
pub struct CharFlow {
    source: SourceTerm,
    decomposition: ZeroSetDecomposition,
    growth: GrowthReport,
    options: FlowOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ChartKind {
    Toward,
    Away,
    Shift,
}

/// Logarithmic coordinate on one side of an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Chart {
    kind: ChartKind,
    anchor: f64,
    sigma: f64,
}

const FAR: f64 = 1e300;

impl Chart {
    fn for_segment(iv: &OpenInterval, s: f64, dir: f64) -> Self {
        let (ahead, ahead_kind, behind, behind_kind) = if dir > 0.0 {
            (iv.hi, iv.hi_kind, iv.lo, iv.lo_kind)
        } else {
            (iv.lo, iv.lo_kind, iv.hi, iv.hi_kind)
        };
        if ahead_kind == EdgeKind::Zero {
            Chart {
                kind: ChartKind::Toward,
                anchor: ahead,
                sigma: -dir,
            }
        } else if behind_kind == EdgeKind::Zero {
            Chart {
                kind: ChartKind::Away,
                anchor: behind,
                sigma: dir,
            }
        } else {
            Chart {
                kind: ChartKind::Shift,
                anchor: s,
                sigma: dir,
            }
        }
    }

    #[inline]
    fn eta(&self, xi: f64) -> f64 {
        match self.kind {
            ChartKind::Toward => self.anchor + self.sigma * math::exp(-xi),
            ChartKind::Away => self.anchor + self.sigma * math::exp(xi),
            ChartKind::Shift => self.anchor + self.sigma * math::expm1(xi),
        }
    }

    #[inline]
    fn deta(&self, xi: f64) -> f64 {
        match self.kind {
            ChartKind::Toward => -self.sigma * math::exp(-xi),
            ChartKind::Away | ChartKind::Shift => self.sigma * math::exp(xi),
        }
    }

    fn xi(&self, eta: f64) -> f64 {
        match self.kind {
            ChartKind::Toward => {
                if eta == self.anchor {
                    f64::INFINITY
                } else {
                    -math::ln((eta - self.anchor).abs())
                }
            }
            ChartKind::Away => math::ln((eta - self.anchor).abs()),
            ChartKind::Shift => math::ln1p(self.sigma * (eta - self.anchor)),
        }
    }

    /// Largest useful `ξ` in the direction of increasing `ξ`.
    fn limit(&self) -> f64 {
        match self.kind {
            ChartKind::Toward => -math::ln((self.anchor.abs() * 1.1e-16).max(1e-300)),
            ChartKind::Away | ChartKind::Shift => math::ln(FAR),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Motion {
    Stationary,
    Moving {
        chart: Chart,
        xi0: f64,
        /// finite absorbing zero, if the flow heads toward one
        target: Option<f64>,
        t_star: f64,
    },
}

/// The flow from one starting state, with its extinction time computed once
/// so that repeated queries at different times share it.
#[derive(Debug, Clone)]
pub struct Trajectory<'a> {
    flow: &'a CharFlow,
    s: f64,
    location: Location,
    motion: Motion,
}

enum Solve {
    Found(f64),
    Capped(f64),
}

impl CharFlow {
    /// Analyses the source term (zero set and growth) and prepares the flow.
    pub fn new(source: SourceTerm, options: FlowOptions) -> Result<Self> {
        let decomposition = decompose_zero_set(&source, options.zero_tol)?;
        Ok(Self::with_decomposition(source, decomposition, options))
    }

    /// Uses a precomputed decomposition.
    pub fn with_decomposition(source: SourceTerm, decomposition: ZeroSetDecomposition, options: FlowOptions) -> Self {
        let growth = check_growth(&source, source.search_window());
        Self {
            source,
            decomposition,
            growth,
            options,
        }
    }

    /// The source term.
    pub fn source(&self) -> &SourceTerm {
        &self.source
    }

    /// The zero-set decomposition.
    pub fn decomposition(&self) -> &ZeroSetDecomposition {
        &self.decomposition
    }

    /// The sublinear-growth diagnostic.
    pub fn growth(&self) -> &GrowthReport {
        &self.growth
    }

    /// Tolerances in use.
    pub fn options(&self) -> FlowOptions {
        self.options
    }

    fn tail_opts(&self) -> TailOptions {
        TailOptions::decades(self.options.quadrature_tol)
    }

    fn quad_tol(&self) -> QuadTolerance {
        QuadTolerance {
            abs: self.options.quadrature_tol,
            rel: 1e-14,
            max_segments: 200,
        }
    }

    /// `dη/dξ / g(η)` at `ξ`.
    #[inline]
    fn density(&self, chart: &Chart, xi: f64) -> f64 {
        let eta = chart.eta(xi);
        let gv = self.source.eval(eta);
        if gv == 0.0 {
            0.0
        } else {
            chart.deta(xi) / gv
        }
    }

    /// Prepares the flow from `s`.
    pub fn trajectory(&self, s: f64) -> Result<Trajectory<'_>> {
        if !s.is_finite() {
            return Err(Error::NonFinite {
                what: "initial state",
                at: s,
            });
        }
        let location = self.decomposition.locate(s)?;
        let motion = match location {
            Location::Boundary(_) | Location::Plateau(_) => Motion::Stationary,
            Location::Interval(i) => {
                let iv = self.decomposition.open_intervals[i];
                let dir = match iv.sign {
                    Sign::Positive => 1.0,
                    Sign::Negative => -1.0,
                };
                let chart = Chart::for_segment(&iv, s, dir);
                let xi0 = chart.xi(s);
                if chart.kind == ChartKind::Toward {
                    let t_star = integrate_to_limit(|x| self.density(&chart, x), xi0, chart.limit(), self.tail_opts());
                    Motion::Moving {
                        chart,
                        xi0,
                        target: Some(chart.anchor),
                        t_star: if t_star.is_finite() { t_star } else { f64::INFINITY },
                    }
                } else {
                    Motion::Moving {
                        chart,
                        xi0,
                        target: None,
                        t_star: f64::INFINITY,
                    }
                }
            }
        };
        Ok(Trajectory {
            flow: self,
            s,
            location,
            motion,
        })
    }

    /// `G = ∫_s^u dη/g(η)`, the travel time from `s` to `u`.
    ///
    /// `u` must lie in the closure of the open interval containing `s`.
    /// Divergent integrals are returned as infinities carrying the sign of
    /// the integral (`+∞` in the direction of the flow).
    pub fn g_transform(&self, s: f64, u: f64) -> Result<f64> {
        if u == s {
            return Ok(0.0);
        }
        let iv = match self.decomposition.locate(s)? {
            Location::Interval(i) => self.decomposition.open_intervals[i],
            _ => return Err(Error::DifferentIntervals { s, u }),
        };
        let inside_lo = u > iv.lo || (u == iv.lo && iv.lo_kind == EdgeKind::Zero) || iv.lo_kind == EdgeKind::Window;
        let inside_hi = u < iv.hi || (u == iv.hi && iv.hi_kind == EdgeKind::Zero) || iv.hi_kind == EdgeKind::Window;
        if !(inside_lo && inside_hi) {
            return Err(Error::DifferentIntervals { s, u });
        }
        let dir = if u > s { 1.0 } else { -1.0 };
        let chart = Chart::for_segment(&iv, s, dir);
        let xi0 = chart.xi(s);
        let xi1 = chart.xi(u);
        let h = |x: f64| self.density(&chart, x);
        if xi1.is_infinite() {
            Ok(integrate_to_limit(h, xi0, chart.limit(), self.tail_opts()))
        } else {
            Ok(integrate(h, xi0, xi1, self.quad_tol()).value)
        }
    }

    /// `ū(t, s)`.
    pub fn u_bar(&self, t: f64, s: f64) -> Result<f64> {
        self.trajectory(s)?.u_at(t)
    }

    /// Extinction record of the flow from `s`.
    pub fn extinction_time(&self, s: f64) -> Result<AbsorptionRecord> {
        Ok(self.trajectory(s)?.record())
    }

    /// `∂ū/∂s (t, s)`.
    pub fn u_bar_s(&self, t: f64, s: f64) -> Result<f64> {
        self.trajectory(s)?.u_s_at(t)
    }

    /// `χ_i(t, s) = ∫_0^t f_i'(ū(τ, s)) dτ` for every component.
    pub fn chi(&self, fluxes: &FluxSet, t: f64, s: f64) -> Result<Vec<f64>> {
        self.trajectory(s)?.chi_at(fluxes, t)
    }

    /// `[χ_i](t) = ∫_0^t (f_i(ū_-) - f_i(ū_+)) / (ū_- - ū_+) dτ` with
    /// `ū_± = ū(τ, u_±)`, switching to `f_i'(ū_+)` once the two flows have
    /// merged (within `10·root_tol`).
    pub fn bracket_chi(&self, fluxes: &FluxSet, t: f64, u_minus: f64, u_plus: f64) -> Result<Vec<f64>> {
        let a = self.trajectory(u_minus)?;
        let b = self.trajectory(u_plus)?;
        bracket_chi_between(&a, &b, fluxes, t)
    }

    /// Cross-check route for `χ_i`: adaptive quadrature directly in time.
    pub fn chi_by_time_quadrature(&self, fluxes: &FluxSet, t: f64, s: f64) -> Result<Vec<f64>> {
        let tr = self.trajectory(s)?;
        let n = fluxes.dim();
        if t <= 0.0 {
            return Ok(vec![0.0; n]);
        }
        let err = Cell::new(None);
        let mut total = vec![0.0; n];
        let ts = tr.t_star();
        let mut cuts = vec![0.0];
        if ts > 0.0 && ts < t {
            cuts.push(ts);
        }
        cuts.push(t);
        for w in cuts.windows(2) {
            let (v, _) = integrate_vec(
                |tau, out| match tr.u_at(tau) {
                    Ok(u) => {
                        for (i, o) in out.iter_mut().enumerate() {
                            *o = fluxes.df(i, u);
                        }
                    }
                    Err(e) => {
                        err.set(Some(e));
                        out.fill(f64::NAN);
                    }
                },
                w[0],
                w[1],
                n,
                QuadTolerance::absolute(1e-12),
            );
            for i in 0..n {
                total[i] += v[i];
            }
        }
        if let Some(e) = err.take() {
            return Err(e);
        }
        Ok(total)
    }
}

/// `[χ_i](t)` for two prepared trajectories.
pub fn bracket_chi_between(a: &Trajectory<'_>, b: &Trajectory<'_>, fluxes: &FluxSet, t: f64) -> Result<Vec<f64>> {
    let n = fluxes.dim();
    if t <= 0.0 {
        return Ok(vec![0.0; n]);
    }
    if a.s == b.s {
        return b.chi_at(fluxes, t);
    }
    let merge_tol = 10.0 * a.flow.options.root_tol;
    let mut cuts = vec![0.0];
    for ts in [a.t_star(), b.t_star()] {
        if ts > 0.0 && ts < t {
            cuts.push(ts);
        }
    }
    cuts.push(t);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let err = Cell::new(None);
    let mut total = vec![0.0; n];
    for w in cuts.windows(2) {
        let (v, _) = integrate_vec(
            |tau, out| match (a.u_at(tau), b.u_at(tau)) {
                (Ok(ua), Ok(ub)) => {
                    if (ua - ub).abs() <= merge_tol {
                        for (i, o) in out.iter_mut().enumerate() {
                            *o = fluxes.df(i, ub);
                        }
                    } else {
                        for (i, o) in out.iter_mut().enumerate() {
                            *o = fluxes.divided_difference(i, ua, ub);
                        }
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    err.set(Some(e));
                    out.fill(f64::NAN);
                }
            },
            w[0],
            w[1],
            n,
            QuadTolerance {
                abs: 1e-12,
                rel: 1e-13,
                max_segments: 300,
            },
        );
        for i in 0..n {
            total[i] += v[i];
        }
    }
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(total)
}

impl<'a> Trajectory<'a> {
    /// Starting state.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Where the starting state sits in the decomposition.
    pub fn location(&self) -> Location {
        self.location
    }

    /// Extinction time (`+∞` if never absorbed, `0` if stationary).
    pub fn t_star(&self) -> f64 {
        match self.motion {
            Motion::Stationary => 0.0,
            Motion::Moving { t_star, .. } => t_star,
        }
    }

    /// Whether the state is a fixed point of the flow.
    pub fn is_stationary(&self) -> bool {
        matches!(self.motion, Motion::Stationary)
    }

    /// Extinction record.
    pub fn record(&self) -> AbsorptionRecord {
        match self.motion {
            Motion::Stationary => AbsorptionRecord {
                s: self.s,
                target: self.s,
                t_star: 0.0,
            },
            Motion::Moving {
                chart, target, t_star, ..
            } => AbsorptionRecord {
                s: self.s,
                target: target.unwrap_or(chart.sigma * f64::INFINITY),
                t_star,
            },
        }
    }

    /// Finds `ξ` with `∫_{ξ0}^{ξ} h = t`.
    fn solve(&self, chart: &Chart, xi0: f64, t: f64) -> Solve {
        let flow = self.flow;
        let h = |x: f64| flow.density(chart, x);
        let qt = flow.quad_tol();
        let lim = chart.limit();
        let rt = flow.options.root_tol;
        let mut lo = xi0;
        let mut g_lo = 0.0;
        let h0 = h(xi0);
        let mut step = if h0 > 0.0 && h0.is_finite() {
            (1.25 * t / h0).clamp(1e-8, 4.0)
        } else {
            1.0
        };
        let (mut hi, mut g_hi);
        loop {
            hi = (lo + step).min(lim);
            g_hi = g_lo + integrate(h, lo, hi, qt).value;
            if g_hi >= t {
                break;
            }
            if hi >= lim {
                return Solve::Capped(g_hi);
            }
            lo = hi;
            g_lo = g_hi;
            step *= 2.0;
        }
        // (fa, fb) are true residuals; (wa, wb) are the Illinois-weighted copies
        let (mut a, mut fa, mut b, mut fb) = (lo, g_lo - t, hi, g_hi - t);
        let (mut wa, mut wb) = (fa, fb);
        let mut side = 0i32;
        for iter in 0..200 {
            if fb.abs() <= rt {
                return Solve::Found(b);
            }
            if fa.abs() <= rt {
                return Solve::Found(a);
            }
            let width = b - a;
            if width <= 4.0 * f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
                break;
            }
            let m = 1e-3 * width;
            let mut x = a - wa * width / (wb - wa);
            if iter % 5 == 4 || !x.is_finite() {
                x = 0.5 * (a + b);
            } else {
                x = x.clamp(a + m, b - m);
            }
            let fx = if x - a <= b - x {
                fa + integrate(h, a, x, qt).value
            } else {
                fb - integrate(h, x, b, qt).value
            };
            if fx < 0.0 {
                a = x;
                fa = fx;
                wa = fx;
                if side == -1 {
                    wb *= 0.5;
                }
                side = -1;
            } else {
                b = x;
                fb = fx;
                wb = fx;
                if side == 1 {
                    wa *= 0.5;
                }
                side = 1;
            }
        }
        Solve::Found(if fa.abs() < fb.abs() { a } else { b })
    }

    fn escape_time(&self, chart: &Chart, xi0: f64) -> f64 {
        let flow = self.flow;
        integrate_to_limit(|x| flow.density(chart, x), xi0, chart.limit(), flow.tail_opts())
    }

    /// `ū(t, s)`.
    pub fn u_at(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "time must be non-negative, got {t}"
            )));
        }
        match self.motion {
            Motion::Stationary => Ok(self.s),
            Motion::Moving { .. } if t == 0.0 => Ok(self.s),
            Motion::Moving {
                chart,
                xi0,
                target,
                t_star,
            } => {
                if let Some(z) = target {
                    if t >= t_star {
                        return Ok(z);
                    }
                }
                match self.solve(&chart, xi0, t) {
                    Solve::Found(xi) => {
                        let u = chart.eta(xi);
                        Ok(match target {
                            // never step past the absorbing zero because of round-off
                            Some(z) => {
                                if (u - z) * (self.s - z) < 0.0 {
                                    z
                                } else {
                                    u
                                }
                            }
                            None => u,
                        })
                    }
                    Solve::Capped(reached) => match target {
                        Some(z) => Ok(z),
                        None => Err(Error::BlowUp {
                            s: self.s,
                            escape_time: self.escape_time(&chart, xi0).max(reached),
                        }),
                    },
                }
            }
        }
    }

    /// `∂ū/∂s (t, s)`: `g(ū)/g(s)` off the zero set, 1 on plateaus,
    /// `exp(g'(s) t)` at an isolated zero (0 when `g'(s) = -∞` and `t > 0`).
    pub fn u_s_at(&self, t: f64) -> Result<f64> {
        let src = &self.flow.source;
        match self.location {
            Location::Plateau(_) => Ok(1.0),
            Location::Boundary(i) => {
                let z = self.flow.decomposition.boundary_points[i];
                match classify_boundary(src, z) {
                    BoundaryKind::Differentiable(d) => Ok(math::exp(d * t)),
                    BoundaryKind::NegativeInfinite => Ok(if t > 0.0 { 0.0 } else { 1.0 }),
                    BoundaryKind::NotDifferentiable => {
                        if t == 0.0 {
                            Ok(1.0)
                        } else {
                            Err(Error::NotDifferentiable { s: self.s })
                        }
                    }
                }
            }
            Location::Interval(_) => {
                let u = self.u_at(t)?;
                Ok(src.eval(u) / src.eval(self.s))
            }
        }
    }

    /// `χ_i(t, s)` for every flux component.
    ///
    /// Computed in state space: `∫_s^{ū} f_i'(η)/g(η) dη`, plus
    /// `f_i'(target)·(t - t*)` after absorption.
    pub fn chi_at(&self, fluxes: &FluxSet, t: f64) -> Result<Vec<f64>> {
        let n = fluxes.dim();
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "time must be non-negative, got {t}"
            )));
        }
        if t == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let flow = self.flow;
        match self.motion {
            Motion::Stationary => Ok((0..n).map(|i| fluxes.df(i, self.s) * t).collect()),
            Motion::Moving {
                chart,
                xi0,
                target,
                t_star,
            } => {
                let weighted = |i: usize| move |x: f64| fluxes.df(i, chart.eta(x)) * flow.density(&chart, x);
                if let Some(z) = target {
                    if t >= t_star {
                        return Ok((0..n)
                            .map(|i| {
                                integrate_to_limit(weighted(i), xi0, chart.limit(), flow.tail_opts())
                                    + fluxes.df(i, z) * (t - t_star)
                            })
                            .collect());
                    }
                }
                match self.solve(&chart, xi0, t) {
                    Solve::Found(xi) => {
                        let (v, _) = integrate_vec(
                            |x, out| {
                                let eta = chart.eta(x);
                                let d = flow.density(&chart, x);
                                for (i, o) in out.iter_mut().enumerate() {
                                    *o = fluxes.df(i, eta) * d;
                                }
                            },
                            xi0,
                            xi,
                            n,
                            flow.quad_tol(),
                        );
                        Ok(v)
                    }
                    Solve::Capped(reached) => match target {
                        Some(z) => Ok((0..n)
                            .map(|i| {
                                integrate_to_limit(weighted(i), xi0, chart.limit(), flow.tail_opts())
                                    + fluxes.df(i, z) * (t - reached)
                            })
                            .collect()),
                        None => Err(Error::BlowUp {
                            s: self.s,
                            escape_time: self.escape_time(&chart, xi0).max(reached),
                        }),
                    },
                }
            }
        }
    }
}
