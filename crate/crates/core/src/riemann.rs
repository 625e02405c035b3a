//! Construction and evaluation of the global Riemann solution: a shock
//! `M(x - [χ](t)) = 0` separating `ū(t, u_-)` from `ū(t, u_+)` when
//! `u_- > u_+`, or a rarefaction fan `ū(t, c(t, x))` with
//! `M(x - χ(t, c)) = 0` when `u_- < u_+`.

use alloc::vec;
use alloc::vec::Vec;

use crate::charflow::{bracket_chi_between, CharFlow, FlowOptions, Trajectory};
use crate::error::{Error, Result};
use crate::flux::FluxSet;
use crate::math;
use crate::roots::{solve_bracketed, RootTolerance};
use crate::source::SourceTerm;
use crate::surface::InitialSurface;

/// Fluxes, source, initial surface and the two constant states.
#[derive(Debug, Clone)]
pub struct RiemannProblem {
    /// Flux tuple.
    pub fluxes: FluxSet,
    /// Source term.
    pub source: SourceTerm,
    /// Initial surface; `u_-` holds where `M < 0`.
    pub surface: InitialSurface,
    /// State on `{M < 0}`.
    pub u_minus: f64,
    /// State on `{M > 0}`.
    pub u_plus: f64,
}

/// Wave type selected by the ordering of the states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    /// `u_- > u_+`.
    Shock,
    /// `u_- < u_+`.
    Rarefaction,
    /// `u_- = u_+`: the spatially constant ODE solution.
    Constant,
}

/// Verdict of the Condition (H) audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HVerdict {
    /// `H > 0` on every sample.
    StrictlyPositive,
    /// `H >= 0` with zeros isolated in the sample.
    NonNegativeWithIsolatedZeros,
    /// Neither of the above.
    Fails,
}

/// Sampled values of `H(x, u) = Σ M_{x_i}(x) f_i''(u)` on `{M = 0} × (a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionHReport {
    /// Smallest sampled `H`.
    pub min_h: f64,
    /// Largest sampled `H`.
    pub max_h: f64,
    /// Surface point and state where the minimum occurs.
    pub argmin: (Vec<f64>, f64),
    /// State interval sampled.
    pub interval: (f64, f64),
    /// Verdict.
    pub verdict: HVerdict,
    /// Number of samples with `|H| <= tol`.
    pub zero_count: usize,
    /// Whether `H < 0` off isolated zeros, so negating `M` repairs the sign.
    pub uniformly_negative: bool,
}

/// Invariant region `[a, b]` containing every flow value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateBounds {
    /// Lower bound `a`.
    pub lower: f64,
    /// Upper bound `b`.
    pub upper: f64,
    /// True when a flow escapes toward infinity and the bound only holds up
    /// to the time horizon.
    pub horizon_limited: bool,
}

/// Bounds `a <= ū(t, u_±) <= b` for all `t >= 0`.
///
/// Each flow moves monotonically from its start toward its target, so the
/// range is spanned by the start and the target. Flows heading to infinity
/// are bounded by their value at `t_horizon` and flagged.
pub fn state_bounds(flow: &CharFlow, u_minus: f64, u_plus: f64, t_horizon: f64) -> Result<StateBounds> {
    if !(t_horizon > 0.0) {
        return Err(Error::InvalidArgument("t_horizon must be positive".into()));
    }
    let mut lower = u_minus.min(u_plus);
    let mut upper = u_minus.max(u_plus);
    let mut horizon_limited = false;
    for s in [u_minus, u_plus] {
        let rec = flow.extinction_time(s)?;
        let end = if rec.target.is_finite() {
            rec.target
        } else {
            horizon_limited = true;
            match flow.u_bar(t_horizon, s) {
                Ok(v) => v,
                Err(Error::BlowUp { .. }) => return Err(Error::UnboundedFlow { s }),
                Err(e) => return Err(e),
            }
        };
        lower = lower.min(end);
        upper = upper.max(end);
    }
    Ok(StateBounds {
        lower,
        upper,
        horizon_limited,
    })
}

/// Audits Condition (H) on a lattice of surface points with free
/// coordinates in `[-2, 2]`.
pub fn check_condition_h(
    problem: &RiemannProblem,
    bounds: &StateBounds,
    surface_samples: usize,
    u_samples: usize,
) -> Result<ConditionHReport> {
    check_condition_h_in(problem, bounds, surface_samples, u_samples, 2.0)
}

/// [`check_condition_h`] with an explicit sampling half-width.
///
/// States are `a + (b - a) k / (u_samples + 1)`, `k = 1..=u_samples`, so an
/// odd count includes the midpoint. Zero tolerance is
/// `1e-10 (1 + max |H|)`; a zero is isolated when all its neighbours in the
/// sample (adjacent surface samples and adjacent states) are positive.
pub fn check_condition_h_in(
    problem: &RiemannProblem,
    bounds: &StateBounds,
    surface_samples: usize,
    u_samples: usize,
    half_width: f64,
) -> Result<ConditionHReport> {
    let n = problem.fluxes.dim();
    if problem.surface.dim() != n {
        return Err(Error::InvalidArgument(alloc::format!(
            "surface dimension {} differs from flux dimension {n}",
            problem.surface.dim()
        )));
    }
    let points = problem.surface.zero_level_samples(surface_samples, half_width)?;
    let (a, b) = (bounds.lower, bounds.upper);
    let us: Vec<f64> = (1..=u_samples.max(1))
        .map(|k| a + (b - a) * (k as f64) / ((u_samples.max(1) + 1) as f64))
        .collect();
    let d2: Vec<Vec<f64>> = us
        .iter()
        .map(|&u| (0..n).map(|i| problem.fluxes.d2f(i, u)).collect())
        .collect();
    let mut grad = vec![0.0; n];
    let mut h = vec![0.0; points.len() * us.len()];
    let (mut min_h, mut max_h) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut argmin = (points[0].clone(), us[0]);
    for (p, x) in points.iter().enumerate() {
        problem.surface.gradient(x, &mut grad);
        for (k, row) in d2.iter().enumerate() {
            let v: f64 = (0..n).map(|i| grad[i] * row[i]).sum();
            h[p * us.len() + k] = v;
            if v < min_h {
                min_h = v;
                argmin = (x.clone(), us[k]);
            }
            max_h = max_h.max(v);
        }
    }
    let tol = 1e-10 * (1.0 + min_h.abs().max(max_h.abs()));
    let nu = us.len();
    let at = |p: usize, k: usize| h[p * nu + k];
    let isolated_with = |positive: &dyn Fn(f64) -> bool| -> (usize, bool) {
        let mut zeros = 0;
        let mut isolated = true;
        for p in 0..points.len() {
            for k in 0..nu {
                if at(p, k).abs() <= tol {
                    zeros += 1;
                    let mut nb = Vec::new();
                    if p > 0 {
                        nb.push(at(p - 1, k));
                    }
                    if p + 1 < points.len() {
                        nb.push(at(p + 1, k));
                    }
                    if k > 0 {
                        nb.push(at(p, k - 1));
                    }
                    if k + 1 < nu {
                        nb.push(at(p, k + 1));
                    }
                    if !nb.iter().all(|&v| positive(v)) {
                        isolated = false;
                    }
                }
            }
        }
        (zeros, isolated)
    };
    let (zero_count, isolated_pos) = isolated_with(&|v| v > tol);
    let (_, isolated_neg) = isolated_with(&|v| v < -tol);
    let verdict = if min_h > tol {
        HVerdict::StrictlyPositive
    } else if min_h >= -tol && isolated_pos {
        HVerdict::NonNegativeWithIsolatedZeros
    } else {
        HVerdict::Fails
    };
    let uniformly_negative = max_h < -tol || (max_h <= tol && isolated_neg && min_h < -tol);
    Ok(ConditionHReport {
        min_h,
        max_h,
        argmin,
        interval: (a, b),
        verdict,
        zero_count,
        uniformly_negative,
    })
}

/// Shock, rarefaction or constant, by the ordering of the states.
pub fn classify_wave(problem: &RiemannProblem) -> WaveKind {
    if problem.u_minus > problem.u_plus {
        WaveKind::Shock
    } else if problem.u_minus < problem.u_plus {
        WaveKind::Rarefaction
    } else {
        WaveKind::Constant
    }
}

/// Knobs for [`WaveSolution::construct`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveOptions {
    /// Characteristic-flow tolerances.
    pub flow: FlowOptions,
    /// Horizon for state bounds of unbounded flows.
    pub t_horizon: f64,
    /// Surface points used by the Condition (H) audit.
    pub surface_samples: usize,
    /// States used by the Condition (H) audit.
    pub u_samples: usize,
    /// Half-width of the surface sampling box.
    pub sample_half_width: f64,
    /// Residual `|F|` accepted by the fan root solve.
    pub fan_root_tol: f64,
}

impl Default for WaveOptions {
    fn default() -> Self {
        Self {
            flow: FlowOptions::default(),
            t_horizon: 10.0,
            surface_samples: 101,
            u_samples: 101,
            sample_half_width: 2.0,
            fan_root_tol: 1e-13,
        }
    }
}

/// The constructed solution.
#[derive(Debug, Clone)]
pub struct WaveSolution {
    kind: WaveKind,
    flow: CharFlow,
    problem: RiemannProblem,
    bounds: StateBounds,
    condition_h: Option<ConditionHReport>,
    max_extinction: f64,
    negated: bool,
    options: WaveOptions,
}

/// Which piece of the solution a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Carries `ū(t, u_-)`.
    Left,
    /// Carries `ū(t, u_+)`.
    Right,
    /// Inside the rarefaction fan.
    Fan,
}

/// The solution frozen at one time, with the shifts needed for evaluation
/// computed once.
#[derive(Debug, Clone)]
pub struct TimeSlice<'a> {
    sol: &'a WaveSolution,
    t: f64,
    left: f64,
    right: f64,
    shift: Vec<f64>,
    rate: Vec<f64>,
    chi_minus: Vec<f64>,
    chi_plus: Vec<f64>,
    fan_table: Vec<(f64, Vec<f64>)>,
}

impl WaveSolution {
    /// Builds the solution of `problem`.
    ///
    /// When Condition (H) holds with the opposite sign everywhere, `M` is
    /// negated and the states swapped (the same data, described from the
    /// other side); a mixed-sign `H` is an error.
    pub fn construct(problem: RiemannProblem, options: WaveOptions) -> Result<Self> {
        let flow = CharFlow::new(problem.source.clone(), options.flow)?;
        Self::construct_with_flow(problem, flow, options)
    }

    /// Builds the solution reusing an analysed flow.
    pub fn construct_with_flow(mut problem: RiemannProblem, flow: CharFlow, options: WaveOptions) -> Result<Self> {
        let bounds = state_bounds(&flow, problem.u_minus, problem.u_plus, options.t_horizon)?;
        let mut negated = false;
        let condition_h = if problem.u_minus == problem.u_plus {
            None
        } else {
            let report = check_condition_h_in(
                &problem,
                &bounds,
                options.surface_samples,
                options.u_samples,
                options.sample_half_width,
            )?;
            if report.verdict == HVerdict::Fails {
                if !report.uniformly_negative {
                    return Err(Error::ConditionH {
                        min_h: report.min_h,
                        max_h: report.max_h,
                    });
                }
                problem.surface = problem.surface.negated();
                core::mem::swap(&mut problem.u_minus, &mut problem.u_plus);
                negated = true;
                Some(check_condition_h_in(
                    &problem,
                    &bounds,
                    options.surface_samples,
                    options.u_samples,
                    options.sample_half_width,
                )?)
            } else {
                Some(report)
            }
        };
        let kind = classify_wave(&problem);
        let ra = flow.extinction_time(problem.u_minus)?;
        let rb = flow.extinction_time(problem.u_plus)?;
        let max_extinction = if ra.t_star.is_finite() && rb.t_star.is_finite() && ra.target == rb.target {
            ra.t_star.max(rb.t_star)
        } else {
            f64::INFINITY
        };
        Ok(Self {
            kind,
            flow,
            problem,
            bounds,
            condition_h,
            max_extinction,
            negated,
            options,
        })
    }

    /// Wave type.
    pub fn kind(&self) -> WaveKind {
        self.kind
    }

    /// The characteristic flow.
    pub fn flow(&self) -> &CharFlow {
        &self.flow
    }

    /// The (possibly reoriented) problem being solved.
    pub fn problem(&self) -> &RiemannProblem {
        &self.problem
    }

    /// State bounds.
    pub fn state_bounds(&self) -> StateBounds {
        self.bounds
    }

    /// Condition (H) report (absent for constant data).
    pub fn condition_h(&self) -> Option<&ConditionHReport> {
        self.condition_h.as_ref()
    }

    /// Whether the surface was negated and the states swapped.
    pub fn negated(&self) -> bool {
        self.negated
    }

    /// Time after which both states sit at the same zero, `+∞` if never.
    pub fn max_extinction(&self) -> f64 {
        self.max_extinction
    }

    /// Freezes the solution at time `t`.
    pub fn at(&self, t: f64) -> Result<TimeSlice<'_>> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "time must be non-negative, got {t}"
            )));
        }
        let p = &self.problem;
        let n = p.fluxes.dim();
        let ta = self.flow.trajectory(p.u_minus)?;
        let tb = self.flow.trajectory(p.u_plus)?;
        let left = ta.u_at(t)?;
        let right = tb.u_at(t)?;
        let mut slice = TimeSlice {
            sol: self,
            t,
            left,
            right,
            shift: vec![0.0; n],
            rate: vec![0.0; n],
            chi_minus: vec![0.0; n],
            chi_plus: vec![0.0; n],
            fan_table: Vec::new(),
        };
        match self.kind {
            WaveKind::Shock => {
                slice.shift = bracket_chi_between(&ta, &tb, &p.fluxes, t)?;
                slice.rate = (0..n)
                    .map(|i| {
                        if (left - right).abs() <= 10.0 * self.flow.options().root_tol {
                            p.fluxes.df(i, right)
                        } else {
                            p.fluxes.divided_difference(i, left, right)
                        }
                    })
                    .collect();
            }
            WaveKind::Rarefaction => {
                slice.chi_minus = ta.chi_at(&p.fluxes, t)?;
                slice.chi_plus = tb.chi_at(&p.fluxes, t)?;
            }
            WaveKind::Constant => {}
        }
        Ok(slice)
    }

    /// `u(t, x)`.
    pub fn evaluate(&self, t: f64, x: &[f64]) -> Result<f64> {
        self.at(t)?.evaluate(x)
    }

    /// `M(x - [χ](t))` for a shock.
    pub fn shock_surface_residual(&self, t: f64, x: &[f64]) -> Result<f64> {
        if self.kind != WaveKind::Shock {
            return Err(Error::InvalidArgument(
                "shock residual requested for a non-shock wave".into(),
            ));
        }
        Ok(self.at(t)?.shock_residual(x))
    }

    /// The fan parameter `c(t, x)` of a rarefaction.
    pub fn rarefaction_root(&self, t: f64, x: &[f64]) -> Result<f64> {
        if self.kind != WaveKind::Rarefaction {
            return Err(Error::InvalidArgument(
                "fan root requested for a non-rarefaction wave".into(),
            ));
        }
        self.at(t)?.fan_root(x)
    }
}

impl<'a> TimeSlice<'a> {
    /// Time of the slice.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// `ū(t, u_-)`.
    pub fn left_state(&self) -> f64 {
        self.left
    }

    /// `ū(t, u_+)`.
    pub fn right_state(&self) -> f64 {
        self.right
    }

    /// Shock shift `[χ](t)`.
    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// `χ(t, u_-)` and `χ(t, u_+)`, the fan's boundary shifts.
    pub fn fan_shifts(&self) -> (&[f64], &[f64]) {
        (&self.chi_minus, &self.chi_plus)
    }

    /// `M(x - [χ](t))`.
    pub fn shock_residual(&self, x: &[f64]) -> f64 {
        self.sol.problem.surface.eval_shifted(x, &self.shift)
    }

    /// Unit space-time normal `(n_t, n_x)` of the shock at `x`, pointing
    /// into the `u_-` side (from the right trace toward the left trace).
    pub fn shock_normal(&self, x: &[f64]) -> Vec<f64> {
        let n = self.shift.len();
        let y: Vec<f64> = x.iter().zip(&self.shift).map(|(a, b)| a - b).collect();
        let mut grad = vec![0.0; n];
        self.sol.problem.surface.gradient(&y, &mut grad);
        let st: f64 = -(0..n).map(|i| grad[i] * self.rate[i]).sum::<f64>();
        let mut v = Vec::with_capacity(n + 1);
        v.push(-st);
        v.extend(grad.iter().map(|g| -g));
        let norm = math::norm(&v);
        v.iter_mut().for_each(|c| *c /= norm);
        v
    }

    /// Region of `x`. Points on a shock belong to the left side.
    pub fn region(&self, x: &[f64]) -> Region {
        let surf = &self.sol.problem.surface;
        match self.sol.kind {
            WaveKind::Shock | WaveKind::Constant => {
                if self.shock_residual(x) <= 0.0 {
                    Region::Left
                } else {
                    Region::Right
                }
            }
            WaveKind::Rarefaction => {
                if surf.eval_shifted(x, &self.chi_minus) < 0.0 {
                    Region::Left
                } else if surf.eval_shifted(x, &self.chi_plus) > 0.0 {
                    Region::Right
                } else {
                    Region::Fan
                }
            }
        }
    }

    /// `u(t, x)`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match self.sol.kind {
            WaveKind::Constant => Ok(self.left),
            WaveKind::Shock => Ok(if self.shock_residual(x) <= 0.0 {
                self.left
            } else {
                self.right
            }),
            WaveKind::Rarefaction => match self.region(x) {
                Region::Left => Ok(self.left),
                Region::Right => Ok(self.right),
                Region::Fan => {
                    let c = self.fan_root(x)?;
                    self.sol.flow.u_bar(self.t, c)
                }
            },
        }
    }

    /// Solves `M(x - χ(t, c)) = 0` for `c ∈ [u_-, u_+]`.
    pub fn fan_root(&self, x: &[f64]) -> Result<f64> {
        let sol = self.sol;
        let p = &sol.problem;
        let surf = &p.surface;
        let f_lo = surf.eval_shifted(x, &self.chi_minus);
        let f_hi = surf.eval_shifted(x, &self.chi_plus);
        // points on a fan edge up to round-off resolve to the edge state
        let slack = 1e-12;
        if f_lo.abs() <= slack && f_lo <= 0.0 {
            return Ok(p.u_minus);
        }
        if f_hi.abs() <= slack && f_hi >= 0.0 {
            return Ok(p.u_plus);
        }
        if f_lo < 0.0 || f_hi > 0.0 {
            return Err(Error::NotInFan {
                left: f_lo,
                right: f_hi,
            });
        }
        let (mut c_lo, mut c_hi, mut f_lo, mut f_hi) = (p.u_minus, p.u_plus, f_lo, f_hi);
        if self.fan_table.len() > 2 {
            let (mut lo, mut hi) = (0, self.fan_table.len() - 1);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                let f_mid = surf.eval_shifted(x, &self.fan_table[mid].1);
                if f_mid >= 0.0 {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                    f_hi = f_mid;
                }
            }
            c_lo = self.fan_table[lo].0;
            c_hi = self.fan_table[hi].0;
        }
        let mut failure = None;
        let c = solve_bracketed(
            |c| match sol.flow.trajectory(c).and_then(|tr| tr.chi_at(&p.fluxes, self.t)) {
                Ok(chi) => surf.eval_shifted(x, &chi),
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            },
            c_lo,
            c_hi,
            f_lo,
            f_hi,
            RootTolerance {
                f_tol: sol.options.fan_root_tol,
                x_tol: 1e-15,
                max_iter: 200,
            },
        );
        if let Some(e) = failure {
            return Err(e);
        }
        c
    }

    /// Tabulates `χ(t, c)` at `nodes` evenly spaced fan parameters so that
    /// later calls of [`Self::fan_root`] start from a narrow bracket. Useful
    /// when one slice is evaluated at many points; a no-op for other waves.
    pub fn with_fan_table(mut self, nodes: usize) -> Result<Self> {
        if self.sol.kind != WaveKind::Rarefaction || nodes < 3 {
            return Ok(self);
        }
        let p = &self.sol.problem;
        let mut table = Vec::with_capacity(nodes);
        for k in 0..nodes {
            let c = if k == nodes - 1 {
                p.u_plus
            } else {
                p.u_minus + (p.u_plus - p.u_minus) * (k as f64) / ((nodes - 1) as f64)
            };
            let chi = if k == 0 {
                self.chi_minus.clone()
            } else if k == nodes - 1 {
                self.chi_plus.clone()
            } else {
                self.sol.flow.trajectory(c)?.chi_at(&p.fluxes, self.t)?
            };
            table.push((c, chi));
        }
        self.fan_table = table;
        Ok(self)
    }

    /// Fan parameter together with its trajectory, for callers that also
    /// need the flow from `c`.
    pub fn fan_trajectory(&self, x: &[f64]) -> Result<Trajectory<'a>> {
        let c = self.fan_root(x)?;
        self.sol.flow.trajectory(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn problem(u_minus: f64, u_plus: f64) -> RiemannProblem {
        RiemannProblem {
            fluxes: catalog::burgers2d(),
            source: catalog::neg_cbrt(),
            surface: catalog::cubic_plane(),
            u_minus,
            u_plus,
        }
    }

    #[test]
    fn bounds_examples() {
        let f = CharFlow::new(catalog::neg_cbrt(), FlowOptions::default()).unwrap();
        let b = state_bounds(&f, 1.0, -1.0, 1.0).unwrap();
        assert_eq!((b.lower, b.upper), (-1.0, 1.0));
        let z = CharFlow::new(catalog::zero_source(), FlowOptions::default()).unwrap();
        let b = state_bounds(&z, 0.2, 0.7, 1.0).unwrap();
        assert_eq!((b.lower, b.upper), (0.2, 0.7));
        let p = CharFlow::new(catalog::pos_cbrt(), FlowOptions::default()).unwrap();
        let b = state_bounds(&p, 1.0, 2.0, 1.5).unwrap();
        assert_eq!(b.lower, 1.0);
        assert!((b.upper - libm::pow(libm::pow(2.0, 2.0 / 3.0) + 1.0, 1.5)).abs() < 1e-9);
        assert!(b.horizon_limited);
    }

    #[test]
    fn condition_h_examples() {
        let pr = problem(-1.0, 1.0);
        let bounds = StateBounds {
            lower: -1.0,
            upper: 1.0,
            horizon_limited: false,
        };
        let r = check_condition_h(&pr, &bounds, 101, 101).unwrap();
        assert_eq!(r.verdict, HVerdict::NonNegativeWithIsolatedZeros);
        assert_eq!(r.zero_count, 1);
        assert_eq!(r.argmin.0[0], 0.0);
        assert_eq!(r.argmin.1, 0.0);
        let one_d = RiemannProblem {
            fluxes: catalog::burgers1d(),
            source: catalog::zero_source(),
            surface: catalog::plane(vec![1.0], 0.0).unwrap(),
            u_minus: 1.0,
            u_plus: 0.0,
        };
        let r = check_condition_h(&one_d, &bounds, 11, 11).unwrap();
        assert_eq!(r.verdict, HVerdict::StrictlyPositive);
        assert_eq!((r.min_h, r.max_h), (1.0, 1.0));
        let neg = RiemannProblem {
            fluxes: catalog::polynomial_flux(&[vec![0.0, 0.0, -0.5]]).unwrap(),
            ..one_d.clone()
        };
        let r = check_condition_h(&neg, &bounds, 11, 11).unwrap();
        assert_eq!(r.verdict, HVerdict::Fails);
        assert!(r.uniformly_negative);
        let sol = WaveSolution::construct(neg, WaveOptions::default()).unwrap();
        assert!(sol.negated());
        assert_eq!(sol.kind(), WaveKind::Rarefaction);
    }

    #[test]
    fn mixed_sign_h_is_an_error() {
        let pr = RiemannProblem {
            fluxes: catalog::polynomial_flux(&[vec![0.0, 0.0, 0.0, 1.0 / 6.0]]).unwrap(),
            source: catalog::zero_source(),
            surface: catalog::plane(vec![1.0], 0.0).unwrap(),
            u_minus: 1.0,
            u_plus: -1.0,
        };
        assert!(matches!(
            WaveSolution::construct(pr, WaveOptions::default()),
            Err(Error::ConditionH { .. })
        ));
    }

    #[test]
    fn classification_and_extinction() {
        assert_eq!(classify_wave(&problem(1.0, 0.0)), WaveKind::Shock);
        assert_eq!(classify_wave(&problem(1.0, 1.0)), WaveKind::Constant);
        assert_eq!(classify_wave(&problem(-1.0, 1.0)), WaveKind::Rarefaction);
        let s = WaveSolution::construct(problem(1.0, 0.5), WaveOptions::default()).unwrap();
        assert!((s.max_extinction() - 1.5).abs() < 1e-12);
        let s = WaveSolution::construct(problem(1.0, -1.0), WaveOptions::default()).unwrap();
        assert!((s.max_extinction() - 1.5).abs() < 1e-12);
        let z = RiemannProblem {
            source: catalog::zero_source(),
            ..problem(1.0, 0.0)
        };
        assert_eq!(
            WaveSolution::construct(z, WaveOptions::default())
                .unwrap()
                .max_extinction(),
            f64::INFINITY
        );
    }

    #[test]
    fn symmetric_shock_stays_still() {
        let s = WaveSolution::construct(problem(1.0, -1.0), WaveOptions::default()).unwrap();
        for &t in &[0.3, 1.0, 1.4] {
            let sl = s.at(t).unwrap();
            for &(x, y) in &[(0.3, -0.2), (-1.0, 0.5)] {
                let r = sl.shock_residual(&[x, y]);
                assert!((r - (x * x * x + y)).abs() < 1e-12);
            }
        }
        let v = s.evaluate(1.0, &[-1.0, 0.0]).unwrap();
        assert!((v - 0.192_450_089_7).abs() < 1e-9);
    }

    #[test]
    fn initial_data_and_left_trace() {
        for (um, up) in [(1.0, 0.5), (-1.0, 1.0)] {
            let s = WaveSolution::construct(problem(um, up), WaveOptions::default()).unwrap();
            assert_eq!(s.evaluate(0.0, &[-0.5, 0.0]).unwrap(), um);
            assert_eq!(s.evaluate(0.0, &[0.5, 0.0]).unwrap(), up);
            assert_eq!(s.evaluate(0.0, &[0.5, -0.125]).unwrap(), um);
        }
    }

    #[test]
    fn fan_root_inverts_forward_map() {
        let s = WaveSolution::construct(problem(-1.0, 1.0), WaveOptions::default()).unwrap();
        let t = 0.3;
        let chi = s.flow().chi(&s.problem().fluxes, t, -0.5).unwrap();
        // a point on M(x - χ(t, -0.5)) = 0: pick x then solve for y
        let x = 0.2;
        let y = chi[1] - (x - chi[0]).powi(3);
        let c = s.rarefaction_root(t, &[x, y]).unwrap();
        assert!((c + 0.5).abs() < 1e-8, "{c}");
        let sl = s.at(t).unwrap();
        let (cm, cp) = sl.fan_shifts();
        let yl = cm[1] - (x - cm[0]).powi(3);
        assert!((sl.fan_root(&[x, yl]).unwrap() + 1.0).abs() < 1e-10);
        let yr = cp[1] - (x - cp[0]).powi(3);
        assert!((sl.fan_root(&[x, yr]).unwrap() - 1.0).abs() < 1e-10);
        assert!(matches!(sl.fan_root(&[x, yl - 1.0]), Err(Error::NotInFan { .. })));
    }

    #[test]
    fn extinct_after_max_extinction() {
        for (um, up) in [(1.0, 0.5), (1.0, -1.0), (-1.0, 1.0)] {
            let s = WaveSolution::construct(problem(um, up), WaveOptions::default()).unwrap();
            let sl = s.at(1.5).unwrap();
            for &(x, y) in &[(0.0, 0.0), (0.7, -0.3), (-1.0, 1.0), (0.2, 0.1)] {
                assert_eq!(sl.evaluate(&[x, y]).unwrap(), 0.0);
            }
        }
    }
}
