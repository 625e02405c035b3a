//! A monotone finite-difference solver for the viscous regularisation
//! `u_t + Σ f_i(u)_{x_i} = g(u) + εΔu` on a uniform grid in any dimension.
//!
//! Each step is a Strang splitting: half a step of the source, a full
//! explicit step of convection (global Lax-Friedrichs flux with the speed
//! bound taken from the current range) plus centered diffusion, and another
//! half step of the source. The default source step applies the exact
//! characteristic map `u ↦ ū(Δt/2, u)`, tabulated once per step size from a
//! [`CharFlow`] and interpolated with a monotone cubic. The exact map keeps
//! states that reach an absorbing zero pinned there, which explicit Euler
//! cannot do near a non-Lipschitz point.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::charflow::CharFlow;
use crate::error::{Error, Result};
use crate::flux::FluxSet;
use crate::grid::{GridField, Provenance};
use crate::math;
use crate::riemann::WaveSolution;
use crate::source::estimate_right_lipschitz;
use crate::verify::l1_distance_in_box;

/// How the source is advanced inside a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    /// Exact characteristic map `u ↦ ū(Δt/2, u)`.
    ExactSource,
    /// `u + (Δt/2) g(u)`, kept for comparison.
    ExplicitEulerSource,
}

/// Treatment of the domain edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Ghost cells copy the edge value.
    Outflow,
    /// Opposite edges are identified. The last grid point is the image of
    /// the first and is not stored separately.
    Periodic,
}

/// Parameters of a viscous run. The grid is taken from the initial field.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// Viscosity `ε >= 0`.
    pub epsilon: f64,
    /// Courant number in `(0, 1]`.
    pub cfl: f64,
    /// Output times, strictly increasing and non-negative.
    pub snapshots: Vec<f64>,
    /// Source treatment.
    pub splitting: Splitting,
    /// Edge treatment.
    pub boundary: Boundary,
    /// Fixed time step; the largest stable step when `None`.
    pub dt: Option<f64>,
}

impl SchemeConfig {
    /// Exact source, outflow edges, Courant number 0.9.
    pub fn new(epsilon: f64, snapshots: Vec<f64>) -> Self {
        Self {
            epsilon,
            cfl: 0.9,
            snapshots,
            splitting: Splitting::ExactSource,
            boundary: Boundary::Outflow,
            dt: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!(
                "viscosity must be finite and non-negative, got {}",
                self.epsilon
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!(
                "Courant number must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if self.snapshots.is_empty() {
            return Err(Error::Config("at least one snapshot time is required".into()));
        }
        if self.snapshots[0] < 0.0 || self.snapshots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "snapshot times must be non-negative and strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Output of [`solve_viscous`].
#[derive(Debug, Clone, PartialEq)]
pub struct ViscousRun {
    /// Snapshots on the initial grid.
    pub field: GridField,
    /// Largest time step used.
    pub dt: f64,
    /// Number of steps taken.
    pub steps: usize,
    /// Range `[a, b]` that every exact solution of the source ODE started
    /// in the initial range stays in up to the final time.
    pub range_bound: (f64, f64),
    /// The growth bound `(M_0 + c_0 T) e^{1 + c T}` with `c_0 = |g(0)|` and
    /// `c` the right-Lipschitz estimate of `g` on the range.
    pub apriori_bound: f64,
}

/// Grid points `lo, lo + dx, ..., hi`; `(hi - lo)/dx` must be an integer.
pub fn uniform_axis(lo: f64, hi: f64, dx: f64) -> Result<Vec<f64>> {
    if !(hi > lo) || !(dx > 0.0) {
        return Err(Error::Config(format!("bad axis [{lo}, {hi}] with spacing {dx}")));
    }
    let n = (hi - lo) / dx;
    let cells = math::floor(n + 0.5);
    if (n - cells).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::Config(format!("spacing {dx} does not divide [{lo}, {hi}]")));
    }
    let cells = cells as usize;
    Ok((0..=cells)
        .map(|j| if j == cells { hi } else { lo + dx * j as f64 })
        .collect())
}

/// Fritsch-Carlson monotone cubic on uniform nodes.
#[derive(Debug, Clone)]
struct Pchip {
    lo: f64,
    h: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(lo: f64, hi: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        let h = (hi - lo) / (n - 1) as f64;
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                let (a, b) = (delta[i - 1], delta[i]);
                d[i] = if a * b <= 0.0 { 0.0 } else { 2.0 * a * b / (a + b) };
            }
            let end = |d1: f64, d2: f64| {
                let v = 1.5 * d1 - 0.5 * d2;
                if v * d1 <= 0.0 {
                    0.0
                } else if d1 * d2 <= 0.0 && v.abs() > 3.0 * d1.abs() {
                    3.0 * d1
                } else {
                    v
                }
            };
            d[0] = end(delta[0], delta[1]);
            d[n - 1] = end(delta[n - 2], delta[n - 3]);
        }
        Self { lo, h, y, d }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let s = (x - self.lo) / self.h;
        let i = (s.max(0.0) as usize).min(n - 2);
        let u = s - i as f64;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.d[i] * self.h, self.d[i + 1] * self.h);
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * d0 + (-2.0 * u3 + 3.0 * u2) * y1 + (u3 - u2) * d1
    }
}

/// One interval of the source map: constant on a dead zone, or a cubic.
#[derive(Debug, Clone)]
enum Piece {
    Constant { lo: f64, hi: f64, value: f64 },
    Cubic { lo: f64, hi: f64, fit: Pchip },
}

impl Piece {
    fn hi(&self) -> f64 {
        match self {
            Piece::Constant { hi, .. } | Piece::Cubic { hi, .. } => *hi,
        }
    }

    fn lo(&self) -> f64 {
        match self {
            Piece::Constant { lo, .. } | Piece::Cubic { lo, .. } => *lo,
        }
    }
}

/// The tabulated map `u ↦ ū(τ, u)` on a range.
#[derive(Debug, Clone)]
struct SourceTable {
    tau: f64,
    pieces: Vec<Piece>,
    zeros: Vec<f64>,
    fast: FastLookup,
}

/// Linear interpolation of the piecewise table on a fine uniform grid.
/// Cells that contain a zero of `g` are flagged and left to the pieces,
/// since the map may jump there.
#[derive(Debug, Clone)]
struct FastLookup {
    lo: f64,
    inv_h: f64,
    y: Vec<f64>,
    exact_only: Vec<bool>,
}

const FAST_CELLS: usize = 1 << 16;

const TABLE_NODES: usize = 4097;

impl SourceTable {
    fn build(flow: &CharFlow, tau: f64, lo: f64, hi: f64) -> Result<Self> {
        let dec = flow.decomposition();
        let mut cuts: Vec<f64> = dec
            .boundary_points
            .iter()
            .copied()
            .chain(dec.plateau_intervals.iter().flat_map(|p| [p.lo, p.hi]))
            .filter(|&z| z > lo && z < hi)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let zeros = cuts.clone();
        let mut edges = vec![lo];
        edges.extend(cuts);
        edges.push(hi);
        let mut pieces = Vec::new();
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(b > a) {
                continue;
            }
            let fa = flow.u_bar(tau, a)?;
            let fb = flow.u_bar(tau, b)?;
            // states absorbed within τ share one value: split that dead
            // zone off at its exact front
            if fa == fb {
                pieces.push(Piece::Constant {
                    lo: a,
                    hi: b,
                    value: fa,
                });
                continue;
            }
            let absorbed_at = |s: f64| -> Result<Option<f64>> {
                let rec = flow.extinction_time(s)?;
                Ok((rec.t_star <= tau && rec.target.is_finite()).then_some(rec.target))
            };
            let (mut p, mut q) = (a, b);
            let mut tail = None;
            if let Some(z) = absorbed_at(a)? {
                p = Self::front(a, b, |s| Ok(absorbed_at(s)? == Some(z)))?;
                if p > a {
                    pieces.push(Piece::Constant { lo: a, hi: p, value: z });
                }
            }
            if let Some(z) = absorbed_at(b)? {
                q = Self::front(b, a, |s| Ok(absorbed_at(s)? == Some(z)))?;
                if q < b {
                    tail = Some(Piece::Constant { lo: q, hi: b, value: z });
                }
            }
            if q > p {
                pieces.push(Self::cubic(flow, tau, p, q)?);
            }
            pieces.extend(tail);
        }
        let mut table = Self {
            tau,
            pieces,
            zeros,
            fast: FastLookup {
                lo,
                inv_h: 0.0,
                y: Vec::new(),
                exact_only: Vec::new(),
            },
        };
        if hi > lo {
            let h = (hi - lo) / FAST_CELLS as f64;
            let y = (0..=FAST_CELLS)
                .map(|i| table.apply_pieces(flow, if i == FAST_CELLS { hi } else { lo + h * i as f64 }))
                .collect::<Result<Vec<f64>>>()?;
            let mut exact_only = vec![false; FAST_CELLS];
            for &z in &table.zeros {
                let i = ((z - lo) / h) as usize;
                for c in i.saturating_sub(1)..(i + 2).min(FAST_CELLS) {
                    exact_only[c] = true;
                }
            }
            table.fast = FastLookup {
                lo,
                inv_h: 1.0 / h,
                y,
                exact_only,
            };
        }
        Ok(table)
    }

    /// Last point, going from `inside` toward `outside`, where `pred` holds.
    fn front<P: Fn(f64) -> Result<bool>>(inside: f64, outside: f64, pred: P) -> Result<f64> {
        if pred(outside)? {
            return Ok(outside);
        }
        let (mut a, mut b) = (inside, outside);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if pred(m)? {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(a)
    }

    fn cubic(flow: &CharFlow, tau: f64, lo: f64, hi: f64) -> Result<Piece> {
        let h = (hi - lo) / (TABLE_NODES - 1) as f64;
        let y = (0..TABLE_NODES)
            .map(|i| {
                // end nodes sit just inside, off any stationary state
                let s = match i {
                    0 => lo + 1e-12 * (hi - lo),
                    _ if i + 1 == TABLE_NODES => hi - 1e-12 * (hi - lo),
                    _ => lo + h * i as f64,
                };
                flow.u_bar(tau, s)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Piece::Cubic {
            lo,
            hi,
            fit: Pchip::new(lo, hi, y),
        })
    }

    fn apply(&self, flow: &CharFlow, u: f64) -> Result<f64> {
        let f = &self.fast;
        let s = (u - f.lo) * f.inv_h;
        if s >= 0.0 && s < f.exact_only.len() as f64 {
            let i = s as usize;
            if !f.exact_only[i] {
                let w = s - i as f64;
                return Ok(f.y[i] + w * (f.y[i + 1] - f.y[i]));
            }
        }
        self.apply_pieces(flow, u)
    }

    fn apply_pieces(&self, flow: &CharFlow, u: f64) -> Result<f64> {
        if self.zeros.contains(&u) {
            return Ok(u);
        }
        let first = &self.pieces[0];
        let last = &self.pieces[self.pieces.len() - 1];
        if u < first.lo() || u > last.hi() {
            return flow.u_bar(self.tau, u);
        }
        let k = self.pieces.partition_point(|p| p.hi() < u).min(self.pieces.len() - 1);
        Ok(match &self.pieces[k] {
            Piece::Constant { value, .. } => *value,
            Piece::Cubic { fit, .. } => fit.eval(u),
        })
    }
}

/// Neighbour layout of a uniform grid, with the last axis fastest.
struct Layout {
    shape: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(shape: Vec<usize>) -> Self {
        let mut strides = vec![1; shape.len()];
        for k in (0..shape.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * shape[k + 1];
        }
        let total = shape.iter().product();
        Self { shape, strides, total }
    }

    /// Calls `visit(row, previous_row, next_row, len)` for every run of
    /// `len` contiguous cells that share their position along axis `k`,
    /// with neighbouring runs resolved by the boundary rule.
    fn for_each_run<F: FnMut(usize, usize, usize, usize)>(&self, k: usize, boundary: Boundary, mut visit: F) {
        let n = self.shape[k];
        let s = self.strides[k];
        let outer = self.total / (n * s);
        let periodic = boundary == Boundary::Periodic;
        for o in 0..outer {
            let base = o * n * s;
            for j in 0..n {
                let prev_j = match j {
                    0 if periodic => n - 1,
                    0 => 0,
                    _ => j - 1,
                };
                let next_j = match j {
                    _ if j + 1 < n => j + 1,
                    _ if periodic => 0,
                    _ => n - 1,
                };
                visit(base + j * s, base + prev_j * s, base + next_j * s, s);
            }
        }
    }
}

fn table_index(tables: &mut Vec<SourceTable>, flow: &CharFlow, tau: f64, lo: f64, hi: f64) -> Result<usize> {
    if let Some(i) = tables.iter().position(|tb| (tb.tau - tau).abs() <= 1e-14 * tau) {
        return Ok(i);
    }
    tables.push(SourceTable::build(flow, tau, lo, hi)?);
    Ok(tables.len() - 1)
}

fn axis_spacing(axis: &[f64], k: usize) -> Result<f64> {
    if axis.len() < 3 {
        return Err(Error::Config(format!("axis {} needs at least 3 points", k + 1)));
    }
    let h = (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64;
    if axis.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::Config(format!("axis {} is not uniform", k + 1)));
    }
    Ok(h)
}

/// Advances `initial` (a single time level at `t = 0`) through the viscous
/// equation and records the requested snapshots.
pub fn solve_viscous(
    config: &SchemeConfig,
    fluxes: &FluxSet,
    flow: &CharFlow,
    initial: &GridField,
) -> Result<ViscousRun> {
    config.validate()?;
    if initial.t_axis().len() != 1 || initial.t_axis()[0] != 0.0 {
        return Err(Error::Config("initial field must hold exactly the level t = 0".into()));
    }
    let dim = initial.dim();
    if dim != fluxes.dim() {
        return Err(Error::AxesMismatch(format!(
            "flux has dimension {}, grid {}",
            fluxes.dim(),
            dim
        )));
    }
    let axes = initial.space_axes().to_vec();
    let dx = axes
        .iter()
        .enumerate()
        .map(|(k, a)| axis_spacing(a, k))
        .collect::<Result<Vec<f64>>>()?;
    let periodic = config.boundary == Boundary::Periodic;
    // periodic grids drop the duplicated last point of every axis
    let shape: Vec<usize> = axes
        .iter()
        .map(|a| if periodic { a.len() - 1 } else { a.len() })
        .collect();
    let layout = Layout::new(shape.clone());
    let mut u: Vec<f64> = if periodic {
        let mut idx = vec![0usize; dim];
        (0..layout.total)
            .map(|c| {
                let mut rest = c;
                for k in (0..dim).rev() {
                    idx[k] = rest % shape[k];
                    rest /= shape[k];
                }
                initial.value(0, &idx)
            })
            .collect()
    } else {
        initial.time_level(0).to_vec()
    };

    let t_end = *config.snapshots.last().expect("validated");
    let (m0, m1) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let lo = m0.min(flow.u_bar(t_end, m0)?);
    let hi = m1.max(flow.u_bar(t_end, m1)?);
    let range_bound = (lo, hi);
    let source = flow.source();
    let m_abs = lo.abs().max(hi.abs());
    let c0 = source.eval(0.0).abs();
    let c2 = if hi > lo {
        estimate_right_lipschitz(source, lo, hi, 1000)?.max(0.0)
    } else {
        0.0
    };
    let apriori_bound = (m_abs + c0 * t_end) * math::exp(1.0 + c2 * t_end);

    let speeds: Vec<f64> = (0..dim).map(|i| fluxes.max_speed(i, lo, hi)).collect();
    let rate: f64 = (0..dim)
        .map(|k| speeds[k] / dx[k] + 2.0 * config.epsilon / (dx[k] * dx[k]))
        .sum();
    let dt_max = if rate > 0.0 { config.cfl / rate } else { f64::INFINITY };
    let dt_limit = match config.dt {
        Some(dt) if dt > dt_max * (1.0 + 1e-12) => {
            return Err(Error::Config(format!(
                "time step {dt} violates the stability bound {dt_max}"
            )))
        }
        Some(dt) if !(dt > 0.0) => return Err(Error::Config(format!("time step must be positive, got {dt}"))),
        Some(dt) => dt,
        None => dt_max,
    };

    let mut tables: Vec<SourceTable> = Vec::new();
    let mut out = Vec::with_capacity(config.snapshots.len() * initial.points_per_time());
    let mut scratch = vec![0.0; layout.total];
    let mut fvals = vec![0.0; layout.total];
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut dt_used: f64 = 0.0;
    for &target in &config.snapshots {
        let span = target - t;
        if span > 0.0 {
            let n = math::ceil(span / dt_limit - 1e-9).max(1.0) as usize;
            let dt = span / n as f64;
            dt_used = dt_used.max(dt);
            let exact = config.splitting == Splitting::ExactSource;
            let (half, full) = if exact {
                (
                    Some(table_index(&mut tables, flow, 0.5 * dt, lo, hi)?),
                    Some(table_index(&mut tables, flow, dt, lo, hi)?),
                )
            } else {
                (None, None)
            };
            let source_step = |u: &mut [f64], table: Option<usize>, tau: f64| -> Result<()> {
                match table {
                    Some(i) => {
                        for v in u.iter_mut() {
                            *v = tables[i].apply(flow, *v)?;
                        }
                    }
                    None => {
                        for v in u.iter_mut() {
                            *v += tau * source.eval(*v);
                        }
                    }
                }
                Ok(())
            };
            // adjacent exact half steps compose into one full step
            source_step(&mut u, half, 0.5 * dt)?;
            for step in 0..n {
                transport_step(&layout, &dx, config, fluxes, &mut u, &mut scratch, &mut fvals, dt);
                if step + 1 == n {
                    source_step(&mut u, half, 0.5 * dt)?;
                } else if exact {
                    source_step(&mut u, full, dt)?;
                } else {
                    source_step(&mut u, None, 0.5 * dt)?;
                    source_step(&mut u, None, 0.5 * dt)?;
                }
                steps += 1;
                t += dt;
                if u.iter().any(|v| !v.is_finite()) {
                    return Err(Error::SchemeBlowUp { step: steps, t });
                }
            }
            t = target;
        }
        if periodic {
            let mut idx = vec![0usize; dim];
            for flat in 0..initial.points_per_time() {
                initial.unflatten(flat, &mut idx);
                let mut c = 0;
                for k in 0..dim {
                    c = c * shape[k] + idx[k] % shape[k];
                }
                out.push(u[c]);
            }
        } else {
            out.extend_from_slice(&u);
        }
    }
    let field = GridField::new(config.snapshots.clone(), axes, out, Provenance::Viscous)?;
    Ok(ViscousRun {
        field,
        dt: dt_used,
        steps,
        range_bound,
        apriori_bound,
    })
}

#[allow(clippy::too_many_arguments)]
fn transport_step(
    layout: &Layout,
    dx: &[f64],
    config: &SchemeConfig,
    fluxes: &FluxSet,
    u: &mut [f64],
    next: &mut [f64],
    fvals: &mut [f64],
    dt: f64,
) {
    let (lo, hi) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    next.copy_from_slice(u);
    for k in 0..dx.len() {
        let alpha = fluxes.max_speed(k, lo, hi);
        for (f, &v) in fvals.iter_mut().zip(u.iter()) {
            *f = fluxes.f(k, v);
        }
        // Lax-Friedrichs flux difference plus diffusion, in stencil form
        let half_lam = 0.5 * dt / dx[k];
        let weight = half_lam * alpha + config.epsilon * dt / (dx[k] * dx[k]);
        let (u, f) = (&*u, &*fvals);
        if layout.strides[k] == 1 {
            let n = layout.shape[k];
            let periodic = config.boundary == Boundary::Periodic;
            for base in (0..layout.total).step_by(n) {
                let line = &u[base..base + n];
                let fl = &f[base..base + n];
                let out = &mut next[base..base + n];
                for j in 1..n - 1 {
                    out[j] +=
                        -half_lam * (fl[j + 1] - fl[j - 1]) + weight * (line[j + 1] - 2.0 * line[j] + line[j - 1]);
                }
                let (p0, n_last) = if periodic { (n - 1, 0) } else { (0, n - 1) };
                out[0] += -half_lam * (fl[1] - fl[p0]) + weight * (line[1] - 2.0 * line[0] + line[p0]);
                out[n - 1] +=
                    -half_lam * (fl[n_last] - fl[n - 2]) + weight * (line[n_last] - 2.0 * line[n - 1] + line[n - 2]);
            }
        } else {
            layout.for_each_run(k, config.boundary, |row, prev, nxt, len| {
                let out = &mut next[row..row + len];
                let (uc, up, un) = (&u[row..row + len], &u[prev..prev + len], &u[nxt..nxt + len]);
                let (fp, fn_) = (&f[prev..prev + len], &f[nxt..nxt + len]);
                for i in 0..len {
                    out[i] += -half_lam * (fn_[i] - fp[i]) + weight * (un[i] - 2.0 * uc[i] + up[i]);
                }
            });
        }
    }
    u.copy_from_slice(next);
}

/// One `(ε, Δx)` pair of a refinement ladder; `Δx` applies to every axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRung {
    /// Viscosity.
    pub epsilon: f64,
    /// Grid spacing.
    pub dx: f64,
}

/// Shared settings of a [`convergence_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct StudySetup {
    /// Computational box, one `(lo, hi)` per axis.
    pub domain: Vec<(f64, f64)>,
    /// Box where distances are measured.
    pub region: Vec<(f64, f64)>,
    /// Comparison time.
    pub t: f64,
    /// Courant number.
    pub cfl: f64,
    /// Source treatment.
    pub splitting: Splitting,
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Viscosity.
    pub epsilon: f64,
    /// Grid spacing.
    pub dx: f64,
    /// `∫ |u_ε - u| dx` over the region at the comparison time.
    pub distance: f64,
    /// Steps taken.
    pub steps: usize,
}

/// Runs the viscous solver from the reference's initial data for each rung
/// and measures the L¹ distance to the reference on the region. Rows come
/// back sorted by `(ε, Δx)`.
pub fn convergence_study(
    reference: &WaveSolution,
    rungs: &[LadderRung],
    setup: &StudySetup,
) -> Result<Vec<ConvergenceRow>> {
    let problem = reference.problem();
    let dim = problem.fluxes.dim();
    if setup.domain.len() != dim || setup.region.len() != dim {
        return Err(Error::AxesMismatch(format!("problem has dimension {dim}")));
    }
    let lo: Vec<f64> = setup.region.iter().map(|r| r.0).collect();
    let hi: Vec<f64> = setup.region.iter().map(|r| r.1).collect();
    let mut rows = Vec::with_capacity(rungs.len());
    for rung in rungs {
        let axes = setup
            .domain
            .iter()
            .map(|&(a, b)| uniform_axis(a, b, rung.dx))
            .collect::<Result<Vec<_>>>()?;
        let initial = GridField::from_solution(reference, vec![0.0], axes.clone())?;
        let mut config = SchemeConfig::new(rung.epsilon, vec![setup.t]);
        config.cfl = setup.cfl;
        config.splitting = setup.splitting;
        let run = solve_viscous(&config, &problem.fluxes, reference.flow(), &initial)?;
        let exact = GridField::from_solution(reference, vec![setup.t], axes)?;
        let distance = l1_distance_in_box(&run.field, &exact, setup.t, &lo, &hi)?;
        rows.push(ConvergenceRow {
            epsilon: rung.epsilon,
            dx: rung.dx,
            distance,
            steps: run.steps,
        });
    }
    rows.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon).then(a.dx.total_cmp(&b.dx)));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::charflow::FlowOptions;

    fn flow(source: crate::source::SourceTerm) -> CharFlow {
        CharFlow::new(source, FlowOptions::default()).unwrap()
    }

    fn field_1d(axis: Vec<f64>, f: impl Fn(f64) -> f64) -> GridField {
        let values = axis.iter().map(|&x| f(x)).collect();
        GridField::new(vec![0.0], vec![axis], values, Provenance::Oracle).unwrap()
    }

    #[test]
    fn uniform_axis_requires_whole_cells() {
        assert_eq!(uniform_axis(-1.0, 1.0, 0.5).unwrap().len(), 5);
        assert!(uniform_axis(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn pchip_reproduces_cubics_monotonically() {
        let y: Vec<f64> = (0..11).map(|i| (i as f64 / 10.0).powi(2)).collect();
        let p = Pchip::new(0.0, 1.0, y);
        for i in 0..100 {
            let x = i as f64 / 100.0;
            assert!((p.eval(x) - x * x).abs() < 2e-3);
            assert!(p.eval(x + 0.01) >= p.eval(x));
        }
    }

    #[test]
    fn source_table_matches_exact_map() {
        let fl = flow(catalog::neg_cbrt());
        let tau = 0.01;
        let table = SourceTable::build(&fl, tau, -1.2, 1.2).unwrap();
        let edge = math::powf(2.0 * tau / 3.0, 1.5);
        for i in 0..=240 {
            let s = -1.2 + 0.01 * i as f64;
            let want = math::spow(math::powf(s.abs(), 2.0 / 3.0) - 2.0 * tau / 3.0, 1.5).max(0.0) * math::sgn(s);
            let want = if s.abs() <= edge { 0.0 } else { want };
            assert!((table.apply(&fl, s).unwrap() - want).abs() < 1e-7, "s {s}");
        }
        assert_eq!(table.apply(&fl, 0.5 * edge).unwrap(), 0.0);
        assert_eq!(table.apply(&fl, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_data_follow_the_ode() {
        let fl = flow(catalog::neg_cbrt());
        let axis = uniform_axis(-1.0, 1.0, 1.0 / 32.0).unwrap();
        let initial = field_1d(axis, |_| 0.8);
        let config = SchemeConfig::new(1e-3, vec![0.25, 0.5]);
        let run = solve_viscous(&config, &catalog::burgers1d(), &fl, &initial).unwrap();
        for (it, &t) in [0.25, 0.5].iter().enumerate() {
            let want = fl.u_bar(t, 0.8).unwrap();
            for &v in run.field.time_level(it) {
                assert!((v - want).abs() < 1e-8, "{v} vs {want}");
            }
        }
    }

    #[test]
    fn explicit_euler_overshoots_zero_for_the_decaying_root() {
        let fl = flow(catalog::neg_cbrt());
        let axis = uniform_axis(-1.0, 1.0, 1.0 / 16.0).unwrap();
        let initial = field_1d(axis, |_| 1e-4);
        let mut config = SchemeConfig::new(0.0, vec![0.1]);
        config.dt = Some(0.01);
        let exact = solve_viscous(&config, &catalog::burgers1d(), &fl, &initial).unwrap();
        assert!(exact.field.time_level(0).iter().all(|&v| v == 0.0));
        config.splitting = Splitting::ExplicitEulerSource;
        let euler = solve_viscous(&config, &catalog::burgers1d(), &fl, &initial).unwrap();
        assert!(euler.field.time_level(0).iter().any(|&v| v != 0.0));
    }

    #[test]
    fn burgers_shock_moves_at_half_speed() {
        let fl = flow(catalog::zero_source());
        let dx = 1.0 / 256.0;
        let axis = uniform_axis(-1.0, 2.0, dx).unwrap();
        let initial = field_1d(axis.clone(), |x| if x < 0.0 { 1.0 } else { 0.0 });
        let config = SchemeConfig::new(0.0, vec![0.5]);
        let run = solve_viscous(&config, &catalog::burgers1d(), &fl, &initial).unwrap();
        let level = run.field.time_level(0);
        let j = level.iter().position(|&v| v < 0.5).unwrap();
        let (x0, x1) = (axis[j - 1], axis[j]);
        let crossing = x0 + (level[j - 1] - 0.5) / (level[j - 1] - level[j]) * (x1 - x0);
        assert!((crossing - 0.25).abs() <= 2.0 * dx, "{crossing}");
    }

    #[test]
    fn periodic_run_conserves_mass_without_source() {
        let fl = flow(catalog::zero_source());
        let axis = uniform_axis(0.0, 1.0, 1.0 / 64.0).unwrap();
        let initial = field_1d(axis.clone(), |x| math::cos(2.0 * core::f64::consts::PI * x));
        let mut config = SchemeConfig::new(1e-2, vec![0.1, 0.2]);
        config.boundary = Boundary::Periodic;
        let run = solve_viscous(&config, &catalog::burgers1d(), &fl, &initial).unwrap();
        let mass = |lvl: &[f64]| lvl[..lvl.len() - 1].iter().sum::<f64>();
        let m0 = mass(initial.time_level(0));
        for it in 0..2 {
            assert!((mass(run.field.time_level(it)) - m0).abs() < 1e-12);
            let lvl = run.field.time_level(it);
            assert_eq!(lvl[0], lvl[lvl.len() - 1]);
        }
    }

    #[test]
    fn sup_norm_does_not_grow_for_decaying_source() {
        let fl = flow(catalog::neg_cbrt());
        let axis = uniform_axis(-1.0, 1.0, 1.0 / 64.0).unwrap();
        let initial = field_1d(axis, |x| if x.abs() < 0.3 { -0.9 } else { 0.6 });
        let config = SchemeConfig::new(1e-3, vec![0.1, 0.2, 0.3, 0.4]);
        let run = solve_viscous(&config, &catalog::burgers1d(), &fl, &initial).unwrap();
        let mut prev = 0.9;
        for it in 0..4 {
            let m = run.field.time_level(it).iter().fold(0.0f64, |a, v| a.max(v.abs()));
            assert!(m <= prev + 1e-12);
            prev = m;
        }
        assert!(prev <= run.apriori_bound);
    }

    #[test]
    fn rejects_unstable_step() {
        let fl = flow(catalog::neg_cbrt());
        let axis = uniform_axis(-1.0, 1.0, 1.0 / 16.0).unwrap();
        let initial = field_1d(axis, |_| 1.0);
        let mut config = SchemeConfig::new(1e-3, vec![0.1]);
        config.dt = Some(0.1);
        assert!(matches!(
            solve_viscous(&config, &catalog::burgers1d(), &fl, &initial),
            Err(Error::Config(_))
        ));
    }
}
