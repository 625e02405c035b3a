//! Audits of candidate solutions: the weak form, the Kruzkov entropy
//! inequality, the Rankine-Hugoniot relation, the geometric entropy
//! condition at shocks, and the L¹ distance on a shrinking cone.
//!
//! Integrals over sampled fields use the trapezoid rule on the field's own
//! grid. Near discontinuities the integrands jump, so residuals carry an
//! `O(h)` discretisation error that tolerances must allow for.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flux::FluxSet;
use crate::grid::{trapezoid_weights, GridField};
use crate::math;
use crate::quad::{integrate, QuadTolerance};
use crate::riemann::{WaveKind, WaveSolution};
use crate::source::SourceTerm;

fn raw_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        math::exp(-1.0 / (1.0 - s * s))
    }
}

/// The scaled bump `δ_h(σ) = h^{-1} δ(σ / h)` with
/// `δ(σ) = C exp(-1 / (1 - σ²))` on `|σ| < 1`, normalised to unit mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    h: f64,
    c: f64,
}

impl Mollifier {
    /// Mollifier of half-width `h`.
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "mollifier width must be positive, got {h}"
            )));
        }
        let mass = integrate(raw_bump, -1.0, 1.0, QuadTolerance::absolute(1e-15)).value;
        Ok(Self { h, c: 1.0 / mass })
    }

    /// Half-width of the support.
    pub fn width(&self) -> f64 {
        self.h
    }

    /// Normalising constant `C` of the unscaled profile.
    pub fn constant(&self) -> f64 {
        self.c
    }

    /// `δ_h(σ)`.
    pub fn eval(&self, sigma: f64) -> f64 {
        self.c * raw_bump(sigma / self.h) / self.h
    }

    /// `δ_h'(σ)`.
    pub fn derivative(&self, sigma: f64) -> f64 {
        let s = sigma / self.h;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - s * s;
        self.c * raw_bump(s) * (-2.0 * s / (d * d)) / (self.h * self.h)
    }
}

/// Non-negative test function `φ(t, x) = δ_{h_0}(t - c_0) Π δ_{h_i}(x_i - c_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestBump {
    center: Vec<f64>,
    factors: Vec<Mollifier>,
}

impl TestBump {
    /// Bump centred at `center = (t, x_1, ..., x_n)` with half-widths
    /// `widths` on the same coordinates.
    pub fn new(center: Vec<f64>, widths: &[f64]) -> Result<Self> {
        if center.len() != widths.len() || center.len() < 2 {
            return Err(Error::InvalidArgument(
                "test bump needs matching centre and widths over (t, x)".into(),
            ));
        }
        let factors = widths.iter().map(|&h| Mollifier::new(h)).collect::<Result<Vec<_>>>()?;
        Ok(Self { center, factors })
    }

    /// Centre `(t, x)`.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// `φ(p)` at `p = (t, x)`.
    pub fn eval(&self, p: &[f64]) -> f64 {
        self.factors
            .iter()
            .zip(&self.center)
            .zip(p)
            .map(|((m, c), v)| m.eval(v - c))
            .product()
    }

    /// `∂φ/∂p_k` for every coordinate, time first.
    pub fn gradient(&self, p: &[f64], out: &mut [f64]) {
        let vals: Vec<f64> = self
            .factors
            .iter()
            .zip(&self.center)
            .zip(p)
            .map(|((m, c), v)| m.eval(v - c))
            .collect();
        for k in 0..self.factors.len() {
            let mut g = self.factors[k].derivative(p[k] - self.center[k]);
            for (j, v) in vals.iter().enumerate() {
                if j != k {
                    g *= v;
                }
            }
            out[k] = g;
        }
    }

    fn check_support(&self, field: &GridField) -> Result<()> {
        let axes = core::iter::once(field.t_axis()).chain(field.space_axes().iter().map(Vec::as_slice));
        for (axis_id, ((axis, m), c)) in axes.zip(&self.factors).zip(&self.center).enumerate() {
            let lo = c - m.width();
            let hi = c + m.width();
            if !(lo > axis[0] && hi < axis[axis.len() - 1]) {
                return Err(Error::SupportOutsideDomain { axis: axis_id });
            }
        }
        Ok(())
    }
}

/// `n · ([u], [f_1], ..., [f_n])` with `[u] = u_l - u_r`.
///
/// `normal` is the space-time vector `(n_t, n_1, ..., n_n)`.
pub fn rh_residual(fluxes: &FluxSet, normal: &[f64], u_l: f64, u_r: f64) -> f64 {
    let mut r = normal[0] * (u_l - u_r);
    for i in 0..fluxes.dim() {
        r += normal[i + 1] * (fluxes.f(i, u_l) - fluxes.f(i, u_r));
    }
    r
}

fn entropy_term(fluxes: &FluxSet, normal: &[f64], k: f64, base: f64) -> f64 {
    let mut v = normal[0] * (k - base);
    for i in 0..fluxes.dim() {
        v += normal[i + 1] * (fluxes.f(i, k) - fluxes.f(i, base));
    }
    v
}

fn entropy_grid(u_l: f64, u_r: f64, k_samples: usize) -> Result<Vec<f64>> {
    if !(u_l > u_r) {
        return Err(Error::Ordering { u_l, u_r });
    }
    let m = k_samples.max(2);
    Ok((0..m)
        .map(|j| u_r + (u_l - u_r) * (j as f64) / ((m - 1) as f64))
        .collect())
}

/// `min_k n · (k - u_l, f(k) - f(u_l))` over `k_samples` evenly spaced
/// `k ∈ [u_r, u_l]`. The normal points from the `u_r` side to the `u_l`
/// side; a non-negative margin means the jump is admissible.
pub fn geometric_entropy_margin(fluxes: &FluxSet, normal: &[f64], u_l: f64, u_r: f64, k_samples: usize) -> Result<f64> {
    Ok(entropy_grid(u_l, u_r, k_samples)?
        .into_iter()
        .map(|k| entropy_term(fluxes, normal, k, u_l))
        .fold(f64::INFINITY, f64::min))
}

/// The same margin measured from the right trace,
/// `min_k n · (k - u_r, f(k) - f(u_r))`. It agrees in sign with
/// [`geometric_entropy_margin`] whenever the Rankine-Hugoniot relation
/// holds, which makes it a cross-check.
pub fn geometric_entropy_margin_right(
    fluxes: &FluxSet,
    normal: &[f64],
    u_l: f64,
    u_r: f64,
    k_samples: usize,
) -> Result<f64> {
    Ok(entropy_grid(u_l, u_r, k_samples)?
        .into_iter()
        .map(|k| entropy_term(fluxes, normal, k, u_r))
        .fold(f64::INFINITY, f64::min))
}

/// Per-axis tabulation of a bump factor and its derivative over the grid
/// indices inside the support.
struct AxisTable {
    start: usize,
    val: Vec<f64>,
    der: Vec<f64>,
    w: Vec<f64>,
}

fn axis_table(axis: &[f64], m: &Mollifier, c: f64) -> AxisTable {
    let w_all = trapezoid_weights(axis);
    let lo = c - m.width();
    let hi = c + m.width();
    let start = axis.iter().position(|&v| v > lo).unwrap_or(axis.len());
    let end = axis.iter().rposition(|&v| v < hi).map_or(start, |e| e + 1).max(start);
    AxisTable {
        start,
        val: axis[start..end].iter().map(|&v| m.eval(v - c)).collect(),
        der: axis[start..end].iter().map(|&v| m.derivative(v - c)).collect(),
        w: w_all[start..end].to_vec(),
    }
}

/// Sums `Σ w · integrand(u, φ, ∇φ)` over the grid points inside the
/// bump's support.
fn bump_sum<F>(field: &GridField, bump: &TestBump, mut integrand: F) -> Result<f64>
where
    F: FnMut(f64, f64, &[f64]) -> f64,
{
    bump.check_support(field)?;
    let n = field.dim();
    let mut tables = Vec::with_capacity(n + 1);
    tables.push(axis_table(field.t_axis(), &bump.factors[0], bump.center[0]));
    for k in 0..n {
        tables.push(axis_table(
            &field.space_axes()[k],
            &bump.factors[k + 1],
            bump.center[k + 1],
        ));
    }
    if tables.iter().any(|t| t.val.is_empty()) {
        return Ok(0.0);
    }
    let mut counter = vec![0usize; n + 1];
    let mut idx = vec![0usize; n];
    let mut grad = vec![0.0; n + 1];
    let mut total = 0.0;
    loop {
        let mut phi = 1.0;
        let mut weight = 1.0;
        for (k, t) in tables.iter().enumerate() {
            phi *= t.val[counter[k]];
            weight *= t.w[counter[k]];
        }
        for k in 0..=n {
            let mut g = tables[k].der[counter[k]];
            for (j, t) in tables.iter().enumerate() {
                if j != k {
                    g *= t.val[counter[j]];
                }
            }
            grad[k] = g;
        }
        for k in 0..n {
            idx[k] = tables[k + 1].start + counter[k + 1];
        }
        let u = field.value(tables[0].start + counter[0], &idx);
        total += weight * integrand(u, phi, &grad);
        let mut k = n + 1;
        loop {
            if k == 0 {
                return Ok(total);
            }
            k -= 1;
            counter[k] += 1;
            if counter[k] < tables[k].val.len() {
                break;
            }
            counter[k] = 0;
        }
    }
}

/// Trapezoid value of the Kruzkov integral
/// `∬ |u-k| φ_t + sgn(u-k)(f_i(u) - f_i(k)) φ_{x_i} + sgn(u-k) g(u) φ`.
///
/// Entropy solutions give a value that is non-negative up to the
/// discretisation error.
pub fn kruzkov_residual(
    field: &GridField,
    fluxes: &FluxSet,
    source: &SourceTerm,
    k: f64,
    bump: &TestBump,
) -> Result<f64> {
    check_dims(field, fluxes)?;
    let n = fluxes.dim();
    let fk: Vec<f64> = (0..n).map(|i| fluxes.f(i, k)).collect();
    bump_sum(field, bump, |u, phi, grad| {
        let s = math::sgn(u - k);
        let mut v = (u - k).abs() * grad[0];
        for i in 0..n {
            v += s * (fluxes.f(i, u) - fk[i]) * grad[i + 1];
        }
        v + s * source.eval(u) * phi
    })
}

/// Trapezoid value of the weak-form integral
/// `∬ u φ_t + f_i(u) φ_{x_i} + g(u) φ`, zero for weak solutions.
pub fn weak_form_residual(field: &GridField, fluxes: &FluxSet, source: &SourceTerm, bump: &TestBump) -> Result<f64> {
    check_dims(field, fluxes)?;
    let n = fluxes.dim();
    bump_sum(field, bump, |u, phi, grad| {
        let mut v = u * grad[0];
        for i in 0..n {
            v += fluxes.f(i, u) * grad[i + 1];
        }
        v + source.eval(u) * phi
    })
}

fn check_dims(field: &GridField, fluxes: &FluxSet) -> Result<()> {
    if field.dim() != fluxes.dim() {
        return Err(Error::AxesMismatch(format!(
            "field has {} space axes, fluxes have dimension {}",
            field.dim(),
            fluxes.dim()
        )));
    }
    Ok(())
}

/// `∫_{|x| <= R - N t} |u(t, x) - v(t, x)| dx` by the trapezoid rule.
///
/// `speed` is the cone slope `N`; `t` must be a level of both fields and
/// satisfy `t <= R / N`.
pub fn l1_cone_distance(u: &GridField, v: &GridField, radius: f64, speed: f64, t: f64) -> Result<f64> {
    if !u.same_axes(v) {
        return Err(Error::AxesMismatch("fields do not share axes".into()));
    }
    if !(radius > 0.0) || !(speed >= 0.0) {
        return Err(Error::InvalidArgument("cone needs R > 0 and N >= 0".into()));
    }
    if speed * t > radius {
        return Err(Error::InvalidArgument(format!(
            "t = {t} exceeds the cone apex R/N = {}",
            radius / speed
        )));
    }
    let r = radius - speed * t;
    let it = u.time_index(t)?;
    Ok(ball_sum(u, v, it, r, |a, b| (a - b).abs()))
}

/// `∫_box |u(t, x) - v(t, x)| dx` by the trapezoid rule on the points of
/// the box `lo <= x <= hi`.
pub fn l1_distance_in_box(u: &GridField, v: &GridField, t: f64, lo: &[f64], hi: &[f64]) -> Result<f64> {
    if !u.same_axes(v) {
        return Err(Error::AxesMismatch("fields do not share axes".into()));
    }
    let it = u.time_index(t)?;
    let sub =
        |axis: &[f64], k: usize| -> Vec<f64> { axis.iter().copied().filter(|&x| x >= lo[k] && x <= hi[k]).collect() };
    let axes: Vec<Vec<f64>> = u.space_axes().iter().enumerate().map(|(k, a)| sub(a, k)).collect();
    let weights: Vec<Vec<f64>> = axes.iter().map(|a| trapezoid_weights(a)).collect();
    let offsets: Vec<usize> = u
        .space_axes()
        .iter()
        .zip(&axes)
        .map(|(full, part)| {
            part.first()
                .map_or(0, |f| full.iter().position(|x| x == f).unwrap_or(0))
        })
        .collect();
    if axes.iter().any(|a| a.is_empty()) {
        return Ok(0.0);
    }
    let n = u.dim();
    let mut counter = vec![0usize; n];
    let mut idx = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for k in 0..n {
            idx[k] = offsets[k] + counter[k];
            w *= weights[k][counter[k]];
        }
        total += w * (u.value(it, &idx) - v.value(it, &idx)).abs();
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(total);
            }
            k -= 1;
            counter[k] += 1;
            if counter[k] < axes[k].len() {
                break;
            }
            counter[k] = 0;
        }
    }
}

/// Trapezoid sum of `f(u, v)` over the ball `|x| <= r`. Each point is
/// weighted by the fraction of its cell inside the ball, estimated on an
/// `8^n` sub-lattice for cells that straddle the sphere.
fn ball_sum<F>(u: &GridField, v: &GridField, it: usize, r: f64, f: F) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    const SUB: usize = 8;
    let n = u.dim();
    let axes = u.space_axes();
    let weights: Vec<Vec<f64>> = axes.iter().map(|a| trapezoid_weights(a)).collect();
    let a = u.time_level(it);
    let b = v.time_level(it);
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut cell = vec![(0.0, 0.0); n];
    let mut sub = vec![0usize; n];
    let mut y = vec![0.0; n];
    let mut total = 0.0;
    for flat in 0..a.len() {
        u.unflatten(flat, &mut idx);
        let mut w = 1.0;
        let mut half_diag = 0.0;
        for k in 0..n {
            let ax = &axes[k];
            let i = idx[k];
            x[k] = ax[i];
            w *= weights[k][i];
            let lo = if i == 0 { ax[i] } else { 0.5 * (ax[i - 1] + ax[i]) };
            let hi = if i + 1 == ax.len() {
                ax[i]
            } else {
                0.5 * (ax[i] + ax[i + 1])
            };
            cell[k] = (lo, hi);
            half_diag += 0.25 * (hi - lo) * (hi - lo);
        }
        if w == 0.0 {
            continue;
        }
        let dist = math::norm(&x);
        let half_diag = math::sqrt(half_diag) * 1.0000001;
        let frac = if dist + half_diag <= r {
            1.0
        } else if dist - half_diag > r {
            0.0
        } else {
            sub.iter_mut().for_each(|s| *s = 0);
            let mut inside = 0usize;
            let mut count = 0usize;
            loop {
                for k in 0..n {
                    let (lo, hi) = cell[k];
                    y[k] = lo + (hi - lo) * (sub[k] as f64 + 0.5) / SUB as f64;
                }
                count += 1;
                if math::norm(&y) <= r {
                    inside += 1;
                }
                let mut k = n;
                let mut done = true;
                while k > 0 {
                    k -= 1;
                    sub[k] += 1;
                    if sub[k] < SUB {
                        done = false;
                        break;
                    }
                    sub[k] = 0;
                }
                if done {
                    break;
                }
            }
            inside as f64 / count as f64
        };
        if frac > 0.0 {
            total += frac * w * f(a[flat], b[flat]);
        }
    }
    total
}

/// Centered-difference residual `u_t + Σ f_i(u)_{x_i} - g(u)` of an
/// evaluator at `(t, x)` with step `h`.
pub fn smooth_residual<E>(eval: E, fluxes: &FluxSet, source: &SourceTerm, t: f64, x: &[f64], h: f64) -> Result<f64>
where
    E: Fn(f64, &[f64]) -> Result<f64>,
{
    let n = x.len();
    let u0 = eval(t, x)?;
    let mut r = (eval(t + h, x)? - eval(t - h, x)?) / (2.0 * h);
    let mut y = x.to_vec();
    for i in 0..n {
        y[i] = x[i] + h;
        let up = eval(t, &y)?;
        y[i] = x[i] - h;
        let dn = eval(t, &y)?;
        y[i] = x[i];
        r += (fluxes.f(i, up) - fluxes.f(i, dn)) / (2.0 * h);
    }
    Ok(r - source.eval(u0))
}

/// Largest `|RH residual|` and smallest entropy margin over sampled shock
/// points.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockAudit {
    /// Number of surface points audited.
    pub points: usize,
    /// `max |n · ([u], [f])|`.
    pub max_rh: f64,
    /// `min` geometric entropy margin.
    pub min_margin: f64,
    /// Point `(t, x)` with the smallest margin.
    pub worst: Vec<f64>,
}

impl ShockAudit {
    /// Whether both measures are within the given tolerances.
    pub fn passes(&self, rh_tol: f64, margin_tol: f64) -> bool {
        self.points > 0 && self.max_rh <= rh_tol && self.min_margin >= -margin_tol
    }

    fn empty() -> Self {
        Self {
            points: 0,
            max_rh: 0.0,
            min_margin: f64::INFINITY,
            worst: Vec::new(),
        }
    }

    /// Adds one audited point.
    pub fn record(&mut self, point: Vec<f64>, rh: f64, margin: f64) {
        self.points += 1;
        self.max_rh = self.max_rh.max(rh.abs());
        if margin < self.min_margin {
            self.min_margin = margin;
            self.worst = point;
        }
    }
}

/// Audits the shock of a constructed solution: at each time, `per_time`
/// surface points (the initial surface sampled in `[-half_width,
/// half_width]` and shifted by `[χ](t)`) are checked with the traces
/// `ū(t, u_±)` and the normal of the moving surface.
pub fn shock_audit(
    sol: &WaveSolution,
    times: &[f64],
    per_time: usize,
    half_width: f64,
    k_samples: usize,
) -> Result<ShockAudit> {
    if sol.kind() != WaveKind::Shock {
        return Err(Error::InvalidArgument(
            "shock audit requested for a non-shock wave".into(),
        ));
    }
    let p = sol.problem();
    let base = p.surface.zero_level_samples(per_time, half_width)?;
    let mut audit = ShockAudit::empty();
    for &t in times {
        let slice = sol.at(t)?;
        let (ul, ur) = (slice.left_state(), slice.right_state());
        for y in &base {
            let x: Vec<f64> = y.iter().zip(slice.shift()).map(|(a, b)| a + b).collect();
            let normal = slice.shock_normal(&x);
            let rh = rh_residual(&p.fluxes, &normal, ul, ur);
            let margin = geometric_entropy_margin(&p.fluxes, &normal, ul, ur, k_samples)?;
            let mut point = vec![t];
            point.extend_from_slice(&x);
            audit.record(point, rh, margin);
        }
    }
    Ok(audit)
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// Short name of the check.
    pub name: String,
    /// Where it was evaluated.
    pub location: String,
    /// Measured value.
    pub value: f64,
    /// Tolerance it was compared with.
    pub tolerance: f64,
    /// Outcome.
    pub passed: bool,
}

/// A list of checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    /// Checks in the order they ran.
    pub checks: Vec<Check>,
}

impl VerificationReport {
    /// Empty report.
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a check.
    pub fn push(
        &mut self,
        name: impl Into<String>,
        location: impl Into<String>,
        value: f64,
        tolerance: f64,
        passed: bool,
    ) {
        self.checks.push(Check {
            name: name.into(),
            location: location.into(),
            value,
            tolerance,
            passed,
        });
    }

    /// Whether every check passed.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Number of failed checks.
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::grid::{linspace, Provenance};

    #[test]
    fn mollifier_has_unit_mass_and_compact_support() {
        for h in [0.05, 0.2, 1.0] {
            let m = Mollifier::new(h).unwrap();
            let mass = integrate(|s| m.eval(s), -h, h, QuadTolerance::absolute(1e-14)).value;
            assert!((mass - 1.0).abs() < 1e-8, "h = {h}: mass {mass}");
            assert_eq!(m.eval(h), 0.0);
            assert_eq!(m.eval(-1.5 * h), 0.0);
            let s = 0.3 * h;
            let fd = (m.eval(s + 1e-7) - m.eval(s - 1e-7)) / 2e-7;
            assert!((fd - m.derivative(s)).abs() < 1e-5 * (1.0 + fd.abs()));
        }
        assert!((Mollifier::new(1.0).unwrap().constant() - 2.252_283_620_5).abs() < 1e-8);
    }

    #[test]
    fn rh_for_burgers_unit_shock() {
        let f = catalog::burgers1d();
        let n = [-0.5 / 1.25f64.sqrt(), 1.0 / 1.25f64.sqrt()];
        assert!(rh_residual(&f, &n, 1.0, 0.0).abs() < 1e-15);
        assert_eq!(rh_residual(&f, &n, 0.3, 0.3), 0.0);
        let swapped = rh_residual(&f, &[-n[0], -n[1]], 0.0, 1.0);
        assert_eq!(swapped, rh_residual(&f, &n, 1.0, 0.0));
    }

    #[test]
    fn entropy_margin_sign_follows_normal_orientation() {
        let f = catalog::burgers1d();
        // x = t/2 with u_l = 1 on the left: the normal into the left side
        let s = 1.25f64.sqrt();
        let n = [0.5 / s, -1.0 / s];
        let m = geometric_entropy_margin(&f, &n, 1.0, 0.0, 101).unwrap();
        assert!(m.abs() < 1e-15);
        let interior = entropy_term(&f, &n, 0.5, 1.0);
        assert!((interior - 0.125 / s).abs() < 1e-15);
        let rev = geometric_entropy_margin(&f, &[-n[0], -n[1]], 1.0, 0.0, 101).unwrap();
        assert!(rev < -0.1);
        let right = geometric_entropy_margin_right(&f, &n, 1.0, 0.0, 101).unwrap();
        assert!(right >= -1e-15);
        assert!(matches!(
            geometric_entropy_margin(&f, &n, 0.0, 1.0, 11),
            Err(Error::Ordering { .. })
        ));
    }

    fn constant_field(c: f64) -> GridField {
        GridField::sample(
            linspace(0.0, 1.0, 21),
            vec![linspace(-1.0, 1.0, 41)],
            Provenance::Oracle,
            |_, _| Ok(c),
        )
        .unwrap()
    }

    #[test]
    fn kruzkov_vanishes_on_stationary_constant() {
        let field = constant_field(0.0);
        let bump = TestBump::new(vec![0.5, 0.0], &[0.3, 0.5]).unwrap();
        let r = kruzkov_residual(&field, &catalog::burgers1d(), &catalog::neg_cbrt(), 0.0, &bump).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn kruzkov_extremes_are_plus_minus_weak_form() {
        let field = GridField::sample(
            linspace(0.0, 1.0, 41),
            vec![linspace(-1.0, 1.0, 81)],
            Provenance::Oracle,
            |t, x| Ok(if x[0] <= 0.5 * t { 1.0 } else { 0.0 }),
        )
        .unwrap();
        let f = catalog::burgers1d();
        let g = catalog::zero_source();
        let bump = TestBump::new(vec![0.5, 0.2], &[0.3, 0.4]).unwrap();
        let w = weak_form_residual(&field, &f, &g, &bump).unwrap();
        let hi = kruzkov_residual(&field, &f, &g, 2.0, &bump).unwrap();
        let lo = kruzkov_residual(&field, &f, &g, -1.0, &bump).unwrap();
        // the k-dependent part integrates ∂φ exactly to zero only up to the
        // trapezoid error of a smooth function, which is tiny here
        assert!((lo - w).abs() < 1e-6, "lo {lo} w {w}");
        assert!((hi + w).abs() < 1e-6, "hi {hi} w {w}");
    }

    #[test]
    fn support_outside_grid_is_rejected() {
        let field = constant_field(0.0);
        let bump = TestBump::new(vec![0.1, 0.0], &[0.2, 0.5]).unwrap();
        let err = kruzkov_residual(&field, &catalog::burgers1d(), &catalog::zero_source(), 0.0, &bump);
        assert!(matches!(err, Err(Error::SupportOutsideDomain { axis: 0 })));
    }

    #[test]
    fn l1_distances() {
        let a = constant_field(0.0);
        let b = constant_field(0.5);
        assert_eq!(l1_cone_distance(&a, &a, 1.0, 1.0, 0.5).unwrap(), 0.0);
        let d = l1_cone_distance(&a, &b, 1.0, 1.0, 0.5).unwrap();
        assert!((d - 0.5).abs() < 1e-12, "{d}");
        let boxed = l1_distance_in_box(&a, &b, 0.5, &[-0.5], &[1.0]).unwrap();
        assert!((boxed - 0.75).abs() < 1e-12);
        assert!(l1_cone_distance(&a, &b, 1.0, 1.0, 0.33).is_err());
        assert!(l1_cone_distance(&a, &b, 1.0, 2.0, 0.75).is_err());
    }
}
