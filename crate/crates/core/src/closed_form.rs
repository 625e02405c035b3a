//! Explicit solutions of
//! `u_t + (u²/2)_x + (u⁴/4)_y = ∓u^{1/3}` with Riemann data separated by
//! `x³ + y = 0` (`u_-` where `x³ + y < 0`).
//!
//! With the decaying source `-u^{1/3}` every state reaches zero in the
//! finite time `1.5|s|^{2/3}` and the Riemann solution is unique
//! ([`DecayOracle`]). With the growing source `u^{1/3}` the flow from
//! `s = 0` may stay at zero or leave it in either direction after any
//! delay, and each choice yields a different admissible solution
//! ([`growth_candidates`]).
//!
//! Everything here is written directly from the explicit formulas with its
//! own quadrature and bisection; nothing is shared with
//! [`charflow`](crate::charflow) or [`riemann`](crate::riemann), so the
//! two can be compared as independent computations.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::catalog;
use crate::error::{Error, Result};
use crate::grid::{linspace, trapezoid_weights, GridField, Provenance};
use crate::math::{self, powf, sgn};
use crate::riemann::Region;
use crate::verify::{geometric_entropy_margin, l1_distance_in_box, rh_residual, smooth_residual};

const Q: f64 = 2.0 / 3.0;
const C5: f64 = 3.0 / 5.0;
const C11: f64 = 3.0 / 11.0;

fn pos(v: f64) -> f64 {
    v.max(0.0)
}

fn abs23(s: f64) -> f64 {
    powf(s.abs(), Q)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Composite Simpson rule with `panels` (even) subintervals.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2) + panels % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to a bracket width
/// of a few ulps. `f(lo)` and `f(hi)` must differ in sign (zero counts as
/// either).
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let lo_neg = f_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// Decaying source g = -u^{1/3}
// ---------------------------------------------------------------------------

/// Extinction time `1.5|s|^{2/3}` for `g = -u^{1/3}`.
pub fn decay_extinction(s: f64) -> f64 {
    1.5 * abs23(s)
}

/// `ū(t, s) = sgn(s)(|s|^{2/3} - 2t/3)^{3/2}` before extinction, zero after.
pub fn decay_ubar(t: f64, s: f64) -> f64 {
    if t == 0.0 {
        return s;
    }
    if t >= decay_extinction(s) {
        return 0.0;
    }
    sgn(s) * powf(abs23(s) - Q * t, 1.5)
}

/// `(χ_1, χ_2)(t, s)` for `g = -u^{1/3}`, frozen after extinction.
pub fn decay_chi(t: f64, s: f64) -> [f64; 2] {
    let a = s.abs();
    if t >= decay_extinction(s) {
        return [C5 * sgn(s) * powf(a, 5.0 / 3.0), C11 * sgn(s) * powf(a, 11.0 / 3.0)];
    }
    let r = pos(abs23(s) - Q * t);
    [
        C5 * sgn(s) * (powf(a, 5.0 / 3.0) - powf(r, 2.5)),
        C11 * sgn(s) * (powf(a, 11.0 / 3.0) - powf(r, 5.5)),
    ]
}

/// `P(t) = ∫_0^t (ū²(τ, u_-) ū(τ, u_+) + ū(τ, u_-) ū²(τ, u_+)) dτ`.
pub fn decay_p(t: f64, u_minus: f64, u_plus: f64) -> f64 {
    let end = t.min(decay_extinction(u_minus)).min(decay_extinction(u_plus));
    if !(end > 0.0) {
        return 0.0;
    }
    let f = |tau: f64| {
        let a = decay_ubar(tau, u_minus);
        let b = decay_ubar(tau, u_plus);
        a * a * b + a * b * b
    };
    simpson(&f, 0.0, end, 1e-15)
}

/// The four configurations of the decaying-source Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// Shock with `|u_-| > |u_+|`: the right state dies first.
    ShockBig,
    /// Shock with `|u_-| < |u_+|`: the left state dies first.
    ShockSmall,
    /// Shock with `u_- = -u_+ > 0`: the surface does not move.
    ShockSymmetric,
    /// Rarefaction with `u_- < 0 < u_+`.
    Rarefaction,
}

/// Exact solution for `g = -u^{1/3}` with states `u_-`, `u_+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayOracle {
    u_minus: f64,
    u_plus: f64,
    tag: CaseTag,
}

/// The decaying-source solution at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySlice {
    oracle: DecayOracle,
    t: f64,
    left: f64,
    right: f64,
    shift: [f64; 2],
    chi_minus: [f64; 2],
    chi_plus: [f64; 2],
}

impl DecayOracle {
    /// Selects the case from the states. Rarefactions are available for
    /// `u_- < 0 < u_+`.
    pub fn new(u_minus: f64, u_plus: f64) -> Result<Self> {
        if !u_minus.is_finite() || !u_plus.is_finite() {
            return Err(Error::InvalidArgument("states must be finite".into()));
        }
        let tag = if u_minus > u_plus {
            if u_minus.abs() > u_plus.abs() {
                CaseTag::ShockBig
            } else if u_minus.abs() < u_plus.abs() {
                CaseTag::ShockSmall
            } else {
                CaseTag::ShockSymmetric
            }
        } else if u_minus < 0.0 && u_plus > 0.0 {
            CaseTag::Rarefaction
        } else {
            return Err(Error::NotApplicable(format!(
                "no explicit solution for u_- = {u_minus}, u_+ = {u_plus}"
            )));
        };
        Ok(Self { u_minus, u_plus, tag })
    }

    /// Case selected by the states.
    pub fn tag(&self) -> CaseTag {
        self.tag
    }

    /// `u_-`.
    pub fn u_minus(&self) -> f64 {
        self.u_minus
    }

    /// `u_+`.
    pub fn u_plus(&self) -> f64 {
        self.u_plus
    }

    /// Time after which the solution vanishes identically.
    pub fn max_extinction(&self) -> f64 {
        decay_extinction(self.u_minus).max(decay_extinction(self.u_plus))
    }

    /// The solution at time `t`, with the shifts computed once.
    pub fn slice(&self, t: f64) -> Result<DecaySlice> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
        }
        let (um, up) = (self.u_minus, self.u_plus);
        let mut slice = DecaySlice {
            oracle: *self,
            t,
            left: decay_ubar(t, um),
            right: decay_ubar(t, up),
            shift: [0.0; 2],
            chi_minus: decay_chi(t, um),
            chi_plus: decay_chi(t, up),
        };
        match self.tag {
            CaseTag::ShockSymmetric | CaseTag::Rarefaction => {}
            CaseTag::ShockBig | CaseTag::ShockSmall => {
                // the surface moves with both states until the smaller one
                // dies, then with the surviving state against zero
                let t_switch = decay_extinction(if self.tag == CaseTag::ShockBig { up } else { um }).min(t);
                let (cm, cp) = if self.tag == CaseTag::ShockBig {
                    (decay_chi(t, um), decay_chi(t_switch, up))
                } else {
                    (decay_chi(t_switch, um), decay_chi(t, up))
                };
                let p = decay_p(t_switch, um, up);
                slice.shift = [0.5 * (cm[0] + cp[0]), 0.25 * (cm[1] + cp[1] + p)];
            }
        }
        Ok(slice)
    }

    /// `u(t, x, y)`.
    pub fn value(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.slice(t)?.value(x, y)
    }
}

impl DecaySlice {
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

    /// Shock shift `([χ_1], [χ_2])`; zero for the symmetric shock and the
    /// rarefaction.
    pub fn shift(&self) -> [f64; 2] {
        self.shift
    }

    /// Shock surface function `(x - [χ_1])³ + y - [χ_2]`.
    pub fn surface(&self, x: f64, y: f64) -> f64 {
        let d = x - self.shift[0];
        d * d * d + y - self.shift[1]
    }

    fn edge(chi: [f64; 2], x: f64, y: f64) -> f64 {
        let d = x - chi[0];
        d * d * d + y - chi[1]
    }

    /// `(x + (3/5)(2t/3)^{5/2})³ + y + (3/11)(2t/3)^{11/2}`: the image of
    /// the initial surface under the flow from `0⁻`.
    fn neg_expr(&self, x: f64, y: f64) -> f64 {
        let q = Q * self.t;
        let d = x + C5 * powf(q, 2.5);
        d * d * d + y + C11 * powf(q, 5.5)
    }

    fn pos_expr(&self, x: f64, y: f64) -> f64 {
        let q = Q * self.t;
        let d = x - C5 * powf(q, 2.5);
        d * d * d + y - C11 * powf(q, 5.5)
    }

    /// Which piece of the solution `(x, y)` lies in. For shocks this is the
    /// side of the surface (the surface itself counts as left).
    pub fn region(&self, x: f64, y: f64) -> Region {
        match self.oracle.tag {
            CaseTag::Rarefaction => {
                if self.t == 0.0 {
                    return if x * x * x + y <= 0.0 {
                        Region::Left
                    } else {
                        Region::Right
                    };
                }
                if Self::edge(self.chi_minus, x, y) < 0.0 {
                    Region::Left
                } else if Self::edge(self.chi_plus, x, y) > 0.0 {
                    Region::Right
                } else {
                    Region::Fan
                }
            }
            CaseTag::ShockSymmetric => {
                if x * x * x + y <= 0.0 {
                    Region::Left
                } else {
                    Region::Right
                }
            }
            _ => {
                if self.surface(x, y) <= 0.0 {
                    Region::Left
                } else {
                    Region::Right
                }
            }
        }
    }

    /// Fan parameter `c_±(t, x, y)` for points of the rarefaction that are
    /// reached by a non-absorbed characteristic; `None` elsewhere.
    pub fn fan_parameter(&self, x: f64, y: f64) -> Option<f64> {
        if self.oracle.tag != CaseTag::Rarefaction || self.region(x, y) != Region::Fan {
            return None;
        }
        let t = self.t;
        let q = Q * t;
        let (um, up) = (self.oracle.u_minus, self.oracle.u_plus);
        if t < decay_extinction(um) && self.neg_expr(x, y) < 0.0 {
            let phi = |c: f64| {
                let a = c.abs();
                let r = pos(abs23(c) - q);
                let d = x + C5 * (powf(a, 5.0 / 3.0) - powf(r, 2.5));
                d * d * d + y + C11 * (powf(a, 11.0 / 3.0) - powf(r, 5.5))
            };
            return Some(bisect(phi, um, -powf(q, 1.5)));
        }
        if t < decay_extinction(up) && self.pos_expr(x, y) > 0.0 {
            let phi = |c: f64| {
                let a = c.abs();
                let r = pos(abs23(c) - q);
                let d = x - C5 * (powf(a, 5.0 / 3.0) - powf(r, 2.5));
                d * d * d + y - C11 * (powf(a, 11.0 / 3.0) - powf(r, 5.5))
            };
            return Some(bisect(phi, powf(q, 1.5), up));
        }
        None
    }

    /// `u(t, x, y)`; points on a shock take the left value.
    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        let o = &self.oracle;
        let t = self.t;
        if t >= o.max_extinction() {
            return Ok(0.0);
        }
        match o.tag {
            CaseTag::ShockSymmetric => Ok(if x * x * x + y <= 0.0 { self.left } else { self.right }),
            CaseTag::ShockBig | CaseTag::ShockSmall => Ok(if self.surface(x, y) <= 0.0 {
                self.left
            } else {
                self.right
            }),
            CaseTag::Rarefaction => match self.region(x, y) {
                Region::Left => Ok(self.left),
                Region::Right => Ok(self.right),
                Region::Fan => Ok(match self.fan_parameter(x, y) {
                    Some(c) => sgn(c) * powf(pos(abs23(c) - Q * t), 1.5),
                    None => 0.0,
                }),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Growing source g = u^{1/3}
// ---------------------------------------------------------------------------

/// `ū(t, s) = sgn(s)(|s|^{2/3} + 2t/3)^{3/2}` for `s ≠ 0`; the zero branch
/// at `s = 0`.
pub fn growth_ubar(t: f64, s: f64) -> f64 {
    if t == 0.0 {
        return s;
    }
    sgn(s) * powf(abs23(s) + Q * t, 1.5)
}

/// `(χ_1, χ_2)(t, s)` for `g = u^{1/3}` and `s ≠ 0`.
pub fn growth_chi(t: f64, s: f64) -> [f64; 2] {
    let a = s.abs();
    let r = abs23(s) + Q * t;
    [
        C5 * sgn(s) * (powf(r, 2.5) - powf(a, 5.0 / 3.0)),
        C11 * sgn(s) * (powf(r, 5.5) - powf(a, 11.0 / 3.0)),
    ]
}

/// Which solution of `dū/dt = u^{1/3}`, `ū(0) = 0` is followed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    /// `ū ≡ 0`.
    Zero,
    /// `ū = -(2(t - t_0)/3)^{3/2}` after the delay.
    NegFan,
    /// `ū = (2(t - t_0)/3)^{3/2}` after the delay.
    PosFan,
}

/// A characteristic from `s = 0` for `g = u^{1/3}`: it rests at zero until
/// `delay`, then follows the chosen branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBranch {
    /// Branch followed after the delay.
    pub kind: BranchKind,
    /// Departure time `t_0 >= 0`.
    pub delay: f64,
}

impl GrowthBranch {
    /// Branch leaving zero at `delay`.
    pub fn new(kind: BranchKind, delay: f64) -> Result<Self> {
        if !(delay >= 0.0) || !delay.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "delay must be finite and non-negative, got {delay}"
            )));
        }
        Ok(Self { kind, delay })
    }

    /// The three branches leaving at `t = 0`.
    pub fn immediate() -> [Self; 3] {
        [
            Self {
                kind: BranchKind::Zero,
                delay: 0.0,
            },
            Self {
                kind: BranchKind::NegFan,
                delay: 0.0,
            },
            Self {
                kind: BranchKind::PosFan,
                delay: 0.0,
            },
        ]
    }

    fn sign(&self) -> f64 {
        match self.kind {
            BranchKind::Zero => 0.0,
            BranchKind::NegFan => -1.0,
            BranchKind::PosFan => 1.0,
        }
    }

    /// `ū(t, 0)` along this branch.
    pub fn ubar(&self, t: f64) -> f64 {
        self.sign() * powf(pos(Q * (t - self.delay)), 1.5)
    }

    /// `(χ_1, χ_2)(t, 0)` along this branch.
    pub fn chi(&self, t: f64) -> [f64; 2] {
        let r = pos(Q * (t - self.delay));
        [self.sign() * C5 * powf(r, 2.5), self.sign() * C11 * powf(r, 5.5)]
    }

    /// Short name, e.g. `neg` or `pos+0.25` for a delayed branch.
    pub fn label(&self) -> String {
        let base = match self.kind {
            BranchKind::Zero => "zero",
            BranchKind::NegFan => "neg",
            BranchKind::PosFan => "pos",
        };
        if self.delay > 0.0 && self.kind != BranchKind::Zero {
            format!("{base}+{}", self.delay)
        } else {
            String::from(base)
        }
    }
}

/// Wave type of a growing-source candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthKind {
    /// `u_- > u_+ = 0`.
    Shock,
    /// `u_- < u_+ = 0`.
    Rarefaction,
}

/// Pieces of a growing-source rarefaction candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthRegion {
    /// Carries `ū(t, u_-)`.
    Left,
    /// Fan of states `c ∈ (u_-, 0)`.
    Fan,
    /// Characteristics that left zero downward after resting.
    DelayedNeg,
    /// Characteristics that left zero upward after resting.
    DelayedPos,
    /// Carries the branch value `ū(t, 0)`.
    Right,
}

/// One candidate solution of the growing-source problem with `u_+ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCandidate {
    kind: GrowthKind,
    u_minus: f64,
    branch: GrowthBranch,
}

/// Candidates for `u_- > 0` (shocks) or `u_- < 0` (rarefactions), one per
/// requested branch.
///
/// Rarefactions are built from branches leaving at `t = 0`; a delayed
/// branch is rejected for them.
pub fn growth_candidates(kind: GrowthKind, u_minus: f64, branches: &[GrowthBranch]) -> Result<Vec<GrowthCandidate>> {
    match kind {
        GrowthKind::Shock if !(u_minus > 0.0) => {
            return Err(Error::NotApplicable(format!(
                "shock candidates need u_- > 0, got {u_minus}"
            )))
        }
        GrowthKind::Rarefaction if !(u_minus < 0.0) => {
            return Err(Error::NotApplicable(format!(
                "rarefaction candidates need u_- < 0, got {u_minus}"
            )))
        }
        _ => {}
    }
    branches
        .iter()
        .map(|&branch| {
            if kind == GrowthKind::Rarefaction && branch.delay != 0.0 {
                return Err(Error::NotApplicable(format!(
                    "rarefaction candidates use branches leaving at t = 0, got delay {}",
                    branch.delay
                )));
            }
            Ok(GrowthCandidate { kind, u_minus, branch })
        })
        .collect()
}

/// A growing-source candidate frozen at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSlice {
    cand: GrowthCandidate,
    t: f64,
    left: f64,
    right: f64,
    shift: [f64; 2],
}

impl GrowthCandidate {
    /// Wave type.
    pub fn kind(&self) -> GrowthKind {
        self.kind
    }

    /// Branch followed from `s = 0`.
    pub fn branch(&self) -> GrowthBranch {
        self.branch
    }

    /// `u_-`.
    pub fn u_minus(&self) -> f64 {
        self.u_minus
    }

    /// Name such as `shock/zero`.
    pub fn label(&self) -> String {
        let k = match self.kind {
            GrowthKind::Shock => "shock",
            GrowthKind::Rarefaction => "rarefaction",
        };
        format!("{k}/{}", self.branch.label())
    }

    /// `P̃(t) = ∫_0^t (a² b + a b²) dτ` with `a = ū(τ, u_-)` and `b` the
    /// branch value.
    pub fn p_tilde(&self, t: f64) -> f64 {
        if self.branch.kind == BranchKind::Zero || t <= self.branch.delay {
            return 0.0;
        }
        let f = |tau: f64| {
            let a = growth_ubar(tau, self.u_minus);
            let b = self.branch.ubar(tau);
            a * a * b + a * b * b
        };
        simpson(&f, self.branch.delay, t, 1e-15)
    }

    /// The candidate at time `t`.
    pub fn slice(&self, t: f64) -> Result<GrowthSlice> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
        }
        let left = growth_ubar(t, self.u_minus);
        let right = self.branch.ubar(t);
        let shift = match self.kind {
            GrowthKind::Shock => {
                let cm = growth_chi(t, self.u_minus);
                let cb = self.branch.chi(t);
                [0.5 * (cm[0] + cb[0]), 0.25 * (cm[1] + cb[1] + self.p_tilde(t))]
            }
            GrowthKind::Rarefaction => [0.0; 2],
        };
        Ok(GrowthSlice {
            cand: *self,
            t,
            left,
            right,
            shift,
        })
    }

    /// `u(t, x, y)`.
    pub fn value(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.slice(t)?.value(x, y)
    }
}

impl GrowthSlice {
    /// Time of the slice.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// `ū(t, u_-)`.
    pub fn left_state(&self) -> f64 {
        self.left
    }

    /// Branch value `ū(t, 0)`.
    pub fn right_state(&self) -> f64 {
        self.right
    }

    /// Shock shift `([χ_1], [χ_2])`.
    pub fn shift(&self) -> [f64; 2] {
        self.shift
    }

    /// Shock surface function `(x - [χ_1])³ + y - [χ_2]`.
    pub fn surface(&self, x: f64, y: f64) -> f64 {
        let d = x - self.shift[0];
        d * d * d + y - self.shift[1]
    }

    /// `y` of the shock surface above `x`.
    pub fn surface_y(&self, x: f64) -> f64 {
        let d = x - self.shift[0];
        self.shift[1] - d * d * d
    }

    fn left_edge(&self, x: f64, y: f64) -> f64 {
        let a = self.cand.u_minus.abs();
        let r = abs23(a) + Q * self.t;
        let d = x + C5 * (powf(r, 2.5) - powf(a, 5.0 / 3.0));
        d * d * d + y + C11 * (powf(r, 5.5) - powf(a, 11.0 / 3.0))
    }

    fn launched(x: f64, y: f64, tau: f64, sign: f64) -> f64 {
        let q = Q * tau;
        let d = x + sign * C5 * powf(q, 2.5);
        d * d * d + y + sign * C11 * powf(q, 5.5)
    }

    /// Piece of a rarefaction candidate containing `(x, y)`.
    pub fn rarefaction_region(&self, x: f64, y: f64) -> GrowthRegion {
        let z = x * x * x + y;
        if self.t == 0.0 {
            return if z <= 0.0 {
                GrowthRegion::Left
            } else {
                GrowthRegion::Right
            };
        }
        if self.left_edge(x, y) < 0.0 {
            return GrowthRegion::Left;
        }
        if Self::launched(x, y, self.t, 1.0) <= 0.0 {
            return GrowthRegion::Fan;
        }
        match self.cand.branch.kind {
            BranchKind::Zero => {
                if z <= 0.0 {
                    GrowthRegion::DelayedNeg
                } else {
                    GrowthRegion::Right
                }
            }
            BranchKind::NegFan => GrowthRegion::Right,
            BranchKind::PosFan => {
                if z <= 0.0 {
                    GrowthRegion::DelayedNeg
                } else if Self::launched(x, y, self.t, -1.0) <= 0.0 {
                    GrowthRegion::DelayedPos
                } else {
                    GrowthRegion::Right
                }
            }
        }
    }

    /// `u(t, x, y)`; points on a shock take the left value.
    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        match self.cand.kind {
            GrowthKind::Shock => Ok(if self.surface(x, y) <= 0.0 {
                self.left
            } else {
                self.right
            }),
            GrowthKind::Rarefaction => Ok(self.rarefaction_value(x, y)),
        }
    }

    fn rarefaction_value(&self, x: f64, y: f64) -> f64 {
        let t = self.t;
        let q = Q * t;
        match self.rarefaction_region(x, y) {
            GrowthRegion::Left => {
                if t == 0.0 {
                    self.cand.u_minus
                } else {
                    self.left
                }
            }
            GrowthRegion::Right => self.right,
            GrowthRegion::Fan => {
                // Φ(c) = M(x - χ(t, c)) for c < 0
                let phi = |c: f64| {
                    let a = c.abs();
                    let r = abs23(c) + q;
                    let d = x + C5 * (powf(r, 2.5) - powf(a, 5.0 / 3.0));
                    d * d * d + y + C11 * (powf(r, 5.5) - powf(a, 11.0 / 3.0))
                };
                let c = bisect(phi, self.cand.u_minus, 0.0);
                -powf(abs23(c) + q, 1.5)
            }
            GrowthRegion::DelayedNeg => {
                let tau = bisect(|s| Self::launched(x, y, s, 1.0), 0.0, t);
                -powf(Q * tau, 1.5)
            }
            GrowthRegion::DelayedPos => {
                let tau = bisect(|s| Self::launched(x, y, s, -1.0), 0.0, t);
                powf(Q * tau, 1.5)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Non-uniqueness report
// ---------------------------------------------------------------------------

/// Sampling and tolerances for [`nonuniqueness_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct NonuniquenessOptions {
    /// Audit times.
    pub times: Vec<f64>,
    /// Audit points per time.
    pub points_per_time: usize,
    /// `x` range `[-w, w]` of audit points.
    pub half_width: f64,
    /// Intermediate states in the entropy margin.
    pub k_samples: usize,
    /// Bound on `|RH residual|`.
    pub rh_tol: f64,
    /// Entropy margins must be `>= -margin_tol`.
    pub margin_tol: f64,
    /// Bound on smooth-region PDE residuals of rarefaction candidates.
    pub smooth_tol: f64,
    /// Time of the probe slice; the space-time probe covers `[0, probe_t]`.
    pub probe_t: f64,
    /// Probe box `[lo, hi]²` in `(x, y)`.
    pub probe_box: (f64, f64),
    /// Points per space axis of the probe.
    pub probe_points: usize,
    /// Time levels of the space-time probe.
    pub probe_levels: usize,
    /// Distance that counts as distinct.
    pub distance_threshold: f64,
}

impl Default for NonuniquenessOptions {
    fn default() -> Self {
        Self {
            times: (1..=10).map(|i| 0.1 * i as f64 - 0.05).collect(),
            points_per_time: 20,
            half_width: 1.0,
            k_samples: 101,
            rh_tol: 1e-6,
            margin_tol: 1e-10,
            smooth_tol: 1e-4,
            probe_t: 1.0,
            probe_box: (-1.5, 1.5),
            probe_points: 121,
            probe_levels: 11,
            distance_threshold: 0.05,
        }
    }
}

/// Admissibility audit of one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateAudit {
    /// Candidate name.
    pub label: String,
    /// Shock points audited (zero for continuous candidates).
    pub shock_points: usize,
    /// Largest `|RH residual|` at shock points, or the largest
    /// `|[u]| + Σ|[f_i]|` across interfaces of a continuous candidate (a
    /// bound on the residual for every unit normal).
    pub max_rh: f64,
    /// Smallest entropy margin; `+∞` when there is no shock.
    pub min_margin: f64,
    /// Interface crossings checked for continuity.
    pub interface_points: usize,
    /// Smooth points checked against the PDE.
    pub smooth_points: usize,
    /// Largest smooth-region PDE residual.
    pub max_smooth_residual: f64,
    /// Whether every check is within tolerance.
    pub passed: bool,
}

/// L¹ distances between two candidates on the probe.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDistance {
    /// Index of the first candidate.
    pub a: usize,
    /// Index of the second candidate.
    pub b: usize,
    /// `∫ |u - v| dx dy` on the probe box at `probe_t`.
    pub slice: f64,
    /// `∫∫ |u - v| dx dy dt` over `[0, probe_t]` times the box.
    pub space_time: f64,
}

/// Result of auditing every candidate and measuring their separation.
#[derive(Debug, Clone, PartialEq)]
pub struct NonuniquenessReport {
    /// Wave type.
    pub kind: GrowthKind,
    /// `u_-`.
    pub u_minus: f64,
    /// Per-candidate audits.
    pub audits: Vec<CandidateAudit>,
    /// Pairwise distances.
    pub distances: Vec<PairDistance>,
    /// Every candidate passed its audit.
    pub all_admissible: bool,
    /// Some pair is farther apart than the threshold on the slice.
    pub distinct: bool,
    /// Every pair is farther apart than the threshold, on the slice and in
    /// space-time.
    pub all_pairs_distinct: bool,
}

fn audit_shock(c: &GrowthCandidate, opts: &NonuniquenessOptions) -> Result<CandidateAudit> {
    let fluxes = catalog::burgers2d();
    let mut max_rh: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    let mut points = 0;
    let xs = linspace(-opts.half_width, opts.half_width, opts.points_per_time);
    for &t in opts.times.iter().filter(|&&t| t > 0.0) {
        let slice = c.slice(t)?;
        let h = 1e-3 * t.min(1.0);
        let s = |k: f64| c.slice(t + k * h).map(|sl| sl.shift);
        let (p1, m1, p2, m2) = (s(1.0)?, s(-1.0)?, s(2.0)?, s(-2.0)?);
        let rate = [0, 1].map(|i| (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h));
        for &x in &xs {
            let d = x - slice.shift[0];
            // S = (x - s1)³ + y - s2, normal -∇S points into {S < 0}
            let grad = [-3.0 * d * d * rate[0] - rate[1], 3.0 * d * d, 1.0];
            let norm = math::norm(&grad);
            let n: Vec<f64> = grad.iter().map(|g| -g / norm).collect();
            let (ul, ur) = (slice.left, slice.right);
            max_rh = max_rh.max(rh_residual(&fluxes, &n, ul, ur).abs());
            min_margin = min_margin.min(geometric_entropy_margin(&fluxes, &n, ul, ur, opts.k_samples)?);
            points += 1;
        }
    }
    Ok(CandidateAudit {
        label: c.label(),
        shock_points: points,
        max_rh,
        min_margin,
        interface_points: 0,
        smooth_points: 0,
        max_smooth_residual: 0.0,
        passed: points > 0 && max_rh <= opts.rh_tol && min_margin >= -opts.margin_tol,
    })
}

fn audit_rarefaction(c: &GrowthCandidate, opts: &NonuniquenessOptions) -> Result<CandidateAudit> {
    let fluxes = catalog::burgers2d();
    let source = catalog::pos_cbrt();
    let w = opts.half_width;
    let ys = linspace(-w, w, opts.points_per_time);
    let scan = linspace(-2.0 * w, 2.0 * w, 801);
    let mut max_jump_bound: f64 = 0.0;
    let mut crossings = 0;
    let mut smooth_points = 0;
    let mut max_res: f64 = 0.0;
    for &t in &opts.times {
        let slice = c.slice(t)?;
        for &y in &ys {
            for pair in scan.windows(2) {
                let (ra, rb) = (
                    slice.rarefaction_region(pair[0], y),
                    slice.rarefaction_region(pair[1], y),
                );
                if ra == rb {
                    continue;
                }
                let (mut lo, mut hi) = (pair[0], pair[1]);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if slice.rarefaction_region(mid, y) == ra {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let ua = slice.value(lo - 1e-12, y)?;
                let ub = slice.value(hi + 1e-12, y)?;
                let bound = (ua - ub).abs() + (0..2).map(|i| (fluxes.f(i, ua) - fluxes.f(i, ub)).abs()).sum::<f64>();
                max_jump_bound = max_jump_bound.max(bound);
                crossings += 1;
            }
        }
        // PDE residual at points whose neighbourhood stays in one region
        let probe = linspace(-w, w, 9);
        let margin = 0.02;
        for &x in &probe {
            for &y in &probe {
                let r0 = slice.rarefaction_region(x, y);
                let mut uniform = true;
                'outer: for dtc in [-margin, margin] {
                    let sl = c.slice((t + dtc).max(0.0))?;
                    for (dx, dy) in [(0.0, 0.0), (margin, 0.0), (-margin, 0.0), (0.0, margin), (0.0, -margin)] {
                        if sl.rarefaction_region(x + dx, y + dy) != r0 {
                            uniform = false;
                            break 'outer;
                        }
                    }
                }
                for (dx, dy) in [(margin, 0.0), (-margin, 0.0), (0.0, margin), (0.0, -margin)] {
                    if slice.rarefaction_region(x + dx, y + dy) != r0 {
                        uniform = false;
                    }
                }
                if !uniform {
                    continue;
                }
                let res = smooth_residual(|tt, p| c.value(tt, p[0], p[1]), &fluxes, &source, t, &[x, y], 1e-4)?;
                max_res = max_res.max(res.abs());
                smooth_points += 1;
            }
        }
    }
    Ok(CandidateAudit {
        label: c.label(),
        shock_points: 0,
        max_rh: max_jump_bound,
        min_margin: f64::INFINITY,
        interface_points: crossings,
        smooth_points,
        max_smooth_residual: max_res,
        passed: max_jump_bound <= opts.rh_tol && max_res <= opts.smooth_tol,
    })
}

/// Audits each candidate and measures pairwise L¹ distances.
///
/// Shock candidates are checked for the Rankine-Hugoniot relation and the
/// geometric entropy margin on sampled surface points, with the normal
/// taken from a numerical time derivative of the surface. Rarefaction
/// candidates have no discontinuity: they are checked for continuity
/// across every interface met along horizontal scan lines and for the PDE
/// residual at points away from interfaces.
pub fn nonuniqueness_report(
    kind: GrowthKind,
    u_minus: f64,
    branches: &[GrowthBranch],
    opts: &NonuniquenessOptions,
) -> Result<NonuniquenessReport> {
    let cands = growth_candidates(kind, u_minus, branches)?;
    let audits = cands
        .iter()
        .map(|c| match kind {
            GrowthKind::Shock => audit_shock(c, opts),
            GrowthKind::Rarefaction => audit_rarefaction(c, opts),
        })
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = opts.probe_box;
    let axes = vec![linspace(lo, hi, opts.probe_points), linspace(lo, hi, opts.probe_points)];
    let levels = linspace(0.0, opts.probe_t, opts.probe_levels.max(2));
    let fields = cands
        .iter()
        .map(|c| {
            GridField::sample_by_time(levels.clone(), axes.clone(), Provenance::Oracle, |t| {
                let s = c.slice(t)?;
                Ok(move |p: &[f64]| s.value(p[0], p[1]))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tw = trapezoid_weights(&levels);
    let mut distances = Vec::new();
    for a in 0..cands.len() {
        for b in a + 1..cands.len() {
            let slice = l1_distance_in_box(&fields[a], &fields[b], opts.probe_t, &[lo, lo], &[hi, hi])?;
            let mut st = 0.0;
            for (i, &t) in levels.iter().enumerate() {
                st += tw[i] * l1_distance_in_box(&fields[a], &fields[b], t, &[lo, lo], &[hi, hi])?;
            }
            distances.push(PairDistance {
                a,
                b,
                slice,
                space_time: st,
            });
        }
    }
    let thr = opts.distance_threshold;
    Ok(NonuniquenessReport {
        kind,
        u_minus,
        all_admissible: audits.iter().all(|a| a.passed),
        distinct: distances.iter().any(|d| d.slice > thr),
        all_pairs_distinct: !distances.is_empty() && distances.iter().all(|d| d.slice > thr && d.space_time > thr),
        audits,
        distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_flow_values() {
        assert!((decay_ubar(0.75, 1.0) - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert_eq!(decay_ubar(2.0, 1.0), 0.0);
        assert_eq!(decay_ubar(1.5, -1.0), 0.0);
        assert!((decay_ubar(0.75, -1.0) + 0.353_553_390_593_273_8).abs() < 1e-15);
        assert_eq!(decay_ubar(0.0, -0.3), -0.3);
        let chi = decay_chi(1.5, 1.0);
        assert!((chi[0] - 0.6).abs() < 1e-15 && (chi[1] - 3.0 / 11.0).abs() < 1e-15);
        let chi = decay_chi(0.0, 0.7);
        assert!(chi[0].abs() < 1e-15 && chi[1].abs() < 1e-15);
    }

    #[test]
    fn decay_chi_derivative_is_the_flux_speed() {
        for &(t, s) in &[(0.3, 1.0), (0.7, -0.6), (0.1, 2.0)] {
            let h = 1e-5;
            let a = decay_chi(t + h, s);
            let b = decay_chi(t - h, s);
            let u = decay_ubar(t, s);
            assert!(((a[0] - b[0]) / (2.0 * h) - u).abs() < 1e-8);
            assert!(((a[1] - b[1]) / (2.0 * h) - u * u * u).abs() < 1e-8);
        }
    }

    #[test]
    fn p_integral_converges_under_step_halving() {
        for &(t, um, up) in &[(0.9f64, 1.0, 0.5), (1.2, 1.0, -0.7), (0.4, 2.0, 1.0)] {
            let end = t.min(decay_extinction(um)).min(decay_extinction(up));
            let f = |tau: f64| {
                let a = decay_ubar(tau, um);
                let b = decay_ubar(tau, up);
                a * a * b + a * b * b
            };
            let coarse = composite_simpson(f, 0.0, end, 4096);
            let fine = composite_simpson(f, 0.0, end, 8192);
            assert!((coarse - fine).abs() < 1e-9, "{coarse} vs {fine}");
            assert!((decay_p(t, um, up) - fine).abs() < 1e-9);
        }
        let c = GrowthCandidate {
            kind: GrowthKind::Shock,
            u_minus: 1.0,
            branch: GrowthBranch::immediate()[1],
        };
        let f = |tau: f64| {
            let a = growth_ubar(tau, 1.0);
            let b = -powf(Q * tau, 1.5);
            a * a * b + a * b * b
        };
        let coarse = composite_simpson(f, 0.0, 1.0, 4096);
        let fine = composite_simpson(f, 0.0, 1.0, 8192);
        assert!((coarse - fine).abs() < 1e-9);
        assert!((c.p_tilde(1.0) - fine).abs() < 1e-9);
    }

    #[test]
    fn case_tags() {
        assert_eq!(DecayOracle::new(1.0, 0.5).unwrap().tag(), CaseTag::ShockBig);
        assert_eq!(DecayOracle::new(0.5, -1.0).unwrap().tag(), CaseTag::ShockSmall);
        assert_eq!(DecayOracle::new(1.0, -1.0).unwrap().tag(), CaseTag::ShockSymmetric);
        assert_eq!(DecayOracle::new(-1.0, 1.0).unwrap().tag(), CaseTag::Rarefaction);
        assert!(DecayOracle::new(0.2, 0.7).is_err());
        assert!(DecayOracle::new(0.5, 0.5).is_err());
    }

    #[test]
    fn symmetric_shock_stays_put() {
        let o = DecayOracle::new(1.0, -1.0).unwrap();
        let v = o.value(1.0, -1.0, 0.0).unwrap();
        assert!((v - 0.192_450_089_729_875_3).abs() < 1e-12);
        assert!((o.value(1.0, 1.0, 0.0).unwrap() + 0.192_450_089_729_875_3).abs() < 1e-12);
        assert_eq!(o.value(1.5, -1.0, 0.0).unwrap(), 0.0);
        assert_eq!(o.value(0.0, 0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn shock_big_switches_surface_continuously() {
        let o = DecayOracle::new(1.0, 0.5).unwrap();
        let ts = decay_extinction(0.5);
        let a = o.slice(ts - 1e-9).unwrap().shift();
        let b = o.slice(ts + 1e-9).unwrap().shift();
        assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8);
        let s = o.slice(1.2).unwrap();
        assert_eq!(s.right_state(), 0.0);
        for &(t, x, y) in &[(1.5, 0.3, -2.0), (2.0, -1.0, 1.0), (3.0, 0.0, 0.0)] {
            assert_eq!(o.value(t, x, y).unwrap(), 0.0);
        }
    }

    #[test]
    fn initial_data_is_reproduced() {
        for (um, up) in [(1.0, 0.5), (0.5, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let o = DecayOracle::new(um, up).unwrap();
            assert_eq!(o.value(0.0, -0.5, 0.0).unwrap(), um);
            assert_eq!(o.value(0.0, 0.5, 0.0).unwrap(), up);
            assert_eq!(o.value(0.0, 0.5, -0.125).unwrap(), um);
        }
    }

    #[test]
    fn rarefaction_fan_root_recovers_generating_state() {
        let o = DecayOracle::new(-1.0, 1.0).unwrap();
        let t = 0.3;
        let c0: f64 = -0.5;
        let chi = decay_chi(t, c0);
        let x = 0.1;
        // a point of M(x - χ(t, c0)) = 0
        let y = chi[1] - (x - chi[0]).powi(3);
        let s = o.slice(t).unwrap();
        assert_eq!(s.region(x, y), Region::Fan);
        let c = s.fan_parameter(x, y).unwrap();
        assert!((c - c0).abs() < 1e-10, "{c}");
        let v = s.value(x, y).unwrap();
        assert!((v - decay_ubar(t, c0)).abs() < 1e-12);
    }

    #[test]
    fn rarefaction_is_continuous_across_fan_edges() {
        let o = DecayOracle::new(-1.0, 1.0).unwrap();
        let s = o.slice(0.4).unwrap();
        let chi = decay_chi(0.4, -1.0);
        let x = 0.2;
        let y = chi[1] - (x - chi[0]).powi(3);
        let inside = s.value(x, y + 1e-9).unwrap();
        let outside = s.value(x, y - 1e-9).unwrap();
        assert!((inside - outside).abs() < 1e-6);
        assert!((outside - decay_ubar(0.4, -1.0)).abs() < 1e-15);
    }

    #[test]
    fn branches_solve_the_ode() {
        for kind in [BranchKind::Zero, BranchKind::NegFan, BranchKind::PosFan] {
            for delay in [0.0, 0.4] {
                let b = GrowthBranch::new(kind, delay).unwrap();
                let h = 1e-4;
                for i in 1..20 {
                    let t = delay + 0.01 + 0.1 * i as f64;
                    let d = (b.ubar(t + h) - b.ubar(t - h)) / (2.0 * h);
                    assert!((d - math::cbrt(b.ubar(t))).abs() < 1e-5, "{kind:?} t {t}");
                }
                assert_eq!(b.ubar(delay), 0.0);
            }
        }
        assert!(GrowthBranch::new(BranchKind::PosFan, -1.0).is_err());
    }

    #[test]
    fn growth_flow_values() {
        assert!((growth_ubar(1.5, 1.0) - 2.828_427_124_746_19).abs() < 1e-13);
        let h = 1e-5;
        for &(t, s) in &[(0.5, 1.0), (1.0, -0.3)] {
            let a = growth_chi(t + h, s);
            let b = growth_chi(t - h, s);
            let u = growth_ubar(t, s);
            assert!(((a[0] - b[0]) / (2.0 * h) - u).abs() < 1e-7);
            assert!(((a[1] - b[1]) / (2.0 * h) - u * u * u).abs() < 1e-6);
        }
    }

    #[test]
    fn shock_candidates_agree_at_time_zero() {
        let cands = growth_candidates(GrowthKind::Shock, 1.0, &GrowthBranch::immediate()).unwrap();
        for &(x, y) in &[(-0.5, 0.0), (0.5, 0.0), (0.2, -1.0), (0.0, 0.3)] {
            let v: Vec<f64> = cands.iter().map(|c| c.value(0.0, x, y).unwrap()).collect();
            assert!(v.iter().all(|&a| a == v[0]));
        }
        let s1 = cands[0].slice(1.0).unwrap();
        let chi = growth_chi(1.0, 1.0);
        assert!((s1.shift()[0] - 0.5 * chi[0]).abs() < 1e-15);
        assert!((s1.shift()[1] - 0.25 * chi[1]).abs() < 1e-15);
    }

    #[test]
    fn candidate_kind_checks() {
        let b = GrowthBranch::immediate();
        assert!(growth_candidates(GrowthKind::Shock, -1.0, &b).is_err());
        assert!(growth_candidates(GrowthKind::Rarefaction, 1.0, &b).is_err());
        let late = [GrowthBranch::new(BranchKind::NegFan, 0.3).unwrap()];
        assert!(growth_candidates(GrowthKind::Rarefaction, -1.0, &late).is_err());
        assert!(growth_candidates(GrowthKind::Shock, 1.0, &late).is_ok());
    }

    #[test]
    fn rarefaction_solutions_one_and_two_differ_in_delayed_region() {
        let cands = growth_candidates(GrowthKind::Rarefaction, -1.0, &GrowthBranch::immediate()).unwrap();
        let s1 = cands[0].slice(1.0).unwrap();
        let s2 = cands[1].slice(1.0).unwrap();
        // below x³ + y = 0 but above the image of the surface under the 0⁻ flow
        let (x, y) = (0.0, -0.01);
        assert_eq!(s1.rarefaction_region(x, y), GrowthRegion::DelayedNeg);
        assert_eq!(s2.rarefaction_region(x, y), GrowthRegion::Right);
        let v1 = s1.value(x, y).unwrap();
        let v2 = s2.value(x, y).unwrap();
        assert!(v1 < 0.0 && v1 > v2);
        assert!((v2 + powf(Q, 1.5)).abs() < 1e-15);
        assert!((v1 - v2).abs() > 0.05);
    }

    #[test]
    fn delayed_values_are_continuous_at_both_ends() {
        let cands = growth_candidates(GrowthKind::Rarefaction, -1.0, &GrowthBranch::immediate()).unwrap();
        let s3 = cands[2].slice(0.8).unwrap();
        // on x³ + y = 0 the delayed characteristics have not left yet
        let x = 0.3;
        let v = s3.value(x, -x * x * x - 1e-13).unwrap();
        assert!(v.abs() < 1e-6);
        let v = s3.value(x, -x * x * x + 1e-13).unwrap();
        assert!(v.abs() < 1e-6);
    }
}
