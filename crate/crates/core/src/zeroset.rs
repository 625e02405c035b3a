//! Decomposition of the real line into the open intervals where `g ≠ 0`,
//! the plateaus where `g ≡ 0`, and the boundary points between them.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::roots::{bisect_predicate, golden_min};
use crate::source::{KnownZero, SourceTerm};

/// Sign of `g` on an open interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    /// `g > 0`: the flow moves right.
    Positive,
    /// `g < 0`: the flow moves left.
    Negative,
}

/// Nature of an interval or plateau end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// A zero of `g`.
    Zero,
    /// The scan window edge; the component is presumed to continue beyond it.
    Window,
}

/// A maximal open interval on which `g` has constant nonzero sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenInterval {
    /// Lower end.
    pub lo: f64,
    /// Upper end.
    pub hi: f64,
    /// Sign of `g` inside.
    pub sign: Sign,
    /// Kind of the lower end.
    pub lo_kind: EdgeKind,
    /// Kind of the upper end.
    pub hi_kind: EdgeKind,
}

/// A maximal interval on which `g ≡ 0` (within the resolution).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    /// Lower end.
    pub lo: f64,
    /// Upper end.
    pub hi: f64,
    /// Kind of the lower end.
    pub lo_kind: EdgeKind,
    /// Kind of the upper end.
    pub hi_kind: EdgeKind,
}

/// Diagnostics attached to a numeric scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroSetWarning {
    /// `|g| <= tol` at the lower window edge: a component may be truncated.
    TruncatedAtLowerEdge,
    /// `|g| <= tol` at the upper window edge.
    TruncatedAtUpperEdge,
    /// Feature counts never stabilised on the refinement ladder.
    UnstableLadder,
}

/// Where a state sits in the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Inside `open_intervals[i]`.
    Interval(usize),
    /// Inside `plateaus[i]`.
    Plateau(usize),
    /// At `boundary_points[i]`.
    Boundary(usize),
}

/// Partition of the search window into sign intervals, plateaus and
/// boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSetDecomposition {
    /// Window the decomposition covers.
    pub window: (f64, f64),
    /// Open intervals where `g ≠ 0`, sorted.
    pub open_intervals: Vec<OpenInterval>,
    /// Plateaus where `g ≡ 0`, sorted.
    pub plateau_intervals: Vec<Plateau>,
    /// Isolated zeros and interior plateau ends, sorted.
    pub boundary_points: Vec<f64>,
    /// Tolerance used for zero detection.
    pub resolution: f64,
    /// Scan diagnostics.
    pub warnings: Vec<ZeroSetWarning>,
}

/// Regularity of `g` at a boundary zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    /// `g'` exists and is finite.
    Differentiable(f64),
    /// `g'` is `-∞` (both one-sided quotients diverge downward).
    NegativeInfinite,
    /// Neither of the above.
    NotDifferentiable,
}

#[derive(Debug, Clone, PartialEq)]
enum Feature {
    Point(f64),
    Flat(f64, f64, EdgeKind, EdgeKind),
}

impl Feature {
    fn lo(&self) -> f64 {
        match *self {
            Feature::Point(p) => p,
            Feature::Flat(a, ..) => a,
        }
    }
    fn hi(&self) -> f64 {
        match *self {
            Feature::Point(p) => p,
            Feature::Flat(_, b, ..) => b,
        }
    }
}

/// Decomposes the zero set of `g` on its search window.
///
/// Closed-form zeros are used verbatim when supplied. Otherwise uniform grids
/// of `2^k` cells, `k = 10..=20`, are scanned until the feature counts agree
/// on two consecutive levels. Sign changes are bisected to width `tol`, runs
/// of nodes with `|g| <= tol` become plateaus (their ends bisected), and
/// local minima of `|g|` are polished by golden-section search to catch
/// touching zeros.
pub fn decompose_zero_set(g: &SourceTerm, tol: f64) -> Result<ZeroSetDecomposition> {
    let (lo, hi) = g.search_window();
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "zero scan needs lo < hi and tol > 0 (window [{lo}, {hi}], tol {tol})"
        )));
    }
    let mut warnings = Vec::new();
    let features = if let Some(zeros) = g.analytic_zeros() {
        let mut fs = Vec::new();
        for z in zeros {
            match *z {
                KnownZero::Point(p) if p >= lo && p <= hi => fs.push(Feature::Point(p)),
                KnownZero::Plateau(a, b) if b >= lo && a <= hi => {
                    let (ka, kb) = (
                        if a <= lo { EdgeKind::Window } else { EdgeKind::Zero },
                        if b >= hi { EdgeKind::Window } else { EdgeKind::Zero },
                    );
                    fs.push(Feature::Flat(a.max(lo), b.min(hi), ka, kb));
                }
                _ => {}
            }
        }
        fs.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
        fs
    } else {
        let mut prev: Option<(usize, usize)> = None;
        let mut found = Vec::new();
        let mut stable = false;
        for level in 10..=20u32 {
            found = scan(g, lo, hi, 1usize << level, tol)?;
            let counts = (
                found.iter().filter(|f| matches!(f, Feature::Point(_))).count(),
                found.iter().filter(|f| matches!(f, Feature::Flat(..))).count(),
            );
            if prev == Some(counts) {
                stable = true;
                break;
            }
            prev = Some(counts);
        }
        if !stable {
            warnings.push(ZeroSetWarning::UnstableLadder);
        }
        found
    };
    if g.eval(lo).abs() <= tol {
        warnings.push(ZeroSetWarning::TruncatedAtLowerEdge);
    }
    if g.eval(hi).abs() <= tol {
        warnings.push(ZeroSetWarning::TruncatedAtUpperEdge);
    }
    Ok(assemble(g, lo, hi, tol, features, warnings))
}

fn scan(g: &SourceTerm, lo: f64, hi: f64, cells: usize, tol: f64) -> Result<Vec<Feature>> {
    let node = |i: usize| lo + (hi - lo) * (i as f64) / (cells as f64);
    let mut v = Vec::with_capacity(cells + 1);
    for i in 0..=cells {
        v.push(g.eval_checked(node(i))?);
    }
    let is_zero = |x: f64| g.eval(x).abs() <= tol;
    let mut out = Vec::new();
    let mut i = 0;
    while i <= cells {
        if v[i].abs() <= tol {
            let start = i;
            while i < cells && v[i + 1].abs() <= tol {
                i += 1;
            }
            let end = i;
            if end > start {
                let (a, ka) = if start == 0 {
                    (lo, EdgeKind::Window)
                } else {
                    let (_, b) = bisect_predicate(is_zero, node(start - 1), node(start), tol);
                    (b, EdgeKind::Zero)
                };
                let (b, kb) = if end == cells {
                    (hi, EdgeKind::Window)
                } else {
                    let (a2, _) = bisect_predicate(|x| !is_zero(x), node(end), node(end + 1), tol);
                    (a2, EdgeKind::Zero)
                };
                out.push(Feature::Flat(a, b, ka, kb));
            } else if v[start] == 0.0 || start == 0 || end == cells {
                out.push(Feature::Point(node(start)));
            } else {
                let (l, r) = (v[start - 1], v[start + 1]);
                let p = if (l > 0.0) != (r > 0.0) {
                    let pos_right = r > 0.0;
                    let (a, b) = bisect_predicate(
                        |x| (g.eval(x) > 0.0) == pos_right,
                        node(start - 1),
                        node(start + 1),
                        tol,
                    );
                    0.5 * (a + b)
                } else {
                    golden_min(|x| g.eval(x).abs(), node(start - 1), node(start + 1), tol).0
                };
                out.push(Feature::Point(p));
            }
            i += 1;
            continue;
        }
        if i < cells && v[i + 1].abs() > tol && (v[i] > 0.0) != (v[i + 1] > 0.0) {
            let pos_right = v[i + 1] > 0.0;
            let (a, b) = bisect_predicate(|x| (g.eval(x) > 0.0) == pos_right, node(i), node(i + 1), tol);
            out.push(Feature::Point(0.5 * (a + b)));
        } else if i > 0
            && i < cells
            && v[i - 1].abs() > tol
            && v[i + 1].abs() > tol
            && (v[i - 1] > 0.0) == (v[i] > 0.0)
            && (v[i + 1] > 0.0) == (v[i] > 0.0)
            && v[i].abs() <= v[i - 1].abs()
            && v[i].abs() < v[i + 1].abs()
        {
            let (x, fx) = golden_min(|x| g.eval(x).abs(), node(i - 1), node(i + 1), tol);
            if fx <= tol {
                out.push(Feature::Point(x));
            }
        }
        i += 1;
    }
    Ok(out)
}

fn assemble(
    g: &SourceTerm,
    lo: f64,
    hi: f64,
    tol: f64,
    mut features: Vec<Feature>,
    warnings: Vec<ZeroSetWarning>,
) -> ZeroSetDecomposition {
    features.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
    // merge points that fall inside plateaus or duplicate a neighbour
    let mut merged: Vec<Feature> = Vec::new();
    for f in features {
        if let Some(last) = merged.last_mut() {
            if f.lo() <= last.hi() + 2.0 * tol {
                match (last.clone(), f.clone()) {
                    (Feature::Point(_), Feature::Point(_)) => continue,
                    (Feature::Flat(a, b, ka, kb), other) => {
                        if other.hi() > b {
                            let nk = match other {
                                Feature::Flat(_, _, _, k) => k,
                                Feature::Point(_) => kb,
                            };
                            *last = Feature::Flat(a, other.hi(), ka, nk);
                        }
                        let _ = kb;
                        continue;
                    }
                    (Feature::Point(_), Feature::Flat(a, b, ka, kb)) => {
                        *last = Feature::Flat(a.min(last.lo()), b, ka, kb);
                        continue;
                    }
                }
            }
        }
        merged.push(f);
    }
    let sign_on = |a: f64, b: f64| -> Sign {
        let mut best = 0.0f64;
        for k in 1..8 {
            let x = a + (b - a) * (k as f64) / 8.0;
            let v = g.eval(x);
            if v.abs() > best.abs() {
                best = v;
            }
        }
        if best > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    };
    let mut open_intervals = Vec::new();
    let mut plateau_intervals = Vec::new();
    let mut boundary_points = Vec::new();
    let mut cursor = lo;
    let mut cursor_kind = EdgeKind::Window;
    for f in &merged {
        let start = f.lo();
        if start > cursor + tol || (cursor_kind == EdgeKind::Window && start > cursor) {
            open_intervals.push(OpenInterval {
                lo: cursor,
                hi: start,
                sign: sign_on(cursor, start),
                lo_kind: cursor_kind,
                hi_kind: EdgeKind::Zero,
            });
        }
        match *f {
            Feature::Point(p) => {
                boundary_points.push(p);
                cursor = p;
                cursor_kind = EdgeKind::Zero;
            }
            Feature::Flat(a, b, ka, kb) => {
                plateau_intervals.push(Plateau {
                    lo: a,
                    hi: b,
                    lo_kind: ka,
                    hi_kind: kb,
                });
                if ka == EdgeKind::Zero {
                    boundary_points.push(a);
                }
                if kb == EdgeKind::Zero {
                    boundary_points.push(b);
                }
                cursor = b;
                cursor_kind = kb;
            }
        }
    }
    if cursor < hi && !(cursor_kind == EdgeKind::Window && !merged.is_empty()) {
        open_intervals.push(OpenInterval {
            lo: cursor,
            hi,
            sign: sign_on(cursor, hi),
            lo_kind: cursor_kind,
            hi_kind: EdgeKind::Window,
        });
    }
    boundary_points.sort_by(f64::total_cmp);
    ZeroSetDecomposition {
        window: (lo, hi),
        open_intervals,
        plateau_intervals,
        boundary_points,
        resolution: tol,
        warnings,
    }
}

impl ZeroSetDecomposition {
    /// Locates a state. States beyond the window belong to an outermost
    /// component only when that component runs into the window edge.
    pub fn locate(&self, s: f64) -> Result<Location> {
        let tol = self.resolution;
        // boundary points first so that states within tol of a zero are stationary
        let idx = self.boundary_points.partition_point(|&p| p < s - tol);
        if idx < self.boundary_points.len() && (self.boundary_points[idx] - s).abs() <= tol {
            return Ok(Location::Boundary(idx));
        }
        for (i, p) in self.plateau_intervals.iter().enumerate() {
            let below = s > p.lo || (p.lo_kind == EdgeKind::Window && s <= p.lo);
            let above = s < p.hi || (p.hi_kind == EdgeKind::Window && s >= p.hi);
            if below && above {
                return Ok(Location::Plateau(i));
            }
        }
        for (i, iv) in self.open_intervals.iter().enumerate() {
            let below = s > iv.lo || (iv.lo_kind == EdgeKind::Window && s <= iv.lo);
            let above = s < iv.hi || (iv.hi_kind == EdgeKind::Window && s >= iv.hi);
            if below && above {
                return Ok(Location::Interval(i));
            }
        }
        // tiny gaps of width <= tol between components collapse onto the nearest zero
        if s >= self.window.0 && s <= self.window.1 {
            if let Some((i, _)) = self
                .boundary_points
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - s).abs().total_cmp(&(b.1 - s).abs()))
            {
                return Ok(Location::Boundary(i));
            }
        }
        Err(Error::OutsideWindow {
            s,
            lo: self.window.0,
            hi: self.window.1,
        })
    }
}

/// Classifies the regularity of `g` at a boundary zero `z`.
///
/// A supplied derivative decides directly (finite, `-∞`, or anything else).
/// Without one, one-sided difference quotients at `h = 10^{-3}, 10^{-5},
/// 10^{-7}` are compared: agreeing and stable quotients give a finite
/// derivative, quotients diverging downward on both sides give `-∞`, and
/// everything else is reported as not differentiable.
pub fn classify_boundary(g: &SourceTerm, z: f64) -> BoundaryKind {
    if let Some(d) = g.derivative(z) {
        return if d.is_finite() {
            BoundaryKind::Differentiable(d)
        } else if d == f64::NEG_INFINITY {
            BoundaryKind::NegativeInfinite
        } else {
            BoundaryKind::NotDifferentiable
        };
    }
    let gz = g.eval(z);
    let hs = [1e-3, 1e-5, 1e-7];
    let right: Vec<f64> = hs.iter().map(|&h| (g.eval(z + h) - gz) / h).collect();
    let left: Vec<f64> = hs.iter().map(|&h| (gz - g.eval(z - h)) / h).collect();
    let diverging_down = |q: &[f64]| q[2] < 0.0 && q[2] < 3.0 * q[1] && q[1] < 3.0 * q[0] && q[1] < 0.0;
    if diverging_down(&right) && diverging_down(&left) {
        return BoundaryKind::NegativeInfinite;
    }
    let stable = |q: &[f64]| (q[2] - q[1]).abs() <= 1e-3 * (1.0 + q[2].abs());
    if stable(&right) && stable(&left) && (right[2] - left[2]).abs() <= 1e-3 * (1.0 + right[2].abs()) {
        return BoundaryKind::Differentiable(0.5 * (right[2] + left[2]));
    }
    BoundaryKind::NotDifferentiable
}
