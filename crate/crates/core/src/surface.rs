//! Initial discontinuity surfaces `{M(x) = 0}` and a sampler for their zero
//! level set.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;

/// Scalar field `ℝⁿ → ℝ`.
pub type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Gradient of a scalar field, written into the output slice.
pub type GradientFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// The initial discontinuity `M(x) = 0` separating `u_-` (where `M < 0`)
/// from `u_+` (where `M > 0`).
#[derive(Clone)]
pub struct InitialSurface {
    name: String,
    dim: usize,
    m: FieldFn,
    grad: GradientFn,
    graph: Option<FieldFn>,
}

impl fmt::Debug for InitialSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialSurface")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("graph", &self.graph.is_some())
            .finish()
    }
}

/// Small stack buffer for shifted evaluation points.
const STACK_DIM: usize = 8;

impl InitialSurface {
    /// Builds a surface from `M` and its gradient.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        m: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            m: Arc::new(m),
            grad: Arc::new(grad),
            graph: None,
        }
    }

    /// Declares that `{M = 0}` is the graph `x_n = h(x_1, …, x_{n-1})`.
    pub fn with_graph(mut self, h: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.graph = Some(Arc::new(h));
        self
    }

    /// Name of the surface.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `M(x)`.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.m)(x)
    }

    /// `M(x - shift)`.
    pub fn eval_shifted(&self, x: &[f64], shift: &[f64]) -> f64 {
        if self.dim <= STACK_DIM {
            let mut buf = [0.0; STACK_DIM];
            for i in 0..self.dim {
                buf[i] = x[i] - shift[i];
            }
            (self.m)(&buf[..self.dim])
        } else {
            let y: Vec<f64> = x.iter().zip(shift).map(|(a, b)| a - b).collect();
            (self.m)(&y)
        }
    }

    /// `∇M(x)` written into `out`.
    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        (self.grad)(x, out)
    }

    /// The surface `-M`, whose zero set is the same but whose sides swap.
    pub fn negated(&self) -> Self {
        let m = self.m.clone();
        let g = self.grad.clone();
        Self {
            name: alloc::format!("-({})", self.name),
            dim: self.dim,
            m: Arc::new(move |x| -m(x)),
            grad: Arc::new(move |x, out| {
                g(x, out);
                for v in out.iter_mut() {
                    *v = -*v;
                }
            }),
            graph: self.graph.clone(),
        }
    }

    /// Samples about `count` points of `{M = 0}` inside the box
    /// `[-half_width, half_width]^{n-1}` of free coordinates.
    ///
    /// Graph surfaces are sampled on a uniform lattice of the free
    /// coordinates (an odd count per axis keeps the origin on the lattice).
    /// Other surfaces start from a Kronecker low-discrepancy sequence in the
    /// full box and are projected by Newton steps along `∇M`.
    pub fn zero_level_samples(&self, count: usize, half_width: f64) -> Result<Vec<Vec<f64>>> {
        let n = self.dim;
        let mut out = Vec::new();
        if let Some(h) = &self.graph {
            if n == 1 {
                out.push(vec![h(&[])]);
                return Ok(out);
            }
            let free = n - 1;
            let mut per_axis = math::ceil(math::powf(count.max(1) as f64, 1.0 / free as f64)) as usize;
            if per_axis.is_multiple_of(2) {
                per_axis += 1;
            }
            let total = per_axis.pow(free as u32);
            let mut idx = vec![0usize; free];
            for _ in 0..total {
                let mut p: Vec<f64> = idx
                    .iter()
                    .map(|&k| {
                        if per_axis == 1 {
                            0.0
                        } else {
                            -half_width + 2.0 * half_width * (k as f64) / ((per_axis - 1) as f64)
                        }
                    })
                    .collect();
                let last = h(&p);
                if last.is_finite() {
                    p.push(last);
                    out.push(p);
                }
                for d in 0..free {
                    idx[d] += 1;
                    if idx[d] < per_axis {
                        break;
                    }
                    idx[d] = 0;
                }
            }
        } else {
            // Kronecker sequence with generalized golden ratios
            let phi = {
                let mut x = 2.0f64;
                for _ in 0..64 {
                    x = math::powf(1.0 + x, 1.0 / (n as f64 + 1.0));
                }
                x
            };
            let alpha: Vec<f64> = (1..=n).map(|k| 1.0 / math::powf(phi, k as f64)).collect();
            let mut grad = vec![0.0; n];
            for j in 0..count * 4 {
                if out.len() >= count {
                    break;
                }
                let mut x: Vec<f64> = alpha
                    .iter()
                    .map(|a| {
                        let frac = 0.5 + a * (j as f64 + 1.0);
                        let frac = frac - math::floor(frac);
                        -half_width + 2.0 * half_width * frac
                    })
                    .collect();
                let mut ok = false;
                for _ in 0..60 {
                    let mv = self.eval(&x);
                    if mv.abs() <= 1e-13 {
                        ok = true;
                        break;
                    }
                    self.gradient(&x, &mut grad);
                    let g2: f64 = grad.iter().map(|v| v * v).sum();
                    if !(g2 > 0.0) {
                        break;
                    }
                    for d in 0..n {
                        x[d] -= mv * grad[d] / g2;
                    }
                }
                if ok && x.iter().all(|v| v.abs() <= 4.0 * half_width) {
                    out.push(x);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::NoSurfacePoints);
        }
        Ok(out)
    }

    /// Compares `∇M` with centered differences at the given points (second
    /// order: the error must shrink by 20x between `h = 1e-3` and `1e-4`, or
    /// sit at round-off level).
    pub fn audit_gradient(&self, points: &[Vec<f64>]) -> Result<()> {
        let n = self.dim;
        let mut grad = vec![0.0; n];
        let mut worst = [0.0f64; 2];
        let mut at = 0.0;
        let mut scale: f64 = 0.0;
        for p in points {
            self.gradient(p, &mut grad);
            for d in 0..n {
                for (slot, &h) in [1e-3, 1e-4].iter().enumerate() {
                    let mut a = p.clone();
                    let mut b = p.clone();
                    a[d] += h;
                    b[d] -= h;
                    let fd = (self.eval(&a) - self.eval(&b)) / (2.0 * h);
                    let e = (fd - grad[d]).abs();
                    if e > worst[slot] {
                        worst[slot] = e;
                        if slot == 1 {
                            at = p[0];
                        }
                    }
                    scale = scale.max(grad[d].abs() + self.eval(p).abs());
                }
            }
        }
        if worst[1] <= 0.05 * worst[0] || worst[1] <= 1e-8 * (1.0 + scale) {
            Ok(())
        } else {
            Err(Error::DerivativeMismatch {
                what: alloc::format!("gradient of {}", self.name),
                at,
                error: worst[1],
            })
        }
    }

    /// Checks that `M` changes sign between sampled neighbours only across
    /// its zero set: along each segment between lattice neighbours with
    /// opposite signs, a bisected crossing must satisfy `|M| <= tol`.
    pub fn audit_partition(&self, half_width: f64, per_axis: usize, tol: f64) -> bool {
        let n = self.dim;
        let per_axis = per_axis.max(2);
        let node = |k: usize| -half_width + 2.0 * half_width * (k as f64) / ((per_axis - 1) as f64);
        let total = per_axis.pow(n as u32);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let p: Vec<f64> = idx.iter().map(|&k| node(k)).collect();
            let mp = self.eval(&p);
            for d in 0..n {
                if idx[d] + 1 < per_axis {
                    let mut q = p.clone();
                    q[d] = node(idx[d] + 1);
                    let mq = self.eval(&q);
                    if (mp < 0.0 && mq > 0.0) || (mp > 0.0 && mq < 0.0) {
                        let (mut a, mut b) = (p[d], q[d]);
                        let mut r = p.clone();
                        for _ in 0..200 {
                            let mid = 0.5 * (a + b);
                            r[d] = mid;
                            let mm = self.eval(&r);
                            if (mm < 0.0) == (mp < 0.0) {
                                a = mid;
                            } else {
                                b = mid;
                            }
                            if (b - a).abs() <= 1e-14 * (1.0 + a.abs()) {
                                break;
                            }
                        }
                        r[d] = 0.5 * (a + b);
                        let mut g = vec![0.0; n];
                        self.gradient(&r, &mut g);
                        let slack = tol * (1.0 + math::norm(&g));
                        if self.eval(&r).abs() > slack && (b - a) < 1e-10 {
                            // a jump in M itself: sign change not across the zero set
                            let left = {
                                r[d] = a;
                                self.eval(&r)
                            };
                            let right = {
                                r[d] = b;
                                self.eval(&r)
                            };
                            if left.abs() > slack && right.abs() > slack {
                                return false;
                            }
                        }
                    }
                }
            }
            for d in 0..n {
                idx[d] += 1;
                if idx[d] < per_axis {
                    break;
                }
                idx[d] = 0;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn cubic_plane_graph_samples_lie_on_surface() {
        let s = catalog::cubic_plane();
        let pts = s.zero_level_samples(101, 1.5).unwrap();
        assert_eq!(pts.len(), 101);
        assert!(pts.iter().any(|p| p[0] == 0.0));
        for p in &pts {
            assert!(s.eval(p).abs() < 1e-12);
        }
        s.audit_gradient(&pts).unwrap();
        assert!(s.audit_partition(1.5, 21, 1e-9));
    }

    #[test]
    fn newton_projection_for_implicit_surface() {
        let circle = InitialSurface::new(
            "circle",
            2,
            |x| x[0] * x[0] + x[1] * x[1] - 1.0,
            |x, g| {
                g[0] = 2.0 * x[0];
                g[1] = 2.0 * x[1];
            },
        );
        let pts = circle.zero_level_samples(50, 2.0).unwrap();
        assert!(pts.len() >= 40);
        for p in &pts {
            assert!(circle.eval(p).abs() <= 1e-13);
        }
    }

    #[test]
    fn bad_gradient_detected() {
        let s = InitialSurface::new(
            "bad",
            2,
            |x| x[0] * x[0] * x[0] + x[1],
            |x, g| {
                g[0] = 2.0 * x[0];
                g[1] = 1.0;
            },
        );
        let pts = catalog::cubic_plane().zero_level_samples(11, 1.0).unwrap();
        assert!(s.audit_gradient(&pts).is_err());
    }

    #[test]
    fn negation_swaps_sides() {
        let s = catalog::cubic_plane();
        let t = s.negated();
        let x = [0.3, 0.1];
        assert_eq!(s.eval(&x), -t.eval(&x));
        assert!((s.eval_shifted(&x, &[0.1, 0.2]) - s.eval(&[0.2, -0.1])).abs() < 1e-15);
    }

    #[test]
    fn no_points_is_an_error() {
        let s = InitialSurface::new("never", 2, |_| 1.0, |_, g| g.fill(0.0));
        assert_eq!(s.zero_level_samples(10, 1.0), Err(Error::NoSurfacePoints));
    }
}
