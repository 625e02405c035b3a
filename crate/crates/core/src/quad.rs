//! Numerical quadrature: globally adaptive Gauss-Kronrod (7/15) for scalar
//! and vector integrands, a fixed 5-point Gauss-Legendre rule, and a
//! decade-by-decade summation toward an infinite limit that detects
//! divergence and extrapolates geometric tails.

use alloc::vec;
use alloc::vec::Vec;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const GL5_X: [f64; 3] = [0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL5_W: [f64; 3] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Integral estimate.
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
    /// Whether the requested tolerance was met.
    pub converged: bool,
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTolerance {
    /// Absolute error target.
    pub abs: f64,
    /// Relative error target.
    pub rel: f64,
    /// Maximum number of subintervals.
    pub max_segments: usize,
}

impl QuadTolerance {
    /// Absolute tolerance with a tight relative floor.
    pub fn absolute(abs: f64) -> Self {
        Self {
            abs,
            rel: 1e-14,
            max_segments: 400,
        }
    }
}

fn quadpack_error(k: f64, g: f64, resasc: f64) -> f64 {
    let mut err = (k - g).abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = libm::pow(200.0 * err / resasc, 1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    err
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut resabs = k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv1[j] = f1;
        fv2[j] = f2;
        k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * k;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hk = h.abs();
    let _ = resabs;
    (k * h, quadpack_error(k * h, g * h, resasc * hk))
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// error is below `max(tol.abs, tol.rel * |value|)`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: QuadTolerance) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut segs: Vec<(f64, f64, f64, f64)> = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    let mut evaluations = 15;
    loop {
        if !total.is_finite() {
            return Quadrature {
                value: total,
                error: f64::INFINITY,
                evaluations,
                converged: false,
            };
        }
        if err <= tol.abs.max(tol.rel * total.abs()) {
            break;
        }
        if segs.len() >= tol.max_segments {
            return Quadrature {
                value: total,
                error: err,
                evaluations,
                converged: false,
            };
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.3 > acc.1 { (i, s.3) } else { acc });
        let (sa, sb, sv, se) = segs.swap_remove(idx);
        let m = 0.5 * (sa + sb);
        if m <= sa.min(sb) || m >= sa.max(sb) {
            segs.push((sa, sb, sv, se));
            return Quadrature {
                value: total,
                error: err,
                evaluations,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&mut f, sa, m);
        let (v2, e2) = gk15(&mut f, m, sb);
        evaluations += 30;
        total += v1 + v2 - sv;
        err += e1 + e2 - se;
        segs.push((sa, m, v1, e1));
        segs.push((m, sb, v2, e2));
    }
    // re-sum to shed accumulated cancellation from the running updates
    let value: f64 = segs.iter().map(|s| s.2).sum();
    let error: f64 = segs.iter().map(|s| s.3).sum();
    Quadrature {
        value,
        error,
        evaluations,
        converged: true,
    }
}

fn gk15_vec<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64], out: &mut [f64]) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    let mut resabs = vec![0.0; dim];
    let mut vals = vec![0.0; 15 * dim];
    f(c, buf);
    for d in 0..dim {
        k[d] = buf[d] * WGK[7];
        g[d] = buf[d] * WG[3];
        resabs[d] = k[d].abs();
        vals[14 * dim + d] = buf[d];
    }
    for j in 0..7 {
        let x = h * XGK[j];
        f(c - x, buf);
        vals[2 * j * dim..(2 * j + 1) * dim].copy_from_slice(&buf[..dim]);
        f(c + x, buf);
        vals[(2 * j + 1) * dim..(2 * j + 2) * dim].copy_from_slice(&buf[..dim]);
        for d in 0..dim {
            let f1 = vals[2 * j * dim + d];
            let f2 = vals[(2 * j + 1) * dim + d];
            k[d] += WGK[j] * (f1 + f2);
            resabs[d] += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                g[d] += WG[j / 2] * (f1 + f2);
            }
        }
    }
    let hk = h.abs();
    let mut worst: f64 = 0.0;
    for d in 0..dim {
        let mean = 0.5 * k[d];
        let mut resasc = WGK[7] * (vals[14 * dim + d] - mean).abs();
        for j in 0..7 {
            resasc += WGK[j] * ((vals[2 * j * dim + d] - mean).abs() + (vals[(2 * j + 1) * dim + d] - mean).abs());
        }
        out[d] = k[d] * h;
        let _ = resabs[d];
        let e = quadpack_error(k[d] * h, g[d] * h, resasc * hk);
        worst = worst.max(if e.is_nan() { f64::INFINITY } else { e });
    }
    worst
}

/// Vector-valued version of [`integrate`]: `f(x, out)` fills `dim`
/// components and the error criterion applies to the worst component.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    tol: QuadTolerance,
) -> (Vec<f64>, Quadrature) {
    let mut buf = vec![0.0; dim];
    if a == b {
        return (
            vec![0.0; dim],
            Quadrature {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
                converged: true,
            },
        );
    }
    let mut first = vec![0.0; dim];
    let e = gk15_vec(&mut f, a, b, dim, &mut buf, &mut first);
    let mut segs: Vec<(f64, f64, Vec<f64>, f64)> = vec![(a, b, first, e)];
    let mut evaluations = 15;
    let mut converged = true;
    loop {
        let err: f64 = segs.iter().map(|s| s.3).sum();
        let mut mag: f64 = 0.0;
        for d in 0..dim {
            let v: f64 = segs.iter().map(|s| s.2[d]).sum();
            mag = mag.max(v.abs());
        }
        if !err.is_finite() && !mag.is_finite() {
            converged = false;
            break;
        }
        if err <= tol.abs.max(tol.rel * mag) {
            break;
        }
        if segs.len() >= tol.max_segments {
            converged = false;
            break;
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.3 > acc.1 { (i, s.3) } else { acc });
        let (sa, sb, sv, se) = segs.swap_remove(idx);
        let m = 0.5 * (sa + sb);
        if m <= sa.min(sb) || m >= sa.max(sb) {
            segs.push((sa, sb, sv, se));
            converged = false;
            break;
        }
        let mut v1 = vec![0.0; dim];
        let mut v2 = vec![0.0; dim];
        let e1 = gk15_vec(&mut f, sa, m, dim, &mut buf, &mut v1);
        let e2 = gk15_vec(&mut f, m, sb, dim, &mut buf, &mut v2);
        evaluations += 30;
        segs.push((sa, m, v1, e1));
        segs.push((m, sb, v2, e2));
    }
    let mut values = vec![0.0; dim];
    for s in &segs {
        for d in 0..dim {
            values[d] += s.2[d];
        }
    }
    let error = segs.iter().map(|s| s.3).sum();
    (
        values.clone(),
        Quadrature {
            value: values.first().copied().unwrap_or(0.0),
            error,
            evaluations,
            converged,
        },
    )
}

/// Five-point Gauss-Legendre rule on `[a, b]`, evaluated symmetrically about
/// the midpoint so that swapping `a` and `b` only flips the sign.
pub fn gauss_legendre5<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a).abs();
    let mut s = GL5_W[0] * f(m);
    for j in 1..3 {
        s += GL5_W[j] * (f(m - h * GL5_X[j]) + f(m + h * GL5_X[j]));
    }
    let sign = if b >= a { 1.0 } else { -1.0 };
    sign * s * h
}

/// Options for [`integrate_to_limit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailOptions {
    /// Width of one summation chunk in the integration variable.
    pub chunk: f64,
    /// Absolute tolerance for the whole sum.
    pub tol: f64,
    /// Partial sums beyond this magnitude are reported as divergent.
    pub divergence_cap: f64,
}

impl TailOptions {
    /// Decade chunks (`ln 10`) with the given tolerance; divergence is
    /// declared once partial sums exceed `1/tol`.
    pub fn decades(tol: f64) -> Self {
        Self {
            chunk: core::f64::consts::LN_10,
            tol,
            divergence_cap: 1.0 / tol,
        }
    }
}

/// Integrates `f` from `start` toward `limit` (either direction) in
/// fixed-width chunks, adding each chunk's adaptive Gauss-Kronrod value.
///
/// Designed for integrands in a logarithmic chart where each chunk is one
/// decade of distance to a singular point: the sum stops once contributions
/// decay geometrically below tolerance (the remaining tail is extrapolated),
/// returns `±∞` when partial sums pass `divergence_cap` or when the chunk
/// ratio stays at one until `limit` is reached, and otherwise extrapolates
/// the tail from the last ratio.
pub fn integrate_to_limit<F: FnMut(f64) -> f64>(mut f: F, start: f64, limit: f64, opts: TailOptions) -> f64 {
    let dir = if limit >= start { 1.0 } else { -1.0 };
    let step = dir * opts.chunk;
    let chunk_tol = QuadTolerance::absolute(0.05 * opts.tol);
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    let mut last_ratio: Option<f64> = None;
    let mut a = start;
    let mut zero_run = 0;
    while (a + step - limit) * dir <= 0.0 {
        let b = a + step;
        let c = integrate(&mut f, a, b, chunk_tol).value;
        if !c.is_finite() {
            return c;
        }
        sum += c;
        if sum.abs() > opts.divergence_cap {
            return sum.signum() * f64::INFINITY;
        }
        if c == 0.0 {
            zero_run += 1;
            if zero_run >= 2 {
                return sum;
            }
        } else {
            zero_run = 0;
        }
        if let Some(p) = prev {
            if p != 0.0 {
                let r = c / p;
                if (0.0..0.95).contains(&r) {
                    let tail = c * r / (1.0 - r);
                    if tail.abs() <= 0.05 * opts.tol && c.abs() <= opts.tol {
                        return sum + tail;
                    }
                }
                last_ratio = Some(r);
            }
        }
        prev = Some(c);
        a = b;
    }
    match (prev, last_ratio) {
        (Some(c), Some(r)) if (0.0..0.999).contains(&r) => sum + c * r / (1.0 - r),
        (Some(c), Some(_)) if c.abs() > opts.tol => sum.signum() * f64::INFINITY,
        _ => {
            // remainder shorter than one chunk
            if (limit - a) * dir > 0.0 {
                sum + integrate(&mut f, a, limit, chunk_tol).value
            } else {
                sum
            }
        }
    }
}
