//! Ready-made fluxes, source terms and initial surfaces.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flux::{FluxComponent, FluxSet};
use crate::math;
use crate::source::{KnownZero, SourceTerm};
use crate::surface::InitialSurface;

/// One-dimensional Burgers flux `u²/2`.
pub fn burgers1d() -> FluxSet {
    FluxSet::new("burgers1d", vec![FluxComponent::new(|u| 0.5 * u * u, |u| u, |_| 1.0)]).expect("non-empty")
}

/// The two-dimensional flux `(u²/2, u⁴/4)`.
pub fn burgers2d() -> FluxSet {
    FluxSet::new(
        "burgers2d",
        vec![
            FluxComponent::new(|u| 0.5 * u * u, |u| u, |_| 1.0),
            FluxComponent::new(|u| 0.25 * u * u * u * u, |u| u * u * u, |u| 3.0 * u * u),
        ],
    )
    .expect("non-empty")
}

fn poly_eval(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * u + a)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect()
}

/// Polynomial fluxes, one coefficient list `[c_0, c_1, …]` per component
/// (`f_i(u) = Σ c_k u^k`).
pub fn polynomial_flux(coefficients: &[Vec<f64>]) -> Result<FluxSet> {
    let comps = coefficients
        .iter()
        .map(|c| {
            let c0 = c.clone();
            let c1 = poly_derivative(&c0);
            let c2 = poly_derivative(&c1);
            FluxComponent::new(
                move |u| poly_eval(&c0, u),
                move |u| poly_eval(&c1, u),
                move |u| poly_eval(&c2, u),
            )
        })
        .collect();
    FluxSet::new(format!("polynomial{coefficients:?}"), comps)
}

/// `g(u) = -u^{1/3}`: right-Lipschitz, absorbing at 0 in finite time.
pub fn neg_cbrt() -> SourceTerm {
    SourceTerm::new("neg_cbrt", |u| -math::cbrt(u))
        .with_derivative(|u| {
            if u == 0.0 {
                f64::NEG_INFINITY
            } else {
                -1.0 / (3.0 * math::powf(u.abs(), 2.0 / 3.0))
            }
        })
        .with_zeros(vec![KnownZero::Point(0.0)])
}

/// `g(u) = u^{1/3}`: not right-Lipschitz at 0.
pub fn pos_cbrt() -> SourceTerm {
    SourceTerm::new("pos_cbrt", math::cbrt)
        .with_derivative(|u| {
            if u == 0.0 {
                f64::INFINITY
            } else {
                1.0 / (3.0 * math::powf(u.abs(), 2.0 / 3.0))
            }
        })
        .with_zeros(vec![KnownZero::Point(0.0)])
}

/// `g(u) = λu`.
pub fn linear_source(lambda: f64) -> SourceTerm {
    let zeros = if lambda == 0.0 {
        vec![KnownZero::Plateau(f64::NEG_INFINITY, f64::INFINITY)]
    } else {
        vec![KnownZero::Point(0.0)]
    };
    SourceTerm::new(format!("linear:{lambda}"), move |u| lambda * u)
        .with_derivative(move |_| lambda)
        .with_zeros(zeros)
}

/// `g(u) = u(1 - u)`.
pub fn logistic() -> SourceTerm {
    SourceTerm::new("logistic", |u| u * (1.0 - u))
        .with_derivative(|u| 1.0 - 2.0 * u)
        .with_zeros(vec![KnownZero::Point(0.0), KnownZero::Point(1.0)])
}

/// `g ≡ 0`.
pub fn zero_source() -> SourceTerm {
    SourceTerm::new("zero", |_| 0.0)
        .with_derivative(|_| 0.0)
        .with_zeros(vec![KnownZero::Plateau(f64::NEG_INFINITY, f64::INFINITY)])
}

/// `M(x, y) = x³ + y`, the graph `y = -x³`.
pub fn cubic_plane() -> InitialSurface {
    InitialSurface::new(
        "cubic_plane",
        2,
        |x| x[0] * x[0] * x[0] + x[1],
        |x, g| {
            g[0] = 3.0 * x[0] * x[0];
            g[1] = 1.0;
        },
    )
    .with_graph(|x| -x[0] * x[0] * x[0])
}

/// Affine surface `M(x) = a·x + c`.
pub fn plane(a: Vec<f64>, c: f64) -> Result<InitialSurface> {
    if a.is_empty() || a.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument("plane needs a nonzero normal".into()));
    }
    let n = a.len();
    let a1 = a.clone();
    let a2 = a.clone();
    let mut s = InitialSurface::new(
        format!("plane{a:?}+{c}"),
        n,
        move |x| a1.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + c,
        move |_, g| g.copy_from_slice(&a2),
    );
    let last = a[n - 1];
    if last != 0.0 {
        let a3 = a;
        s = s.with_graph(move |free| {
            let partial: f64 = a3.iter().zip(free).map(|(p, q)| p * q).sum();
            -(partial + c) / last
        });
    }
    Ok(s)
}

/// Polynomial surface `M(x) = Σ c · x^e` from `(coefficient, exponents)`
/// terms; its zero set is sampled by Newton projection.
pub fn polynomial_surface(dim: usize, terms: Vec<(f64, Vec<u32>)>) -> Result<InitialSurface> {
    if terms.iter().any(|(_, e)| e.len() != dim) {
        return Err(Error::InvalidArgument(format!(
            "every exponent list needs {dim} entries"
        )));
    }
    let t1 = terms.clone();
    let t2 = terms;
    Ok(InitialSurface::new(
        "polynomial",
        dim,
        move |x| {
            t1.iter()
                .map(|(c, e)| c * e.iter().zip(x).map(|(&k, &v)| libm::pow(v, k as f64)).product::<f64>())
                .sum()
        },
        move |x, g| {
            g.fill(0.0);
            for (c, e) in &t2 {
                for d in 0..x.len() {
                    if e[d] == 0 {
                        continue;
                    }
                    let mut term = c * e[d] as f64;
                    for (j, (&k, &v)) in e.iter().zip(x).enumerate() {
                        let p = if j == d { k - 1 } else { k };
                        term *= libm::pow(v, p as f64);
                    }
                    g[d] += term;
                }
            }
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_flux_matches_burgers() {
        let p = polynomial_flux(&[vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 0.0, 0.0, 0.25]]).unwrap();
        let b = burgers2d();
        for &u in &[-1.3, 0.0, 0.7] {
            for i in 0..2 {
                assert!((p.f(i, u) - b.f(i, u)).abs() < 1e-15);
                assert!((p.df(i, u) - b.df(i, u)).abs() < 1e-15);
                assert!((p.d2f(i, u) - b.d2f(i, u)).abs() < 1e-15);
            }
        }
        p.audit_derivatives().unwrap();
    }

    #[test]
    fn polynomial_surface_gradient() {
        let s = polynomial_surface(2, vec![(1.0, vec![3, 0]), (1.0, vec![0, 1])]).unwrap();
        let c = cubic_plane();
        let pts = c.zero_level_samples(21, 1.0).unwrap();
        s.audit_gradient(&pts).unwrap();
        let mut g1 = [0.0; 2];
        let mut g2 = [0.0; 2];
        s.gradient(&[0.4, 0.2], &mut g1);
        c.gradient(&[0.4, 0.2], &mut g2);
        assert!((g1[0] - g2[0]).abs() < 1e-15 && g1[1] == g2[1]);
    }

    #[test]
    fn plane_graph() {
        let p = plane(vec![1.0, 2.0], 0.5).unwrap();
        let pts = p.zero_level_samples(5, 1.0).unwrap();
        for q in pts {
            assert!(p.eval(&q).abs() < 1e-15);
        }
        assert!(plane(vec![0.0], 1.0).is_err());
    }
}
