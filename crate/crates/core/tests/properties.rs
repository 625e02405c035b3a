use nsriemann_core::closed_form::{decay_chi, decay_ubar, DecayOracle};
use nsriemann_core::grid::{linspace, GridField, Provenance};
use nsriemann_core::riemann::{RiemannProblem, WaveOptions, WaveSolution};
use nsriemann_core::verify::{geometric_entropy_margin, rh_residual};
use nsriemann_core::viscous::{solve_viscous, uniform_axis, SchemeConfig};
use nsriemann_core::{catalog, CharFlow, FlowOptions};
use proptest::prelude::*;
use std::sync::OnceLock;

fn decay_flow() -> &'static CharFlow {
    static FLOW: OnceLock<CharFlow> = OnceLock::new();
    FLOW.get_or_init(|| CharFlow::new(catalog::neg_cbrt(), FlowOptions::default()).unwrap())
}

fn logistic_flow() -> &'static CharFlow {
    static FLOW: OnceLock<CharFlow> = OnceLock::new();
    FLOW.get_or_init(|| CharFlow::new(catalog::logistic(), FlowOptions::default()).unwrap())
}

fn case2() -> &'static WaveSolution {
    static SOL: OnceLock<WaveSolution> = OnceLock::new();
    SOL.get_or_init(|| {
        let pr = RiemannProblem {
            fluxes: catalog::burgers2d(),
            source: catalog::neg_cbrt(),
            surface: catalog::cubic_plane(),
            u_minus: -1.0,
            u_plus: 1.0,
        };
        WaveSolution::construct(pr, WaveOptions::default()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flow_is_monotone_in_the_start(t in 0.0f64..3.0, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (s1, s2) = if a <= b { (a, b) } else { (b, a) };
        let flow = decay_flow();
        prop_assert!(flow.u_bar(t, s1).unwrap() <= flow.u_bar(t, s2).unwrap() + 1e-12);
        // the logistic flow escapes to -∞ from negative states
        let (l1, l2) = (s1.abs(), s2.abs());
        let (l1, l2) = (l1.min(l2), l1.max(l2));
        let flow = logistic_flow();
        prop_assert!(flow.u_bar(t, l1).unwrap() <= flow.u_bar(t, l2).unwrap() + 1e-12);
    }

    #[test]
    fn flow_is_a_semigroup(t1 in 0.0f64..1.5, t2 in 0.0f64..1.5, s in -2.0f64..2.0) {
        for (flow, s) in [(decay_flow(), s), (logistic_flow(), s.abs())] {
            let direct = flow.u_bar(t1 + t2, s).unwrap();
            let composed = flow.u_bar(t2, flow.u_bar(t1, s).unwrap()).unwrap();
            prop_assert!((direct - composed).abs() < 1e-9, "{direct} vs {composed}");
        }
    }

    #[test]
    fn flow_solves_the_ode_before_extinction(frac in 0.05f64..0.9, s in prop_oneof![-2.0f64..-0.2, 0.2f64..2.0]) {
        let flow = decay_flow();
        let t_star = flow.extinction_time(s).unwrap().t_star;
        let t = frac * t_star;
        let h = 1e-6;
        let d = (flow.u_bar(t + h, s).unwrap() - flow.u_bar(t - h, s).unwrap()) / (2.0 * h);
        let u = flow.u_bar(t, s).unwrap();
        prop_assert!((d + u.cbrt()).abs() < 1e-5, "{d} vs {}", -u.cbrt());
    }

    #[test]
    fn flow_matches_the_explicit_formula(t in 0.0f64..3.0, s in -2.0f64..2.0) {
        let flow = decay_flow();
        prop_assert!((flow.u_bar(t, s).unwrap() - decay_ubar(t, s)).abs() < 1e-8);
        let chi = flow.chi(&catalog::burgers2d(), t, s).unwrap();
        let want = decay_chi(t, s);
        prop_assert!((chi[0] - want[0]).abs() < 1e-7 && (chi[1] - want[1]).abs() < 1e-7);
    }

    #[test]
    fn shock_shift_is_symmetric_in_the_states(t in 0.0f64..2.0, a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let fluxes = catalog::burgers2d();
        let ab = decay_flow().bracket_chi(&fluxes, t, a, b).unwrap();
        let ba = decay_flow().bracket_chi(&fluxes, t, b, a).unwrap();
        for i in 0..2 {
            prop_assert!((ab[i] - ba[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn rh_residual_is_antisymmetric(a in -2.0f64..2.0, b in -2.0f64..2.0, nt in -1.0f64..1.0, nx in -1.0f64..1.0, ny in -1.0f64..1.0) {
        let fluxes = catalog::burgers2d();
        let n = [nt, nx, ny];
        let m = [-nt, -nx, -ny];
        let r = rh_residual(&fluxes, &n, a, b);
        prop_assert!((r + rh_residual(&fluxes, &n, b, a)).abs() < 1e-12);
        prop_assert!((r + rh_residual(&fluxes, &m, a, b)).abs() < 1e-12);
    }

    #[test]
    fn burgers_shocks_with_rh_normal_are_admissible(ur in -2.0f64..2.0, jump in 0.01f64..2.0) {
        // u_l > u_r with the normal of a surface moving at (u_l + u_r)/2
        let ul = ur + jump;
        let speed = 0.5 * (ul + ur);
        let norm = (1.0 + speed * speed).sqrt();
        let n = [speed / norm, -1.0 / norm];
        let fluxes = catalog::burgers1d();
        prop_assert!(rh_residual(&fluxes, &n, ul, ur).abs() < 1e-12);
        prop_assert!(geometric_entropy_margin(&fluxes, &n, ul, ur, 101).unwrap() >= -1e-12);
    }

    #[test]
    fn rarefaction_values_stay_between_the_state_flows(t in 0.0f64..2.0, x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let sol = case2();
        let v = sol.at(t).unwrap().evaluate(&[x, y]).unwrap();
        let lo = decay_ubar(t, -1.0);
        let hi = decay_ubar(t, 1.0);
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "{v} outside [{lo}, {hi}]");
    }

    #[test]
    fn constructed_rarefaction_matches_closed_form(t in 0.01f64..1.6, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let slice = case2().at(t).unwrap();
        let oracle = DecayOracle::new(-1.0, 1.0).unwrap().slice(t).unwrap();
        prop_assert!((slice.evaluate(&[x, y]).unwrap() - oracle.value(x, y).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn grid_index_round_trip(nx in 1usize..6, ny in 1usize..6, i in 0usize..36) {
        let axes = vec![linspace(0.0, 1.0, nx.max(2)), linspace(0.0, 1.0, ny.max(2))];
        let f = GridField::sample(vec![0.0], axes, Provenance::Oracle, |_, p| Ok(p[0] + p[1])).unwrap();
        let flat = i % f.points_per_time();
        let mut idx = [0usize; 2];
        f.unflatten(flat, &mut idx);
        prop_assert_eq!(f.flat_space_index(&idx), flat);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn viscous_scheme_keeps_the_state_range(a in -1.0f64..1.0, b in -1.0f64..1.0, w in 0.1f64..0.6) {
        let flow = decay_flow();
        let axis = uniform_axis(-1.0, 1.0, 1.0 / 64.0).unwrap();
        let values: Vec<f64> = axis.iter().map(|&x| if x.abs() < w { a } else { b }).collect();
        let initial = GridField::new(vec![0.0], vec![axis], values, Provenance::Oracle).unwrap();
        let times = vec![0.1, 0.2, 0.3];
        let run = solve_viscous(&SchemeConfig::new(1e-3, times.clone()), &catalog::burgers1d(), flow, &initial).unwrap();
        for (it, &t) in times.iter().enumerate() {
            let lo = flow.u_bar(t, a.min(b)).unwrap();
            let hi = flow.u_bar(t, a.max(b)).unwrap();
            for &v in run.field.time_level(it) {
                prop_assert!(v >= lo - 1e-6 && v <= hi + 1e-6, "{v} outside [{lo}, {hi}] at t {t}");
            }
        }
    }
}
