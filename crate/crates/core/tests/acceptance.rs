//! Acceptance checks for the library, one line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so that every line is
//! printed whether or not it passes; the process exits non-zero if any
//! criterion fails.

use std::time::Instant;

use nsriemann_core::closed_form::{
    decay_chi, decay_extinction, decay_ubar, nonuniqueness_report, DecayOracle, GrowthBranch, GrowthKind,
    NonuniquenessOptions,
};
use nsriemann_core::grid::{linspace, GridField, Provenance};
use nsriemann_core::riemann::{Region, RiemannProblem, WaveOptions, WaveSolution};
use nsriemann_core::source::{estimate_right_lipschitz, right_lipschitz_trend};
use nsriemann_core::verify::{kruzkov_residual, l1_cone_distance, shock_audit, TestBump};
use nsriemann_core::viscous::{
    convergence_study, solve_viscous, uniform_axis, LadderRung, SchemeConfig, Splitting, StudySetup,
};
use nsriemann_core::{catalog, CharFlow, FlowOptions};

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn decay_problem(u_minus: f64, u_plus: f64) -> WaveSolution {
    let pr = RiemannProblem {
        fluxes: catalog::burgers2d(),
        source: catalog::neg_cbrt(),
        surface: catalog::cubic_plane(),
        u_minus,
        u_plus,
    };
    WaveSolution::construct(pr, WaveOptions::default()).expect("construction")
}

fn flow_golden() -> Outcome {
    let start = Instant::now();
    let flow = CharFlow::new(catalog::neg_cbrt(), FlowOptions::default()).unwrap();
    let mut worst: f64 = 0.0;
    let mut worst_t_star: f64 = 0.0;
    for &s in &linspace(-2.0, 2.0, 81) {
        let rec = flow.extinction_time(s).unwrap();
        worst_t_star = worst_t_star.max((rec.t_star - decay_extinction(s)).abs());
        for &t in &linspace(0.0, 3.0, 61) {
            worst = worst.max((flow.u_bar(t, s).unwrap() - decay_ubar(t, s)).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-8 && worst_t_star <= 1e-10 && secs < 10.0,
        format!("max |u_bar error| {worst:.2e}, max |t* error| {worst_t_star:.2e}, {secs:.2} s"),
    )
}

fn chi_golden() -> Outcome {
    let flow = CharFlow::new(catalog::neg_cbrt(), FlowOptions::default()).unwrap();
    let fluxes = catalog::burgers2d();
    let mut worst: f64 = 0.0;
    for &s in &linspace(-2.0, 2.0, 81) {
        let traj = flow.trajectory(s).unwrap();
        for &t in &linspace(0.0, 3.0, 61) {
            let chi = traj.chi_at(&fluxes, t).unwrap();
            let want = decay_chi(t, s);
            worst = worst.max((chi[0] - want[0]).abs()).max((chi[1] - want[1]).abs());
        }
    }
    outcome(worst <= 1e-7, format!("max |chi error| {worst:.2e}"))
}

fn constructor_vs_oracle() -> Outcome {
    let start = Instant::now();
    let ts: Vec<f64> = (1..=20).map(|i| 0.1 * i as f64).collect();
    let xs = linspace(-1.5, 1.5, 40);
    let mut worst: f64 = 0.0;
    let (mut tube, mut agree) = (0usize, 0usize);
    let mut compared = 0usize;
    for (um, up) in [(1.0, 0.5), (1.0, -1.0), (-1.0, 1.0)] {
        let sol = decay_problem(um, up);
        let oracle = DecayOracle::new(um, up).unwrap();
        for &t in &ts {
            let slice = sol.at(t).unwrap();
            let os = oracle.slice(t).unwrap();
            let region: Vec<Region> = xs
                .iter()
                .flat_map(|&x| xs.iter().map(move |&y| (x, y)))
                .map(|(x, y)| os.region(x, y))
                .collect();
            let n = xs.len();
            for i in 0..n {
                for j in 0..n {
                    let here = region[i * n + j];
                    let near_surface = (i.saturating_sub(2)..(i + 3).min(n))
                        .any(|a| (j.saturating_sub(2)..(j + 3).min(n)).any(|b| region[a * n + b] != here));
                    let p = [xs[i], xs[j]];
                    if near_surface {
                        tube += 1;
                        if slice.region(&p) == here {
                            agree += 1;
                        }
                    } else {
                        let v = slice.evaluate(&p).unwrap();
                        worst = worst.max((v - os.value(p[0], p[1]).unwrap()).abs());
                        compared += 1;
                    }
                }
            }
        }
    }
    let ratio = if tube == 0 { 1.0 } else { agree as f64 / tube as f64 };
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-6 && ratio >= 0.999 && secs < 60.0,
        format!(
            "max |difference| {worst:.2e} on {compared} points, region agreement {agree}/{tube} in tubes, {secs:.1} s"
        ),
    )
}

fn admissibility() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (um, up) in [(1.0, 0.5), (0.5, -1.0), (1.0, -1.0)] {
        let sol = decay_problem(um, up);
        let t_end = sol.max_extinction();
        // 8 times with 25 surface points each (an odd count keeps x = 0)
        let times: Vec<f64> = (0..8).map(|i| t_end * (i as f64 + 0.5) / 8.0).collect();
        let audit = shock_audit(&sol, &times, 25, 1.0, 101).unwrap();
        ok &= audit.points == 200 && audit.passes(1e-6, 1e-10);
        lines.push(format!(
            "({um}, {up}): {} points, max |RH| {:.2e}, min margin {:.2e}",
            audit.points, audit.max_rh, audit.min_margin
        ));
    }
    outcome(ok, lines.join("; "))
}

fn kruzkov() -> Outcome {
    let sol = decay_problem(1.0, -1.0);
    let t_axis = linspace(0.0, 1.4, 64);
    let space = vec![linspace(-1.5, 1.5, 128), linspace(-1.5, 1.5, 128)];
    let field = GridField::from_solution(&sol, t_axis, space).unwrap();
    let h_grid = field.max_spacing();
    let fluxes = catalog::burgers2d();
    let source = catalog::neg_cbrt();
    let mut worst = f64::INFINITY;
    for &tc in &[0.35, 0.7, 1.05] {
        for &xc in &[-0.5, 0.0, 0.5] {
            for &yc in &[-0.5, 0.0, 0.5] {
                let bump = TestBump::new(vec![tc, xc, yc], &[0.2, 0.2, 0.2]).unwrap();
                for &k in &linspace(-1.0, 1.0, 11) {
                    worst = worst.min(kruzkov_residual(&field, &fluxes, &source, k, &bump).unwrap());
                }
            }
        }
    }
    let threshold = -5.0 * h_grid;
    outcome(
        worst >= threshold,
        format!("min residual {worst:.3e} against threshold {threshold:.3e}"),
    )
}

fn extinction() -> Outcome {
    let ts = linspace(1.5, 3.0, 16);
    let xs = linspace(-1.5, 1.5, 40);
    let mut worst: f64 = 0.0;
    for (um, up) in [(1.0, 0.5), (0.5, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
        let sol = decay_problem(um, up);
        for &t in &ts {
            let slice = sol.at(t).unwrap();
            for &x in &xs {
                for &y in &xs {
                    worst = worst.max(slice.evaluate(&[x, y]).unwrap().abs());
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("max |u| for t >= 1.5: {worst:.2e}"))
}

fn contraction() -> Outcome {
    let flow = CharFlow::new(catalog::neg_cbrt(), FlowOptions::default()).unwrap();
    let dx = 1.0 / 512.0;
    let axis = uniform_axis(-2.0, 2.0, dx).unwrap();
    let field = |f: &dyn Fn(f64) -> f64| {
        GridField::new(
            vec![0.0],
            vec![axis.clone()],
            axis.iter().map(|&x| f(x)).collect(),
            Provenance::Oracle,
        )
        .unwrap()
    };
    let riemann = |x: f64| if x < 0.0 { 1.0 } else { 0.5 };
    let u0 = field(&riemann);
    let v0 = field(&|x| if x.abs() <= 0.25 { -0.5 } else { riemann(x) });
    let times: Vec<f64> = (1..=7).map(|i| 0.1 * i as f64).collect();
    let config = SchemeConfig::new(1e-3, times.clone());
    let u = solve_viscous(&config, &catalog::burgers1d(), &flow, &u0).unwrap();
    let v = solve_viscous(&config, &catalog::burgers1d(), &flow, &v0).unwrap();
    let speed = 2f64.sqrt();
    let d: Vec<f64> = times
        .iter()
        .map(|&t| l1_cone_distance(&u.field, &v.field, 1.0, speed, t).unwrap())
        .collect();
    let ok = d.windows(2).all(|w| w[1] <= w[0] + 5.0 * dx);
    let list: Vec<String> = d.iter().map(|x| format!("{x:.4}")).collect();
    outcome(ok, format!("cone distances [{}]", list.join(", ")))
}

fn vanishing_viscosity() -> Outcome {
    let sol = decay_problem(1.0, 0.5);
    let setup = StudySetup {
        domain: vec![(-1.5, 1.5), (-1.5, 1.5)],
        region: vec![(-1.0, 1.0), (-1.0, 1.0)],
        t: 1.0,
        cfl: 0.9,
        splitting: Splitting::ExactSource,
    };
    let rungs = [
        LadderRung {
            epsilon: 4e-3,
            dx: 1.0 / 64.0,
        },
        LadderRung {
            epsilon: 2e-3,
            dx: 1.0 / 128.0,
        },
        LadderRung {
            epsilon: 1e-3,
            dx: 1.0 / 256.0,
        },
    ];
    let rows = convergence_study(&sol, &rungs, &setup).unwrap();
    // rows are sorted by increasing ε, so distances must increase along them
    let ok = rows.windows(2).all(|w| w[0].distance < w[1].distance);
    let list: Vec<String> = rows
        .iter()
        .rev()
        .map(|r| format!("(eps {}, dx 1/{}) {:.5}", r.epsilon, (1.0 / r.dx).round(), r.distance))
        .collect();
    outcome(ok, list.join(", "))
}

fn nonuniqueness() -> Outcome {
    let opts = NonuniquenessOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (kind, um) in [(GrowthKind::Shock, 1.0), (GrowthKind::Rarefaction, -1.0)] {
        let r = nonuniqueness_report(kind, um, &GrowthBranch::immediate(), &opts).unwrap();
        ok &= r.all_admissible && r.all_pairs_distinct;
        let worst_rh = r.audits.iter().fold(0.0f64, |m, a| m.max(a.max_rh));
        let min_d = r
            .distances
            .iter()
            .fold(f64::INFINITY, |m, d| m.min(d.slice.min(d.space_time)));
        parts.push(format!(
            "{kind:?}: admissible {}, max RH {worst_rh:.1e}, min pairwise distance {min_d:.3}",
            r.all_admissible
        ));
    }
    outcome(ok, parts.join("; "))
}

fn lipschitz_detection() -> Outcome {
    let grow = catalog::pos_cbrt();
    let decay = catalog::neg_cbrt();
    let l_grow = estimate_right_lipschitz(&grow, -1.0, 1.0, 1_000_000).unwrap();
    let trend = right_lipschitz_trend(&grow, -1.0, 1.0, &[10_000, 100_000, 1_000_000]).unwrap();
    let l_decay = estimate_right_lipschitz(&decay, -1.0, 1.0, 1_000_000).unwrap();
    outcome(
        l_grow > 1e3 && trend.unbounded && l_decay <= 0.0,
        format!(
            "u^(1/3): L = {l_grow:.1}, unbounded trend {}; -u^(1/3): L = {l_decay:.3e}",
            trend.unbounded
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("characteristic flow golden values", flow_golden),
        ("characteristic shifts golden values", chi_golden),
        ("constructed solution vs closed form", constructor_vs_oracle),
        ("shock admissibility audit", admissibility),
        ("Kruzkov entropy audit", kruzkov),
        ("finite-time extinction", extinction),
        ("L1 contraction of viscous runs", contraction),
        ("vanishing-viscosity ordering", vanishing_viscosity),
        ("non-uniqueness for u^(1/3)", nonuniqueness),
        ("non-right-Lipschitz detection", lipschitz_detection),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{verdict}] {name}: {} ({:.1} s)",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
