//! The subcommands.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use nsriemann_core::closed_form::{decay_chi, decay_ubar, nonuniqueness_report, DecayOracle, NonuniquenessReport};
use nsriemann_core::grid::{linspace, GridField};
use nsriemann_core::riemann::{HVerdict, Region, RiemannProblem, WaveKind, WaveOptions, WaveSolution};
use nsriemann_core::verify::{
    geometric_entropy_margin, kruzkov_residual, rh_residual, shock_audit, TestBump, VerificationReport,
};
use nsriemann_core::viscous::{convergence_study, ConvergenceRow};
use nsriemann_core::{catalog, CharFlow, FlowOptions};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::csvio;
use crate::error::CliError;
use crate::scenario::{GridSection, Scenario, VerifySection};

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Common {
    /// Scenario file.
    pub scenario: Option<PathBuf>,
    /// Output directory.
    pub out: PathBuf,
    /// Tolerance override.
    pub tol: Option<f64>,
}

impl Common {
    fn scenario(&self) -> Result<Scenario, CliError> {
        let path = self
            .scenario
            .as_ref()
            .ok_or_else(|| CliError::Scenario("this command needs --scenario".into()))?;
        Scenario::load(path)
    }

    fn out_file(&self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Output(format!("cannot create {}: {e}", self.out.display())))?;
        Ok(self.out.join(name))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Output(format!("cannot create {}: {e}", path.display())))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let w = create(path)?;
    serde_json::to_writer_pretty(w, value).map_err(|e| CliError::Output(e.to_string()))
}

fn kind_name(kind: WaveKind) -> &'static str {
    match kind {
        WaveKind::Shock => "shock",
        WaveKind::Rarefaction => "rarefaction",
        WaveKind::Constant => "constant",
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn construct(scenario: &Scenario) -> Result<WaveSolution, CliError> {
    let section = scenario.problem_section()?;
    let problem = section.build()?;
    Ok(WaveSolution::construct(problem, section.wave_options())?)
}

fn grid_axes(grid: &GridSection) -> (Vec<f64>, Vec<Vec<f64>>) {
    (grid.t.points(), grid.x.iter().map(|a| a.points()).collect())
}

fn condition_h_json(sol: &WaveSolution) -> Value {
    match sol.condition_h() {
        None => Value::Null,
        Some(r) => json!({
            "verdict": match r.verdict {
                HVerdict::StrictlyPositive => "strictly_positive",
                HVerdict::NonNegativeWithIsolatedZeros => "non_negative_with_isolated_zeros",
                HVerdict::Fails => "fails",
            },
            "min_h": r.min_h,
            "max_h": r.max_h,
            "argmin": { "x": r.argmin.0, "u": r.argmin.1 },
            "interval": [r.interval.0, r.interval.1],
            "zero_count": r.zero_count,
            "uniformly_negative": r.uniformly_negative,
        }),
    }
}

/// Samples the constructed solution on the scenario grid and writes
/// `solution.csv` and `summary.json`.
pub fn solve(common: &Common) -> Result<(), CliError> {
    let scenario = common.scenario()?;
    let sol = construct(&scenario)?;
    let dim = sol.problem().fluxes.dim();
    let grid = scenario.grid_section(dim)?;
    let (t_axis, space) = grid_axes(grid);
    let field = GridField::from_solution(&sol, t_axis.clone(), space)?;

    let csv_path = common.out_file("solution.csv")?;
    csvio::write_field(&field, create(&csv_path)?)?;

    let bounds = sol.state_bounds();
    let mut summary = json!({
        "schema": 1,
        "kind": kind_name(sol.kind()),
        "extinction_time": finite_or_null(sol.max_extinction()),
        "negated": sol.negated(),
        "condition_h": condition_h_json(&sol),
        "state_bounds": {
            "lower": bounds.lower,
            "upper": bounds.upper,
            "horizon_limited": bounds.horizon_limited,
        },
        "grid": {
            "t": { "lo": grid.t.lo, "hi": grid.t.hi, "points": grid.t.points },
            "x": grid.x.iter().map(|a| json!({ "lo": a.lo, "hi": a.hi, "points": a.points })).collect::<Vec<_>>(),
        },
        "range": [field.range().0, field.range().1],
    });
    if sol.kind() == WaveKind::Rarefaction {
        let fans = t_axis
            .iter()
            .map(|&t| {
                let slice = sol.at(t)?;
                let (lo, hi) = slice.fan_shifts();
                Ok(json!({ "t": t, "left_shift": lo, "right_shift": hi }))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        summary["fan_boundaries"] = Value::Array(fans);
    }
    if sol.kind() == WaveKind::Shock {
        let shocks = t_axis
            .iter()
            .map(|&t| Ok(json!({ "t": t, "shift": sol.at(t)?.shift() })))
            .collect::<Result<Vec<_>, CliError>>()?;
        summary["shock_shifts"] = Value::Array(shocks);
    }
    write_json(&common.out_file("summary.json")?, &summary)?;
    println!(
        "solve: {} wave, {} values written to {}",
        kind_name(sol.kind()),
        field.values().len(),
        csv_path.display()
    );
    Ok(())
}

/// Multilinear interpolation at time level `it`, together with the corners
/// of the cell used.
fn interpolate(field: &GridField, it: usize, x: &[f64]) -> Option<(f64, Vec<Vec<f64>>)> {
    let axes = field.space_axes();
    let n = axes.len();
    let mut base = vec![0usize; n];
    let mut frac = vec![0.0; n];
    for i in 0..n {
        let a = &axes[i];
        if !(x[i] >= a[0] && x[i] <= a[a.len() - 1]) {
            return None;
        }
        let j = a.partition_point(|&v| v <= x[i]).clamp(1, a.len() - 1) - 1;
        base[i] = j;
        frac[i] = (x[i] - a[j]) / (a[j + 1] - a[j]);
    }
    let mut value = 0.0;
    let mut corners = Vec::with_capacity(1 << n);
    let mut idx = vec![0usize; n];
    for mask in 0..(1usize << n) {
        let mut w = 1.0;
        let mut corner = Vec::with_capacity(n);
        for i in 0..n {
            let up = (mask >> i) & 1 == 1;
            idx[i] = base[i] + usize::from(up);
            w *= if up { frac[i] } else { 1.0 - frac[i] };
            corner.push(axes[i][idx[i]]);
        }
        value += w * field.value(it, &idx);
        corners.push(corner);
    }
    Some((value, corners))
}

fn evenly_chosen<T: Copy>(items: &[T], count: usize) -> Vec<T> {
    if items.len() <= count {
        return items.to_vec();
    }
    (0..count)
        .map(|k| items[k * (items.len() - 1) / (count - 1).max(1)])
        .collect()
}

/// Traces from the file on both sides of the constructed shock surface.
fn shock_checks(
    field: &GridField,
    sol: &WaveSolution,
    section: &VerifySection,
    rh_tol: f64,
    report: &mut VerificationReport,
) -> Result<(), CliError> {
    let p = sol.problem();
    let n = p.fluxes.dim();
    let diag: f64 = field
        .space_axes()
        .iter()
        .map(|a| a.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max).powi(2))
        .sum::<f64>()
        .sqrt();
    let delta = 2.0 * diag;
    let t_star = sol.max_extinction();
    let levels: Vec<usize> = (0..field.t_axis().len())
        .filter(|&it| {
            let t = field.t_axis()[it];
            t > 0.0 && t < t_star
        })
        .collect();
    let levels = evenly_chosen(&levels, section.audit_levels);
    let base = p
        .surface
        .zero_level_samples(section.surface_points, section.surface_half_width)?;
    let (mut audited, mut max_rh, mut min_margin) = (0usize, 0.0f64, f64::INFINITY);
    let mut worst = String::new();
    for &it in &levels {
        let t = field.t_axis()[it];
        let slice = sol.at(t)?;
        for y in &base {
            let x: Vec<f64> = y.iter().zip(slice.shift()).map(|(a, b)| a + b).collect();
            let normal = slice.shock_normal(&x);
            let len = normal[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if len == 0.0 {
                continue;
            }
            let side = |sign: f64| -> Vec<f64> { (0..n).map(|i| x[i] + sign * delta * normal[i + 1] / len).collect() };
            let (Some((ul, lc)), Some((ur, rc))) =
                (interpolate(field, it, &side(1.0)), interpolate(field, it, &side(-1.0)))
            else {
                continue;
            };
            let clean = lc.iter().all(|c| slice.region(c) == Region::Left)
                && rc.iter().all(|c| slice.region(c) == Region::Right);
            if !clean {
                continue;
            }
            audited += 1;
            let rh = rh_residual(&p.fluxes, &normal, ul, ur).abs();
            let margin = if ul > ur {
                geometric_entropy_margin(&p.fluxes, &normal, ul, ur, section.k_samples)?
            } else if ul == ur {
                0.0
            } else {
                ul - ur
            };
            max_rh = max_rh.max(rh);
            if margin < min_margin {
                min_margin = margin;
                worst = format!("t = {t}, x = {x:?}, traces ({ul}, {ur})");
            }
        }
    }
    report.push(
        "shock points audited",
        format!("{} time levels", levels.len()),
        audited as f64,
        1.0,
        audited > 0,
    );
    report.push(
        "Rankine-Hugoniot",
        "max over shock points",
        max_rh,
        rh_tol,
        max_rh <= rh_tol,
    );
    report.push(
        "entropy margin",
        worst,
        min_margin,
        -section.margin_tol,
        min_margin >= -section.margin_tol,
    );
    Ok(())
}

fn kruzkov_checks(
    field: &GridField,
    p: &RiemannProblem,
    section: &VerifySection,
    report: &mut VerificationReport,
) -> Result<(), CliError> {
    let m = section.kruzkov_centers.max(1);
    let all_axes: Vec<&[f64]> = std::iter::once(field.t_axis())
        .chain(field.space_axes().iter().map(Vec::as_slice))
        .collect();
    let per_axis: Vec<(Vec<f64>, f64)> = all_axes
        .iter()
        .map(|a| {
            let (lo, hi) = (a[0], a[a.len() - 1]);
            let spacing = (hi - lo) / (m + 1) as f64;
            let centers = (1..=m).map(|i| lo + spacing * i as f64).collect();
            (centers, 0.5 * spacing)
        })
        .collect();
    let widths: Vec<f64> = per_axis.iter().map(|(_, w)| *w).collect();
    let (lo, hi) = field.range();
    let ks = if hi > lo {
        linspace(lo, hi, section.kruzkov_constants.max(2))
    } else {
        vec![lo]
    };
    let count: usize = per_axis.iter().map(|(c, _)| c.len()).product();
    let mut worst = f64::INFINITY;
    let mut where_ = String::new();
    let mut center = vec![0.0; per_axis.len()];
    for flat in 0..count {
        let mut rest = flat;
        for (k, (c, _)) in per_axis.iter().enumerate().rev() {
            center[k] = c[rest % c.len()];
            rest /= c.len();
        }
        let bump = TestBump::new(center.clone(), &widths)?;
        for &k in &ks {
            let r = kruzkov_residual(field, &p.fluxes, &p.source, k, &bump)?;
            if r < worst {
                worst = r;
                where_ = format!("centre {center:?}, k = {k:.4}");
            }
        }
    }
    let threshold = -section.kruzkov_factor * field.max_spacing();
    report.push("Kruzkov residual", where_, worst, threshold, worst >= threshold);
    Ok(())
}

fn smooth_checks(field: &GridField, p: &RiemannProblem, section: &VerifySection, report: &mut VerificationReport) {
    let nt = field.t_axis().len();
    let axes = field.space_axes();
    let n = axes.len();
    let h = field.max_spacing();
    let interior_t = nt.saturating_sub(2);
    let interior: Vec<usize> = axes.iter().map(|a| a.len().saturating_sub(2)).collect();
    let total = interior_t * interior.iter().product::<usize>();
    let tol = 10.0 * h;
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    let mut where_ = String::from("none");
    if total > 0 {
        let step = (total / section.smooth_points.max(1)).max(1);
        let mut idx = vec![0usize; n];
        let mut probe = vec![0usize; n];
        for flat in (0..total).step_by(step) {
            let mut rest = flat;
            for i in (0..n).rev() {
                idx[i] = 1 + rest % interior[i];
                rest /= interior[i];
            }
            let it = 1 + rest;
            let u0 = field.value(it, &idx);
            let (um, up) = (field.value(it - 1, &idx), field.value(it + 1, &idx));
            let ta = field.t_axis();
            let (dtm, dtp) = (ta[it] - ta[it - 1], ta[it + 1] - ta[it]);
            let mut smooth = (up - 2.0 * u0 + um).abs() <= dtm.max(dtp).powf(1.5);
            let mut r = (up - um) / (dtm + dtp);
            for i in 0..n {
                probe.copy_from_slice(&idx);
                probe[i] = idx[i] + 1;
                let vp = field.value(it, &probe);
                probe[i] = idx[i] - 1;
                let vm = field.value(it, &probe);
                let (xm, xp) = (
                    axes[i][idx[i]] - axes[i][idx[i] - 1],
                    axes[i][idx[i] + 1] - axes[i][idx[i]],
                );
                smooth &= (vp - 2.0 * u0 + vm).abs() <= xm.max(xp).powf(1.5);
                r += (p.fluxes.f(i, vp) - p.fluxes.f(i, vm)) / (xm + xp);
            }
            if !smooth {
                continue;
            }
            r -= p.source.eval(u0);
            checked += 1;
            if r.abs() > worst {
                worst = r.abs();
                let x: Vec<f64> = (0..n).map(|i| axes[i][idx[i]]).collect();
                where_ = format!("t = {}, x = {x:?}", ta[it]);
            }
        }
    }
    report.push(
        "smooth residual",
        format!("{checked} smooth points, worst at {where_}"),
        worst,
        tol,
        worst <= tol,
    );
}

fn report_json(report: &VerificationReport) -> Value {
    json!({
        "schema": 1,
        "passed": report.all_passed(),
        "checks": report.checks.iter().map(|c| json!({
            "name": c.name,
            "location": c.location,
            "value": finite_or_null(c.value),
            "tolerance": c.tolerance,
            "passed": c.passed,
        })).collect::<Vec<_>>(),
    })
}

fn print_report(report: &VerificationReport) {
    for c in &report.checks {
        println!(
            "{} {}: {:.6e} (tolerance {:.3e}) at {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance,
            c.location
        );
    }
}

/// Audits a solution file against the scenario problem.
pub fn verify(common: &Common, input: Option<&Path>) -> Result<(), CliError> {
    let scenario = common.scenario()?;
    let sol = construct(&scenario)?;
    let default_input = common.out.join("solution.csv");
    let input = input.unwrap_or(&default_input);
    let file = File::open(input).map_err(|e| CliError::Input(format!("cannot open {}: {e}", input.display())))?;
    let field = csvio::read_field(BufReader::new(file))?;
    let p = sol.problem();
    if field.dim() != p.fluxes.dim() {
        return Err(CliError::Input(format!(
            "file has {} space axes, the problem has dimension {}",
            field.dim(),
            p.fluxes.dim()
        )));
    }
    let section = &scenario.verify;
    let rh_tol = common.tol.unwrap_or(section.rh_tol);
    let mut report = VerificationReport::new();
    if sol.kind() == WaveKind::Shock {
        shock_checks(&field, &sol, section, rh_tol, &mut report)?;
    }
    if field.t_axis().len() >= 3 && field.space_axes().iter().all(|a| a.len() >= 3) {
        kruzkov_checks(&field, p, section, &mut report)?;
        smooth_checks(&field, p, section, &mut report);
    }
    print_report(&report);
    write_json(&common.out_file("verify.json")?, &report_json(&report))?;
    if report.all_passed() {
        println!("verify: all {} checks passed", report.checks.len());
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} of {} checks failed",
            report.failures(),
            report.checks.len()
        )))
    }
}

fn rows_json(rows: &[ConvergenceRow]) -> Vec<Value> {
    rows.iter()
        .map(|r| json!({ "epsilon": r.epsilon, "dx": r.dx, "distance": r.distance, "steps": r.steps }))
        .collect()
}

/// Runs the viscous ladder and writes `convergence.csv` and `compare.json`.
pub fn compare(common: &Common) -> Result<(), CliError> {
    let scenario = common.scenario()?;
    let sol = construct(&scenario)?;
    let section = scenario
        .compare
        .as_ref()
        .ok_or_else(|| CliError::Scenario("missing [compare] section".into()))?;
    let (setup, rungs) = section.build(sol.problem().fluxes.dim())?;
    let results: Vec<Result<Vec<ConvergenceRow>, CliError>> = rungs
        .par_iter()
        .enumerate()
        .map(|(i, rung)| {
            convergence_study(&sol, std::slice::from_ref(rung), &setup).map_err(|e| {
                CliError::from(e).in_context(format!("rung {} (epsilon {}, dx {})", i + 1, rung.epsilon, rung.dx))
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(rungs.len());
    for r in results {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon).then(a.dx.total_cmp(&b.dx)));

    let path = common.out_file("convergence.csv")?;
    let mut w = csv::Writer::from_writer(create(&path)?);
    let err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(["epsilon", "dx", "distance", "steps"]).map_err(err)?;
    for r in &rows {
        w.write_record([
            format!("{:.16e}", r.epsilon),
            format!("{:.16e}", r.dx),
            format!("{:.16e}", r.distance),
            r.steps.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    write_json(
        &common.out_file("compare.json")?,
        &json!({ "schema": 1, "t": setup.t, "rows": rows_json(&rows) }),
    )?;
    for r in &rows {
        println!(
            "epsilon {:.3e} dx {:.3e}: L1 distance {:.6e} ({} steps)",
            r.epsilon, r.dx, r.distance, r.steps
        );
    }
    Ok(())
}

fn nonunique_json(report: &NonuniquenessReport) -> Value {
    json!({
        "schema": 1,
        "kind": format!("{:?}", report.kind).to_lowercase(),
        "u_minus": report.u_minus,
        "all_admissible": report.all_admissible,
        "distinct": report.distinct,
        "all_pairs_distinct": report.all_pairs_distinct,
        "candidates": report.audits.iter().map(|a| json!({
            "label": a.label,
            "shock_points": a.shock_points,
            "max_rh": a.max_rh,
            "min_margin": finite_or_null(a.min_margin),
            "interface_points": a.interface_points,
            "smooth_points": a.smooth_points,
            "max_smooth_residual": a.max_smooth_residual,
            "passed": a.passed,
        })).collect::<Vec<_>>(),
        "distances": report.distances.iter().map(|d| json!({
            "a": report.audits[d.a].label,
            "b": report.audits[d.b].label,
            "slice": d.slice,
            "space_time": d.space_time,
        })).collect::<Vec<_>>(),
    })
}

/// Audits the growing-source candidates and writes `nonunique.json`.
pub fn nonunique(common: &Common) -> Result<(), CliError> {
    let scenario = common.scenario()?;
    let section = scenario
        .nonunique
        .as_ref()
        .ok_or_else(|| CliError::Scenario("missing [nonunique] section".into()))?;
    let (kind, branches, opts) = section.build()?;
    let report = nonuniqueness_report(kind, section.u_minus, &branches, &opts)?;
    write_json(&common.out_file("nonunique.json")?, &nonunique_json(&report))?;
    for a in &report.audits {
        println!("{} {}", if a.passed { "PASS" } else { "FAIL" }, a.label);
    }
    for d in &report.distances {
        println!(
            "distance {} vs {}: slice {:.4e}, space-time {:.4e}",
            report.audits[d.a].label, report.audits[d.b].label, d.slice, d.space_time
        );
    }
    if report.all_admissible && report.distinct {
        println!(
            "nonunique: {} admissible, pairwise distinct candidates",
            report.audits.len()
        );
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "admissible: {}, distinct: {}",
            report.all_admissible, report.distinct
        )))
    }
}

fn self_check(name: &str, value: f64, tol: f64, report: &mut VerificationReport) {
    report.push(name, "built-in", value, tol, value <= tol);
}

/// Quick built-in checks of the flow, the constructor and the file format.
pub fn selftest(common: &Common) -> Result<(), CliError> {
    let tol = common.tol.unwrap_or(1e-6);
    let mut report = VerificationReport::new();

    let flow = CharFlow::new(catalog::neg_cbrt(), FlowOptions::default())?;
    let mut err = 0.0f64;
    for &s in &linspace(-2.0, 2.0, 17) {
        for &t in &linspace(0.0, 2.5, 11) {
            err = err.max((flow.u_bar(t, s)? - decay_ubar(t, s)).abs());
            let chi = flow.chi(&catalog::burgers2d(), t, s)?;
            let want = decay_chi(t, s);
            err = err.max((chi[0] - want[0]).abs()).max((chi[1] - want[1]).abs());
        }
    }
    self_check("characteristic flow vs closed form", err, tol, &mut report);

    let problem = |um: f64, up: f64| RiemannProblem {
        fluxes: catalog::burgers2d(),
        source: catalog::neg_cbrt(),
        surface: catalog::cubic_plane(),
        u_minus: um,
        u_plus: up,
    };
    let mut err = 0.0f64;
    for (um, up) in [(1.0, 0.5), (0.5, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
        let sol = WaveSolution::construct(problem(um, up), WaveOptions::default())?;
        let oracle = DecayOracle::new(um, up)?;
        for &t in &[0.2, 0.7, 1.2] {
            let slice = sol.at(t)?;
            let exact = oracle.slice(t)?;
            for &x in &linspace(-1.0, 1.0, 7) {
                for &y in &linspace(-1.0, 1.0, 7) {
                    let (a, b) = (slice.evaluate(&[x, y])?, exact.value(x, y)?);
                    if exact.surface(x, y).abs() > 1e-9 {
                        err = err.max((a - b).abs());
                    }
                }
            }
        }
    }
    self_check("constructed solutions vs closed form", err, tol, &mut report);

    let sol = WaveSolution::construct(problem(1.0, -1.0), WaveOptions::default())?;
    let audit = shock_audit(&sol, &[0.25, 0.75, 1.25], 15, 1.0, 51)?;
    report.push(
        "shock audit",
        "symmetric shock",
        audit.max_rh,
        tol,
        audit.passes(tol, 1e-10),
    );

    let field = GridField::from_solution(
        &sol,
        linspace(0.0, 1.0, 3),
        vec![linspace(-1.0, 1.0, 5), linspace(-1.0, 1.0, 5)],
    )?;
    let mut buf = Vec::new();
    csvio::write_field(&field, &mut buf)?;
    let back = csvio::read_field(buf.as_slice())?;
    let exact = back
        .values()
        .iter()
        .zip(field.values())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    report.push(
        "solution file round trip",
        "bit-exact",
        f64::from(u8::from(!exact)),
        0.0,
        exact,
    );

    print_report(&report);
    if report.all_passed() {
        println!("selftest: all {} checks passed", report.checks.len());
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} self-checks failed",
            report.failures()
        )))
    }
}
