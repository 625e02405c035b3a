use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nsriemann_core::catalog;
use nsriemann_core::closed_form::decay_chi;
use nsriemann_core::grid::{linspace, GridField};
use nsriemann_core::riemann::{RiemannProblem, WaveOptions, WaveSolution};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsriemann"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cubic_scenario(u_minus: f64, u_plus: f64, extra: &str) -> String {
    format!(
        "[problem]\nflux = \"burgers2d\"\nsource = \"neg_cbrt\"\nsurface = \"cubic_plane\"\n\
         u_minus = {u_minus:?}\nu_plus = {u_plus:?}\n\n[grid]\n\
         t = {{ lo = 0.0, hi = 2.0, points = 21 }}\n\
         x = [{{ lo = -1.5, hi = 1.5, points = 31 }}, {{ lo = -1.5, hi = 1.5, points = 31 }}]\n{extra}"
    )
}

struct Case {
    dir: TempDir,
}

impl Case {
    fn new(scenario: &str) -> Self {
        let dir = TempDir::new().unwrap();
        fs::write(dir.path().join("scenario.toml"), scenario).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }

    fn run(&self, command: &str) -> Output {
        run(&[
            command,
            "--scenario",
            &self.path("scenario.toml"),
            "--out",
            &self.path("out"),
        ])
    }

    fn json(&self, name: &str) -> Value {
        let text = fs::read_to_string(self.dir.path().join("out").join(name)).unwrap();
        serde_json::from_str(&text).unwrap()
    }
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn symmetric_shock_summary() {
    let case = Case::new(&cubic_scenario(1.0, -1.0, ""));
    assert_exit(&case.run("solve"), 0);
    let s = case.json("summary.json");
    assert_eq!(s["schema"], 1);
    assert_eq!(s["kind"], "shock");
    assert!((s["extinction_time"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert_eq!(s["condition_h"]["verdict"], "non_negative_with_isolated_zeros");
    for entry in s["shock_shifts"].as_array().unwrap() {
        for v in entry["shift"].as_array().unwrap() {
            assert!(v.as_f64().unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn equal_states_give_a_constant_wave() {
    let case = Case::new(&cubic_scenario(0.5, 0.5, ""));
    assert_exit(&case.run("solve"), 0);
    assert_eq!(case.json("summary.json")["kind"], "constant");
    assert_exit(&case.run("verify"), 0);
}

#[test]
fn rarefaction_fan_boundaries_match_the_closed_form() {
    let mut text = cubic_scenario(-1.0, 1.0, "");
    text = text
        .replace("points = 21", "points = 5")
        .replace("points = 31", "points = 5");
    let case = Case::new(&text);
    assert_exit(&case.run("solve"), 0);
    let s = case.json("summary.json");
    assert_eq!(s["kind"], "rarefaction");
    let fans = s["fan_boundaries"].as_array().unwrap();
    assert_eq!(fans.len(), 5);
    for f in fans {
        let t = f["t"].as_f64().unwrap();
        for (key, state) in [("left_shift", -1.0), ("right_shift", 1.0)] {
            let want = decay_chi(t, state);
            let got: Vec<f64> = f[key].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
            for i in 0..2 {
                assert!((got[i] - want[i]).abs() < 1e-6, "{key} at t = {t}: {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn solution_file_round_trips_bit_exactly() {
    let case = Case::new(&cubic_scenario(1.0, 0.5, ""));
    assert_exit(&case.run("solve"), 0);
    let rows = read_rows(&case.dir.path().join("out/solution.csv"));
    let problem = RiemannProblem {
        fluxes: catalog::burgers2d(),
        source: catalog::neg_cbrt(),
        surface: catalog::cubic_plane(),
        u_minus: 1.0,
        u_plus: 0.5,
    };
    let sol = WaveSolution::construct(problem, WaveOptions::default()).unwrap();
    let axis = linspace(-1.5, 1.5, 31);
    let field = GridField::from_solution(&sol, linspace(0.0, 2.0, 21), vec![axis.clone(), axis]).unwrap();
    assert_eq!(rows.len(), field.values().len());
    for (row, &u) in rows.iter().zip(field.values()) {
        assert_eq!(row.len(), 4);
        assert_eq!(row[3].to_bits(), u.to_bits());
    }
    assert_eq!(rows[1][2].to_bits(), (-1.5f64 + 3.0 / 30.0).to_bits());
}

#[test]
fn verify_accepts_constructed_shocks() {
    for (um, up) in [(1.0, -1.0), (1.0, 0.5), (0.5, -1.0)] {
        let case = Case::new(&cubic_scenario(um, up, ""));
        assert_exit(&case.run("solve"), 0);
        let out = case.run("verify");
        assert_exit(&out, 0);
        let report = case.json("verify.json");
        assert_eq!(report["passed"], true);
        assert!(report["checks"].as_array().unwrap().len() >= 5);
    }
}

#[test]
fn verify_rejects_a_file_with_swapped_states() {
    let case = Case::new(&cubic_scenario(1.0, -1.0, ""));
    assert_exit(&case.run("solve"), 0);
    let path = case.dir.path().join("out/solution.csv");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let mut tampered = String::from(lines.next().unwrap());
    tampered.push('\n');
    for line in lines {
        let (head, u) = line.rsplit_once(',').unwrap();
        let v: f64 = u.parse().unwrap();
        tampered.push_str(&format!("{head},{:.16e}\n", -v));
    }
    fs::write(&path, tampered).unwrap();
    let out = case.run("verify");
    assert_exit(&out, 3);
    let report = case.json("verify.json");
    let entropy = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "entropy margin")
        .unwrap();
    assert_eq!(entropy["passed"], false);
}

#[test]
fn malformed_scenarios_exit_with_code_two() {
    let case = Case::new("[problem]\nflux = \"burgers2d\"\nu_minus = 1.0 oops\n");
    let out = case.run("solve");
    assert_exit(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let case = Case::new(&cubic_scenario(1.0, -1.0, "").replace("points = 31", "points = 1"));
    assert_exit(&case.run("solve"), 2);

    let case = Case::new(&cubic_scenario(1.0, -1.0, "").replace("neg_cbrt", "mystery"));
    assert_exit(&case.run("solve"), 2);

    assert_exit(&run(&["solve", "--out", "/nonexistent"]), 2);
}

#[test]
fn escaping_flows_exit_with_code_four() {
    let text = "[problem]\nflux = \"burgers1d\"\nsource = \"logistic\"\nsurface = \"plane\"\nplane_normal = [1.0]\n\
                u_minus = -1.0\nu_plus = 0.5\n[grid]\nt = { lo = 0.0, hi = 1.0, points = 3 }\n\
                x = [{ lo = -1.0, hi = 1.0, points = 5 }]\n";
    let case = Case::new(text);
    assert_exit(&case.run("solve"), 4);
}

#[test]
fn compare_writes_a_sorted_ladder() {
    let text = "[problem]\nflux = \"burgers1d\"\nsource = \"neg_cbrt\"\nsurface = \"plane\"\nplane_normal = [1.0]\n\
                u_minus = 1.0\nu_plus = 0.5\n[compare]\ndomain = [[-2.0, 2.0]]\nregion = [[-1.0, 1.0]]\nt = 0.5\n\
                ladder = [{ epsilon = 0.01, dx = 0.005 }, { epsilon = 0.02, dx = 0.01 }]\n";
    let case = Case::new(text);
    assert_exit(&case.run("compare"), 0);
    let text = fs::read_to_string(case.dir.path().join("out/convergence.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0][0] < rows[1][0]);
    assert!(rows[0][2] < rows[1][2]);
    assert_eq!(case.json("compare.json")["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn nonunique_reports_three_distinct_shocks() {
    let case = Case::new("[nonunique]\nkind = \"shock\"\nu_minus = 1.0\n");
    assert_exit(&case.run("nonunique"), 0);
    let r = case.json("nonunique.json");
    assert_eq!(r["all_admissible"], true);
    assert_eq!(r["distinct"], true);
    assert_eq!(r["candidates"].as_array().unwrap().len(), 3);
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--threads", "1"]);
    assert_exit(&out, 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("all 4 checks passed"));
}
