//! Scenario files: the problem, the output grid and per-command options.
//!
//! ```toml
//! [problem]
//! flux = "burgers2d"
//! source = "neg_cbrt"
//! surface = "cubic_plane"
//! u_minus = 1.0
//! u_plus = -1.0
//!
//! [grid]
//! t = { lo = 0.0, hi = 2.0, points = 21 }
//! x = [{ lo = -1.5, hi = 1.5, points = 61 }, { lo = -1.5, hi = 1.5, points = 61 }]
//! ```

use std::path::Path;

use nsriemann_core::catalog;
use nsriemann_core::closed_form::{BranchKind, GrowthBranch, GrowthKind, NonuniquenessOptions};
use nsriemann_core::grid::linspace;
use nsriemann_core::riemann::{RiemannProblem, WaveOptions};
use nsriemann_core::viscous::{LadderRung, Splitting, StudySetup};
use nsriemann_core::{FluxSet, InitialSurface, SourceTerm};
use serde::Deserialize;

use crate::error::CliError;

/// A parsed scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Riemann problem; required by `solve`, `verify` and `compare`.
    pub problem: Option<ProblemSection>,
    /// Output grid for `solve`.
    pub grid: Option<GridSection>,
    /// Options of `verify`.
    #[serde(default)]
    pub verify: VerifySection,
    /// Options of `compare`.
    pub compare: Option<CompareSection>,
    /// Options of `nonunique`.
    pub nonunique: Option<NonuniqueSection>,
}

/// Named ingredients of a Riemann problem.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    /// `burgers1d`, `burgers2d` or `polynomial`.
    pub flux: String,
    /// Coefficients `[c_0, c_1, ...]` per component for `polynomial`.
    pub flux_coefficients: Option<Vec<Vec<f64>>>,
    /// `neg_cbrt`, `pos_cbrt`, `logistic`, `zero` or `linear`.
    pub source: String,
    /// Rate of the `linear` source `g(u) = λu`.
    pub source_lambda: Option<f64>,
    /// `cubic_plane` (`x³ + y`) or `plane` (`a · x + c`).
    pub surface: String,
    /// Normal `a` of a `plane` surface.
    pub plane_normal: Option<Vec<f64>>,
    /// Offset `c` of a `plane` surface.
    #[serde(default)]
    pub plane_offset: f64,
    /// State where the surface function is negative.
    pub u_minus: f64,
    /// State where the surface function is positive.
    pub u_plus: f64,
    /// Horizon for state bounds of escaping flows.
    pub t_horizon: Option<f64>,
}

/// Evenly spaced points on `[lo, hi]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    /// First point.
    pub lo: f64,
    /// Last point.
    pub hi: f64,
    /// Number of points, at least 2.
    pub points: usize,
}

impl AxisSection {
    fn check(&self, name: &str) -> Result<(), CliError> {
        if !self.lo.is_finite() || !self.hi.is_finite() || self.hi <= self.lo {
            return Err(CliError::Scenario(format!("axis {name} needs finite lo < hi")));
        }
        if self.points < 2 {
            return Err(CliError::Scenario(format!("axis {name} needs at least 2 points")));
        }
        Ok(())
    }

    /// The axis points.
    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.points)
    }
}

/// Output grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Time axis.
    pub t: AxisSection,
    /// One axis per space dimension.
    pub x: Vec<AxisSection>,
}

/// Options of `verify`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Time levels of the file used for the shock audit.
    pub audit_levels: usize,
    /// Surface points per audited level.
    pub surface_points: usize,
    /// Half-width of the surface sample box.
    pub surface_half_width: f64,
    /// Intermediate states of the entropy margin.
    pub k_samples: usize,
    /// Bound on the RH residual.
    pub rh_tol: f64,
    /// Entropy margins must be `>= -margin_tol`.
    pub margin_tol: f64,
    /// Test-function centres per axis (time included).
    pub kruzkov_centers: usize,
    /// Constants `k` of the Kruzkov audit, spread over the data range.
    pub kruzkov_constants: usize,
    /// Kruzkov residuals must be `>= -kruzkov_factor · h_grid`.
    pub kruzkov_factor: f64,
    /// Smooth points checked per time level.
    pub smooth_points: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            audit_levels: 10,
            surface_points: 21,
            surface_half_width: 1.0,
            k_samples: 101,
            rh_tol: 1e-6,
            margin_tol: 1e-10,
            kruzkov_centers: 3,
            kruzkov_constants: 11,
            kruzkov_factor: 5.0,
            smooth_points: 200,
        }
    }
}

/// One rung of a viscosity ladder.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RungSection {
    /// Viscosity.
    pub epsilon: f64,
    /// Grid spacing.
    pub dx: f64,
}

/// Options of `compare`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// Computational box `[[lo, hi], ...]`.
    pub domain: Vec<[f64; 2]>,
    /// Box where distances are measured.
    pub region: Vec<[f64; 2]>,
    /// Comparison time.
    pub t: f64,
    /// Refinement ladder.
    pub ladder: Vec<RungSection>,
    /// Courant number.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// `exact` or `euler`.
    #[serde(default = "default_splitting")]
    pub splitting: String,
}

fn default_cfl() -> f64 {
    0.9
}

fn default_splitting() -> String {
    "exact".into()
}

/// Options of `nonunique`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonuniqueSection {
    /// `shock` or `rarefaction`.
    pub kind: String,
    /// Left state.
    pub u_minus: f64,
    /// Branches `zero`, `neg`, `pos`; all three when absent.
    pub branches: Option<Vec<String>>,
    /// Departure delays matching `branches` (shocks only).
    pub delays: Option<Vec<f64>>,
    /// Time of the probe slice.
    pub probe_t: Option<f64>,
    /// Probe box `[lo, hi]` for both space axes.
    pub probe_box: Option<[f64; 2]>,
    /// Distance that counts as distinct.
    pub distance_threshold: Option<f64>,
}

impl Scenario {
    /// Reads and parses a scenario file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses scenario text; errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Scenario(e.to_string()))
    }

    /// The `[problem]` section.
    pub fn problem_section(&self) -> Result<&ProblemSection, CliError> {
        self.problem
            .as_ref()
            .ok_or_else(|| CliError::Scenario("missing [problem] section".into()))
    }

    /// The `[grid]` section, checked against the problem dimension.
    pub fn grid_section(&self, dim: usize) -> Result<&GridSection, CliError> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::Scenario("missing [grid] section".into()))?;
        g.t.check("t")?;
        if g.x.len() != dim {
            return Err(CliError::Scenario(format!(
                "grid has {} space axes but the flux has dimension {dim}",
                g.x.len()
            )));
        }
        for (i, a) in g.x.iter().enumerate() {
            a.check(&format!("x{}", i + 1))?;
        }
        if g.t.lo < 0.0 {
            return Err(CliError::Scenario("time axis must start at t >= 0".into()));
        }
        Ok(g)
    }
}

impl ProblemSection {
    /// The flux set.
    pub fn fluxes(&self) -> Result<FluxSet, CliError> {
        match self.flux.as_str() {
            "burgers1d" => Ok(catalog::burgers1d()),
            "burgers2d" => Ok(catalog::burgers2d()),
            "polynomial" => {
                let c = self
                    .flux_coefficients
                    .as_ref()
                    .ok_or_else(|| CliError::Scenario("polynomial flux needs flux_coefficients".into()))?;
                catalog::polynomial_flux(c).map_err(|e| CliError::Scenario(e.to_string()))
            }
            other => Err(CliError::Scenario(format!("unknown flux '{other}'"))),
        }
    }

    /// The source term.
    pub fn source(&self) -> Result<SourceTerm, CliError> {
        match self.source.as_str() {
            "neg_cbrt" => Ok(catalog::neg_cbrt()),
            "pos_cbrt" => Ok(catalog::pos_cbrt()),
            "logistic" => Ok(catalog::logistic()),
            "zero" => Ok(catalog::zero_source()),
            "linear" => {
                let l = self
                    .source_lambda
                    .ok_or_else(|| CliError::Scenario("linear source needs source_lambda".into()))?;
                Ok(catalog::linear_source(l))
            }
            other => Err(CliError::Scenario(format!("unknown source '{other}'"))),
        }
    }

    /// The initial surface.
    pub fn surface(&self, dim: usize) -> Result<InitialSurface, CliError> {
        let s = match self.surface.as_str() {
            "cubic_plane" => catalog::cubic_plane(),
            "plane" => {
                let a = self
                    .plane_normal
                    .clone()
                    .ok_or_else(|| CliError::Scenario("plane surface needs plane_normal".into()))?;
                catalog::plane(a, self.plane_offset).map_err(|e| CliError::Scenario(e.to_string()))?
            }
            other => return Err(CliError::Scenario(format!("unknown surface '{other}'"))),
        };
        if s.dim() != dim {
            return Err(CliError::Scenario(format!(
                "surface has dimension {}, flux has dimension {dim}",
                s.dim()
            )));
        }
        Ok(s)
    }

    /// The assembled problem.
    pub fn build(&self) -> Result<RiemannProblem, CliError> {
        if !self.u_minus.is_finite() || !self.u_plus.is_finite() {
            return Err(CliError::Scenario("states must be finite".into()));
        }
        let fluxes = self.fluxes()?;
        let surface = self.surface(fluxes.dim())?;
        Ok(RiemannProblem {
            source: self.source()?,
            surface,
            fluxes,
            u_minus: self.u_minus,
            u_plus: self.u_plus,
        })
    }

    /// Construction options.
    pub fn wave_options(&self) -> WaveOptions {
        let mut o = WaveOptions::default();
        if let Some(h) = self.t_horizon {
            o.t_horizon = h;
        }
        o
    }
}

impl CompareSection {
    /// Study settings and ladder.
    pub fn build(&self, dim: usize) -> Result<(StudySetup, Vec<LadderRung>), CliError> {
        if self.domain.len() != dim || self.region.len() != dim {
            return Err(CliError::Scenario(format!("compare boxes must have {dim} axes")));
        }
        if self.ladder.is_empty() {
            return Err(CliError::Scenario("compare needs a non-empty ladder".into()));
        }
        let splitting = match self.splitting.as_str() {
            "exact" => Splitting::ExactSource,
            "euler" => Splitting::ExplicitEulerSource,
            other => return Err(CliError::Scenario(format!("unknown splitting '{other}'"))),
        };
        let setup = StudySetup {
            domain: self.domain.iter().map(|b| (b[0], b[1])).collect(),
            region: self.region.iter().map(|b| (b[0], b[1])).collect(),
            t: self.t,
            cfl: self.cfl,
            splitting,
        };
        let rungs = self
            .ladder
            .iter()
            .map(|r| LadderRung {
                epsilon: r.epsilon,
                dx: r.dx,
            })
            .collect();
        Ok((setup, rungs))
    }
}

impl NonuniqueSection {
    /// Wave type, branches and report options.
    pub fn build(&self) -> Result<(GrowthKind, Vec<GrowthBranch>, NonuniquenessOptions), CliError> {
        let kind = match self.kind.as_str() {
            "shock" => GrowthKind::Shock,
            "rarefaction" => GrowthKind::Rarefaction,
            other => return Err(CliError::Scenario(format!("unknown kind '{other}'"))),
        };
        let names = self
            .branches
            .clone()
            .unwrap_or_else(|| vec!["zero".into(), "neg".into(), "pos".into()]);
        let delays = self.delays.clone().unwrap_or_else(|| vec![0.0; names.len()]);
        if delays.len() != names.len() {
            return Err(CliError::Scenario("delays must match branches".into()));
        }
        let branches = names
            .iter()
            .zip(&delays)
            .map(|(n, &d)| {
                let kind = match n.as_str() {
                    "zero" => BranchKind::Zero,
                    "neg" => BranchKind::NegFan,
                    "pos" => BranchKind::PosFan,
                    other => return Err(CliError::Scenario(format!("unknown branch '{other}'"))),
                };
                GrowthBranch::new(kind, d).map_err(|e| CliError::Scenario(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut opts = NonuniquenessOptions::default();
        if let Some(t) = self.probe_t {
            opts.probe_t = t;
        }
        if let Some(b) = self.probe_box {
            opts.probe_box = (b[0], b[1]);
        }
        if let Some(d) = self.distance_threshold {
            opts.distance_threshold = d;
        }
        Ok((kind, branches, opts))
    }
}
