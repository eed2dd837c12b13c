//! Manufactured solutions, error norms and convergence studies.
//!
//! A study solves one manufactured case on a sequence of meshes of a family,
//! records six error measures per level and fits convergence slopes.

pub mod cases;
pub mod norms;
mod report;

pub use report::{csv_string, write_csv, write_json, write_rates_dat, CSV_HEADER};

use crate::element2d::Stabilization;
use crate::mesh::{
    generate_cube_mesh, generate_square_mesh, quality_report_2d, quality_report_3d, CubeFamily, MeshQualityReport,
    SquareFamily,
};
use crate::system::{discretize_2d, discretize_3d, dump_matrix, Discretization, Field, SolveInfo, Solver, VirtualElement};
use crate::{Result, VemError};
use cases::{case_by_name, ManufacturedCase};
use norms::{edge_linf_error, energy_error, projected_errors, ProjectedErrors};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

/// Study parameters; the JSON form mirrors the CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub dim: usize,
    pub k: usize,
    pub stab: Stabilization,
    /// Mesh family name, e.g. `uniform`, `smalledge:1e-3`, `smalledge:h2`
    /// (ε = h² on each level), `hanging`, `distorted:7`, `facesplit:0.05`.
    pub family: String,
    /// Subdivisions per axis of each level.
    pub levels: Vec<usize>,
    pub case: String,
    pub solver: Solver,
    pub tol: f64,
    /// Write each reduced matrix as `matrix_n{n}.mtx` next to the report.
    pub dump_matrix: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            k: 1,
            stab: Stabilization::S2,
            family: "uniform".into(),
            levels: vec![4, 8, 16, 32],
            case: "sine".into(),
            solver: Solver::Auto,
            tol: 1e-12,
            dump_matrix: false,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(VemError::InvalidArgument(m));
        match self.dim {
            2 if !(1..=4).contains(&self.k) => return bad(format!("k = {} outside [1, 4] in 2D", self.k)),
            3 if !(1..=2).contains(&self.k) => return bad(format!("k = {} outside [1, 2] in 3D", self.k)),
            2 | 3 => {}
            d => return bad(format!("dimension {d} is not 2 or 3")),
        }
        if (self.dim == 3) != (self.stab == Stabilization::S3D) {
            return bad(format!("stabilization {} does not apply in {}D", self.stab, self.dim));
        }
        if self.levels.is_empty() || self.levels.contains(&0) {
            return bad("levels must be a non-empty list of positive integers".into());
        }
        if !(self.tol > 0.0) {
            return bad(format!("tolerance {} must be positive", self.tol));
        }
        LevelFamily::parse(self.dim, &self.family).map(|_| ())
    }
}

/// A mesh family resolved per level.
#[derive(Debug, Clone, Copy, PartialEq)]
enum LevelFamily {
    Square(SquareFamily),
    /// Small edges with ε = h² = 1/n².
    SmallEdgeH2,
    Cube(CubeFamily),
}

impl LevelFamily {
    fn parse(dim: usize, name: &str) -> Result<Self> {
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        if dim == 2 && ["smalledge:h2", "smalledge(h2)", "smalledge=h2", "smalledge:h^2"].contains(&compact.as_str()) {
            return Ok(Self::SmallEdgeH2);
        }
        if dim == 2 {
            SquareFamily::from_str(name).map(Self::Square)
        } else {
            CubeFamily::from_str(name).map(Self::Cube)
        }
    }
}

/// Errors of one discrete solution.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorRow {
    /// `‖I_h u − u_h‖_h`, the energy of the dof difference.
    pub energy: f64,
    pub h1_nabla: f64,
    pub h1_zero: f64,
    pub l2_zero: f64,
    pub l2_nabla: f64,
    /// `max_e ‖u − u_h‖_{L∞(e)}`
    pub linf_edge: f64,
}

impl ErrorRow {
    pub const NAMES: [&'static str; 6] = ["energy", "h1_nabla", "h1_zero", "l2_zero", "l2_nabla", "linf_edge"];

    pub fn values(&self) -> [f64; 6] {
        [self.energy, self.h1_nabla, self.h1_zero, self.l2_zero, self.l2_nabla, self.linf_edge]
    }
}

/// Results of one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub n: usize,
    /// Largest cell diameter.
    pub h: f64,
    /// Number of free dofs.
    pub ndof: usize,
    pub n_cells: usize,
    pub errors: ErrorRow,
    /// Errors of `Π∇I_h u` and `Π⁰I_h u` (interpolation, no solve involved).
    pub interpolation: ProjectedErrors,
    pub quality: MeshQualityReport,
    pub tau_max: f64,
    /// `ln(1 + max τ)`; the 2D `α_h` or the 3D `β_h` factor.
    pub alpha_h: f64,
    pub solve: SolveInfo,
}

/// Fitted slopes of the six error measures; `None` where no fit is possible.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Slopes {
    pub energy: Option<f64>,
    pub h1_nabla: Option<f64>,
    pub h1_zero: Option<f64>,
    pub l2_zero: Option<f64>,
    pub l2_nabla: Option<f64>,
    pub linf_edge: Option<f64>,
}

impl Slopes {
    pub fn values(&self) -> [Option<f64>; 6] {
        [self.energy, self.h1_nabla, self.h1_zero, self.l2_zero, self.l2_nabla, self.linf_edge]
    }

    fn from_values(v: [Option<f64>; 6]) -> Self {
        Self {
            energy: v[0],
            h1_nabla: v[1],
            h1_zero: v[2],
            l2_zero: v[3],
            l2_nabla: v[4],
            linf_edge: v[5],
        }
    }
}

/// Minimum slopes per error measure; `None` means reported only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateThresholds {
    pub min: [Option<f64>; 6],
}

impl RateThresholds {
    /// 2D: energy and H¹ `k − 0.15`, L² `k + 0.8`, edge L∞ `k − 0.2`.
    /// 3D: H¹ `k − 0.25`, L² `k + 0.7`; energy and L∞ are reported only.
    pub fn for_order(dim: usize, k: usize) -> Self {
        let k = k as f64;
        let min = if dim == 2 {
            [k - 0.15, k - 0.15, k - 0.15, k + 0.8, k + 0.8, k - 0.2].map(Some)
        } else {
            [None, Some(k - 0.25), Some(k - 0.25), Some(k + 0.7), Some(k + 0.7), None]
        };
        Self { min }
    }
}

/// Outcome of the rate assertions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCheck {
    /// Whether anything was asserted (non-smooth cases are exempt).
    pub asserted: bool,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseInfo {
    pub name: String,
    /// Sobolev index; `None` for smooth solutions.
    pub smoothness: Option<f64>,
    pub domain: String,
    pub polynomial: bool,
}

/// Full study output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub case: CaseInfo,
    pub levels: Vec<LevelResult>,
    pub slopes: Slopes,
    /// Slopes of the errors divided by `ln(1 + max τ)`.
    pub normalized_slopes: Slopes,
    pub thresholds: RateThresholds,
    pub rates: RateCheck,
}

/// Patch-mode bound on every error of a polynomial solution.
pub const PATCH_TOLERANCE: f64 = 1e-8;

/// Slack below the thresholds allowed for raw S¹ slopes.
pub const S1_RAW_SLACK: f64 = 0.1;

/// Least-squares slope of `log e` against `log h` over the last
/// `min(3, len)` points; `None` with fewer than two usable points.
pub fn fit_slope(h: &[f64], e: &[f64]) -> Option<f64> {
    let start = h.len().saturating_sub(3);
    let pts: Vec<(f64, f64)> = h[start..].iter().zip(&e[start..]).map(|(h, e)| (h.ln(), e.ln())).collect();
    if pts.len() < 2 || pts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn slopes_of(levels: &[LevelResult], scale: impl Fn(&LevelResult) -> f64) -> Slopes {
    let h: Vec<f64> = levels.iter().map(|l| l.h).collect();
    Slopes::from_values(std::array::from_fn(|i| {
        let e: Vec<f64> = levels.iter().map(|l| l.errors.values()[i] / scale(l)).collect();
        fit_slope(&h, &e)
    }))
}

/// Applies the rate thresholds (or the patch bound for polynomial cases).
pub fn check_rates(report: &StudyReport) -> RateCheck {
    let mut failures = Vec::new();
    if report.case.polynomial {
        for l in &report.levels {
            for (name, v) in ErrorRow::NAMES.iter().zip(l.errors.values()) {
                if !(v <= PATCH_TOLERANCE) {
                    failures.push(format!("n={}: {name} = {v:e} exceeds {PATCH_TOLERANCE:e}", l.n));
                }
            }
        }
        return RateCheck {
            asserted: true,
            passed: failures.is_empty(),
            failures,
        };
    }
    if report.case.smoothness.is_some_and(|l| l < (report.config.k + 1) as f64) {
        return RateCheck {
            asserted: false,
            passed: true,
            failures,
        };
    }
    let s1 = report.config.stab == Stabilization::S1;
    let raw = report.slopes.values();
    let norm = report.normalized_slopes.values();
    for i in 0..6 {
        let Some(min) = report.thresholds.min[i] else { continue };
        let name = ErrorRow::NAMES[i];
        match (raw[i], norm[i]) {
            (Some(r), Some(nrm)) if s1 => {
                if nrm < min {
                    failures.push(format!("{name}: normalized slope {nrm:.3} below {min:.2}"));
                }
                if r < min - S1_RAW_SLACK {
                    failures.push(format!("{name}: raw slope {r:.3} below {:.2}", min - S1_RAW_SLACK));
                }
            }
            (Some(r), _) if !s1 => {
                if r < min {
                    failures.push(format!("{name}: slope {r:.3} below {min:.2}"));
                }
            }
            _ => failures.push(format!("{name}: no slope (need at least two levels with nonzero error)")),
        }
    }
    RateCheck {
        asserted: true,
        passed: failures.is_empty(),
        failures,
    }
}

fn solve_level<const D: usize, E: VirtualElement<D>>(
    disc: &Discretization<D, E>,
    config: &StudyConfig,
    case: &ManufacturedCase<D>,
    matrix_path: Option<&Path>,
) -> Result<(ErrorRow, ProjectedErrors, SolveInfo, f64)> {
    let u: Field<'_, D> = &*case.u;
    let boundary = (!case.homogeneous).then_some(u);
    let (uh, system, info) = disc.solve(config.stab, &*case.f, boundary, config.solver, config.tol)?;
    if let Some(path) = matrix_path {
        dump_matrix(&system.matrix, path)?;
    }
    let ih = disc.interpolate(&*case.u);
    let p = projected_errors(disc, &uh, &*case.u, &*case.grad);
    let d = disc.free_part(&(&ih - &uh));
    let errors = ErrorRow {
        energy: energy_error(&system.matrix, &d),
        h1_nabla: p.h1_nabla,
        h1_zero: p.h1_zero,
        l2_zero: p.l2_zero,
        l2_nabla: p.l2_nabla,
        linf_edge: edge_linf_error(disc, &uh, &*case.u),
    };
    let interpolation = projected_errors(disc, &ih, &*case.u, &*case.grad);
    let h = disc.elements.iter().map(|e| e.diameter()).fold(0.0, f64::max);
    Ok((errors, interpolation, info, h))
}

type LevelOutcome = (MeshQualityReport, usize, usize, (ErrorRow, ProjectedErrors, SolveInfo, f64));

fn run_levels(
    config: &StudyConfig,
    out: Option<&Path>,
    mut level: impl FnMut(usize, Option<&Path>) -> Result<LevelOutcome>,
) -> Result<Vec<LevelResult>> {
    let mut levels = Vec::with_capacity(config.levels.len());
    for &n in &config.levels {
        let matrix_path = match (out, config.dump_matrix) {
            (Some(dir), true) => Some(dir.join(format!("matrix_n{n}.mtx"))),
            _ => None,
        };
        let (quality, n_cells, ndof, (errors, interpolation, solve, h)) =
            level(n, matrix_path.as_deref()).map_err(|e| e.at_level(n))?;
        levels.push(LevelResult {
            n,
            h,
            ndof,
            n_cells,
            errors,
            interpolation,
            tau_max: quality.tau_max(),
            alpha_h: quality.log_factor(),
            quality,
            solve,
        });
    }
    Ok(levels)
}

/// Runs all levels of a study. With `out`, writes `report.csv`,
/// `report.json` and `rates.dat` there (and matrices if requested).
pub fn run_study(config: &StudyConfig, out: Option<&Path>) -> Result<StudyReport> {
    config.validate()?;
    let family = LevelFamily::parse(config.dim, &config.family)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    let (case, levels) = match family {
        LevelFamily::Cube(f) => {
            let case = case_by_name::<3>(&config.case, config.k)?;
            let levels = run_levels(config, out, |n, path| {
                let mesh = generate_cube_mesh(n, f)?;
                let disc = discretize_3d(&mesh, config.k)?;
                let r = solve_level(&disc, config, &case, path)?;
                Ok((quality_report_3d(&mesh)?, mesh.n_cells(), disc.dofmap.n_free(), r))
            })?;
            (case_info(&case), levels)
        }
        LevelFamily::Square(_) | LevelFamily::SmallEdgeH2 => {
            let case = case_by_name::<2>(&config.case, config.k)?;
            let levels = run_levels(config, out, |n, path| {
                let f = match family {
                    LevelFamily::Square(f) => f,
                    _ => SquareFamily::SmallEdge(1.0 / (n * n) as f64),
                };
                let mesh = generate_square_mesh(n, f)?;
                let disc = discretize_2d(&mesh, config.k)?;
                let r = solve_level(&disc, config, &case, path)?;
                Ok((quality_report_2d(&mesh)?, mesh.n_cells(), disc.dofmap.n_free(), r))
            })?;
            (case_info(&case), levels)
        }
    };
    let mut report = StudyReport {
        config: config.clone(),
        case,
        slopes: slopes_of(&levels, |_| 1.0),
        normalized_slopes: slopes_of(&levels, |l| l.alpha_h),
        levels,
        thresholds: RateThresholds::for_order(config.dim, config.k),
        rates: RateCheck {
            asserted: false,
            passed: true,
            failures: Vec::new(),
        },
    };
    report.rates = check_rates(&report);
    if let Some(dir) = out {
        write_csv(&report, dir.join("report.csv"))?;
        write_json(&report, dir.join("report.json"))?;
        write_rates_dat(&report, dir.join("rates.dat"))?;
    }
    Ok(report)
}

fn case_info<const D: usize>(case: &ManufacturedCase<D>) -> CaseInfo {
    CaseInfo {
        name: case.name.clone(),
        smoothness: case.smoothness.is_finite().then_some(case.smoothness),
        domain: case.domain.into(),
        polynomial: case.polynomial,
    }
}

impl StudyReport {
    /// Errors of every level as rows of six values.
    pub fn error_table(&self) -> Vec<[f64; 6]> {
        self.levels.iter().map(|l| l.errors.values()).collect()
    }

    /// The finest level's errors.
    pub fn finest(&self) -> Option<ErrorRow> {
        self.levels.last().map(|l| l.errors)
    }
}
