//! `vem`: mesh generation, mesh checks and convergence studies.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use vem_core::element2d::Stabilization;
use vem_core::mesh::io::{read_mesh, write_mesh};
use vem_core::mesh::{
    generate_cube_mesh, generate_square_mesh, quality_report_2d, quality_report_3d, CubeFamily, Mesh, SquareFamily,
};
use vem_core::study::{run_study, StudyConfig, StudyReport};
use vem_core::system::Solver;
use vem_core::VemError;

#[derive(Parser)]
#[command(name = "vem", version, about = "Virtual element solver for the Poisson problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or check meshes.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Convergence studies.
    Study {
        #[command(subcommand)]
        command: StudyCommand,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Write a mesh of the unit square or cube as JSON.
    Gen {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Subdivisions per axis.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "uniform")]
        family: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a mesh file and print its quality report.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum StudyCommand {
    /// Solve a manufactured case on a sequence of meshes and fit rates.
    Run(StudyArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// s1, s2, s2tilde or 3d.
    #[arg(long)]
    stab: Option<String>,
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated subdivisions, e.g. "4,8,16,32".
    #[arg(long)]
    levels: Option<String>,
    /// sine, poly or corner.
    #[arg(long)]
    case: Option<String>,
    /// auto, cholesky or cg.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    /// Exit with status 1 unless the fitted slopes meet their thresholds.
    #[arg(long)]
    assert_rates: bool,
    /// Also write the reduced matrix of each level.
    #[arg(long)]
    dump_matrix: bool,
}

enum Failure {
    Rates,
    Error(VemError),
}

impl From<VemError> for Failure {
    fn from(e: VemError) -> Self {
        Failure::Error(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mesh { command } => mesh(command),
        Command::Study {
            command: StudyCommand::Run(args),
        } => study(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rates) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn mesh(command: MeshCommand) -> Result<(), Failure> {
    match command {
        MeshCommand::Gen { dim, n, family, out } => {
            let mesh = match dim {
                2 => Mesh::Polygonal(generate_square_mesh(n, SquareFamily::from_str(&family)?)?),
                3 => Mesh::Polyhedral(generate_cube_mesh(n, CubeFamily::from_str(&family)?)?),
                d => return Err(VemError::InvalidArgument(format!("dimension {d} is not 2 or 3")).into()),
            };
            write_mesh(&mesh, &out)?;
            Ok(())
        }
        MeshCommand::Check { input } => {
            let mesh = read_mesh(&input)?;
            let (quality, n_cells, h) = match &mesh {
                Mesh::Polygonal(m) => (quality_report_2d(m)?, m.n_cells(), m.mesh_size()?),
                Mesh::Polyhedral(m) => (quality_report_3d(m)?, m.n_cells(), m.mesh_size()?),
            };
            let summary = serde_json::json!({
                "dim": mesh.dim(),
                "cells": n_cells,
                "h": h,
                "rho_min": quality.rho_min(),
                "tau_max": quality.tau_max(),
                "quality": quality,
            });
            emit(&(serde_json::to_string_pretty(&summary).map_err(VemError::from)? + "\n"));
            Ok(())
        }
    }
}

fn study_config(args: &StudyArgs) -> Result<StudyConfig, VemError> {
    let mut c = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => StudyConfig::default(),
    };
    if let Some(d) = args.dim {
        c.dim = d;
        if args.stab.is_none() && args.config.is_none() {
            c.stab = if d == 3 { Stabilization::S3D } else { Stabilization::S2 };
        }
    }
    if let Some(k) = args.k {
        c.k = k;
    }
    if let Some(s) = &args.stab {
        c.stab = s.parse()?;
    }
    if let Some(f) = &args.family {
        c.family = f.clone();
    }
    if let Some(l) = &args.levels {
        c.levels = l
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| VemError::InvalidArgument(format!("bad level {x:?}")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(case) = &args.case {
        c.case = case.clone();
    }
    if let Some(s) = &args.solver {
        c.solver = Solver::from_str(s)?;
    }
    if let Some(t) = args.tol {
        c.tol = t;
    }
    c.dump_matrix |= args.dump_matrix;
    Ok(c)
}

fn render_report(report: &StudyReport) -> String {
    let mut o = String::new();
    let names = ["energy", "h1_nabla", "h1_zero", "l2_zero", "l2_nabla", "linf_edge"];
    o += &format!("{:>5} {:>10} {:>8}", "n", "h", "ndof");
    for name in names {
        o += &format!(" {name:>10}");
    }
    o += &format!(" {:>9}\n", "tau_max");
    for l in &report.levels {
        o += &format!("{:>5} {:>10.4e} {:>8}", l.n, l.h, l.ndof);
        for v in l.errors.values() {
            o += &format!(" {v:>10.3e}");
        }
        o += &format!(" {:>9.3e}\n", l.tau_max);
    }
    o += &format!("{:>25}", "slope");
    for s in report.slopes.values() {
        match s {
            Some(s) => o += &format!(" {s:>10.3}"),
            None => o += &format!(" {:>10}", "-"),
        }
    }
    o.push('\n');
    if report.config.stab == Stabilization::S1 {
        o += &format!("{:>25}", "slope / ln(1+tau)");
        for s in report.normalized_slopes.values() {
            match s {
                Some(s) => o += &format!(" {s:>10.3}"),
                None => o += &format!(" {:>10}", "-"),
            }
        }
        o.push('\n');
    }
    if !report.rates.asserted {
        o += &format!("rates: not asserted for case {}\n", report.case.name);
    } else if report.rates.passed {
        o += "rates: pass\n";
    } else {
        o += "rates: FAIL\n";
        for f in &report.rates.failures {
            o += &format!("  {f}\n");
        }
    }
    o
}

fn study(args: StudyArgs) -> Result<(), Failure> {
    let config = study_config(&args)?;
    let report = run_study(&config, Some(&args.out))?;
    emit(&render_report(&report));
    if args.assert_rates && !report.rates.passed {
        return Err(Failure::Rates);
    }
    Ok(())
}
