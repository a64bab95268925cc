use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wg_biharmonic::assembly::{apply_boundary_conditions, assemble_system, AssemblyOptions};
use wg_biharmonic::manufactured::Problem;
use wg_biharmonic::mesh::Mesh;
use wg_biharmonic::norms::compute_errors;
use wg_biharmonic::solver::{solve, Preconditioner, SolverConfig, SolverMethod};
use wg_biharmonic::space::{QuadratureConfig, WgSpace};
use wg_biharmonic::study::{emit_table, run_study, MeshFamily, StudyConfig, TableFormat, NORM_LABELS};
use wg_biharmonic::{Result, WgError};

#[derive(Parser)]
#[command(name = "wg-biharm", version, about = "Weak Galerkin solver for the clamped biharmonic problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a refinement study and print a convergence table.
    Study(StudyArgs),
    /// Solve on one mesh and print the six error measures.
    Solve(SolveArgs),
}

#[derive(Args)]
struct Common {
    /// example1, example2 or patch-<k>
    #[arg(long, default_value = "example1")]
    problem: String,
    /// Polynomial degree k of the cell unknowns (k ≥ 2).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// tri or quad
    #[arg(long, default_value = "tri")]
    mesh: String,
    /// cholesky or cg
    #[arg(long, default_value = "cholesky")]
    solver: String,
    /// Relative residual tolerance for cg.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Iteration cap for cg (default 50·√DOF).
    #[arg(long)]
    max_iter: Option<usize>,
    /// Disable the diagonal preconditioner for cg.
    #[arg(long)]
    no_precond: bool,
    #[arg(long)]
    cell_exactness: Option<usize>,
    #[arg(long)]
    edge_exactness: Option<usize>,
    /// Compute element matrices in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated grid parameters, strictly increasing.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32])]
    levels: Vec<usize>,
    /// markdown or csv
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Write the table to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write zeros in the solve time column (byte-reproducible output).
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Grid parameter of the built-in unit square mesh.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Read the mesh from a plain-text mesh file instead.
    #[arg(long)]
    mesh_file: Option<PathBuf>,
    /// Dump the assembled global matrix (lower triangle, "i j value").
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

impl Common {
    fn solver(&self) -> Result<SolverConfig> {
        let method = match self.solver.as_str() {
            "cholesky" => SolverMethod::Cholesky,
            "cg" => SolverMethod::ConjugateGradient,
            other => {
                return Err(WgError::InvalidSolverConfig(format!(
                    "unknown solver '{other}' (cholesky or cg)"
                )))
            }
        };
        let config = SolverConfig {
            method,
            tolerance: self.tol,
            max_iterations: self.max_iter,
            preconditioner: if self.no_precond {
                Preconditioner::None
            } else {
                Preconditioner::Diagonal
            },
        };
        config.validate()?;
        Ok(config)
    }

    fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            cell_exactness: self.cell_exactness,
            edge_exactness: self.edge_exactness,
        }
    }
}

fn run_study_command(args: StudyArgs) -> Result<()> {
    let format: TableFormat = args.format.parse()?;
    let config = StudyConfig {
        problem: args.common.problem.clone(),
        k: args.common.k,
        mesh: args.common.mesh.parse()?,
        levels: args.levels,
        solver: args.common.solver()?,
        quadrature: args.common.quadrature(),
        format,
        parallel: args.common.parallel,
        record_timings: !args.no_timings,
    };
    let table = run_study(&config)?;
    let text = emit_table(&table, format);
    match args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_solve_command(args: SolveArgs) -> Result<()> {
    let c = &args.common;
    let problem = Problem::from_id(&c.problem)?;
    let mesh = match &args.mesh_file {
        Some(path) => Mesh::read(path)?,
        None => c.mesh.parse::<MeshFamily>()?.build(args.n)?,
    };
    let space = WgSpace::with_quadrature(&mesh, c.k, c.quadrature())?;
    let system = assemble_system(&space, problem.source(), &AssemblyOptions { parallel: c.parallel })?;
    if let Some(path) = &args.dump_matrix {
        std::fs::write(path, system.matrix.to_coordinate_text())?;
    }
    let reduced = apply_boundary_conditions(&space, &system, problem.trace(), problem.flux())?;
    let outcome = solve(&reduced.matrix, &reduced.rhs, &c.solver()?)?;
    let uh = reduced.expand(&space, &outcome.solution);
    let report = compute_errors(&space, &uh, problem.solution())?;

    println!("problem {} k {} cells {} dofs {}", problem.id(), c.k, mesh.num_cells(), space.layout().num_dofs());
    println!("h {:.16e}", mesh.max_diameter());
    println!("relative residual {:.16e}", outcome.relative_residual);
    if let Some(it) = outcome.iterations {
        println!("iterations {it}");
    }
    for (label, value) in NORM_LABELS.iter().zip(report.as_array()) {
        println!("{label}: {value:.16e}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Study(args) => run_study_command(args),
        Command::Solve(args) => run_solve_command(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
