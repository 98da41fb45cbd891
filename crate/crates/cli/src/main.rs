use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flatfront::DiagnosticsReport;
use flatfront_cli::{run, CliError, Command, ExportFormat, Overrides, ProjectionModel, RunConfig};

#[derive(Parser)]
#[command(name = "flatfront", version, about = "Flat fronts in hyperbolic space and their Lie-geometric deformation")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Build the base front and write its mesh and report.
    Build(Flags),
    /// Deform the base front for every λ and write one mesh per λ.
    Deform(Flags),
    /// Run the validation suite; exit 1 if any criterion fails.
    Validate(Flags),
    /// Export meshes of the base and deformed fronts.
    Export(Flags),
}

#[derive(clap::Args)]
struct Flags {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides run.output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Deformation parameter; repeatable, replaces run.lambdas.
    #[arg(long = "lambda", allow_negative_numbers = true)]
    lambdas: Vec<f64>,
    /// Number of refinement levels (overrides run.refinement_levels).
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum)]
    model: Option<Model>,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Obj,
    Csv,
}

#[derive(ValueEnum, Clone, Copy)]
enum Model {
    Poincare,
    Raw,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::ValidationFailed { report, .. } = &e {
                print_criteria(report);
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn print_criteria(r: &DiagnosticsReport) {
    for c in &r.criteria {
        let status = match c.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        println!("{status} criterion {} ({}): {}", c.id, c.name, c.detail);
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (command, f) = match cli.command {
        Sub::Build(f) => (Command::Build, f),
        Sub::Deform(f) => (Command::Deform, f),
        Sub::Validate(f) => (Command::Validate, f),
        Sub::Export(f) => (Command::Export, f),
    };
    let cfg = match &f.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        out: f.out,
        lambdas: f.lambdas,
        refine: f.refine,
        format: f.format.map(|x| match x {
            Format::Obj => ExportFormat::Obj,
            Format::Csv => ExportFormat::Csv,
        }),
        model: f.model.map(|x| match x {
            Model::Poincare => ProjectionModel::Poincare,
            Model::Raw => ProjectionModel::Raw,
        }),
    };
    let cfg = overrides.apply(cfg)?;
    let outcome = run(command, &cfg)?;
    if let Some(r) = &outcome.report {
        print_criteria(r);
    }
    for p in &outcome.files {
        println!("wrote {}", p.display());
    }
    Ok(())
}
