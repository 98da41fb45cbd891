use std::path::{Path, PathBuf};

use rayon::prelude::*;

use flatfront::validation::{run_validation, DiagnosticsReport, Suite};
use flatfront::{deform_front, FrontGrid};

use crate::config::{ExportFormat, ProjectionModel, RunConfig};
use crate::error::CliError;
use crate::export::{export_mesh, lambda_stem};

pub const REPORT_FILE: &str = "report.json";
pub const BASE_STEM: &str = "front_base";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Build,
    Deform,
    Validate,
    Export,
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub lambdas: Vec<f64>,
    pub refine: Option<usize>,
    pub format: Option<ExportFormat>,
    pub model: Option<ProjectionModel>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: RunConfig) -> Result<RunConfig, CliError> {
        if let Some(o) = &self.out {
            cfg.run.output_dir = o.clone();
        }
        if !self.lambdas.is_empty() {
            cfg.run.lambdas = self.lambdas.clone();
        }
        if let Some(r) = self.refine {
            cfg.run.refinement_levels = r;
        }
        if let Some(f) = self.format {
            cfg.run.export_formats = vec![f];
        }
        if let Some(m) = self.model {
            cfg.run.projection_model = m;
        }
        cfg.check()?;
        Ok(cfg)
    }
}

/// What a command produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Option<DiagnosticsReport>,
    pub files: Vec<PathBuf>,
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_report(dir: &Path, report: &DiagnosticsReport) -> Result<PathBuf, CliError> {
    let path = dir.join(REPORT_FILE);
    let mut bytes = serde_json::to_vec_pretty(report).expect("report serializes");
    bytes.push(b'\n');
    std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn mesh_formats(cfg: &RunConfig) -> Vec<ExportFormat> {
    cfg.run
        .export_formats
        .iter()
        .copied()
        .filter(|f| *f != ExportFormat::Json)
        .collect()
}

fn write_meshes(cfg: &RunConfig, meshes: &[(String, &FrontGrid)]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for (stem, front) in meshes {
        for f in mesh_formats(cfg) {
            if let Some(p) = export_mesh(&cfg.run.output_dir, stem, front, f, cfg.run.projection_model)? {
                files.push(p);
            }
        }
    }
    Ok(files)
}

/// Deformed fronts (pipeline A), one per λ, in the given order.
fn deformed(suite: &Suite, lambdas: &[f64]) -> Result<Vec<FrontGrid>, CliError> {
    Ok(lambdas
        .par_iter()
        .map(|&l| deform_front(suite.base(), l).map(|d| d.reduced))
        .collect::<Result<Vec<_>, _>>()?)
}

pub fn run_build(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let suite = Suite::new(&cfg.validation_config()?)?;
    prepare_dir(&cfg.run.output_dir)?;
    let mut report = suite.report("build");
    report.base = Some(suite.base_record()?);
    let mut files = write_meshes(cfg, &[(BASE_STEM.to_owned(), &suite.base().front)])?;
    files.push(write_report(&cfg.run.output_dir, &report)?);
    Ok(Outcome {
        report: Some(report),
        files,
    })
}

pub fn run_deform(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let suite = Suite::new(&cfg.validation_config()?)?;
    let lambdas = &cfg.run.lambdas;
    let fronts = deformed(&suite, lambdas)?;
    let mut report = suite.report("deform");
    report.base = Some(suite.base_record()?);
    report.lambdas = suite.lambda_records(lambdas)?;
    prepare_dir(&cfg.run.output_dir)?;
    let mut meshes = vec![(BASE_STEM.to_owned(), &suite.base().front)];
    meshes.extend(lambdas.iter().zip(&fronts).map(|(l, f)| (lambda_stem(*l), f)));
    let mut files = write_meshes(cfg, &meshes)?;
    files.push(write_report(&cfg.run.output_dir, &report)?);
    Ok(Outcome {
        report: Some(report),
        files,
    })
}

/// Writes the report, then fails with the names of the failing criteria.
pub fn run_validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check_for_validation()?;
    let report = run_validation(&cfg.validation_config()?)?;
    prepare_dir(&cfg.run.output_dir)?;
    let path = write_report(&cfg.run.output_dir, &report)?;
    let failed: Vec<String> = report
        .failed_criteria()
        .iter()
        .map(|c| format!("criterion {} ({})", c.id, c.name))
        .collect();
    if !failed.is_empty() {
        return Err(CliError::ValidationFailed {
            failed,
            report: Box::new(report),
        });
    }
    Ok(Outcome {
        report: Some(report),
        files: vec![path],
    })
}

pub fn run_export(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut vc = cfg.validation_config()?;
    vc.refinement_levels = 1;
    let suite = Suite::new(&vc)?;
    let lambdas = &cfg.run.lambdas;
    let fronts = deformed(&suite, lambdas)?;
    prepare_dir(&cfg.run.output_dir)?;
    let mut meshes = vec![(BASE_STEM.to_owned(), &suite.base().front)];
    meshes.extend(lambdas.iter().zip(&fronts).map(|(l, f)| (lambda_stem(*l), f)));
    Ok(Outcome {
        report: None,
        files: write_meshes(cfg, &meshes)?,
    })
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Build => run_build(cfg),
        Command::Deform => run_deform(cfg),
        Command::Validate => run_validate(cfg),
        Command::Export => run_export(cfg),
    }
}
