use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use flatfront::front::FrameOptions;
use flatfront::validation::ValidationConfig;
use flatfront::{GridDomain, HarmonicPotential, Term};

use crate::error::CliError;

pub const DEFAULT_LAMBDAS: [f64; 8] = [-0.5, -0.25, 0.1, 0.25, 0.4, 0.6, 0.75, 1.0];
/// Smallest grid accepted by `validate`.
pub const MIN_VALIDATE_NODES: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Obj,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionModel {
    #[default]
    Poincare,
    Raw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub nu: usize,
    pub nv: usize,
    /// Defaults to the centre node.
    #[serde(default)]
    pub base_index: Option<[usize; 2]>,
}

impl Default for DomainSection {
    fn default() -> Self {
        DomainSection {
            u_min: -1.0,
            u_max: 1.0,
            v_min: -1.0,
            v_max: 1.0,
            nu: 65,
            nv: 65,
            base_index: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub lambdas: Vec<f64>,
    pub refinement_levels: usize,
    pub output_dir: PathBuf,
    pub export_formats: Vec<ExportFormat>,
    pub projection_model: ProjectionModel,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            refinement_levels: 3,
            output_dir: PathBuf::from("out"),
            export_formats: vec![ExportFormat::Obj, ExportFormat::Json],
            projection_model: ProjectionModel::Poincare,
        }
    }
}

/// A run configuration as written in TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "reference_potential")]
    pub potential: PotentialSection,
    #[serde(default)]
    pub domain: DomainSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub integration: FrameOptions,
}

fn reference_potential() -> PotentialSection {
    PotentialSection {
        terms: HarmonicPotential::reference().terms,
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            potential: reference_potential(),
            domain: DomainSection::default(),
            run: RunSection::default(),
            integration: FrameOptions::default(),
        }
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
            CliError::ConfigParse {
                line,
                column,
                message: e.message().to_owned(),
            }
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_owned(),
            source: e,
        })?;
        Self::parse(&text)
    }

    /// Checks the rules that do not depend on the command.
    pub fn check(&self) -> Result<(), CliError> {
        for &l in &self.run.lambdas {
            if !l.is_finite() {
                return Err(CliError::Config(format!("lambda {l} is not finite")));
            }
            if flatfront::front::lambda_factor(l).is_err() {
                return Err(CliError::Config(format!(
                    "lambda = {l} is the degenerate deformation parameter (1 - 2 lambda = 0)"
                )));
            }
        }
        if self.run.refinement_levels == 0 {
            return Err(CliError::Config("refinement_levels must be at least 1".into()));
        }
        if self.integration.substeps == 0 {
            return Err(CliError::Config("integration.substeps must be at least 1".into()));
        }
        self.grid_domain()?;
        self.potential()?;
        Ok(())
    }

    pub fn check_for_validation(&self) -> Result<(), CliError> {
        if self.domain.nu < MIN_VALIDATE_NODES || self.domain.nv < MIN_VALIDATE_NODES {
            return Err(CliError::Config(format!(
                "validation needs nu, nv >= {MIN_VALIDATE_NODES} (got {} x {})",
                self.domain.nu, self.domain.nv
            )));
        }
        Ok(())
    }

    pub fn grid_domain(&self) -> Result<GridDomain, CliError> {
        let d = &self.domain;
        if d.nu == 0 || d.nv == 0 {
            return Err(CliError::Config("domain.nu and domain.nv must be positive".into()));
        }
        let base = d.base_index.map_or(((d.nu - 1) / 2, (d.nv - 1) / 2), |[i, j]| (i, j));
        GridDomain::new((d.u_min, d.u_max), (d.v_min, d.v_max), (d.nu, d.nv), base)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn potential(&self) -> Result<HarmonicPotential, CliError> {
        HarmonicPotential::new(self.potential.terms.clone()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validation_config(&self) -> Result<ValidationConfig, CliError> {
        Ok(ValidationConfig {
            potential: self.potential()?,
            domain: self.grid_domain()?,
            refinement_levels: self.run.refinement_levels,
            lambdas: self.run.lambdas.clone(),
            options: self.integration,
        })
    }

    pub fn wants(&self, f: ExportFormat) -> bool {
        self.run.export_formats.contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_parses() {
        let text = r#"
[potential]
terms = [{ kind = "linear-u", a = 1.0 }, { kind = "re-poly", n = 2, a = 0.3 }]

[domain]
u_min = -1.0
u_max = 1.0
v_min = -1.0
v_max = 1.0
nu = 33
nv = 17

[run]
lambdas = [0.25, 1.0]
refinement_levels = 2
output_dir = "results"
export_formats = ["obj", "csv"]
projection_model = "raw"

[integration]
substeps = 2
project = true
"#;
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.potential().unwrap(), HarmonicPotential::reference());
        let d = c.grid_domain().unwrap();
        assert_eq!((d.nu, d.nv, d.base_index), (33, 17, (16, 8)));
        assert_eq!(c.run.projection_model, ProjectionModel::Raw);
        assert!(c.wants(ExportFormat::Csv) && !c.wants(ExportFormat::Json));
        assert_eq!(c.integration.substeps, 2);
    }

    #[test]
    fn empty_config_uses_defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.run.lambdas, DEFAULT_LAMBDAS.to_vec());
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = RunConfig::parse("[run]\nrefinement_levels = 3\nlambdas = [0.25,\n").unwrap_err();
        match err {
            CliError::ConfigParse { line, .. } => assert!(line >= 3),
            e => panic!("unexpected {e:?}"),
        }
        let err = RunConfig::parse("[run]\nbogus = 1\n").unwrap_err();
        match err {
            CliError::ConfigParse { line, column, .. } => assert_eq!((line, column), (2, 1)),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn degenerate_lambda_is_a_config_error() {
        let err = RunConfig::parse("[run]\nlambdas = [0.25, 0.5]\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("0.5"));
    }

    #[test]
    fn small_grid_rejected_for_validation() {
        let c = RunConfig::parse("[domain]\nu_min = -1.0\nu_max = 1.0\nv_min = -1.0\nv_max = 1.0\nnu = 5\nnv = 5\n").unwrap();
        assert!(c.check_for_validation().is_err());
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
