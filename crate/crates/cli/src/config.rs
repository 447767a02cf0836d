//! Experiment configuration, read from a TOML file.
//!
//! ```toml
//! seed_base = 7
//! trials = 50
//! roster = ["nsga2", "paes", "npga2", "spea2"]
//! processors = 4
//! assignments = "table4"          # or "all", or ["2/1/0/1", ...]
//!
//! [params]
//! max_generations = 500
//!
//! [[instance]]
//! path = "p6"
//!
//! [[instance]]
//! name = "g14"
//! generate = { activities = 14, modes = [2, 4], density = 0.3, seed = 1 }
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tct_core::moea::{Algorithm, AlgorithmParams};
use tct_core::portfolio::{
    enumerate_assignments, table4_assignments, PortfolioAssignment, DEFAULT_SLACK,
};
use tct_core::project::{generate_instance, load_instance, GeneratorParams, ProjectNetwork};
use tct_core::quality::Rho;

use crate::error::{CliError, CliResult};
use crate::instances;

fn default_trials() -> usize {
    50
}

fn default_slack() -> f64 {
    DEFAULT_SLACK
}

fn default_calibration_trials() -> usize {
    5
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Csv]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AssignmentSpec {
    /// `"all"` or `"table4"`.
    Keyword(String),
    List(Vec<PortfolioAssignment>),
}

impl Default for AssignmentSpec {
    fn default() -> Self {
        AssignmentSpec::Keyword("all".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub activities: usize,
    pub modes: [usize; 2],
    pub density: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<GenerateSpec>,
}

impl InstanceSpec {
    /// Report directory name: the explicit name, else the file stem.
    pub fn label(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        match &self.path {
            Some(p) => Path::new(p)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.clone()),
            None => "generated".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_slack")]
    pub slack: f64,
    pub roster: Vec<Algorithm>,
    /// Workers per portfolio. Defaults to the roster size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub processors: Option<usize>,
    #[serde(default)]
    pub assignments: AssignmentSpec,
    /// Runs per roster algorithm when the best AQ has to be found by search.
    #[serde(default = "default_calibration_trials")]
    pub calibration_trials: usize,
    #[serde(default)]
    pub rho: Rho,
    /// Write per-generation AQ traces (`trace.csv`) for every assignment.
    #[serde(default)]
    pub record_trace: bool,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
    /// Report root. `--out` takes precedence.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub params: AlgorithmParams,
    #[serde(rename = "instance")]
    pub instances: Vec<InstanceSpec>,
}

/// A config instance made concrete: either a file that exists or generator
/// parameters.
#[derive(Clone, Debug)]
pub enum InstanceSource {
    File(PathBuf),
    Generated(GeneratorParams),
}

impl InstanceSource {
    pub fn load(&self) -> CliResult<ProjectNetwork> {
        match self {
            InstanceSource::File(p) => load_instance(p).map_err(CliError::runtime),
            InstanceSource::Generated(g) => generate_instance(g).map_err(CliError::runtime),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical TOML of the effective configuration, stored with the report.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn processors(&self) -> usize {
        self.processors.unwrap_or(self.roster.len())
    }

    pub fn assignment_list(&self) -> CliResult<Vec<PortfolioAssignment>> {
        let r = self.roster.len();
        let p = self.processors();
        let list = match &self.assignments {
            AssignmentSpec::Keyword(k) if k == "all" => enumerate_assignments(r, p, None),
            AssignmentSpec::Keyword(k) if k == "table4" => {
                enumerate_assignments(r, p, Some(&table4_assignments()))
            }
            AssignmentSpec::Keyword(k) => {
                return Err(CliError::usage(format!(
                    "assignments must be \"all\", \"table4\" or a list, got \"{k}\""
                )))
            }
            AssignmentSpec::List(l) => enumerate_assignments(r, p, Some(l)),
        };
        list.map_err(CliError::usage)
    }

    /// Checks everything that can be checked before running and resolves the
    /// instance sources. Relative paths are looked up next to the config file
    /// first (`base`), then on the usual instance search path.
    pub fn validate(&self, base: Option<&Path>) -> CliResult<Vec<(String, InstanceSource)>> {
        if self.trials == 0 {
            return Err(CliError::usage("trials must be at least 1"));
        }
        if !(self.slack > 0.0 && self.slack.is_finite()) {
            return Err(CliError::usage(format!(
                "slack must be positive, got {}",
                self.slack
            )));
        }
        if self.roster.is_empty() {
            return Err(CliError::usage("roster is empty"));
        }
        let mut seen_alg = HashSet::new();
        if let Some(dup) = self.roster.iter().find(|a| !seen_alg.insert(**a)) {
            return Err(CliError::usage(format!(
                "{dup} appears twice in the roster"
            )));
        }
        if self.formats.is_empty() {
            return Err(CliError::usage("formats must list csv and/or json"));
        }
        self.params.validate().map_err(CliError::usage)?;
        self.assignment_list()?;
        if self.instances.is_empty() {
            return Err(CliError::usage("config lists no [[instance]]"));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(self.instances.len());
        for spec in &self.instances {
            let label = spec.label();
            if label.is_empty() || label.contains(['/', '\\']) || label.starts_with('.') {
                return Err(CliError::usage(format!("invalid instance name `{label}`")));
            }
            if !seen.insert(label.clone()) {
                return Err(CliError::usage(format!(
                    "instance name `{label}` is used twice"
                )));
            }
            let source = match (&spec.path, &spec.generate) {
                (Some(p), None) => InstanceSource::File(instances::resolve(p, base)?),
                (None, Some(g)) => InstanceSource::Generated(GeneratorParams {
                    n_activities: g.activities,
                    mode_range: (g.modes[0], g.modes[1]),
                    density: g.density,
                    seed: g.seed,
                }),
                _ => {
                    return Err(CliError::usage(format!(
                        "instance `{label}` needs exactly one of `path` or `generate`"
                    )))
                }
            };
            out.push((label, source));
        }
        Ok(out)
    }
}
