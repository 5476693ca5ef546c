//! Scenario-driven front end for the metasurface simulator.
//!
//! A [`Scenario`] is a JSON file describing the surface, the radio scene and
//! what the surface should do. [`run_scenario`] validates it, runs the
//! pipeline and writes constellation/spectrum CSVs plus `summary.json`.

pub mod bundled;
pub mod output;
pub mod overrides;
pub mod runner;
pub mod scenario;

use std::path::{Path, PathBuf};

pub use runner::{simulate, Simulation};
pub use scenario::{Scenario, Violation};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Input { path: String, message: String },
    #[error("cannot parse scenario {origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{0}")]
    Override(String),
    #[error("scenario `{scenario}` is invalid:\n{}", format_violations(.violations))]
    Validation {
        scenario: String,
        violations: Vec<Violation>,
    },
    #[error("scenario `{scenario}` failed: {source}")]
    Runtime {
        scenario: String,
        #[source]
        source: metasim_core::Error,
    },
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  - {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    /// 1 for anything wrong with the input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. }
            | CliError::Parse { .. }
            | CliError::Override(_)
            | CliError::Validation { .. } => 1,
            CliError::Runtime { .. } | CliError::Output { .. } => 2,
        }
    }
}

/// Where a scenario came from: a file path or a bundled name.
pub fn load_source(source: &str) -> Result<(String, String), CliError> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
            path: source.into(),
            message: e.to_string(),
        })?;
        return Ok((source.into(), text));
    }
    match bundled::get(source) {
        Some(text) => Ok((format!("bundled:{source}"), text.into())),
        None => Err(CliError::Input {
            path: source.into(),
            message: format!(
                "no such file, and not a bundled scenario ({})",
                bundled::NAMES.join(", ")
            ),
        }),
    }
}

/// Parses scenario JSON after applying `key=value` overrides.
pub fn parse_scenario(
    origin: &str,
    text: &str,
    overrides: &[String],
) -> Result<Scenario, CliError> {
    let parse_err = |e: serde_json::Error| CliError::Parse {
        origin: origin.into(),
        message: e.to_string(),
    };
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(parse_err)?;
    for spec in overrides {
        let (key, v) = overrides::parse(spec).map_err(CliError::Override)?;
        overrides::apply(&mut value, &key, v).map_err(CliError::Override)?;
    }
    serde_json::from_value(value).map_err(parse_err)
}

pub fn check(scenario: &Scenario) -> Result<(), CliError> {
    let violations = scenario.validate();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation {
            scenario: scenario.name.clone(),
            violations,
        })
    }
}

/// Validates, simulates and writes artifacts into `out_dir`.
pub fn run_scenario(
    scenario: &Scenario,
    out_dir: &Path,
) -> Result<(Simulation, Vec<PathBuf>), CliError> {
    check(scenario)?;
    let sim = simulate(scenario).map_err(|source| CliError::Runtime {
        scenario: scenario.name.clone(),
        source,
    })?;
    let files = output::write_artifacts(&sim, out_dir).map_err(|source| CliError::Output {
        path: out_dir.to_path_buf(),
        source,
    })?;
    Ok((sim, files))
}

/// Output directory: explicit flag, then the scenario's own, then `out/<name>`.
pub fn output_dir(scenario: &Scenario, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| scenario.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&scenario.name))
}
