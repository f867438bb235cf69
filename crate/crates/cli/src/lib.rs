//! Batch experiments over the `mkdv-series` solvers.
//!
//! Each run writes its tables (CSV) and solutions (JSON) into an output
//! directory together with `manifest.json`, which records the resolved
//! parameters, the build version, wall time and every assertion with its
//! tolerance.

pub mod data;
pub mod error;
pub mod experiments;
pub mod params;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

pub use data::load_initial_data;
pub use error::CliError;
pub use params::{ExperimentKind, ExperimentSpec, ParamDoc};

/// `git describe`-style build version.
pub const VERSION: &str = env!("MKDV_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub tolerance: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, relation: "<=", tolerance, passed: measured <= tolerance }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, relation: ">=", tolerance, passed: measured >= tolerance }
    }
}

/// What an experiment produces before anything touches the disk.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
    pub measurements: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: ExperimentKind,
    pub version: String,
    pub parameters: BTreeMap<String, String>,
    pub jobs: Option<usize>,
    pub wall_time_seconds: f64,
    pub files: Vec<String>,
    pub measurements: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

/// Runs `spec` and writes its files and `manifest.json` into `out`.
///
/// `jobs` caps the worker pool; results do not depend on it.
pub fn run_experiment(spec: &ExperimentSpec, out: &Path, jobs: Option<usize>) -> Result<Manifest, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io { path: out.display().to_string(), source: e })?;
    let start = Instant::now();
    let outputs = with_jobs(jobs, || experiments::run(spec))??;
    let wall_time_seconds = start.elapsed().as_secs_f64();

    let mut files = Vec::new();
    for (name, bytes) in &outputs.files {
        let path = out.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        files.push(name.clone());
    }
    let passed = outputs.assertions.iter().all(|a| a.passed);
    let manifest = Manifest {
        experiment: spec.kind,
        version: VERSION.to_string(),
        parameters: spec.parameters.clone(),
        jobs,
        wall_time_seconds,
        files,
        measurements: outputs.measurements,
        assertions: outputs.assertions,
        passed,
    };
    let path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Output { path: path.display().to_string(), message: e.to_string() })?;
    std::fs::write(&path, text + "\n").map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    for a in &manifest.assertions {
        log::info!(
            "{} {}: {:e} {} {:e}",
            if a.passed { "pass" } else { "FAIL" },
            a.name,
            a.measured,
            a.relation,
            a.tolerance
        );
    }
    Ok(manifest)
}

#[cfg(feature = "parallel")]
fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Invalid("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Invalid(format!("worker pool: {e}"))),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<R>(jobs: Option<usize>, f: impl FnOnce() -> R) -> Result<R, CliError> {
    if jobs == Some(0) {
        return Err(CliError::Invalid("--jobs must be at least 1".into()));
    }
    Ok(f())
}
