//! Experiment harness: config loading, the six run commands, CSV artifacts
//! and the run manifest.
//!
//! A run is described by an ExperimentSpec (command, config path, output
//! directory, seed, overrides). Running it loads the JSON config, applies
//! `key=value` overrides, executes the command, writes its CSV outputs and
//! finally a manifest.json recording the effective config, the code version,
//! the wall-clock duration and one pass/fail outcome per check. The manifest
//! is written exactly once, after the run completes; its absence marks an
//! abnormal termination.
//!
//! Runs are bitwise deterministic for a given spec: parallel reductions are
//! ordered, every float is written with 17 significant digits, and the
//! HELIX_THREADS environment variable caps the worker count without ever
//! changing results.

mod config;
mod output;
mod runners;

use std::fmt;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use serde_json::Value;

use crate::error::{Error, Result};

pub use config::{from_value, load_raw};
pub use output::{fmt_float, write_csv, write_diagnostics, write_particles};
pub use runners::{GreensCheckConfig, KernelCheckConfig, RotationSweepConfig, SigmaSweepConfig};

/// The six experiment commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    GreensCheck,
    KernelCheck,
    Simulate,
    RotationSweep,
    StraightFilament,
    SigmaSweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GreensCheck => "greens_check",
            Command::KernelCheck => "kernel_check",
            Command::Simulate => "simulate",
            Command::RotationSweep => "rotation_sweep",
            Command::StraightFilament => "straight_filament",
            Command::SigmaSweep => "sigma_sweep",
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub command: Command,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    /// Seed for randomized sweeps (kernel-check pair sampling).
    pub seed: u64,
    /// Optional tolerance override, spliced into the config as `tol`.
    pub tol: Option<f64>,
    /// `key=value` overrides applied to the config file in order.
    pub overrides: Vec<String>,
}

impl ExperimentSpec {
    pub fn new(command: Command, config_path: impl Into<PathBuf>) -> Self {
        Self {
            command,
            config_path: config_path.into(),
            out_dir: PathBuf::from("out"),
            seed: 0,
            tol: None,
            overrides: Vec::new(),
        }
    }
}

/// One named check with the value it measured and the bound it was held to.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
}

impl CheckOutcome {
    pub fn new(name: &str, passed: bool, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), passed, measured, bound }
    }

    /// Passes when the measured value is finite and at most the bound.
    pub fn upper(name: &str, measured: f64, bound: f64) -> Self {
        Self::new(name, measured.is_finite() && measured <= bound, measured, bound)
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured {:.6e}, bound {:.6e}",
            if self.passed { "pass" } else { "FAIL" },
            self.name,
            self.measured,
            self.bound
        )
    }
}

/// Written once per completed run as `manifest.json`.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_path: String,
    pub out_dir: String,
    pub seed: u64,
    pub duration_seconds: f64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
    /// Effective config after defaults and overrides.
    pub config: Value,
    /// Command-specific summary values.
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub summary: Value,
}

static THREAD_CAP: OnceLock<std::result::Result<(), String>> = OnceLock::new();

/// Applies the HELIX_THREADS worker cap once per process. The cap changes
/// only how work is scheduled; all reductions stay in a fixed order, so
/// results are identical for any thread count.
fn init_thread_cap() -> Result<()> {
    let outcome = THREAD_CAP.get_or_init(|| match std::env::var("HELIX_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(format!("HELIX_THREADS: {e}")),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string()),
            _ => Err(format!("HELIX_THREADS must be a positive integer, got '{raw}'")),
        },
    });
    outcome.clone().map_err(Error::Config)
}

/// Executes one experiment end to end and writes `manifest.json`.
///
/// The error path follows the exit-code contract: config problems surface as
/// Error::Config (exit 2), diverging integrations as Error::Blowup (exit 3),
/// everything else as exit 1; a completed run returns the manifest and the
/// caller decides between exit 0 and 1 from its `passed` flag.
pub fn run(spec: &ExperimentSpec) -> Result<RunManifest> {
    init_thread_cap()?;
    let started = Instant::now();
    std::fs::create_dir_all(&spec.out_dir)?;
    let mut overrides = spec.overrides.clone();
    if let Some(tol) = spec.tol {
        overrides.push(format!("tol={tol}"));
    }
    let raw = config::load_raw(&spec.config_path, &overrides)?;
    let outcome = runners::dispatch(spec.command, &raw, &spec.out_dir, spec.seed)?;
    let manifest = RunManifest {
        command: spec.command.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_path: spec.config_path.display().to_string(),
        out_dir: spec.out_dir.display().to_string(),
        seed: spec.seed,
        duration_seconds: started.elapsed().as_secs_f64(),
        passed: outcome.checks.iter().all(|c| c.passed),
        checks: outcome.checks,
        config: outcome.config,
        summary: outcome.summary,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest json");
    std::fs::write(spec.out_dir.join("manifest.json"), text)?;
    Ok(manifest)
}
