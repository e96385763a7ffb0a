//! Experiment configuration shared by the JSON config file and the flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::solver::StopRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckMap,
    Iterate,
    VerifyTheorem,
    Summability,
    ExampleCiric,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckMap => "check-map",
            Command::Iterate => "iterate",
            Command::VerifyTheorem => "verify-theorem",
            Command::Summability => "summability",
            Command::ExampleCiric => "example-ciric",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    AbMapping,
    #[default]
    AbContraction,
    Hausdorff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum ModeName {
    T14,
    T15,
    T16,
}

fn default_step() -> f64 {
    1e-3
}

fn default_pairs() -> usize {
    500
}

fn default_sample_range() -> (f64, f64) {
    (-2.0, 2.0)
}

fn default_t0() -> f64 {
    0.5
}

fn default_n() -> usize {
    10_000
}

/// Everything a run needs. Flags override fields read from `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    /// `corpus:<label>` or a path to a map JSON file.
    #[serde(default)]
    pub map_source: Option<String>,
    /// Path to a JSON file `{alpha, beta, gamma?, k?}` of control
    /// descriptions; defaults to the corpus controls.
    #[serde(default)]
    pub controls_source: Option<String>,
    #[serde(default)]
    pub check: CheckKind,
    /// Spacing of the sample grid for map checks.
    #[serde(default = "default_step")]
    pub sample_step: f64,
    /// Sample range used when the map domain is unbounded.
    #[serde(default = "default_sample_range")]
    pub sample_range: (f64, f64),
    /// Extra uniformly random sample points.
    #[serde(default)]
    pub random_points: usize,
    /// Random pairs for the Hausdorff check.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default)]
    pub x0: Vec<f64>,
    /// Random starts drawn in addition to `x0`.
    #[serde(default)]
    pub starts: usize,
    #[serde(default)]
    pub mode: Option<ModeName>,
    #[serde(default, rename = "C")]
    pub c: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_n", rename = "N")]
    pub n: usize,
    /// Report JSON destination; stdout when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Trace JSON lines destination (`iterate`).
    #[serde(default)]
    pub trace: Option<PathBuf>,
    /// CSV destination (`summability`).
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            map_source: None,
            controls_source: None,
            check: CheckKind::default(),
            sample_step: default_step(),
            sample_range: default_sample_range(),
            random_points: 0,
            pairs: default_pairs(),
            stop: StopRule::default(),
            x0: Vec::new(),
            starts: 0,
            mode: None,
            c: None,
            p: None,
            t0: default_t0(),
            n: default_n(),
            output: None,
            trace: None,
            csv: None,
            seed: 0,
        }
    }
}
