//! Input files. Every config rejects unknown keys.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use iontrap::chain::ChainConfig;
use iontrap::gates::{CompileOptions, GateSpec};
use iontrap::quantum::{Level, PulseSpec};
use iontrap::trap::{Axis, TrapConfig};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Failure of a CLI run, mapped onto the exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input, rejected config.
    Validation(String),
    /// A solver, integrator or acceptance check did not meet tolerance.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<iontrap::Error> for CliError {
    fn from(e: iontrap::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses JSON text; errors are anchored as `origin:line:column: message`.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        // serde_json appends " at line L column C"; keep only the message
        let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m);
        CliError::Validation(format!("{origin}:{}:{}: {msg}", e.line(), e.column()))
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

/// Replacement values for the adjustable thresholds. Acceptance tolerances
/// are not among them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest `(Ωη/(√N ν))²` the gate compiler accepts.
    pub validity_threshold: Option<f64>,
}

impl Tolerances {
    pub fn apply(&self, opts: &mut CompileOptions) {
        if let Some(t) = self.validity_threshold {
            opts.validity_threshold = t;
        }
    }
}

/// A complete run description: which subcommand, on which input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub subcommand: String,
    /// Config file for the subcommand, relative to the scenario file.
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MathieuInput {
    pub a: f64,
    pub q: f64,
    /// rad/s.
    pub rf_frequency: f64,
}

/// `trap-sim` input. Exactly one of `trap` and `mathieu` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSimConfig {
    #[serde(default)]
    pub trap: Option<TrapConfig>,
    #[serde(default)]
    pub mathieu: Option<MathieuInput>,
    #[serde(default = "default_axis")]
    pub axis: Axis,
    /// Secular amplitude `A` (m).
    pub amplitude: f64,
    /// Simulated time (s). Defaults to one secular period.
    #[serde(default)]
    pub duration: Option<f64>,
    /// Step (s). Defaults to 1/200 of the rf period.
    #[serde(default)]
    pub dt: Option<f64>,
}

fn default_axis() -> Axis {
    Axis::X
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    pub n: usize,
    #[serde(default = "one")]
    pub secular_frequency: f64,
}

fn one() -> f64 {
    1.0
}

/// Starting basis state for `pulse`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub levels: Vec<Level>,
    /// Defaults to every mode in the vacuum.
    #[serde(default)]
    pub fock: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    #[serde(default = "one_usize")]
    pub n_ions: usize,
    #[serde(default = "two")]
    pub levels_per_ion: usize,
    #[serde(default = "one_usize")]
    pub n_modes: usize,
    pub fock_cutoff: usize,
    #[serde(default = "one")]
    pub secular_frequency: f64,
    pub initial: InitialState,
    pub pulse: PulseSpec,
    /// Number of time steps in the CSV series.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn one_usize() -> usize {
    1
}

fn two() -> usize {
    2
}

fn default_samples() -> usize {
    200
}

/// Register input: either bits or `2^n` amplitudes as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegisterInput {
    Bits(Vec<u8>),
    Amplitudes(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    pub n_ions: usize,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
    #[serde(default)]
    pub compile: CompileOptions,
    pub gates: Vec<GateSpec>,
    pub input: RegisterInput,
}

fn default_cutoff() -> usize {
    5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeleportConfig {
    pub a: Complex64,
    pub b: Complex64,
    /// Forces a measurement branch `[A, B]` instead of sampling one.
    #[serde(default)]
    pub branch: Option<[u8; 2]>,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
    #[serde(default)]
    pub compile: CompileOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellConfig {
    /// Both labels, or `None` for all four states.
    #[serde(default)]
    pub labels: Option<[u8; 2]>,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
    #[serde(default)]
    pub compile: CompileOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CzBoundConfig {
    pub n_ions: usize,
    #[serde(default = "one")]
    pub secular_frequency: f64,
    pub lamb_dicke: f64,
    pub rabi: f64,
    /// Also run the multimode simulation with this Fock cutoff.
    #[serde(default)]
    pub simulate_cutoff: Option<usize>,
}

impl CzBoundConfig {
    pub fn chain(&self) -> ChainConfig {
        ChainConfig { n_ions: self.n_ions, secular_frequency: self.secular_frequency, lamb_dicke: self.lamb_dicke, rabi: self.rabi }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestConfig {
    /// Criterion ids to run; all when empty.
    #[serde(default)]
    pub only: Vec<String>,
    #[serde(default)]
    pub jobs: Option<usize>,
}
