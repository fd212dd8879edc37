//! Argument parsing and dispatch. [`run`] never exits the process; it
//! returns the exit code so tests can drive it in-process.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use iontrap::algorithms::DEFAULT_SEED;
use iontrap::gates::CompileOptions;
use num_complex::Complex64;
use serde::Serialize;

use crate::acceptance;
use crate::commands;
use crate::config::{
    load_json, BellConfig, CliError, CliResult, CzBoundConfig, GateConfig, ModesConfig, PulseConfig, ScenarioConfig,
    SelftestConfig, TeleportConfig, Tolerances, TrapSimConfig,
};
use crate::output::{to_json, OutputDir};
use crate::schema::schema_for;

/// Output directory when neither `--out-dir` nor `IONTRAP_OUT_DIR` is set.
pub const DEFAULT_OUT_DIR: &str = "iontrap-out";

#[derive(Debug, Parser)]
#[command(name = "iontrap", version, about = "Pulse-level trapped-ion quantum computer simulator")]
pub struct Cli {
    /// Directory for CSV series and JSON reports.
    #[arg(long, global = true, env = "IONTRAP_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Seed for sampled measurement outcomes.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run the scenario described in this JSON file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct FileArgs {
    /// JSON config (see --schema).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the config's JSON Schema and exit.
    #[arg(long)]
    pub schema: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate single-ion Mathieu motion and compare with the secular approximation.
    TrapSim(FileArgs),
    /// Equilibrium positions and normal modes of an N-ion chain.
    Modes {
        /// Number of ions.
        #[arg(long, conflicts_with = "config")]
        n: Option<usize>,
        /// Trap frequency.
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[command(flatten)]
        file: FileArgs,
    },
    /// Apply one laser pulse and record populations over time.
    Pulse(FileArgs),
    /// Compile gates to pulses and run them on a register.
    Gate(FileArgs),
    /// Teleport a qubit state across a three-ion chain.
    Teleport {
        /// Amplitude of |0⟩ as `re,im`.
        #[arg(long, conflicts_with = "config", allow_hyphen_values = true)]
        a: Option<String>,
        /// Amplitude of |1⟩ as `re,im`.
        #[arg(long, conflicts_with = "config", allow_hyphen_values = true)]
        b: Option<String>,
        /// Force the measurement branch, e.g. `01`.
        #[arg(long)]
        branch: Option<String>,
        #[command(flatten)]
        file: FileArgs,
    },
    /// Prepare Bell states from pulses.
    Bell {
        #[arg(long, requires = "y", conflicts_with = "config")]
        x: Option<u8>,
        #[arg(long, requires = "x", conflicts_with = "config")]
        y: Option<u8>,
        #[command(flatten)]
        file: FileArgs,
    },
    /// Out-of-COM leakage bound for the Cirac-Zoller coupling.
    CzBound {
        #[arg(long, conflicts_with = "config")]
        n: Option<usize>,
        /// Rabi frequency.
        #[arg(long, conflicts_with = "config")]
        omega: Option<f64>,
        /// Lamb-Dicke parameter.
        #[arg(long, conflicts_with = "config")]
        eta: Option<f64>,
        /// Trap frequency.
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        /// Also simulate the leakage with this Fock cutoff.
        #[arg(long)]
        simulate: Option<usize>,
        #[command(flatten)]
        file: FileArgs,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Selftest {
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Run only these criterion ids.
        #[arg(long, num_args = 1..)]
        only: Vec<String>,
        #[command(flatten)]
        file: FileArgs,
    },
}

/// A subcommand with its config fully resolved.
#[derive(Debug, Clone)]
pub enum Job {
    TrapSim(TrapSimConfig),
    Modes(ModesConfig),
    Pulse(PulseConfig),
    Gate(GateConfig),
    Teleport(TeleportConfig),
    Bell(BellConfig),
    CzBound(CzBoundConfig),
    Selftest(SelftestConfig),
}

impl Job {
    /// Reads the config for `subcommand` from `path`; `None` only works for
    /// subcommands whose every field has a default.
    pub fn load(subcommand: &str, path: Option<&Path>) -> CliResult<Self> {
        let need = |p: Option<&Path>| {
            p.map(Path::to_path_buf)
                .ok_or_else(|| CliError::Validation(format!("`{subcommand}` needs a config file")))
        };
        Ok(match subcommand {
            "trap-sim" => Job::TrapSim(load_json(&need(path)?)?),
            "modes" => Job::Modes(load_json(&need(path)?)?),
            "pulse" => Job::Pulse(load_json(&need(path)?)?),
            "gate" => Job::Gate(load_json(&need(path)?)?),
            "teleport" => Job::Teleport(load_json(&need(path)?)?),
            "bell" => Job::Bell(match path {
                Some(p) => load_json(p)?,
                None => BellConfig { labels: None, fock_cutoff: 5, compile: CompileOptions::default() },
            }),
            "cz-bound" => Job::CzBound(load_json(&need(path)?)?),
            "selftest" => Job::Selftest(match path {
                Some(p) => load_json(p)?,
                None => SelftestConfig::default(),
            }),
            other => return Err(CliError::Validation(format!("unknown subcommand `{other}`"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Job::TrapSim(_) => "trap-sim",
            Job::Modes(_) => "modes",
            Job::Pulse(_) => "pulse",
            Job::Gate(_) => "gate",
            Job::Teleport(_) => "teleport",
            Job::Bell(_) => "bell",
            Job::CzBound(_) => "cz-bound",
            Job::Selftest(_) => "selftest",
        }
    }

    fn apply_tolerances(&mut self, t: &Tolerances) {
        match self {
            Job::Gate(c) => t.apply(&mut c.compile),
            Job::Teleport(c) => t.apply(&mut c.compile),
            Job::Bell(c) => t.apply(&mut c.compile),
            _ => {}
        }
    }
}

#[derive(Debug, Clone)]
pub struct Context {
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

fn parse_complex(text: &str, flag: &str) -> CliResult<Complex64> {
    let bad = || CliError::Validation(format!("--{flag} expects `re,im`, got `{text}`"));
    let (re, im) = text.split_once(',').ok_or_else(bad)?;
    Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

fn parse_branch(text: &str) -> CliResult<[u8; 2]> {
    match text {
        "00" => Ok([0, 0]),
        "01" => Ok([0, 1]),
        "10" => Ok([1, 0]),
        "11" => Ok([1, 1]),
        _ => Err(CliError::Validation(format!("--branch expects two bits, got `{text}`"))),
    }
}

fn missing(flag: &str) -> CliError {
    CliError::Validation(format!("--{flag} is required without --config"))
}

/// Either the `--schema` text or the job to run.
enum Resolved {
    Schema(&'static str),
    Job(Job),
}

fn resolve(cmd: Command) -> CliResult<Resolved> {
    let (name, file) = match &cmd {
        Command::TrapSim(f) => ("trap-sim", f),
        Command::Modes { file, .. } => ("modes", file),
        Command::Pulse(f) => ("pulse", f),
        Command::Gate(f) => ("gate", f),
        Command::Teleport { file, .. } => ("teleport", file),
        Command::Bell { file, .. } => ("bell", file),
        Command::CzBound { file, .. } => ("cz-bound", file),
        Command::Selftest { file, .. } => ("selftest", file),
    };
    if file.schema {
        return Ok(Resolved::Schema(name));
    }
    if file.config.is_some() || matches!(cmd, Command::TrapSim(_) | Command::Pulse(_) | Command::Gate(_)) {
        let mut job = Job::load(name, file.config.as_deref())?;
        // flags that refine a loaded config
        match (&mut job, &cmd) {
            (Job::Teleport(c), Command::Teleport { branch: Some(b), .. }) => c.branch = Some(parse_branch(b)?),
            (Job::CzBound(c), Command::CzBound { simulate: Some(n), .. }) => c.simulate_cutoff = Some(*n),
            (Job::Selftest(c), Command::Selftest { jobs, only, .. }) => {
                if jobs.is_some() {
                    c.jobs = *jobs;
                }
                if !only.is_empty() {
                    c.only = only.clone();
                }
            }
            _ => {}
        }
        return Ok(Resolved::Job(job));
    }
    let job = match cmd {
        Command::Modes { n, nu, .. } => Job::Modes(ModesConfig { n: n.ok_or_else(|| missing("n"))?, secular_frequency: nu }),
        Command::Teleport { a, b, branch, .. } => Job::Teleport(TeleportConfig {
            a: parse_complex(&a.ok_or_else(|| missing("a"))?, "a")?,
            b: parse_complex(&b.ok_or_else(|| missing("b"))?, "b")?,
            branch: branch.as_deref().map(parse_branch).transpose()?,
            fock_cutoff: 5,
            compile: CompileOptions::default(),
        }),
        Command::Bell { x, y, .. } => Job::Bell(BellConfig {
            labels: x.zip(y).map(|(x, y)| [x, y]),
            fock_cutoff: 5,
            compile: CompileOptions::default(),
        }),
        Command::CzBound { n, omega, eta, nu, simulate, .. } => Job::CzBound(CzBoundConfig {
            n_ions: n.ok_or_else(|| missing("n"))?,
            secular_frequency: nu,
            lamb_dicke: eta.ok_or_else(|| missing("eta"))?,
            rabi: omega.ok_or_else(|| missing("omega"))?,
            simulate_cutoff: simulate,
        }),
        Command::Selftest { jobs, only, .. } => Job::Selftest(SelftestConfig { only, jobs }),
        Command::TrapSim(_) | Command::Pulse(_) | Command::Gate(_) => unreachable!("handled above"),
    };
    Ok(Resolved::Job(job))
}

fn emit<T: Serialize>(name: &str, report: &T, out_dir: Option<&mut OutputDir>, stdout: &mut dyn Write) -> CliResult<()> {
    let text = to_json(report).map_err(|e| CliError::Numerical(e.to_string()))?;
    if let Some(dir) = out_dir {
        dir.write_text(&format!("{name}.json"), &text)?;
    }
    stdout.write_all(text.as_bytes())?;
    Ok(())
}

/// Runs a resolved job, printing its JSON report (or the selftest table).
pub fn execute(job: &Job, ctx: &Context, stdout: &mut dyn Write) -> CliResult<()> {
    let name = job.name();
    let explicit = ctx.out_dir.as_deref();
    let mut dir = match (job, explicit) {
        (_, Some(p)) => Some(OutputDir::create(p)?),
        (Job::TrapSim(_) | Job::Pulse(_), None) => Some(OutputDir::create(Path::new(DEFAULT_OUT_DIR))?),
        _ => None,
    };
    match job {
        Job::TrapSim(c) => {
            let d = dir.as_mut().expect("trap-sim always has an output directory");
            let report = commands::trap_sim(c, d)?;
            emit(name, &report, dir.as_mut(), stdout)
        }
        Job::Pulse(c) => {
            let d = dir.as_mut().expect("pulse always has an output directory");
            let report = commands::pulse(c, d)?;
            emit(name, &report, dir.as_mut(), stdout)
        }
        Job::Modes(c) => emit(name, &commands::modes(c)?, dir.as_mut(), stdout),
        Job::Gate(c) => emit(name, &commands::gate(c)?, dir.as_mut(), stdout),
        Job::Teleport(c) => emit(name, &commands::teleport_cmd(c, ctx.seed)?, dir.as_mut(), stdout),
        Job::Bell(c) => emit(name, &commands::bell(c)?, dir.as_mut(), stdout),
        Job::CzBound(c) => emit(name, &commands::cz_bound(c)?, dir.as_mut(), stdout),
        Job::Selftest(c) => {
            let outcomes = acceptance::run(&c.only, c.jobs.unwrap_or(1)).map_err(CliError::Validation)?;
            for o in &outcomes {
                writeln!(stdout, "{}", o.line())?;
            }
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
            writeln!(stdout, "{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len())?;
            if let Some(d) = dir.as_mut() {
                let text = to_json(&outcomes).map_err(|e| CliError::Numerical(e.to_string()))?;
                d.write_text("selftest.json", &text)?;
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Numerical(format!("criteria failed: {}", failed.join(", "))))
            }
        }
    }
}

fn run_scenario(path: &Path, cli_out: Option<PathBuf>, cli_seed: Option<u64>, stdout: &mut dyn Write) -> CliResult<()> {
    let scenario: ScenarioConfig = load_json(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let input = scenario.input.as_ref().map(|p| base.join(p));
    let mut job = Job::load(&scenario.subcommand, input.as_deref())?;
    job.apply_tolerances(&scenario.tolerances);
    let ctx = Context {
        out_dir: cli_out.or_else(|| scenario.output_dir.as_ref().map(|p| base.join(p))),
        seed: cli_seed.or(scenario.seed).unwrap_or(DEFAULT_SEED),
    };
    execute(&job, &ctx, stdout)
}

/// Parses `args` (program name first), runs, and returns the exit code:
/// 0 success, 1 validation error, 2 numerical failure.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    let result = match (cli.scenario, cli.command) {
        (Some(_), Some(_)) => Err(CliError::Validation("--scenario replaces the subcommand; give one or the other".into())),
        (Some(path), None) => run_scenario(&path, cli.out_dir, cli.seed, stdout),
        (None, Some(cmd)) => resolve(cmd).and_then(|r| match r {
            Resolved::Schema(name) => {
                let schema = schema_for(name).expect("every subcommand has a schema");
                to_json(&schema)
                    .map_err(|e| CliError::Numerical(e.to_string()))
                    .and_then(|t| Ok(stdout.write_all(t.as_bytes())?))
            }
            Resolved::Job(job) => {
                execute(&job, &Context { out_dir: cli.out_dir, seed: cli.seed.unwrap_or(DEFAULT_SEED) }, stdout)
            }
        }),
        (None, None) => Err(CliError::Validation("no subcommand given; see --help".into())),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}
