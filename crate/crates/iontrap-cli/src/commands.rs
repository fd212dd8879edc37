//! One function per subcommand. Each takes its parsed config and returns
//! the JSON report; time series go to the output directory.

use std::f64::consts::PI;

use iontrap::algorithms::{
    bell_register, bell_state, teleport, teleport_branch, verify_uchi_inverse, Branch, ProtocolOptions, TeleportReport,
};
use iontrap::chain::{cz_leakage_bound, sigma_sum_from_modes, solve_equilibrium, ChainModes, LeakageBound};
use iontrap::gates::{register_oracle, GateCompiler, PulseSequence};
use iontrap::linalg::CMatrix;
use iontrap::quantum::{
    com_pi_time, leakage_experiment, HilbertSpec, LeakageReport, Marginal, Simulator, StateVector,
};
use iontrap::trap::{compare_with_secular_approximation, mathieu_params, MathieuParams, SecularComparison};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{
    BellConfig, CliError, CliResult, CzBoundConfig, GateConfig, ModesConfig, PulseConfig, RegisterInput,
    TeleportConfig, TrapSimConfig,
};
use crate::output::OutputDir;

#[derive(Debug, Serialize)]
pub struct TrapSimReport {
    pub a: f64,
    pub q: f64,
    pub nu: f64,
    pub rms_error: f64,
    pub samples: usize,
}

pub fn trap_sim(cfg: &TrapSimConfig, out: &mut OutputDir) -> CliResult<TrapSimReport> {
    let (params, rf) = match (&cfg.trap, &cfg.mathieu) {
        (Some(trap), None) => (mathieu_params(trap, cfg.axis)?, trap.rf_frequency),
        (None, Some(m)) => (MathieuParams::new(m.a, m.q, cfg.axis), m.rf_frequency),
        _ => return Err(CliError::Validation("give exactly one of `trap` and `mathieu`".into())),
    };
    if !(rf > 0.0 && rf.is_finite()) {
        return Err(CliError::Validation("rf_frequency must be positive".into()));
    }
    let nu = iontrap::trap::secular_frequency(&params, rf)?;
    let duration = match cfg.duration {
        Some(t) => t,
        None if nu > 0.0 => 2.0 * PI / nu,
        None => return Err(CliError::Validation("zero secular frequency: give a duration".into())),
    };
    let dt = cfg.dt.unwrap_or(2.0 * PI / rf / 200.0);
    let SecularComparison { integrated, approximate, rms_error, .. } =
        compare_with_secular_approximation(&params, rf, cfg.amplitude, duration, dt)?;

    let rows: Vec<Vec<f64>> = integrated
        .times
        .iter()
        .zip(&integrated.positions)
        .zip(&approximate.positions)
        .map(|((&t, &x), &y)| vec![t, x, y])
        .collect();
    let header = ["t", "x_integrated", "x_approx"].map(String::from);
    out.write_csv("trap_trajectory.csv", &header, &rows)?;
    Ok(TrapSimReport { a: params.a, q: params.q, nu, rms_error, samples: rows.len() })
}

#[derive(Debug, Serialize)]
pub struct ModesReport {
    pub n_ions: usize,
    pub positions: Vec<f64>,
    pub mu: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub couplings: Vec<Vec<f64>>,
    /// `Σ(N)`; absent for a single ion.
    pub sigma: Option<f64>,
}

pub fn modes(cfg: &ModesConfig) -> CliResult<ModesReport> {
    let eq = solve_equilibrium(cfg.n)?;
    let modes = ChainModes::for_chain(cfg.n, cfg.secular_frequency)?;
    let sigma = (cfg.n >= 2).then(|| sigma_sum_from_modes(&modes));
    Ok(ModesReport {
        n_ions: cfg.n,
        positions: eq.u,
        mu: modes.eigenvalues,
        frequencies: modes.mode_frequencies,
        eigenvectors: modes.eigenvectors,
        couplings: modes.couplings,
        sigma,
    })
}

#[derive(Debug, Serialize)]
pub struct PulseReport {
    pub dim: usize,
    pub duration: f64,
    /// `P(not ground)` per ion at the end of the pulse.
    pub excited: Vec<f64>,
    /// Fock distribution per mode at the end of the pulse.
    pub fock: Vec<Vec<f64>>,
    pub norm: f64,
}

pub fn pulse(cfg: &PulseConfig, out: &mut OutputDir) -> CliResult<PulseReport> {
    let spec = HilbertSpec::new(cfg.n_ions, cfg.levels_per_ion, cfg.n_modes, cfg.fock_cutoff);
    spec.validate()?;
    let modes = if cfg.n_ions == 1 && cfg.secular_frequency == 1.0 {
        ChainModes::single_ion()
    } else {
        ChainModes::for_chain(cfg.n_ions, cfg.secular_frequency)?
    };
    let sim = Simulator::new(spec, modes)?;
    let fock = cfg.initial.fock.clone().unwrap_or_else(|| vec![0; spec.n_modes]);
    let psi = StateVector::basis(spec, &cfg.initial.levels, &fock)?;
    let series = sim.evolve_series(&psi, &cfg.pulse, cfg.samples)?;

    let mut header = vec!["t".to_string()];
    header.extend((0..spec.n_ions).map(|i| format!("p_excited_{i}")));
    header.extend((0..spec.n_modes).map(|p| format!("mean_n_{p}")));
    let mut rows = Vec::with_capacity(series.len());
    for (t, state) in &series {
        let mut row = vec![*t];
        for i in 0..spec.n_ions {
            row.push(state.populations(Marginal::Qubit(i))?[1]);
        }
        for p in 0..spec.n_modes {
            let dist = state.populations(Marginal::Mode(p))?;
            row.push(dist.iter().enumerate().map(|(n, w)| n as f64 * w).sum());
        }
        rows.push(row);
    }
    out.write_csv("pulse_series.csv", &header, &rows)?;

    let last = &series.last().expect("series starts with t = 0").1;
    Ok(PulseReport {
        dim: spec.dim(),
        duration: cfg.pulse.duration,
        excited: (0..spec.n_ions).map(|i| last.populations(Marginal::Qubit(i)).map(|p| p[1])).collect::<Result<_, _>>()?,
        fock: (0..spec.n_modes).map(|p| last.populations(Marginal::Mode(p))).collect::<Result<_, _>>()?,
        norm: last.norm(),
    })
}

#[derive(Debug, Serialize)]
pub struct GateReport {
    pub sequences: Vec<PulseSequence>,
    pub total_duration: f64,
    /// Output register, `[re, im]` per basis state, ion 0 most significant.
    pub register: Vec<Complex64>,
    /// `|⟨ideal|output⟩|²` against the product of gate oracles, when every
    /// gate has one.
    pub oracle_fidelity: Option<f64>,
    /// Population with all modes in the vacuum.
    pub motional_ground: f64,
}

fn register_state(spec: HilbertSpec, input: &RegisterInput) -> CliResult<StateVector> {
    Ok(match input {
        RegisterInput::Bits(bits) => {
            if bits.len() != spec.n_ions || bits.iter().any(|&b| b > 1) {
                return Err(CliError::Validation("`bits` needs one 0/1 entry per ion".into()));
            }
            StateVector::qubits(spec, bits)?
        }
        RegisterInput::Amplitudes(amps) => {
            let full = StateVector::from_register(HilbertSpec::new(spec.n_ions, 2, 0, 1), amps)?;
            StateVector::from_register(spec, &full.register_amplitudes())?
        }
    })
}

pub fn gate(cfg: &GateConfig) -> CliResult<GateReport> {
    let gc = GateCompiler::new(HilbertSpec::new(cfg.n_ions, 3, 1, cfg.fock_cutoff), cfg.compile)?;
    let psi = register_state(*gc.spec(), &cfg.input)?;
    let sequences = cfg.gates.iter().map(|g| gc.compile(g)).collect::<Result<Vec<_>, _>>()?;
    let mut state = psi.clone();
    for seq in &sequences {
        state = gc.run(seq, &state)?;
    }

    let mut ideal = Some(psi.register_amplitudes());
    for g in &cfg.gates {
        ideal = ideal.and_then(|v| register_oracle(g, cfg.n_ions).map(|u: CMatrix| u.matvec(&v)));
    }
    let register = state.register_amplitudes();
    let oracle_fidelity =
        ideal.map(|v| v.iter().zip(&register).map(|(w, x)| w.conj() * x).sum::<Complex64>().norm_sqr());
    let motional_ground = state.populations(Marginal::Mode(0))?[0];
    Ok(GateReport {
        total_duration: sequences.iter().map(PulseSequence::total_duration).sum(),
        sequences,
        register,
        oracle_fidelity,
        motional_ground,
    })
}

#[derive(Debug, Serialize)]
pub struct TeleportSummary {
    #[serde(flatten)]
    pub report: TeleportReport,
    /// `U_χ⁻¹` on Bob's output gives `|1⟩`.
    pub inverse_verified: bool,
}

pub fn teleport_cmd(cfg: &TeleportConfig, seed: u64) -> CliResult<TeleportSummary> {
    let opts = ProtocolOptions { compile: cfg.compile, fock_cutoff: cfg.fock_cutoff };
    let report = match cfg.branch {
        Some(bits) => teleport_branch(cfg.a, cfg.b, Branch::Forced(bits), &opts)?,
        None => teleport(cfg.a, cfg.b, seed, &opts)?,
    };
    let inverse_verified = verify_uchi_inverse(&report)?;
    Ok(TeleportSummary { report, inverse_verified })
}

#[derive(Debug, Serialize)]
pub struct BellEntry {
    pub x: u8,
    pub y: u8,
    pub register: Vec<Complex64>,
    pub fidelity: f64,
}

pub fn bell(cfg: &BellConfig) -> CliResult<Vec<BellEntry>> {
    let labels: Vec<[u8; 2]> = match cfg.labels {
        Some(l) => vec![l],
        None => vec![[0, 0], [0, 1], [1, 0], [1, 1]],
    };
    let opts = ProtocolOptions { compile: cfg.compile, fock_cutoff: cfg.fock_cutoff };
    labels
        .into_iter()
        .map(|[x, y]| {
            let psi = bell_state(x, y, &opts)?;
            let register = psi.register_amplitudes();
            let ideal = bell_register(x, y);
            let fidelity = ideal.iter().zip(&register).map(|(w, v)| w.conj() * v).sum::<Complex64>().norm_sqr();
            Ok(BellEntry { x, y, register, fidelity })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct CzBoundReport {
    #[serde(flatten)]
    pub bound: LeakageBound,
    pub com_pi_time: f64,
    pub simulated: Option<LeakageReport>,
}

pub fn cz_bound(cfg: &CzBoundConfig) -> CliResult<CzBoundReport> {
    let chain = cfg.chain();
    chain.validate()?;
    let bound = cz_leakage_bound(&chain)?;
    let t = com_pi_time(&chain);
    let simulated = cfg.simulate_cutoff.map(|n_max| leakage_experiment(&chain, t, n_max)).transpose()?;
    Ok(CzBoundReport { bound, com_pi_time: t, simulated })
}
