//! Bell-state preparation, projective measurement and teleportation, all
//! driven through compiled pulse sequences.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{chi_rotation, CompileOptions, GateCompiler, GateSpec};
use crate::quantum::{HilbertSpec, StateVector};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x1057_7ea9;

/// Outcomes below this probability cannot be projected onto.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Register layout for the protocols: three-level ions (the CNOT needs the
/// auxiliary level) and the COM mode.
pub fn protocol_spec(n_ions: usize, fock_cutoff: usize) -> HilbertSpec {
    HilbertSpec::new(n_ions, 3, 1, fock_cutoff)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolOptions {
    #[serde(default)]
    pub compile: CompileOptions,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
}

fn default_cutoff() -> usize {
    5
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self { compile: CompileOptions::default(), fock_cutoff: default_cutoff() }
    }
}

/// `|β_xy⟩` built from `|x y⟩` by H on ion 0 and CNOT(0 → 1).
pub fn bell_state(x: u8, y: u8, options: &ProtocolOptions) -> Result<StateVector> {
    if x > 1 || y > 1 {
        return Err(Error::InvalidConfig("Bell labels are bits".into()));
    }
    let gc = GateCompiler::new(protocol_spec(2, options.fock_cutoff), options.compile)?;
    let psi = StateVector::qubits(*gc.spec(), &[x, y])?;
    gc.apply_all(&[GateSpec::H { ion: 0 }, GateSpec::Cnot { control: 0, target: 1 }], &psi)
}

/// Ideal `|β_xy⟩` on the qubit register.
pub fn bell_register(x: u8, y: u8) -> [Complex64; 4] {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(s, 0.0);
    match (x, y) {
        (0, 0) => [p, z, z, p],
        (0, _) => [z, p, p, z],
        (_, 0) => [p, z, z, -p],
        _ => [z, p, -p, z],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubits: Vec<usize>,
    pub outcomes: Vec<u8>,
    /// Born probability of every joint outcome, first listed qubit most
    /// significant.
    pub probabilities: Vec<f64>,
    pub seed: Option<u64>,
}

impl MeasurementRecord {
    pub fn outcome_index(&self) -> usize {
        self.outcomes.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

fn joint_outcome(psi: &StateVector, qubits: &[usize], i: usize) -> usize {
    let spec = psi.spec();
    qubits.iter().fold(0, |acc, &q| (acc << 1) | usize::from(spec.digit(i, spec.ion_subsystem(q)) != 0))
}

fn outcome_probabilities(psi: &StateVector, qubits: &[usize]) -> Result<Vec<f64>> {
    let spec = psi.spec();
    if qubits.is_empty() {
        return Err(Error::InvalidSelector("no qubits to measure".into()));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= spec.n_ions || qubits[..i].contains(&q) {
            return Err(Error::InvalidSelector(format!("bad qubit list {qubits:?}")));
        }
    }
    let mut probs = vec![0.0; 1 << qubits.len()];
    for (i, a) in psi.amplitudes().iter().enumerate() {
        probs[joint_outcome(psi, qubits, i)] += a.norm_sqr();
    }
    Ok(probs)
}

/// Projects onto the given outcome and renormalizes. Returns the outcome's
/// probability alongside the collapsed state.
pub fn project(psi: &StateVector, qubits: &[usize], outcomes: &[u8]) -> Result<(f64, StateVector)> {
    if outcomes.len() != qubits.len() || outcomes.iter().any(|&b| b > 1) {
        return Err(Error::InvalidSelector("one bit per measured qubit".into()));
    }
    let probs = outcome_probabilities(psi, qubits)?;
    let target = outcomes.iter().fold(0, |acc, &b| (acc << 1) | b as usize);
    let probability = probs[target];
    if probability < ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    let amps = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| if joint_outcome(psi, qubits, i) == target { a } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok((probability, StateVector::normalized(*psi.spec(), amps)?))
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Samples a joint outcome by the Born rule with a seeded ChaCha8 stream.
pub fn measure(psi: &StateVector, qubits: &[usize], seed: u64) -> Result<(MeasurementRecord, StateVector)> {
    let probabilities = outcome_probabilities(psi, qubits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = uniform(&mut rng);
    let mut acc = 0.0;
    let mut pick = None;
    for (k, &p) in probabilities.iter().enumerate() {
        if p < ZERO_PROBABILITY {
            continue;
        }
        pick = Some(k);
        acc += p;
        if u < acc {
            break;
        }
    }
    let pick = pick.ok_or(Error::ZeroProbability { probability: 0.0 })?;
    let n = qubits.len();
    let outcomes: Vec<u8> = (0..n).map(|j| ((pick >> (n - 1 - j)) & 1) as u8).collect();
    let (_, state) = project(psi, qubits, &outcomes)?;
    Ok((MeasurementRecord { qubits: qubits.to_vec(), outcomes, probabilities, seed: Some(seed) }, state))
}

/// Ion roles in the teleportation register.
const ALICE: usize = 0;
const ANCILLA: usize = 1;
const BOB: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportReport {
    pub a: Complex64,
    pub b: Complex64,
    /// `U_χ = e^{iα} R(k, φ)`.
    pub chi_k: f64,
    pub chi_phi: f64,
    pub chi_alpha: f64,
    /// Largest deviation of the pre-measurement register from the
    /// four-branch form `±½|x y⟩ (…)`.
    pub branch_error: f64,
    pub measurement: MeasurementRecord,
    pub x_correction: bool,
    pub z_correction: bool,
    /// Bob's qubit after correction, normalized.
    pub output: [Complex64; 2],
    /// `|⟨χ|output⟩|²`.
    pub fidelity: f64,
    /// Alice's and the ancilla's `P(|1⟩)` after measurement.
    pub measured_populations: [f64; 2],
}

/// Which measurement branch to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Sampled(u64),
    Forced([u8; 2]),
}

/// Runs the protocol up to (not including) the measurement of Alice's ion
/// and the ancilla.
pub fn teleport_prepare(gc: &GateCompiler, a: Complex64, b: Complex64) -> Result<StateVector> {
    GateSpec::PrepareChi { ion: ALICE, a, b }.validate()?;
    let psi = StateVector::qubits(*gc.spec(), &[1, 1, 1])?;
    let circuit = [
        // (|01⟩ + |10⟩)/√2 on ancilla and Bob
        GateSpec::X { ion: ANCILLA },
        GateSpec::H { ion: ANCILLA },
        GateSpec::Cnot { control: ANCILLA, target: BOB },
        GateSpec::PrepareChi { ion: ALICE, a, b },
        GateSpec::Rotation { ion: ANCILLA, k: 0.5, phi: core::f64::consts::FRAC_PI_2 },
        GateSpec::CzPhase { control: ALICE, target: ANCILLA },
        GateSpec::Rotation { ion: ALICE, k: 0.5, phi: core::f64::consts::FRAC_PI_2 },
        GateSpec::Rotation { ion: ANCILLA, k: 0.5, phi: core::f64::consts::FRAC_PI_2 },
    ];
    gc.apply_all(&circuit, &psi)
}

/// The pre-measurement register the protocol should reach.
pub fn expected_branches(a: Complex64, b: Complex64) -> [Complex64; 8] {
    let h = 0.5;
    [-a * h, -b * h, b * h, a * h, -a * h, b * h, -b * h, a * h]
}

pub fn teleport(a: Complex64, b: Complex64, seed: u64, options: &ProtocolOptions) -> Result<TeleportReport> {
    teleport_branch(a, b, Branch::Sampled(seed), options)
}

pub fn teleport_branch(a: Complex64, b: Complex64, branch: Branch, options: &ProtocolOptions) -> Result<TeleportReport> {
    let gc = GateCompiler::new(protocol_spec(3, options.fock_cutoff), options.compile)?;
    let prepared = teleport_prepare(&gc, a, b)?;
    finish_teleport(&gc, &prepared, a, b, branch)
}

/// Measurement and feed-forward on a state from [`teleport_prepare`].
pub fn finish_teleport(
    gc: &GateCompiler,
    prepared: &StateVector,
    a: Complex64,
    b: Complex64,
    branch: Branch,
) -> Result<TeleportReport> {
    let register = prepared.register_amplitudes();
    let branch_error = register
        .iter()
        .zip(expected_branches(a, b))
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));

    let qubits = [ALICE, ANCILLA];
    let (measurement, collapsed) = match branch {
        Branch::Sampled(seed) => measure(prepared, &qubits, seed)?,
        Branch::Forced(bits) => {
            let (_, state) = project(prepared, &qubits, &bits)?;
            let probabilities = outcome_probabilities(prepared, &qubits)?;
            (MeasurementRecord { qubits: qubits.to_vec(), outcomes: bits.to_vec(), probabilities, seed: None }, state)
        }
    };
    let measured_populations = [
        collapsed.populations(crate::quantum::Marginal::Qubit(ALICE))?[1],
        collapsed.populations(crate::quantum::Marginal::Qubit(ANCILLA))?[1],
    ];

    let x_correction = measurement.outcomes[1] == 1;
    let z_correction = measurement.outcomes[0] == 1;
    let mut state = collapsed;
    if x_correction {
        state = gc.apply(&GateSpec::X { ion: BOB }, &state)?;
    }
    if z_correction {
        state = gc.apply(&GateSpec::Z { ion: BOB }, &state)?;
    }

    let reg = state.register_amplitudes();
    let base = (measurement.outcomes[0] as usize) << 2 | (measurement.outcomes[1] as usize) << 1;
    let c = [reg[base], reg[base | 1]];
    let norm = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroProbability { probability: 0.0 });
    }
    let output = [c[0] / norm, c[1] / norm];
    // amplitude left outside Bob's qubit (motion, auxiliary level) counts as infidelity
    let overlap = a.conj() * c[0] + b.conj() * c[1];
    let fidelity = overlap.norm_sqr();

    let (chi_k, chi_phi, chi_alpha) = chi_rotation(a, b);
    Ok(TeleportReport {
        a,
        b,
        chi_k,
        chi_phi,
        chi_alpha,
        branch_error,
        measurement,
        x_correction,
        z_correction,
        output,
        fidelity,
        measured_populations,
    })
}

/// Applies `U_χ⁻¹ = R(−k, φ)` to Bob's qubit at pulse level; true when the
/// result is `|1⟩` up to a global phase.
pub fn verify_uchi_inverse(report: &TeleportReport) -> Result<bool> {
    let gc = GateCompiler::new(HilbertSpec::new(1, 2, 0, 1), CompileOptions::default())?;
    let psi = StateVector::from_register(*gc.spec(), &report.output)?;
    let inverse = GateSpec::Rotation { ion: 0, k: -report.chi_k, phi: report.chi_phi };
    let out = gc.apply(&inverse, &psi)?;
    Ok(out.register_amplitudes()[1].norm_sqr() >= 1.0 - 1e-8)
}
