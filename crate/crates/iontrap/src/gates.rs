//! Gate compilation into laser-pulse sequences, with exact matrix oracles.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainConfig, ChainModes, DEFAULT_VALIDITY_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quantum::{HilbertSpec, Marginal, Polarization, PulseKind, PulseSpec, Simulator, StateVector};

/// Minimum vacuum population of the COM mode before a sideband sequence.
pub const MOTIONAL_GROUND_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case", deny_unknown_fields)]
pub enum GateSpec {
    /// `R(k, φ)`.
    Rotation { ion: usize, k: f64, phi: f64 },
    X { ion: usize },
    Y { ion: usize },
    Z { ion: usize },
    H { ion: usize },
    Cnot { control: usize, target: usize },
    /// `diag(1, 1, 1, −1)` on `(control, target)`.
    CzPhase { control: usize, target: usize },
    /// `U^{k,q}` with the addressed laser phase.
    Sideband {
        ion: usize,
        k: f64,
        polarization: Polarization,
        #[serde(default)]
        phi: f64,
    },
    /// Maps `|1⟩` to `a|0⟩ + b|1⟩`.
    PrepareChi { ion: usize, a: Complex64, b: Complex64 },
}

impl GateSpec {
    pub fn ions(&self) -> Vec<usize> {
        match *self {
            GateSpec::Rotation { ion, .. }
            | GateSpec::X { ion }
            | GateSpec::Y { ion }
            | GateSpec::Z { ion }
            | GateSpec::H { ion }
            | GateSpec::Sideband { ion, .. }
            | GateSpec::PrepareChi { ion, .. } => vec![ion],
            GateSpec::Cnot { control, target } | GateSpec::CzPhase { control, target } => vec![control, target],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64| x.is_finite();
        match *self {
            GateSpec::Rotation { k, phi, .. } | GateSpec::Sideband { k, phi, .. } if !finite(k) || !finite(phi) => {
                Err(Error::InvalidConfig("k and φ must be finite".into()))
            }
            GateSpec::Cnot { control, target } | GateSpec::CzPhase { control, target } if control == target => {
                Err(Error::InvalidConfig("control and target must differ".into()))
            }
            GateSpec::PrepareChi { a, b, .. } => {
                let norm = a.norm_sqr() + b.norm_sqr();
                if (norm - 1.0).abs() > 1e-10 || !norm.is_finite() {
                    Err(Error::InvalidConfig(format!("|a|² + |b|² = {norm}, expected 1")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// `[[cos(kπ/2), −ie^{−iφ} sin(kπ/2)], [−ie^{iφ} sin(kπ/2), cos(kπ/2)]]`.
pub fn rotation_matrix(k: f64, phi: f64) -> CMatrix {
    let (s, c) = (k * FRAC_PI_2).sin_cos();
    let mi = Complex64::new(0.0, -1.0);
    CMatrix::from_rows(&[
        &[Complex64::new(c, 0.0), mi * Complex64::from_polar(s, -phi)],
        &[mi * Complex64::from_polar(s, phi), Complex64::new(c, 0.0)],
    ])
}

/// `(k, φ, α)` with `e^{iα} R(k, φ)|1⟩ = a|0⟩ + b|1⟩`, `k ∈ [0, 1]`,
/// `φ, α ∈ [0, 2π)`.
pub fn chi_rotation(a: Complex64, b: Complex64) -> (f64, f64, f64) {
    let k = (2.0 / PI * b.norm().min(1.0).acos()).min(1.0);
    let alpha = if b.norm() > 0.0 { wrap_angle(b.arg()) } else { 0.0 };
    if a.norm() == 0.0 {
        return (0.0, 0.0, alpha);
    }
    // e^{−iφ} = i a e^{−iα} / |a|
    let phase = Complex64::new(0.0, 1.0) * a * Complex64::from_polar(1.0, -alpha);
    (k, wrap_angle(-phase.arg()), alpha)
}

/// Maps an angle into `[0, 2π)`. Plain `rem_euclid` can round a tiny
/// negative angle up to exactly `2π`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Ideal unitary on the qubits the gate touches (first listed ion is the
/// most significant bit). `None` for sideband pulses, which act on motion.
pub fn gate_oracle(gate: &GateSpec) -> Option<CMatrix> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let s = core::f64::consts::FRAC_1_SQRT_2;
    Some(match *gate {
        GateSpec::Rotation { k, phi, .. } => rotation_matrix(k, phi),
        GateSpec::X { .. } => CMatrix::from_rows(&[&[zero, one], &[one, zero]]),
        GateSpec::Y { .. } => CMatrix::from_rows(&[&[zero, -i], &[i, zero]]),
        GateSpec::Z { .. } => CMatrix::from_rows(&[&[one, zero], &[zero, -one]]),
        GateSpec::H { .. } => CMatrix::from_rows(&[&[one * s, one * s], &[one * s, -one * s]]),
        GateSpec::Cnot { .. } => CMatrix::from_fn(4, |r, c| {
            let target = [0, 1, 3, 2][c];
            if r == target {
                one
            } else {
                zero
            }
        }),
        GateSpec::CzPhase { .. } => {
            CMatrix::from_fn(4, |r, c| if r != c { zero } else if r == 3 { -one } else { one })
        }
        GateSpec::Sideband { .. } => return None,
        GateSpec::PrepareChi { a, b, .. } => {
            let (k, phi, alpha) = chi_rotation(a, b);
            rotation_matrix(k, phi).scale(Complex64::from_polar(1.0, alpha))
        }
    })
}

/// Lifts a gate oracle to the full `2^n` qubit register (ion 0 most
/// significant).
pub fn register_oracle(gate: &GateSpec, n_ions: usize) -> Option<CMatrix> {
    let local = gate_oracle(gate)?;
    let ions = gate.ions();
    if ions.iter().any(|&q| q >= n_ions) {
        return None;
    }
    let dim = 1usize << n_ions;
    let bit = |state: usize, ion: usize| (state >> (n_ions - 1 - ion)) & 1;
    Some(CMatrix::from_fn(dim, |r, c| {
        let untouched = (0..n_ions).filter(|q| !ions.contains(q)).all(|q| bit(r, q) == bit(c, q));
        if !untouched {
            return Complex64::new(0.0, 0.0);
        }
        let sub = |state: usize| ions.iter().fold(0, |acc, &q| (acc << 1) | bit(state, q));
        local[(sub(r), sub(c))]
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompileOptions {
    pub rabi: f64,
    pub lamb_dicke: f64,
    #[serde(default = "default_threshold")]
    pub validity_threshold: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_VALIDITY_THRESHOLD
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self { rabi: 0.1, lamb_dicke: 0.1, validity_threshold: DEFAULT_VALIDITY_THRESHOLD }
    }
}

/// Pulses in time order plus the phase that makes
/// `e^{i global_phase} U_last ⋯ U_first` equal the gate oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub pulses: Vec<PulseSpec>,
    pub global_phase: f64,
    pub spec: HilbertSpec,
}

impl PulseSequence {
    pub fn uses_motion(&self) -> bool {
        self.pulses.iter().any(|p| p.kind != PulseKind::Carrier)
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration).sum()
    }
}

/// Compiles gates for a fixed register and runs the resulting pulses.
#[derive(Debug, Clone)]
pub struct GateCompiler {
    sim: Simulator,
    options: CompileOptions,
}

impl GateCompiler {
    /// COM mode only; `n_modes` of `spec` must be 0 or 1.
    pub fn new(spec: HilbertSpec, options: CompileOptions) -> Result<Self> {
        if spec.n_modes > 1 {
            return Err(Error::InvalidConfig("gates are compiled against the COM mode only".into()));
        }
        if !(options.rabi > 0.0 && options.rabi.is_finite()) {
            return Err(Error::InvalidConfig("Rabi frequency must be positive".into()));
        }
        if !(options.lamb_dicke > 0.0 && options.lamb_dicke.is_finite()) {
            return Err(Error::InvalidConfig("Lamb-Dicke parameter must be positive".into()));
        }
        let modes = ChainModes::for_chain(spec.n_ions, 1.0)?;
        Ok(Self { sim: Simulator::new(spec, modes)?, options })
    }

    pub fn spec(&self) -> &HilbertSpec {
        self.sim.spec()
    }

    pub fn simulator(&self) -> &Simulator {
        &self.sim
    }

    pub fn options(&self) -> &CompileOptions {
        &self.options
    }

    fn check_ion(&self, ion: usize) -> Result<()> {
        if ion >= self.spec().n_ions {
            return Err(Error::InvalidConfig(format!("ion {ion} does not exist")));
        }
        Ok(())
    }

    /// `V^k(φ)`: one carrier pulse of duration `|k|π/Ω`. Negative `k` uses
    /// `R(−k, φ) = R(k, φ + π)`.
    pub fn carrier(&self, ion: usize, k: f64, phi: f64) -> PulseSpec {
        let (k, phi) = if k < 0.0 { (-k, phi + PI) } else { (k, phi) };
        PulseSpec::carrier(ion, self.options.rabi, wrap_angle(phi), k * PI / self.options.rabi)
    }

    /// `U^{k,q}`: one Cirac-Zoller pulse of duration `kπ√N/(Ωη)`.
    pub fn sideband(&self, ion: usize, k: f64, polarization: Polarization, phi: f64) -> Result<PulseSpec> {
        if k < 0.0 {
            return Err(Error::InvalidConfig("sideband pulses need k ≥ 0".into()));
        }
        let spec = self.spec();
        if spec.n_modes == 0 {
            return Err(Error::InvalidConfig("sideband pulses need the COM mode".into()));
        }
        if polarization == Polarization::Minus && spec.levels_per_ion < 3 {
            return Err(Error::InvalidConfig("− polarization needs three-level ions".into()));
        }
        let cfg = ChainConfig::new(spec.n_ions, self.options.lamb_dicke, self.options.rabi);
        let ratio = cfg.validity_ratio();
        if ratio > self.options.validity_threshold {
            return Err(Error::ValidityThreshold { ratio, threshold: self.options.validity_threshold });
        }
        let (omega, eta) = (self.options.rabi, self.options.lamb_dicke);
        let duration = k * PI * (spec.n_ions as f64).sqrt() / (omega * eta);
        Ok(PulseSpec::cirac_zoller(ion, polarization, omega, eta, wrap_angle(phi), duration))
    }

    fn sequence(&self, pulses: Vec<PulseSpec>, global_phase: f64) -> PulseSequence {
        PulseSequence { pulses, global_phase: wrap_angle(global_phase), spec: *self.spec() }
    }

    pub fn compile_rotation(&self, ion: usize, k: f64, phi: f64) -> Result<PulseSequence> {
        self.check_ion(ion)?;
        Ok(self.sequence(vec![self.carrier(ion, k, phi)], 0.0))
    }

    /// `X = iR(1,0)`, `Y = iR(1,π/2)`, `Z = −i R(1,π/2) R(1,0)`.
    pub fn compile_pauli(&self, gate: &GateSpec) -> Result<PulseSequence> {
        match *gate {
            GateSpec::X { ion } => {
                self.check_ion(ion)?;
                Ok(self.sequence(vec![self.carrier(ion, 1.0, 0.0)], FRAC_PI_2))
            }
            GateSpec::Y { ion } => {
                self.check_ion(ion)?;
                Ok(self.sequence(vec![self.carrier(ion, 1.0, FRAC_PI_2)], FRAC_PI_2))
            }
            GateSpec::Z { ion } => {
                self.check_ion(ion)?;
                Ok(self.sequence(vec![self.carrier(ion, 1.0, 0.0), self.carrier(ion, 1.0, FRAC_PI_2)], -FRAC_PI_2))
            }
            _ => Err(Error::InvalidConfig("not a Pauli gate".into())),
        }
    }

    /// `H = X R(1/2, π/2) = i R(1,0) R(1/2,π/2)`.
    pub fn compile_hadamard(&self, ion: usize) -> Result<PulseSequence> {
        self.check_ion(ion)?;
        Ok(self.sequence(vec![self.carrier(ion, 0.5, FRAC_PI_2), self.carrier(ion, 1.0, 0.0)], FRAC_PI_2))
    }

    /// `U_m^{1,+} U_n^{2,−} U_m^{1,+}`: flips the sign of `|1⟩_m|1⟩_n` and
    /// returns the COM mode to the vacuum.
    pub fn compile_cz(&self, control: usize, target: usize) -> Result<PulseSequence> {
        self.check_ion(control)?;
        self.check_ion(target)?;
        if control == target {
            return Err(Error::InvalidConfig("control and target must differ".into()));
        }
        let outer = self.sideband(control, 1.0, Polarization::Plus, 0.0)?;
        let inner = self.sideband(target, 2.0, Polarization::Minus, 0.0)?;
        Ok(self.sequence(vec![outer, inner, outer], 0.0))
    }

    /// Control-Z conjugated by `R(1/2, ∓π/2)` on the target.
    pub fn compile_cnot(&self, control: usize, target: usize) -> Result<PulseSequence> {
        let core = self.compile_cz(control, target)?;
        let mut pulses = vec![self.carrier(target, 0.5, -FRAC_PI_2)];
        pulses.extend(core.pulses);
        pulses.push(self.carrier(target, 0.5, FRAC_PI_2));
        Ok(self.sequence(pulses, 0.0))
    }

    pub fn compile_sideband(&self, ion: usize, k: f64, polarization: Polarization, phi: f64) -> Result<PulseSequence> {
        self.check_ion(ion)?;
        Ok(self.sequence(vec![self.sideband(ion, k, polarization, phi)?], 0.0))
    }

    pub fn prepare_chi(&self, ion: usize, a: Complex64, b: Complex64) -> Result<PulseSequence> {
        GateSpec::PrepareChi { ion, a, b }.validate()?;
        self.check_ion(ion)?;
        let (k, phi, alpha) = chi_rotation(a, b);
        Ok(self.sequence(vec![self.carrier(ion, k, phi)], alpha))
    }

    pub fn compile(&self, gate: &GateSpec) -> Result<PulseSequence> {
        gate.validate()?;
        match *gate {
            GateSpec::Rotation { ion, k, phi } => self.compile_rotation(ion, k, phi),
            GateSpec::X { .. } | GateSpec::Y { .. } | GateSpec::Z { .. } => self.compile_pauli(gate),
            GateSpec::H { ion } => self.compile_hadamard(ion),
            GateSpec::Cnot { control, target } => self.compile_cnot(control, target),
            GateSpec::CzPhase { control, target } => self.compile_cz(control, target),
            GateSpec::Sideband { ion, k, polarization, phi } => self.compile_sideband(ion, k, polarization, phi),
            GateSpec::PrepareChi { ion, a, b } => self.prepare_chi(ion, a, b),
        }
    }

    /// Runs a compiled sequence and applies its global phase. Sequences with
    /// sideband pulses require the COM mode in its ground state.
    pub fn run(&self, seq: &PulseSequence, psi: &StateVector) -> Result<StateVector> {
        if seq.spec != *self.spec() || psi.spec() != self.spec() {
            return Err(Error::SpecMismatch);
        }
        if seq.uses_motion() {
            let vacuum = psi.populations(Marginal::Mode(0))?[0];
            if vacuum < 1.0 - MOTIONAL_GROUND_TOLERANCE {
                return Err(Error::Precondition(format!("COM mode not in |0⟩ (population {vacuum})")));
            }
        }
        let mut state = psi.clone();
        for pulse in &seq.pulses {
            state = self.sim.evolve(&state, pulse)?;
        }
        Ok(state.with_phase(seq.global_phase))
    }

    pub fn apply(&self, gate: &GateSpec, psi: &StateVector) -> Result<StateVector> {
        self.run(&self.compile(gate)?, psi)
    }

    /// Applies gates in order.
    pub fn apply_all(&self, gates: &[GateSpec], psi: &StateVector) -> Result<StateVector> {
        gates.iter().try_fold(psi.clone(), |state, gate| self.apply(gate, &state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{fidelity, Level};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.sub(b).max_abs() < tol
    }

    #[test]
    fn rotation_identities() {
        assert!(close(&rotation_matrix(0.0, 1.3), &CMatrix::identity(2), 1e-15));
        let x = gate_oracle(&GateSpec::X { ion: 0 }).unwrap();
        assert!(close(&rotation_matrix(1.0, 0.0).scale(c(0.0, 1.0)), &x, 1e-15));
        let r = rotation_matrix(0.7, 2.1);
        assert!(close(&r.matmul(&rotation_matrix(-0.7, 2.1)), &CMatrix::identity(2), 1e-15));
        assert!(r.unitarity_deviation() < 1e-15);
    }

    #[test]
    fn hadamard_is_x_times_quarter_rotation() {
        let x = gate_oracle(&GateSpec::X { ion: 0 }).unwrap();
        let h = gate_oracle(&GateSpec::H { ion: 0 }).unwrap();
        assert!(close(&x.matmul(&rotation_matrix(0.5, FRAC_PI_2)), &h, 1e-15));
        assert!(close(&h.matmul(&h), &CMatrix::identity(2), 1e-15));
    }

    #[test]
    fn cnot_oracle_permutes_basis() {
        let u = gate_oracle(&GateSpec::Cnot { control: 0, target: 1 }).unwrap();
        for (col, row) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            assert_eq!(u[(row, col)], c(1.0, 0.0));
        }
    }

    #[test]
    fn register_oracle_respects_ion_order() {
        // control is ion 1, target ion 0: |01⟩ → |11⟩
        let u = register_oracle(&GateSpec::Cnot { control: 1, target: 0 }, 2).unwrap();
        assert_eq!(u[(3, 1)], c(1.0, 0.0));
        assert_eq!(u[(0, 0)], c(1.0, 0.0));
        assert!(register_oracle(&GateSpec::X { ion: 2 }, 2).is_none());
    }

    #[test]
    fn chi_solver_reaches_target() {
        let cases = [
            (c(0.6, 0.0), c(0.0, 0.8)),
            (c(0.0, 1.0), c(0.0, 0.0)),
            (c(0.0, 0.0), c(-1.0, 0.0)),
            (c(-0.3, 0.4), c(0.5, -core::f64::consts::FRAC_1_SQRT_2)),
        ];
        for (a, b) in cases {
            let (k, phi, _) = chi_rotation(a, b);
            assert!((0.0..=1.0).contains(&k) && (0.0..TAU).contains(&phi));
            let u = gate_oracle(&GateSpec::PrepareChi { ion: 0, a, b }).unwrap();
            assert!((u[(0, 1)] - a).norm() < 1e-12 && (u[(1, 1)] - b).norm() < 1e-12);
        }
    }

    fn single_qubit() -> GateCompiler {
        GateCompiler::new(HilbertSpec::new(1, 2, 1, 2), CompileOptions::default()).unwrap()
    }

    #[test]
    fn rotation_pulses_on_basis_states() {
        let gc = single_qubit();
        let spec = *gc.spec();
        let g = StateVector::qubits(spec, &[0]).unwrap();
        let e = StateVector::qubits(spec, &[1]).unwrap();
        let seq = gc.compile_rotation(0, 1.0, 0.0).unwrap();
        let out = gc.run(&seq, &g).unwrap();
        assert!((out.register_amplitudes()[1] - c(0.0, -1.0)).norm() < 1e-12);
        let out = gc.run(&seq, &e).unwrap();
        assert!((out.register_amplitudes()[0] - c(0.0, -1.0)).norm() < 1e-12);
        let out = gc.run(&gc.compile_rotation(0, 0.5, FRAC_PI_2).unwrap(), &g).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let reg = out.register_amplitudes();
        assert!((reg[0] - c(s, 0.0)).norm() < 1e-12 && (reg[1] - c(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn paulis_match_oracles_exactly() {
        let gc = single_qubit();
        let spec = *gc.spec();
        let psi = StateVector::from_register(spec, &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        for gate in [GateSpec::X { ion: 0 }, GateSpec::Y { ion: 0 }, GateSpec::Z { ion: 0 }, GateSpec::H { ion: 0 }] {
            let u = gate_oracle(&gate).unwrap();
            let want = StateVector::from_register(spec, &u.matvec(&psi.register_amplitudes())).unwrap();
            let got = gc.apply(&gate, &psi).unwrap();
            let err = got.amplitudes().iter().zip(want.amplitudes()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
            assert!(err < 1e-10, "{gate:?}: {err}");
        }
    }

    #[test]
    fn y_on_ground_is_i_excited() {
        let gc = single_qubit();
        let out = gc.apply(&GateSpec::Y { ion: 0 }, &StateVector::qubits(*gc.spec(), &[0]).unwrap()).unwrap();
        assert!((out.register_amplitudes()[1] - c(0.0, 1.0)).norm() < 1e-10);
    }

    fn two_ions() -> GateCompiler {
        GateCompiler::new(HilbertSpec::new(2, 3, 1, 3), CompileOptions::default()).unwrap()
    }

    #[test]
    fn control_z_core_flips_only_one_one() {
        let gc = two_ions();
        let seq = gc.compile_cz(0, 1).unwrap();
        assert_eq!(seq.pulses.len(), 3);
        for bits in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let psi = StateVector::qubits(*gc.spec(), &bits).unwrap();
            let out = gc.run(&seq, &psi).unwrap();
            let sign = if bits == [1, 1] { -1.0 } else { 1.0 };
            let overlap = psi.inner(&out).unwrap();
            assert!((overlap - c(sign, 0.0)).norm() < 1e-8, "{bits:?}: {overlap}");
        }
    }

    #[test]
    fn cnot_truth_table() {
        let gc = two_ions();
        let seq = gc.compile_cnot(0, 1).unwrap();
        assert_eq!(seq.pulses.len(), 5);
        for (input, output) in [([0u8, 0], [0u8, 0]), ([0, 1], [0, 1]), ([1, 0], [1, 1]), ([1, 1], [1, 0])] {
            let psi = StateVector::qubits(*gc.spec(), &input).unwrap();
            let want = StateVector::qubits(*gc.spec(), &output).unwrap();
            let out = gc.run(&seq, &psi).unwrap();
            assert!((want.inner(&out).unwrap() - c(1.0, 0.0)).norm() < 1e-8);
            assert!(out.populations(Marginal::Mode(0)).unwrap()[0] > 1.0 - 1e-8);
        }
    }

    #[test]
    fn sideband_needs_motional_ground() {
        let gc = two_ions();
        let seq = gc.compile_cnot(0, 1).unwrap();
        let hot = StateVector::basis(*gc.spec(), &[Level::Ground, Level::Ground], &[1]).unwrap();
        assert!(matches!(gc.run(&seq, &hot), Err(Error::Precondition(_))));
    }

    #[test]
    fn validity_threshold_enforced() {
        let opts = CompileOptions { rabi: 5.0, lamb_dicke: 0.2, validity_threshold: 0.05 };
        let gc = GateCompiler::new(HilbertSpec::new(2, 3, 1, 2), opts).unwrap();
        assert!(matches!(gc.compile_cnot(0, 1), Err(Error::ValidityThreshold { .. })));
        assert!(gc.compile_rotation(0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn malformed_gates_rejected() {
        let gc = two_ions();
        assert!(gc.compile(&GateSpec::Cnot { control: 1, target: 1 }).is_err());
        assert!(gc.compile(&GateSpec::X { ion: 4 }).is_err());
        assert!(gc.compile(&GateSpec::PrepareChi { ion: 0, a: c(1.0, 0.0), b: c(1.0, 0.0) }).is_err());
        assert!(gc.compile(&GateSpec::Rotation { ion: 0, k: f64::INFINITY, phi: 0.0 }).is_err());
        assert!(single_qubit().compile_sideband(0, 1.0, Polarization::Minus, 0.0).is_err());
    }

    #[test]
    fn reversed_cnot_and_total_duration() {
        let gc = two_ions();
        let seq = gc.compile_cnot(1, 0).unwrap();
        assert!(seq.uses_motion());
        let expected = 4.0 * PI * 2f64.sqrt() / 0.01 + PI / 0.1;
        assert!((seq.total_duration() - expected).abs() < 1e-9);
        let psi = StateVector::qubits(*gc.spec(), &[0, 1]).unwrap();
        let out = gc.run(&seq, &psi).unwrap();
        let want = StateVector::qubits(*gc.spec(), &[1, 1]).unwrap();
        assert!(fidelity(&out, &want).unwrap() > 1.0 - 1e-8);
    }
}
