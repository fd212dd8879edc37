use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hilbert::{build_operators, HilbertSpec, OperatorSet, Polarization};
use super::state::StateVector;
use crate::chain::ChainModes;
use crate::error::{Error, Result};
use crate::linalg::{expm, expm_multiply, CMatrix, SparseMatrix};
#[allow(unused_imports)]
use num_traits::Float;

/// Norm drift tolerated (and then renormalized away) after a pulse.
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// Stepped propagation uses at least this many steps per period of the
/// fastest term.
pub const STEPS_PER_PERIOD: f64 = 200.0;

/// Largest dimension for which a dense propagator is built.
pub const DENSE_PROPAGATOR_LIMIT: usize = 4096;

/// Frame-consistency tolerance on `K_r − K_c + ω`.
const FRAME_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Carrier,
    RedSideband,
    BlueSideband,
    LambDickeFull,
    CiracZoller,
    MultimodeStandingWave,
}

/// One laser pulse. Frequencies are in units of the trap frequency and
/// times in units of its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub kind: PulseKind,
    pub target_ion: usize,
    #[serde(default)]
    pub polarization: Polarization,
    /// `Ω`.
    pub rabi: f64,
    /// `η`; ignored by the carrier.
    #[serde(default)]
    pub lamb_dicke: f64,
    /// `φ` in radians.
    #[serde(default)]
    pub phase: f64,
    /// Laser detuning `δ`. `None` puts the laser on the resonance the kind
    /// is named for.
    #[serde(default)]
    pub detuning: Option<f64>,
    pub duration: f64,
    /// Mode addressed by the single-mode kinds.
    #[serde(default)]
    pub mode: usize,
}

impl PulseSpec {
    fn base(kind: PulseKind, target_ion: usize, rabi: f64, lamb_dicke: f64, phase: f64, duration: f64) -> Self {
        Self {
            kind,
            target_ion,
            polarization: Polarization::Plus,
            rabi,
            lamb_dicke,
            phase,
            detuning: None,
            duration,
            mode: 0,
        }
    }

    pub fn carrier(target_ion: usize, rabi: f64, phase: f64, duration: f64) -> Self {
        Self::base(PulseKind::Carrier, target_ion, rabi, 0.0, phase, duration)
    }

    pub fn red_sideband(target_ion: usize, rabi: f64, lamb_dicke: f64, phase: f64, duration: f64) -> Self {
        Self::base(PulseKind::RedSideband, target_ion, rabi, lamb_dicke, phase, duration)
    }

    pub fn blue_sideband(target_ion: usize, rabi: f64, lamb_dicke: f64, phase: f64, duration: f64) -> Self {
        Self::base(PulseKind::BlueSideband, target_ion, rabi, lamb_dicke, phase, duration)
    }

    pub fn cirac_zoller(
        target_ion: usize,
        polarization: Polarization,
        rabi: f64,
        lamb_dicke: f64,
        phase: f64,
        duration: f64,
    ) -> Self {
        Self { polarization, ..Self::base(PulseKind::CiracZoller, target_ion, rabi, lamb_dicke, phase, duration) }
    }

    pub fn multimode(target_ion: usize, rabi: f64, lamb_dicke: f64, phase: f64, duration: f64) -> Self {
        Self::base(PulseKind::MultimodeStandingWave, target_ion, rabi, lamb_dicke, phase, duration)
    }

    pub fn with_detuning(self, detuning: f64) -> Self {
        Self { detuning: Some(detuning), ..self }
    }

    pub fn with_duration(self, duration: f64) -> Self {
        Self { duration, ..self }
    }
}

/// One contribution `e^{iωt} O + e^{−iωt} O†` to `H(t)`.
#[derive(Debug, Clone)]
pub struct Term {
    pub op: SparseMatrix,
    pub op_dag: SparseMatrix,
    pub frequency: f64,
}

/// `H(t) = Σ_k (e^{iω_k t} O_k + h.c.)` together with a diagonal frame
/// generator `K` for which every `O_k` picks up exactly the phase `e^{−iω_k t}`.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub dim: usize,
    pub terms: Vec<Term>,
    pub frame: Vec<f64>,
}

impl Hamiltonian {
    pub fn at(&self, t: f64) -> SparseMatrix {
        let mut h = SparseMatrix::zeros(self.dim);
        for term in &self.terms {
            let f = Complex64::from_polar(1.0, term.frequency * t);
            h = h.add(&term.op.scale(f)).add(&term.op_dag.scale(f.conj()));
        }
        h
    }

    pub fn is_static(&self) -> bool {
        self.terms.iter().all(|t| t.frequency == 0.0)
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.frequency.abs()).fold(0.0, f64::max)
    }

    fn frame_is_consistent(&self) -> bool {
        self.terms.iter().all(|term| {
            term.op
                .iter()
                .all(|(r, c, _)| (self.frame[r] - self.frame[c] + term.frequency).abs() < FRAME_TOLERANCE)
        })
    }

    /// `H_eff = Σ_k (O_k + O_k†) − K`, time independent in the frame
    /// `ψ = e^{−iKt} χ`. `None` when the frame does not remove every phase.
    pub fn effective(&self) -> Option<SparseMatrix> {
        if !self.frame_is_consistent() {
            return None;
        }
        let k: Vec<Complex64> = self.frame.iter().map(|&k| Complex64::new(-k, 0.0)).collect();
        let mut h = SparseMatrix::diagonal(&k);
        for term in &self.terms {
            h = h.add(&term.op).add(&term.op_dag);
        }
        Some(h)
    }
}

/// Operator tables for one Hilbert space plus the chain they belong to.
/// Build once, evolve many pulses.
#[derive(Debug, Clone)]
pub struct Simulator {
    ops: OperatorSet,
    modes: ChainModes,
}

impl Simulator {
    pub fn new(spec: HilbertSpec, modes: ChainModes) -> Result<Self> {
        if spec.n_modes > modes.n_modes() {
            return Err(Error::InvalidConfig(format!(
                "{} modes requested but the chain has {}",
                spec.n_modes,
                modes.n_modes()
            )));
        }
        Ok(Self { ops: build_operators(&spec)?, modes })
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.ops.spec
    }

    pub fn modes(&self) -> &ChainModes {
        &self.modes
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.ops
    }

    fn validate(&self, pulse: &PulseSpec) -> Result<()> {
        let spec = &self.ops.spec;
        let finite = [pulse.rabi, pulse.lamb_dicke, pulse.phase, pulse.duration, pulse.detuning.unwrap_or(0.0)];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPulse("parameters must be finite".into()));
        }
        if pulse.duration < 0.0 {
            return Err(Error::InvalidPulse("duration must be non-negative".into()));
        }
        if pulse.rabi < 0.0 || pulse.lamb_dicke < 0.0 {
            return Err(Error::InvalidPulse("Ω and η must be non-negative".into()));
        }
        if pulse.target_ion >= spec.n_ions {
            return Err(Error::InvalidPulse(format!("target ion {} does not exist", pulse.target_ion)));
        }
        if pulse.polarization == Polarization::Minus && spec.levels_per_ion < 3 {
            return Err(Error::InvalidPulse("− polarization needs three-level ions".into()));
        }
        match pulse.kind {
            PulseKind::Carrier => {}
            PulseKind::RedSideband | PulseKind::BlueSideband | PulseKind::LambDickeFull => {
                if pulse.mode >= spec.n_modes {
                    return Err(Error::InvalidPulse(format!("mode {} is not simulated", pulse.mode)));
                }
            }
            PulseKind::CiracZoller | PulseKind::MultimodeStandingWave => {
                if spec.n_modes == 0 {
                    return Err(Error::InvalidPulse("the COM mode must be simulated".into()));
                }
                if self.modes.n_ions() != spec.n_ions {
                    return Err(Error::InvalidPulse("chain modes do not match the number of ions".into()));
                }
                if pulse.kind == PulseKind::CiracZoller {
                    if let Some(d) = pulse.detuning {
                        if (d + self.modes.mode_frequencies[0]).abs() > 1e-12 {
                            return Err(Error::InvalidPulse("Cirac-Zoller pulses require δ = −ν₁".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn detuning(&self, pulse: &PulseSpec) -> f64 {
        let nu = |p: usize| self.modes.mode_frequencies[p];
        pulse.detuning.unwrap_or(match pulse.kind {
            PulseKind::Carrier | PulseKind::LambDickeFull => 0.0,
            PulseKind::RedSideband => -nu(pulse.mode),
            PulseKind::BlueSideband => nu(pulse.mode),
            PulseKind::CiracZoller | PulseKind::MultimodeStandingWave => -nu(0),
        })
    }

    pub fn hamiltonian(&self, pulse: &PulseSpec) -> Result<Hamiltonian> {
        self.validate(pulse)?;
        let spec = &self.ops.spec;
        let ion = pulse.target_ion;
        let q = match pulse.polarization {
            Polarization::Plus => 0,
            Polarization::Minus => 1,
        };
        let sp = &self.ops.sigma_plus[ion][q];
        let delta = self.detuning(pulse);
        let phase = Complex64::from_polar(1.0, pulse.phase);
        let (omega, eta) = (pulse.rabi, pulse.lamb_dicke);
        let nu = &self.modes.mode_frequencies;
        let p = pulse.mode;

        let mut raw: Vec<(SparseMatrix, f64)> = Vec::new();
        let scaled = |m: &SparseMatrix, s: Complex64| m.scale(s);
        match pulse.kind {
            PulseKind::Carrier => raw.push((scaled(sp, phase * (omega / 2.0)), -delta)),
            PulseKind::RedSideband => {
                raw.push((scaled(&sp.matmul(&self.ops.annihilation[p]), phase * (omega * eta / 2.0)), -(delta + nu[p])))
            }
            PulseKind::BlueSideband => {
                raw.push((scaled(&sp.matmul(&self.ops.creation[p]), phase * (omega * eta / 2.0)), nu[p] - delta))
            }
            PulseKind::LambDickeFull => {
                let side = phase * Complex64::new(0.0, omega * eta / 2.0);
                raw.push((scaled(sp, phase * (omega / 2.0)), -delta));
                raw.push((scaled(&sp.matmul(&self.ops.annihilation[p]), side), -nu[p] - delta));
                raw.push((scaled(&sp.matmul(&self.ops.creation[p]), side), nu[p] - delta));
            }
            PulseKind::CiracZoller | PulseKind::MultimodeStandingWave => {
                let n = self.modes.n_ions() as f64;
                let g = omega * eta / (4.0 * n).sqrt();
                let kept = if pulse.kind == PulseKind::CiracZoller { 1 } else { spec.n_modes };
                for mode in 0..kept {
                    let s = self.modes.couplings[mode][ion];
                    let amp = phase * (g * s);
                    raw.push((scaled(&sp.matmul(&self.ops.annihilation[mode]), amp), -(nu[mode] + delta)));
                    if pulse.kind == PulseKind::MultimodeStandingWave {
                        raw.push((scaled(&sp.matmul(&self.ops.creation[mode]), amp), nu[mode] - delta));
                    }
                }
            }
        }

        let terms: Vec<Term> = raw
            .into_iter()
            .filter(|(op, _)| op.nnz() > 0)
            .map(|(op, frequency)| Term { op_dag: op.adjoint(), op, frequency })
            .collect();
        let static_h = terms.iter().all(|t| t.frequency == 0.0);
        let excited = pulse.polarization.excited_level().index();
        let ion_sub = spec.ion_subsystem(ion);
        let frame = (0..spec.dim())
            .map(|i| {
                if static_h {
                    return 0.0;
                }
                let mut k = if spec.digit(i, ion_sub) == excited { delta } else { 0.0 };
                for mode in 0..spec.n_modes {
                    k -= nu[mode] * spec.digit(i, spec.mode_subsystem(mode)) as f64;
                }
                k
            })
            .collect();
        Ok(Hamiltonian { dim: spec.dim(), terms, frame })
    }

    fn check_input(&self, psi: &StateVector) -> Result<()> {
        if psi.spec() != self.spec() {
            return Err(Error::SpecMismatch);
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() >= super::state::NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    fn finish(&self, amplitudes: Vec<Complex64>) -> Result<StateVector> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let drift = (norm - 1.0).abs();
        if !(drift <= UNITARITY_TOLERANCE) {
            return Err(Error::Unitarity { drift });
        }
        StateVector::normalized(*self.spec(), amplitudes)
    }

    fn apply_frame(frame: &[f64], t: f64, v: &mut [Complex64]) {
        for (a, &k) in v.iter_mut().zip(frame) {
            if k != 0.0 {
                *a *= Complex64::from_polar(1.0, -k * t);
            }
        }
    }

    /// Applies the pulse. Uses the exact frame solution when it exists and
    /// falls back to [`Simulator::evolve_stepped`] otherwise.
    pub fn evolve(&self, psi: &StateVector, pulse: &PulseSpec) -> Result<StateVector> {
        self.check_input(psi)?;
        let h = self.hamiltonian(pulse)?;
        if pulse.duration == 0.0 {
            return Ok(psi.clone());
        }
        match h.effective() {
            Some(h_eff) => {
                let mut v = expm_multiply(&h_eff, pulse.duration, psi.amplitudes());
                Self::apply_frame(&h.frame, pulse.duration, &mut v);
                self.finish(v)
            }
            None => self.stepped(psi, &h, pulse.duration, None),
        }
    }

    /// Piecewise-constant propagation: `H` is frozen at each step midpoint
    /// and the step is exponentiated. Steps are at most `max_step`, and at
    /// most `1/200` of the fastest term's period.
    pub fn evolve_stepped(&self, psi: &StateVector, pulse: &PulseSpec, max_step: Option<f64>) -> Result<StateVector> {
        self.check_input(psi)?;
        let h = self.hamiltonian(pulse)?;
        self.stepped(psi, &h, pulse.duration, max_step)
    }

    fn stepped(&self, psi: &StateVector, h: &Hamiltonian, duration: f64, max_step: Option<f64>) -> Result<StateVector> {
        if duration == 0.0 {
            return Ok(psi.clone());
        }
        let w = h.max_frequency();
        let mut limit = if w > 0.0 { 2.0 * core::f64::consts::PI / w / STEPS_PER_PERIOD } else { duration };
        if let Some(m) = max_step {
            if !(m > 0.0) {
                return Err(Error::InvalidPulse("step must be positive".into()));
            }
            limit = limit.min(m);
        }
        let steps = (duration / limit).ceil().max(1.0) as usize;
        let dt = duration / steps as f64;
        let mut v = psi.amplitudes().to_vec();
        for k in 0..steps {
            let hk = h.at((k as f64 + 0.5) * dt);
            v = expm_multiply(&hk, dt, &v);
        }
        self.finish(v)
    }

    /// States at `samples + 1` evenly spaced times from 0 to the pulse
    /// duration.
    pub fn evolve_series(&self, psi: &StateVector, pulse: &PulseSpec, samples: usize) -> Result<Vec<(f64, StateVector)>> {
        self.check_input(psi)?;
        if samples == 0 {
            return Err(Error::InvalidConfig("at least one sample is required".into()));
        }
        let h = self.hamiltonian(pulse)?;
        let dt = pulse.duration / samples as f64;
        let mut out = Vec::with_capacity(samples + 1);
        out.push((0.0, psi.clone()));
        match h.effective() {
            Some(h_eff) => {
                let mut chi = psi.amplitudes().to_vec();
                for k in 1..=samples {
                    chi = expm_multiply(&h_eff, dt, &chi);
                    let t = k as f64 * dt;
                    let mut v = chi.clone();
                    Self::apply_frame(&h.frame, t, &mut v);
                    out.push((t, self.finish(v)?));
                }
            }
            None => {
                for k in 1..=samples {
                    let t = k as f64 * dt;
                    out.push((t, self.stepped(psi, &h, t, None)?));
                }
            }
        }
        Ok(out)
    }

    /// Dense `U(t)` for the pulse; exact frame route only.
    pub fn propagator(&self, pulse: &PulseSpec) -> Result<CMatrix> {
        let dim = self.spec().dim();
        if dim > DENSE_PROPAGATOR_LIMIT {
            return Err(Error::DimensionCap { dim, cap: DENSE_PROPAGATOR_LIMIT });
        }
        let h = self.hamiltonian(pulse)?;
        let h_eff = h
            .effective()
            .ok_or_else(|| Error::InvalidPulse("no exact frame for this pulse".into()))?;
        let t = pulse.duration;
        let u = expm(&h_eff.to_dense().scale(Complex64::new(0.0, -t)));
        Ok(CMatrix::from_fn(dim, |r, c| u[(r, c)] * Complex64::from_polar(1.0, -h.frame[r] * t)))
    }
}

pub fn build_hamiltonian(pulse: &PulseSpec, spec: HilbertSpec, modes: &ChainModes) -> Result<Hamiltonian> {
    Simulator::new(spec, modes.clone())?.hamiltonian(pulse)
}

pub fn evolve(psi: &StateVector, pulse: &PulseSpec, modes: &ChainModes) -> Result<StateVector> {
    Simulator::new(*psi.spec(), modes.clone())?.evolve(psi, pulse)
}

/// Applies pulses in order.
pub fn evolve_sequence<'a>(
    sim: &Simulator,
    psi: &StateVector,
    pulses: impl IntoIterator<Item = &'a PulseSpec>,
) -> Result<StateVector> {
    let mut state = psi.clone();
    for pulse in pulses {
        state = sim.evolve(&state, pulse)?;
    }
    Ok(state)
}

/// `π√N/(Ωη)`: the Cirac-Zoller time for `k = 1`.
pub fn sideband_pi_time(n_ions: usize, rabi: f64, lamb_dicke: f64) -> f64 {
    core::f64::consts::PI * (n_ions as f64).sqrt() / (rabi * lamb_dicke)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::hilbert::Level;
    use crate::quantum::state::{fidelity, Marginal};
    use core::f64::consts::PI;

    fn single(n_max: usize) -> Simulator {
        Simulator::new(HilbertSpec::new(1, 2, 1, n_max), ChainModes::single_ion()).unwrap()
    }

    fn ket(sim: &Simulator, level: Level, n: usize) -> StateVector {
        StateVector::basis(*sim.spec(), &[level], &[n]).unwrap()
    }

    #[test]
    fn zero_duration_is_identity() {
        let sim = single(3);
        let psi = ket(&sim, Level::Ground, 1);
        let out = sim.evolve(&psi, &PulseSpec::carrier(0, 0.3, 1.0, 0.0)).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn carrier_hamiltonian_is_half_sigma_x() {
        let sim = single(2);
        let h = sim.hamiltonian(&PulseSpec::carrier(0, 0.4, 0.0, 1.0)).unwrap();
        let want = sim.operators().sigma_x[0].scale(Complex64::new(0.2, 0.0));
        assert!(h.at(0.7).to_dense().sub(&want.to_dense()).max_abs() < 1e-16);
    }

    #[test]
    fn red_sideband_matrix_element() {
        let sim = single(4);
        let (omega, eta, phi) = (0.3, 0.1, 0.8);
        let h = sim.hamiltonian(&PulseSpec::red_sideband(0, omega, eta, phi, 1.0)).unwrap().at(0.0);
        let spec = sim.spec();
        for n in 1..=4 {
            let r = spec.index(&[Level::Excited], &[n - 1]).unwrap();
            let c = spec.index(&[Level::Ground], &[n]).unwrap();
            let want = Complex64::from_polar(omega * eta / 2.0 * (n as f64).sqrt(), phi);
            assert!((h.get(r, c) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn blue_sideband_matrix_element() {
        let sim = single(4);
        let h = sim.hamiltonian(&PulseSpec::blue_sideband(0, 0.3, 0.1, 0.0, 1.0)).unwrap().at(0.0);
        let spec = sim.spec();
        for n in 0..4 {
            let r = spec.index(&[Level::Excited], &[n + 1]).unwrap();
            let c = spec.index(&[Level::Ground], &[n]).unwrap();
            assert!((h.get(r, c).re - 0.015 * ((n + 1) as f64).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn carrier_pi_pulse_gives_minus_i_phase() {
        let sim = single(2);
        let (omega, phi) = (0.2, 0.7);
        let out = sim.evolve(&ket(&sim, Level::Ground, 0), &PulseSpec::carrier(0, omega, phi, PI / omega)).unwrap();
        let amp = out.amplitude(&[Level::Excited], &[0]).unwrap();
        let want = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, phi);
        assert!((amp - want).norm() < 1e-12, "{amp}");
    }

    #[test]
    fn red_sideband_pi_pulse_transfers_one_phonon() {
        let sim = single(4);
        let (omega, eta) = (0.1, 0.1);
        let psi = ket(&sim, Level::Ground, 1);
        let out = sim.evolve(&psi, &PulseSpec::red_sideband(0, omega, eta, 0.0, PI / (omega * eta))).unwrap();
        let p = out.amplitude(&[Level::Excited], &[0]).unwrap().norm_sqr();
        assert!((p - 1.0).abs() < 1e-8);
    }

    #[test]
    fn detuned_sideband_frame_matches_stepping() {
        let sim = single(4);
        let pulse = PulseSpec::blue_sideband(0, 0.2, 0.1, 0.3, 40.0).with_detuning(1.05);
        let psi = ket(&sim, Level::Ground, 1);
        let exact = sim.evolve(&psi, &pulse).unwrap();
        let stepped = sim.evolve_stepped(&psi, &pulse, None).unwrap();
        assert!(fidelity(&exact, &stepped).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn propagator_is_unitary_and_agrees_with_evolve() {
        let sim = single(3);
        let pulse = PulseSpec {
            kind: PulseKind::LambDickeFull,
            ..PulseSpec::carrier(0, 0.25, 0.4, 9.0)
        }
        .with_detuning(0.9);
        let pulse = PulseSpec { lamb_dicke: 0.1, ..pulse };
        let u = sim.propagator(&pulse).unwrap();
        assert!(u.unitarity_deviation() < 1e-10);
        let psi = ket(&sim, Level::Ground, 1);
        let via_u = u.matvec(psi.amplitudes());
        let via_evolve = sim.evolve(&psi, &pulse).unwrap();
        let err = via_u.iter().zip(via_evolve.amplitudes()).fold(0.0f64, |a, (x, y)| a.max((x - y).norm()));
        assert!(err < 1e-11);
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        let sim = Simulator::new(HilbertSpec::new(2, 3, 2, 2), ChainModes::for_chain(2, 1.0).unwrap()).unwrap();
        let pulses = [
            PulseSpec::carrier(1, 0.2, 1.1, 1.0),
            PulseSpec::red_sideband(0, 0.2, 0.1, 0.5, 1.0).with_detuning(-0.9),
            PulseSpec::blue_sideband(1, 0.2, 0.1, 2.5, 1.0),
            PulseSpec::cirac_zoller(0, Polarization::Minus, 0.2, 0.1, 0.4, 1.0),
            PulseSpec::multimode(1, 0.2, 0.1, 3.0, 1.0),
        ];
        for pulse in &pulses {
            let h = sim.hamiltonian(pulse).unwrap();
            for k in 0..10 {
                assert!(h.at(0.37 * k as f64).hermiticity_deviation() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_pulses_rejected() {
        let sim = single(2);
        let bad = [
            PulseSpec::carrier(1, 0.1, 0.0, 1.0),
            PulseSpec::carrier(0, 0.1, 0.0, -1.0),
            PulseSpec::carrier(0, f64::NAN, 0.0, 1.0),
            PulseSpec::cirac_zoller(0, Polarization::Minus, 0.1, 0.1, 0.0, 1.0),
            PulseSpec::cirac_zoller(0, Polarization::Plus, 0.1, 0.1, 0.0, 1.0).with_detuning(0.5),
            PulseSpec { mode: 1, ..PulseSpec::red_sideband(0, 0.1, 0.1, 0.0, 1.0) },
        ];
        for pulse in &bad {
            assert!(matches!(sim.hamiltonian(pulse), Err(Error::InvalidPulse(_))), "{pulse:?}");
        }
    }

    #[test]
    fn series_endpoints_match_single_evolution() {
        let sim = single(3);
        let pulse = PulseSpec::carrier(0, 0.3, 0.0, 7.0);
        let psi = ket(&sim, Level::Ground, 2);
        let series = sim.evolve_series(&psi, &pulse, 14).unwrap();
        assert_eq!(series.len(), 15);
        let last = &series.last().unwrap().1;
        assert!(fidelity(last, &sim.evolve(&psi, &pulse).unwrap()).unwrap() > 1.0 - 1e-13);
        let p = series[7].1.populations(Marginal::Qubit(0)).unwrap();
        assert!((p[1] - (0.3f64 * 3.5 / 2.0).sin().powi(2)).abs() < 1e-12);
    }
}
