use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hilbert::{HilbertSpec, Level};
use crate::error::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Allowed norm deviation for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Subsystem whose populations [`StateVector::populations`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum Marginal {
    /// All internal levels of one ion, `levels_per_ion` entries.
    Ion(usize),
    /// `(P(|0⟩), P(not |0⟩))` for one ion.
    Qubit(usize),
    /// Fock distribution of one mode, `n_max + 1` entries.
    Mode(usize),
    /// Every basis state.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    spec: HilbertSpec,
    amplitudes: Vec<Complex64>,
}

fn norm_of(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl StateVector {
    /// Takes ownership of `amplitudes`, which must already be normalized.
    pub fn from_amplitudes(spec: HilbertSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        spec.validate()?;
        if amplitudes.len() != spec.dim() {
            return Err(Error::InvalidConfig(alloc::format!(
                "expected {} amplitudes, got {}",
                spec.dim(),
                amplitudes.len()
            )));
        }
        let norm = norm_of(&amplitudes);
        if !((norm - 1.0).abs() < NORM_TOLERANCE) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { spec, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(spec: HilbertSpec, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm_of(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm });
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::from_amplitudes(spec, amplitudes)
    }

    pub fn basis(spec: HilbertSpec, levels: &[Level], fock: &[usize]) -> Result<Self> {
        spec.validate()?;
        let idx = spec.index(levels, fock)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); spec.dim()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { spec, amplitudes })
    }

    /// All ions in `|0⟩` or `|1⟩` per `bits`, every mode in the vacuum.
    pub fn qubits(spec: HilbertSpec, bits: &[u8]) -> Result<Self> {
        let levels: Vec<Level> = bits.iter().map(|&b| Level::from_bit(b)).collect();
        Self::basis(spec, &levels, &vec![0; spec.n_modes])
    }

    /// Embeds a qubit-register state (`2^n_ions` amplitudes, ion 0 most
    /// significant) with all modes in the vacuum.
    pub fn from_register(spec: HilbertSpec, register: &[Complex64]) -> Result<Self> {
        spec.validate()?;
        if register.len() != 1 << spec.n_ions {
            return Err(Error::InvalidConfig("register length must be 2^n_ions".into()));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); spec.dim()];
        let vacuum = vec![0; spec.n_modes];
        for (r, &a) in register.iter().enumerate() {
            let levels: Vec<Level> =
                (0..spec.n_ions).map(|ion| Level::from_bit(((r >> (spec.n_ions - 1 - ion)) & 1) as u8)).collect();
            amplitudes[spec.index(&levels, &vacuum)?] = a;
        }
        Self::from_amplitudes(spec, amplitudes)
    }

    /// Inverse of [`StateVector::from_register`]: the amplitudes on qubit
    /// basis states with every mode in the vacuum.
    pub fn register_amplitudes(&self) -> Vec<Complex64> {
        let n = self.spec.n_ions;
        let vacuum = vec![0; self.spec.n_modes];
        (0..1usize << n)
            .map(|r| {
                let levels: Vec<Level> = (0..n).map(|ion| Level::from_bit(((r >> (n - 1 - ion)) & 1) as u8)).collect();
                self.amplitudes[self.spec.index(&levels, &vacuum).expect("qubit levels exist")]
            })
            .collect()
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, levels: &[Level], fock: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[self.spec.index(levels, fock)?])
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Multiplies every amplitude by `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> Self {
        let f = Complex64::from_polar(1.0, theta);
        Self { spec: self.spec, amplitudes: self.amplitudes.iter().map(|a| a * f).collect() }
    }

    pub fn populations(&self, marginal: Marginal) -> Result<Vec<f64>> {
        let spec = &self.spec;
        let (subsystem, size) = match marginal {
            Marginal::Full => return Ok(self.amplitudes.iter().map(|a| a.norm_sqr()).collect()),
            Marginal::Ion(i) | Marginal::Qubit(i) if i < spec.n_ions => (spec.ion_subsystem(i), spec.levels_per_ion),
            Marginal::Mode(p) if p < spec.n_modes => (spec.mode_subsystem(p), spec.fock_cutoff + 1),
            other => return Err(Error::InvalidSelector(alloc::format!("{other:?} out of range"))),
        };
        let mut out = vec![0.0; size];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[spec.digit(i, subsystem)] += a.norm_sqr();
        }
        if let Marginal::Qubit(_) = marginal {
            let p0 = out[0];
            let rest: f64 = out[1..].iter().sum();
            return Ok(vec![p0, rest]);
        }
        Ok(out)
    }

    /// Total population of basis states for which `pred(digits)` holds;
    /// digits are ion levels first, then Fock numbers.
    pub fn population_where(&self, mut pred: impl FnMut(&[usize]) -> bool) -> f64 {
        let mut digits = vec![0; self.spec.n_subsystems()];
        let mut total = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            for (s, d) in digits.iter_mut().enumerate() {
                *d = self.spec.digit(i, s);
            }
            if pred(&digits) {
                total += a.norm_sqr();
            }
        }
        total
    }
}

/// `|⟨φ|ψ⟩|²`.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(phi.inner(psi)?.norm_sqr())
}
