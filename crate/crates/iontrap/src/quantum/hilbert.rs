use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
#[allow(unused_imports)]
use num_traits::Float;

/// Default cap on the full Hilbert-space dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 20;

/// Internal level of one ion. `Excited` is the computational `|1⟩`
/// (reached with `+` polarization); `Auxiliary` is the `|1₋⟩` level reached
/// with `−` polarization, present only for three-level ions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Ground,
    Excited,
    Auxiliary,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
            Level::Auxiliary => 2,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Level::Ground
        } else {
            Level::Excited
        }
    }
}

/// Laser polarization; selects which excited level `σ₊` addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    #[default]
    Plus,
    Minus,
}

impl Polarization {
    pub fn excited_level(self) -> Level {
        match self {
            Polarization::Plus => Level::Excited,
            Polarization::Minus => Level::Auxiliary,
        }
    }
}

/// Layout of the simulated space: ions (slowest index, ion 0 first), then
/// modes ascending, Fock index fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertSpec {
    pub n_ions: usize,
    pub levels_per_ion: usize,
    pub n_modes: usize,
    pub fock_cutoff: usize,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_DIMENSION_CAP
}

impl HilbertSpec {
    pub fn new(n_ions: usize, levels_per_ion: usize, n_modes: usize, fock_cutoff: usize) -> Self {
        Self { n_ions, levels_per_ion, n_modes, fock_cutoff, dimension_cap: DEFAULT_DIMENSION_CAP }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ions < 1 {
            return Err(Error::InvalidConfig("at least one ion is required".into()));
        }
        if !(2..=3).contains(&self.levels_per_ion) {
            return Err(Error::InvalidConfig("levels_per_ion must be 2 or 3".into()));
        }
        if self.fock_cutoff < 1 {
            return Err(Error::InvalidConfig("fock_cutoff must be at least 1".into()));
        }
        match self.checked_dim() {
            Some(dim) if dim <= self.dimension_cap => Ok(()),
            Some(dim) => Err(Error::DimensionCap { dim, cap: self.dimension_cap }),
            None => Err(Error::DimensionCap { dim: usize::MAX, cap: self.dimension_cap }),
        }
    }

    fn checked_dim(&self) -> Option<usize> {
        let ions = self.levels_per_ion.checked_pow(self.n_ions as u32)?;
        let modes = (self.fock_cutoff + 1).checked_pow(self.n_modes as u32)?;
        ions.checked_mul(modes)
    }

    pub fn dim(&self) -> usize {
        self.checked_dim().expect("validated spec")
    }

    pub fn n_subsystems(&self) -> usize {
        self.n_ions + self.n_modes
    }

    fn subsystem_size(&self, s: usize) -> usize {
        if s < self.n_ions {
            self.levels_per_ion
        } else {
            self.fock_cutoff + 1
        }
    }

    /// Stride of subsystem `s` in the flat index.
    pub fn stride(&self, s: usize) -> usize {
        (s + 1..self.n_subsystems()).map(|k| self.subsystem_size(k)).product()
    }

    pub fn ion_subsystem(&self, ion: usize) -> usize {
        ion
    }

    pub fn mode_subsystem(&self, mode: usize) -> usize {
        self.n_ions + mode
    }

    /// Flat index of a product basis state.
    pub fn index(&self, levels: &[Level], fock: &[usize]) -> Result<usize> {
        if levels.len() != self.n_ions || fock.len() != self.n_modes {
            return Err(Error::InvalidSelector("basis label has the wrong length".into()));
        }
        let mut idx = 0;
        for (ion, level) in levels.iter().enumerate() {
            if level.index() >= self.levels_per_ion {
                return Err(Error::InvalidSelector(alloc::format!("ion {ion} has no level {level:?}")));
            }
            idx += level.index() * self.stride(self.ion_subsystem(ion));
        }
        for (mode, &n) in fock.iter().enumerate() {
            if n > self.fock_cutoff {
                return Err(Error::InvalidSelector(alloc::format!("Fock state {n} above cutoff")));
            }
            idx += n * self.stride(self.mode_subsystem(mode));
        }
        Ok(idx)
    }

    /// Digit of subsystem `s` in flat index `i`.
    #[inline]
    pub fn digit(&self, i: usize, s: usize) -> usize {
        (i / self.stride(s)) % self.subsystem_size(s)
    }

    /// All digits of flat index `i`, ions first.
    pub fn digits(&self, i: usize) -> Vec<usize> {
        (0..self.n_subsystems()).map(|s| self.digit(i, s)).collect()
    }

    /// Lifts a local operator given as `(row, col, value)` entries on
    /// subsystem `s` to the full space.
    pub fn embed(&self, s: usize, local: &[(usize, usize, Complex64)]) -> SparseMatrix {
        let dim = self.dim();
        let stride = self.stride(s);
        let size = self.subsystem_size(s);
        let mut triplets = Vec::new();
        for i in 0..dim {
            let d = (i / stride) % size;
            for &(r, c, v) in local {
                if c == d {
                    let j = i - d * stride + r * stride;
                    triplets.push((j, i, v));
                }
            }
        }
        SparseMatrix::from_triplets(dim, triplets)
    }
}

/// Ladder and Pauli operators on the full space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub spec: HilbertSpec,
    /// `annihilation[p]` is `a_p`.
    pub annihilation: Vec<SparseMatrix>,
    pub creation: Vec<SparseMatrix>,
    pub sigma_x: Vec<SparseMatrix>,
    pub sigma_y: Vec<SparseMatrix>,
    pub sigma_z: Vec<SparseMatrix>,
    /// `sigma_plus[ion][0]` raises to `|1⟩`; `[1]` raises to `|1₋⟩` when present.
    pub sigma_plus: Vec<Vec<SparseMatrix>>,
    pub sigma_minus: Vec<Vec<SparseMatrix>>,
    pub identity: SparseMatrix,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Local annihilation operator on a Fock ladder truncated at `n_max`.
pub fn local_annihilation(n_max: usize) -> Vec<(usize, usize, Complex64)> {
    (1..=n_max).map(|n| (n - 1, n, c((n as f64).sqrt(), 0.0))).collect()
}

/// Local creation operator; `a†|n_max⟩ = 0` in the truncated algebra.
pub fn local_creation(n_max: usize) -> Vec<(usize, usize, Complex64)> {
    (0..n_max).map(|n| (n + 1, n, c(((n + 1) as f64).sqrt(), 0.0))).collect()
}

/// `σ₊ = |e⟩⟨g|` for the excited level selected by `pol`.
pub fn local_sigma_plus(pol: Polarization) -> Vec<(usize, usize, Complex64)> {
    vec![(pol.excited_level().index(), 0, c(1.0, 0.0))]
}

pub fn build_operators(spec: &HilbertSpec) -> Result<OperatorSet> {
    spec.validate()?;
    let annihilation = (0..spec.n_modes)
        .map(|p| spec.embed(spec.mode_subsystem(p), &local_annihilation(spec.fock_cutoff)))
        .collect();
    let creation = (0..spec.n_modes)
        .map(|p| spec.embed(spec.mode_subsystem(p), &local_creation(spec.fock_cutoff)))
        .collect();

    let (g, e) = (0, 1);
    let sx = [(g, e, c(1.0, 0.0)), (e, g, c(1.0, 0.0))];
    let sy = [(g, e, c(0.0, 1.0)), (e, g, c(0.0, -1.0))];
    let sz = [(e, e, c(1.0, 0.0)), (g, g, c(-1.0, 0.0))];
    let pols: &[Polarization] =
        if spec.levels_per_ion == 3 { &[Polarization::Plus, Polarization::Minus] } else { &[Polarization::Plus] };

    let mut sigma_x = Vec::new();
    let mut sigma_y = Vec::new();
    let mut sigma_z = Vec::new();
    let mut sigma_plus = Vec::new();
    let mut sigma_minus = Vec::new();
    for ion in 0..spec.n_ions {
        let s = spec.ion_subsystem(ion);
        sigma_x.push(spec.embed(s, &sx));
        sigma_y.push(spec.embed(s, &sy));
        sigma_z.push(spec.embed(s, &sz));
        let plus: Vec<SparseMatrix> = pols.iter().map(|&p| spec.embed(s, &local_sigma_plus(p))).collect();
        sigma_minus.push(plus.iter().map(SparseMatrix::adjoint).collect());
        sigma_plus.push(plus);
    }
    Ok(OperatorSet {
        spec: *spec,
        annihilation,
        creation,
        sigma_x,
        sigma_y,
        sigma_z,
        sigma_plus,
        sigma_minus,
        identity: SparseMatrix::identity(spec.dim()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(spec: &HilbertSpec, levels: &[Level], fock: &[usize]) -> Vec<Complex64> {
        let mut v = vec![c(0.0, 0.0); spec.dim()];
        v[spec.index(levels, fock).unwrap()] = c(1.0, 0.0);
        v
    }

    fn close(a: &[Complex64], b: &[Complex64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14)
    }

    #[test]
    fn dimension_and_cap() {
        let spec = HilbertSpec::new(2, 3, 1, 5);
        assert_eq!(spec.dim(), 9 * 6);
        let big = HilbertSpec { dimension_cap: 10, ..spec };
        assert!(matches!(big.validate(), Err(Error::DimensionCap { dim: 54, cap: 10 })));
        assert!(HilbertSpec::new(1, 4, 1, 1).validate().is_err());
        assert!(HilbertSpec::new(1, 2, 1, 0).validate().is_err());
        assert!(HilbertSpec::new(40, 3, 0, 1).validate().is_err());
    }

    #[test]
    fn ion_major_ordering() {
        let spec = HilbertSpec::new(2, 2, 1, 2);
        assert_eq!(spec.index(&[Level::Ground, Level::Ground], &[1]).unwrap(), 1);
        assert_eq!(spec.index(&[Level::Ground, Level::Excited], &[0]).unwrap(), 3);
        assert_eq!(spec.index(&[Level::Excited, Level::Ground], &[0]).unwrap(), 6);
        assert_eq!(spec.digits(7), vec![1, 0, 1]);
    }

    #[test]
    fn ladder_actions() {
        let spec = HilbertSpec::new(1, 2, 1, 4);
        let ops = build_operators(&spec).unwrap();
        let g = [Level::Ground];
        assert!(ops.annihilation[0].matvec(&basis(&spec, &g, &[0])).iter().all(|z| z.norm() == 0.0));
        let number = ops.creation[0].matmul(&ops.annihilation[0]);
        for n in 0..=4 {
            let v = basis(&spec, &g, &[n]);
            let want: Vec<_> = v.iter().map(|z| z * n as f64).collect();
            assert!(close(&number.matvec(&v), &want));
        }
        let top = basis(&spec, &g, &[4]);
        assert!(ops.creation[0].matvec(&top).iter().all(|z| z.norm() == 0.0));
        let two = ops.creation[0].matvec(&basis(&spec, &g, &[1]));
        let want: Vec<_> = basis(&spec, &g, &[2]).iter().map(|z| z * 2f64.sqrt()).collect();
        assert!(close(&two, &want));
    }

    #[test]
    fn raising_operator_maps_ground_to_excited() {
        let spec = HilbertSpec::new(1, 2, 0, 1);
        let ops = build_operators(&spec).unwrap();
        let g = basis(&spec, &[Level::Ground], &[]);
        let e = basis(&spec, &[Level::Excited], &[]);
        assert!(close(&ops.sigma_plus[0][0].matvec(&g), &e));
        assert!(ops.sigma_plus[0][0].matvec(&e).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn pauli_commutator() {
        let spec = HilbertSpec::new(2, 3, 1, 1);
        let ops = build_operators(&spec).unwrap();
        for ion in 0..2 {
            let xy = ops.sigma_x[ion].matmul(&ops.sigma_y[ion]);
            let yx = ops.sigma_y[ion].matmul(&ops.sigma_x[ion]);
            let comm = xy.add(&yx.scale(c(-1.0, 0.0)));
            let want = ops.sigma_z[ion].scale(c(0.0, 2.0));
            assert!(comm.to_dense().sub(&want.to_dense()).max_abs() == 0.0);
            // σ± = (σx ± iσy)/2 on the qubit levels
            let sp = ops.sigma_x[ion].add(&ops.sigma_y[ion].scale(c(0.0, 1.0))).scale(c(0.5, 0.0));
            assert!(sp.to_dense().sub(&ops.sigma_plus[ion][0].to_dense()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn minus_polarization_reaches_auxiliary_level() {
        let spec = HilbertSpec::new(1, 3, 0, 1);
        let ops = build_operators(&spec).unwrap();
        let g = basis(&spec, &[Level::Ground], &[]);
        let aux = basis(&spec, &[Level::Auxiliary], &[]);
        assert!(close(&ops.sigma_plus[0][1].matvec(&g), &aux));
    }
}
