//! Linear Coulomb chain of `N` ions in a harmonic well: equilibrium
//! positions, axial normal modes and the mode couplings used by the
//! sideband Hamiltonians.
//!
//! Positions are in units of `ℓ = (Z²e²/4πε₀Mν²)^{1/3}` and frequencies in
//! units of the single-ion secular frequency `ν`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, jacobi_eigen, RMatrix};
#[allow(unused_imports)]
use num_traits::Float;

/// Default upper limit on `(Ωη/√N ν)²` before Cirac-Zoller pulses are
/// refused.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.05;

/// Prefactor of the chain-averaged leakage bound, `2 · sup Σ(N)` rounded up.
pub const LEAKAGE_BOUND_PREFACTOR: f64 = 1.69;

const NEWTON_TOLERANCE: f64 = 1e-13;
const NEWTON_MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub n_ions: usize,
    #[serde(default = "unit")]
    pub secular_frequency: f64,
    pub lamb_dicke: f64,
    pub rabi: f64,
}

fn unit() -> f64 {
    1.0
}

impl ChainConfig {
    pub fn new(n_ions: usize, lamb_dicke: f64, rabi: f64) -> Self {
        Self { n_ions, secular_frequency: 1.0, lamb_dicke, rabi }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ions < 1 {
            return Err(Error::InvalidConfig("chain needs at least one ion".into()));
        }
        if !(self.lamb_dicke > 0.0 && self.lamb_dicke.is_finite()) {
            return Err(Error::InvalidConfig("Lamb-Dicke parameter must be positive".into()));
        }
        if !(self.rabi > 0.0 && self.rabi.is_finite()) {
            return Err(Error::InvalidConfig("Rabi frequency must be positive".into()));
        }
        if !(self.secular_frequency > 0.0 && self.secular_frequency.is_finite()) {
            return Err(Error::InvalidConfig("secular frequency must be positive".into()));
        }
        Ok(())
    }

    /// `(Ωη / (√N ν))²`, the small parameter of the COM-only approximation.
    pub fn validity_ratio(&self) -> f64 {
        let x = self.rabi * self.lamb_dicke / ((self.n_ions as f64).sqrt() * self.secular_frequency);
        x * x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    /// Dimensionless positions, ascending.
    pub u: Vec<f64>,
    /// Largest absolute component of the force balance at `u`.
    pub residual_norm: f64,
}

/// Net dimensionless force on each ion: `u_n - Σ_{m<n} (u_n-u_m)⁻² + Σ_{m>n} (u_m-u_n)⁻²`.
pub fn force_residual(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let mut f = u[i];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = u[i] - u[j];
                f -= d.signum() / (d * d);
            }
            f
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn coupling_matrix(u: &[f64]) -> Result<RMatrix> {
    let n = u.len();
    let mut a = RMatrix::zeros(n);
    for i in 0..n {
        let mut diag = 1.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = (u[i] - u[j]).abs();
            if !(d > 0.0) {
                return Err(Error::SingularGeometry);
            }
            let k = 2.0 / (d * d * d);
            diag += k;
            a.set(i, j, -k);
        }
        a.set(i, i, diag);
    }
    Ok(a)
}

/// Newton iteration on the force balance. Its Jacobian is the same
/// symmetric positive-definite matrix `A(u)` that defines the modes.
pub fn solve_equilibrium(n: usize) -> Result<Equilibrium> {
    if n < 1 {
        return Err(Error::InvalidConfig("chain needs at least one ion".into()));
    }
    if n == 1 {
        return Ok(Equilibrium { u: vec![0.0], residual_norm: 0.0 });
    }
    let half_width = (n as f64).powf(0.56);
    let mut u: Vec<f64> = (0..n)
        .map(|i| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64)
        .collect();
    symmetrize(&mut u);

    let mut residual = max_abs(&force_residual(&u));
    for _ in 0..NEWTON_MAX_ITERATIONS {
        if residual < NEWTON_TOLERANCE {
            break;
        }
        let f = force_residual(&u);
        let jac = coupling_matrix(&u)?;
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let step = cholesky_solve(&jac, &rhs).ok_or(Error::SingularGeometry)?;

        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(x, s)| x + lambda * s).collect();
            let ordered = trial.windows(2).all(|w| w[1] > w[0]);
            if ordered {
                let r = max_abs(&force_residual(&trial));
                if r < residual || lambda < 1e-6 {
                    u = trial;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return Err(Error::Convergence { iterations: NEWTON_MAX_ITERATIONS, residual });
            }
        }
        symmetrize(&mut u);
        residual = max_abs(&force_residual(&u));
    }
    if residual >= NEWTON_TOLERANCE * 10.0 {
        return Err(Error::Convergence { iterations: NEWTON_MAX_ITERATIONS, residual });
    }
    Ok(Equilibrium { u, residual_norm: residual })
}

/// Enforces `u_m = -u_{N+1-m}`, which the exact solution satisfies.
fn symmetrize(u: &mut [f64]) {
    let n = u.len();
    for i in 0..n / 2 {
        let v = 0.5 * (u[n - 1 - i] - u[i]);
        u[i] = -v;
        u[n - 1 - i] = v;
    }
    if n % 2 == 1 {
        u[n / 2] = 0.0;
    }
}

/// `A_nn = 1 + 2 Σ_{p≠n} |u_n-u_p|⁻³`, `A_mn = -2 |u_m-u_n|⁻³`.
pub fn hessian_matrix(eq: &Equilibrium) -> Result<RMatrix> {
    coupling_matrix(&eq.u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainModes {
    /// `μ_p`, ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[p][m] = b_m^(p)`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `ν_p = sqrt(μ_p) ν`.
    pub mode_frequencies: Vec<f64>,
    /// `couplings[p][m] = s_m^(p) = sqrt(N) b_m^(p) / μ_p^{1/4}`.
    pub couplings: Vec<Vec<f64>>,
}

impl ChainModes {
    pub fn n_ions(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Equilibrium, matrix `A` and modes for an `n`-ion chain in one call.
    pub fn for_chain(n: usize, secular_frequency: f64) -> Result<Self> {
        let eq = solve_equilibrium(n)?;
        decompose_modes(&hessian_matrix(&eq)?, secular_frequency)
    }

    /// Single ion, single mode at the trap frequency.
    pub fn single_ion() -> Self {
        Self {
            eigenvalues: vec![1.0],
            eigenvectors: vec![vec![1.0]],
            mode_frequencies: vec![1.0],
            couplings: vec![vec![1.0]],
        }
    }
}

/// Diagonalizes `A`. Eigenvectors are signed so that their last nonzero
/// component is positive; with that choice the first two modes come out
/// as `(1,…,1)/√N` and `+u/‖u‖`.
pub fn decompose_modes(a: &RMatrix, secular_frequency: f64) -> Result<ChainModes> {
    let n = a.dim;
    if a.symmetry_deviation() > 1e-12 {
        return Err(Error::InvalidConfig("mode matrix is not symmetric".into()));
    }
    let (values, vectors) = jacobi_eigen(a).map_err(|offdiag| Error::Eigensolver { offdiag })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));

    let eigenvalues: Vec<f64> = order.iter().map(|&j| values[j]).collect();
    let mut eigenvectors: Vec<Vec<f64>> =
        order.iter().map(|&j| (0..n).map(|i| vectors.get(i, j)).collect()).collect();

    reorthogonalize_degenerate(&eigenvalues, &mut eigenvectors);
    for v in &mut eigenvectors {
        let scale = max_abs(v);
        if let Some(last) = v.iter().rev().find(|x| x.abs() > 1e-8 * scale).copied() {
            if last < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }

    if eigenvalues.iter().any(|&mu| !(mu > 0.0)) {
        return Err(Error::Eigensolver { offdiag: f64::NAN });
    }
    let mode_frequencies = eigenvalues.iter().map(|mu| mu.sqrt() * secular_frequency).collect();
    let sqrt_n = (n as f64).sqrt();
    let couplings = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(mu, b)| b.iter().map(|bm| sqrt_n * bm / mu.powf(0.25)).collect())
        .collect();
    Ok(ChainModes { eigenvalues, eigenvectors, mode_frequencies, couplings })
}

/// Modified Gram-Schmidt inside clusters of (near-)equal eigenvalues.
fn reorthogonalize_degenerate(values: &[f64], vectors: &mut [Vec<f64>]) {
    let n = values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end] - values[start]).abs() < 1e-10 * values[start].abs().max(1.0) {
            end += 1;
        }
        if end - start > 1 {
            for i in start..end {
                for j in start..i {
                    let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
                    let vj = vectors[j].clone();
                    vectors[i].iter_mut().zip(&vj).for_each(|(a, b)| *a -= dot * b);
                }
                let norm = vectors[i].iter().map(|x| x * x).sum::<f64>().sqrt();
                vectors[i].iter_mut().for_each(|x| *x /= norm);
            }
        }
        start = end;
    }
}

/// `Σ(N) = Σ_{p=2}^N (μ_p + 1) / (√μ_p (μ_p - 1)²)` from solved modes.
pub fn sigma_sum_from_modes(modes: &ChainModes) -> f64 {
    modes
        .eigenvalues
        .iter()
        .skip(1)
        .map(|&mu| (mu + 1.0) / (mu.sqrt() * (mu - 1.0) * (mu - 1.0)))
        .sum()
}

pub fn sigma_sum(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidConfig("Σ(N) needs at least two ions".into()));
    }
    Ok(sigma_sum_from_modes(&ChainModes::for_chain(n, 1.0)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageBound {
    /// `(Ωη / (√N ν))²`.
    pub ratio: f64,
    /// `1.69 (Ωη / (√N ν))²`, valid for every `N`.
    pub loose: f64,
    /// `2 (Ωη / (√N ν))² Σ(N)`.
    pub tight: f64,
}

/// Upper bounds on the chain-averaged population that a COM-resonant pulse
/// leaves outside the COM mode.
pub fn cz_leakage_bound(cfg: &ChainConfig) -> Result<LeakageBound> {
    if cfg.n_ions < 1 {
        return Err(Error::InvalidConfig("chain needs at least one ion".into()));
    }
    let ratio = cfg.validity_ratio();
    let sigma = if cfg.n_ions >= 2 { sigma_sum(cfg.n_ions)? } else { 0.0 };
    Ok(LeakageBound { ratio, loose: LEAKAGE_BOUND_PREFACTOR * ratio, tight: 2.0 * ratio * sigma })
}

/// Modes for every chain length `1..=max_n`, computed once and shared
/// read-only afterwards.
#[derive(Debug, Clone)]
pub struct ModeTable {
    entries: Vec<ChainModes>,
}

impl ModeTable {
    pub fn build(max_n: usize, secular_frequency: f64) -> Result<Self> {
        let entries = (1..=max_n)
            .map(|n| ChainModes::for_chain(n, secular_frequency))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn get(&self, n: usize) -> Option<&ChainModes> {
        n.checked_sub(1).and_then(|i| self.entries.get(i))
    }
}
