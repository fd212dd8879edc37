use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::hilbert::{HilbertSpec, Level};
use super::pulse::{PulseSpec, Simulator};
use super::state::StateVector;
use crate::chain::{cz_leakage_bound, ChainConfig, ChainModes, LeakageBound};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub n_ions: usize,
    pub fock_cutoff: usize,
    pub duration: f64,
    pub initial: Level,
    /// Out-of-COM population when ion `m` is the one addressed.
    pub per_ion: Vec<f64>,
    pub mean: f64,
    pub bound: LeakageBound,
}

/// `π√N/(Ωη)`: one COM-sideband π-pulse for the chain.
pub fn com_pi_time(cfg: &ChainConfig) -> f64 {
    core::f64::consts::PI * (cfg.n_ions as f64).sqrt() / (cfg.rabi * cfg.lamb_dicke)
}

/// Drives each ion in turn with one COM-resonant standing-wave pulse from
/// `|g⟩_m|0…0⟩` and records the population left with phonons outside the
/// COM mode.
pub fn leakage_experiment(cfg: &ChainConfig, duration: f64, fock_cutoff: usize) -> Result<LeakageReport> {
    leakage_experiment_from(cfg, duration, fock_cutoff, Level::Ground)
}

/// As [`leakage_experiment`], with the addressed ion starting in `initial`.
pub fn leakage_experiment_from(
    cfg: &ChainConfig,
    duration: f64,
    fock_cutoff: usize,
    initial: Level,
) -> Result<LeakageReport> {
    if cfg.n_ions < 1 {
        return Err(Error::InvalidConfig("chain needs at least one ion".into()));
    }
    let nonneg = |x: f64| x >= 0.0 && x.is_finite();
    if !nonneg(cfg.rabi) || !nonneg(cfg.lamb_dicke) || !nonneg(duration) {
        return Err(Error::InvalidConfig("Ω, η and the duration must be finite and non-negative".into()));
    }
    if !(cfg.secular_frequency > 0.0 && cfg.secular_frequency.is_finite()) {
        return Err(Error::InvalidConfig("secular frequency must be positive".into()));
    }
    if initial == Level::Auxiliary {
        return Err(Error::InvalidConfig("leakage runs on two-level ions".into()));
    }
    let n = cfg.n_ions;
    let spec = HilbertSpec::new(n, 2, n, fock_cutoff);
    spec.validate()?;
    let sim = Simulator::new(spec, ChainModes::for_chain(n, cfg.secular_frequency)?)?;

    let mut per_ion = Vec::with_capacity(n);
    for m in 0..n {
        let mut levels = vec![Level::Ground; n];
        levels[m] = initial;
        let psi = StateVector::basis(spec, &levels, &vec![0; n])?;
        let pulse = PulseSpec::multimode(m, cfg.rabi, cfg.lamb_dicke, 0.0, duration);
        let out = sim.evolve(&psi, &pulse)?;
        per_ion.push(out.population_where(|d| d[n + 1..].iter().any(|&k| k > 0)));
    }
    let mean = per_ion.iter().sum::<f64>() / n as f64;
    Ok(LeakageReport { n_ions: n, fock_cutoff, duration, initial, per_ion, mean, bound: cz_leakage_bound(cfg)? })
}
