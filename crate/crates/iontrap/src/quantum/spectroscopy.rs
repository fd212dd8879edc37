use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::hilbert::{HilbertSpec, Level};
use super::pulse::{PulseKind, PulseSpec, Simulator};
use super::state::{Marginal, StateVector};
use crate::chain::ChainModes;
use crate::error::{Error, Result};

/// Rabi frequency of a sinusoidal population trace `sin²(Ω_eff t / 2)`,
/// read off from the spacing of its crossings of 1/2. `None` with fewer
/// than two crossings.
pub fn flopping_frequency(times: &[f64], population: &[f64]) -> Option<f64> {
    let crossings: Vec<f64> = times
        .windows(2)
        .zip(population.windows(2))
        .filter_map(|(t, p)| {
            let (a, b) = (p[0] - 0.5, p[1] - 0.5);
            if a == 0.0 {
                Some(t[0])
            } else if a * b < 0.0 {
                Some(t[0] + (t[1] - t[0]) * a / (a - b))
            } else {
                None
            }
        })
        .collect();
    if crossings.len() < 2 {
        return None;
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    Some(core::f64::consts::PI * (crossings.len() - 1) as f64 / span)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloppingScan {
    pub kind: PulseKind,
    pub fock: usize,
    /// `Ω`, `Ωη√n` or `Ωη√(n+1)`.
    pub expected: f64,
    /// `None` when the trace never crosses 1/2.
    pub measured: Option<f64>,
    /// Largest excited-state population seen during the scan.
    pub max_excited: f64,
    pub times: Vec<f64>,
    pub excited: Vec<f64>,
}

/// Drives `|g, n⟩` of a single ion for `periods` periods of the expected
/// flopping and extracts the observed frequency.
pub fn flopping_scan(
    kind: PulseKind,
    fock: usize,
    rabi: f64,
    lamb_dicke: f64,
    fock_cutoff: usize,
    periods: f64,
    samples_per_period: usize,
) -> Result<FloppingScan> {
    let expected = match kind {
        PulseKind::Carrier => rabi,
        PulseKind::RedSideband => rabi * lamb_dicke * (fock as f64).sqrt(),
        PulseKind::BlueSideband => rabi * lamb_dicke * ((fock + 1) as f64).sqrt(),
        other => return Err(Error::InvalidPulse(alloc::format!("{other:?} is not a flopping probe"))),
    };
    if fock > fock_cutoff {
        return Err(Error::InvalidConfig("initial Fock state above the cutoff".into()));
    }
    if !(periods > 0.0) || samples_per_period == 0 {
        return Err(Error::InvalidConfig("scan needs a positive length and sample count".into()));
    }
    // a dark transition is watched for as long as a one-phonon flop would take
    let reference = if expected > 0.0 { expected } else { rabi * lamb_dicke };
    if !(reference > 0.0) {
        return Err(Error::InvalidPulse("Ω and η must be positive".into()));
    }
    let duration = periods * 2.0 * core::f64::consts::PI / reference;
    let samples = (periods * samples_per_period as f64).ceil() as usize;

    let sim = Simulator::new(HilbertSpec::new(1, 2, 1, fock_cutoff), ChainModes::single_ion())?;
    let pulse = PulseSpec { kind, lamb_dicke, ..PulseSpec::carrier(0, rabi, 0.0, duration) };
    let psi = StateVector::basis(*sim.spec(), &[Level::Ground], &[fock])?;
    let series = sim.evolve_series(&psi, &pulse, samples)?;

    let mut times = Vec::with_capacity(series.len());
    let mut excited = Vec::with_capacity(series.len());
    for (t, state) in &series {
        times.push(*t);
        excited.push(state.populations(Marginal::Qubit(0))?[1]);
    }
    let measured = flopping_frequency(&times, &excited);
    let max_excited = excited.iter().copied().fold(0.0, f64::max);
    Ok(FloppingScan { kind, fock, expected, measured, max_excited, times, excited })
}
