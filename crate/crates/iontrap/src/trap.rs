//! Classical single-ion motion in a Paul trap.
//!
//! Quantities here are in SI units. The "effective" amplitudes `U` and `Ũ`
//! absorb the electrode geometry so that `Z|e|Uα/m` has units of s⁻², which
//! makes the Mathieu `a` and `q` dimensionless.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Elementary charge in coulombs.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Tolerance on the Laplace constraint `Σα = Σα̃ = 0`.
pub const LAPLACE_TOLERANCE: f64 = 1e-12;

/// Above this value of `max(|a|, q²)` the lowest-order secular
/// approximation is not trusted.
pub const REGIME_THRESHOLD: f64 = 0.1;

/// Minimum number of integration steps per rf period.
pub const STEPS_PER_RF_PERIOD: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Static plus radio-frequency quadrupole trap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfig {
    /// Effective static amplitude `U` (V·m⁻²).
    pub dc_amplitude: f64,
    /// Effective rf amplitude `Ũ` (V·m⁻²).
    pub rf_amplitude: f64,
    /// Angular rf drive frequency (rad/s).
    pub rf_frequency: f64,
    /// Static geometry factors `α`.
    pub dc_geometry: [f64; 3],
    /// Rf geometry factors `α̃`.
    pub rf_geometry: [f64; 3],
    /// Ion mass (kg).
    pub ion_mass: f64,
    /// Charge state `Z`.
    pub charge_state: u32,
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        let dc_sum: f64 = self.dc_geometry.iter().sum();
        let rf_sum: f64 = self.rf_geometry.iter().sum();
        if dc_sum.abs() > LAPLACE_TOLERANCE || rf_sum.abs() > LAPLACE_TOLERANCE {
            return Err(Error::InvalidConfig(alloc::format!(
                "geometry violates the Laplace constraint (Σα = {dc_sum:e}, Σα̃ = {rf_sum:e})"
            )));
        }
        if !(self.rf_frequency > 0.0 && self.rf_frequency.is_finite()) {
            return Err(Error::InvalidConfig("rf_frequency must be positive".into()));
        }
        if !(self.ion_mass > 0.0 && self.ion_mass.is_finite()) {
            return Err(Error::InvalidConfig("ion_mass must be positive".into()));
        }
        if self.charge_state < 1 {
            return Err(Error::InvalidConfig("charge_state must be at least 1".into()));
        }
        let all_finite = [self.dc_amplitude, self.rf_amplitude]
            .iter()
            .chain(&self.dc_geometry)
            .chain(&self.rf_geometry)
            .all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::InvalidConfig("non-finite trap parameter".into()));
        }
        Ok(())
    }

    fn charge_over_mass(&self) -> f64 {
        self.charge_state as f64 * ELEMENTARY_CHARGE / self.ion_mass
    }
}

/// Dimensionless Mathieu pair for one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MathieuParams {
    pub a: f64,
    pub q: f64,
    pub axis: Axis,
}

impl MathieuParams {
    pub fn new(a: f64, q: f64, axis: Axis) -> Self {
        Self { a, q, axis }
    }

    /// True when `a` and `q²` are small enough for the secular
    /// approximation.
    pub fn in_secular_regime(&self) -> bool {
        self.a.abs().max(self.q * self.q) <= REGIME_THRESHOLD
    }
}

/// Position samples on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        if times.len() != positions.len() {
            return Err(Error::InvalidConfig("times and positions differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("times must be strictly increasing".into()));
        }
        Ok(Self { times, positions })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_position(&self) -> f64 {
        self.positions.last().copied().unwrap_or(0.0)
    }
}

pub fn mathieu_params(cfg: &TrapConfig, axis: Axis) -> Result<MathieuParams> {
    cfg.validate()?;
    let i = axis.index();
    let w2 = cfg.rf_frequency * cfg.rf_frequency;
    let a = 4.0 * cfg.charge_over_mass() * cfg.dc_amplitude * cfg.dc_geometry[i] / w2;
    let q = -2.0 * cfg.charge_over_mass() * cfg.rf_amplitude * cfg.rf_geometry[i] / w2;
    if !(a.is_finite() && q.is_finite()) {
        return Err(Error::InvalidConfig("Mathieu parameters are not finite".into()));
    }
    Ok(MathieuParams { a, q, axis })
}

/// Secular frequency `ν = sqrt(a + q²/2) · ω_rf / 2`.
pub fn secular_frequency(p: &MathieuParams, rf_frequency: f64) -> Result<f64> {
    let radicand = p.a + 0.5 * p.q * p.q;
    if radicand < 0.0 {
        return Err(Error::UnstableAxis { radicand });
    }
    Ok(radicand.sqrt() * rf_frequency / 2.0)
}

fn time_grid(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig("dt must be positive".into()));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidConfig("t_end must be non-negative".into()));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    Ok((0..=steps).map(|i| i as f64 * dt).collect())
}

/// Fixed-step RK4 integration of `ẍ = -(ω/2)² [a - 2q cos(ω t)] x`.
pub fn integrate_trajectory(
    p: &MathieuParams,
    rf_frequency: f64,
    x0: f64,
    v0: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(rf_frequency > 0.0) {
        return Err(Error::InvalidConfig("rf_frequency must be positive".into()));
    }
    let max_dt = 2.0 * PI / rf_frequency / STEPS_PER_RF_PERIOD;
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, max: max_dt });
    }
    let times = time_grid(t_end, dt)?;
    let half_w2 = 0.25 * rf_frequency * rf_frequency;
    let accel = |t: f64, x: f64| -half_w2 * (p.a - 2.0 * p.q * (rf_frequency * t).cos()) * x;

    let mut positions = Vec::with_capacity(times.len());
    let (mut x, mut v) = (x0, v0);
    positions.push(x);
    for &t in &times[..times.len() - 1] {
        let k1x = v;
        let k1v = accel(t, x);
        let k2x = v + 0.5 * dt * k1v;
        let k2v = accel(t + 0.5 * dt, x + 0.5 * dt * k1x);
        let k3x = v + 0.5 * dt * k2v;
        let k3v = accel(t + 0.5 * dt, x + 0.5 * dt * k2x);
        let k4x = v + dt * k3v;
        let k4v = accel(t + dt, x + dt * k3x);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        positions.push(x);
    }
    Trajectory::new(times, positions)
}

/// Secular motion with first-order micromotion,
/// `x(t) = A cos(ν t) [1 - (q/2) cos(ω t)]`.
pub fn approx_trajectory(p: &MathieuParams, rf_frequency: f64, amplitude: f64, t_end: f64, dt: f64) -> Result<Trajectory> {
    if !p.in_secular_regime() {
        return Err(Error::InvalidConfig(alloc::format!(
            "a = {}, q = {} outside the secular regime",
            p.a,
            p.q
        )));
    }
    let nu = secular_frequency(p, rf_frequency)?;
    let times = time_grid(t_end, dt)?;
    let positions = times
        .iter()
        .map(|&t| amplitude * (nu * t).cos() * (1.0 - 0.5 * p.q * (rf_frequency * t).cos()))
        .collect();
    Trajectory::new(times, positions)
}

/// Velocity of [`approx_trajectory`] at time `t`. Used to start the full
/// integration on the same branch as the approximation.
pub fn approx_velocity(p: &MathieuParams, rf_frequency: f64, amplitude: f64, t: f64) -> Result<f64> {
    let nu = secular_frequency(p, rf_frequency)?;
    let envelope = 1.0 - 0.5 * p.q * (rf_frequency * t).cos();
    Ok(amplitude
        * (-nu * (nu * t).sin() * envelope + (nu * t).cos() * 0.5 * p.q * rf_frequency * (rf_frequency * t).sin()))
}

/// Relative RMS difference `‖x1 - x2‖ / ‖x2‖` on a shared grid.
pub fn micromotion_error(t1: &Trajectory, t2: &Trajectory) -> Result<f64> {
    if t1.len() != t2.len() {
        return Err(Error::GridMismatch);
    }
    let tol = 1e-12 * t2.times.last().map_or(1.0, |t| t.abs().max(f64::MIN_POSITIVE));
    if t1.times.iter().zip(&t2.times).any(|(a, b)| (a - b).abs() > tol) {
        return Err(Error::GridMismatch);
    }
    let reference: f64 = t2.positions.iter().map(|x| x * x).sum::<f64>().sqrt();
    if reference == 0.0 {
        return Err(Error::DegenerateReference);
    }
    let diff: f64 = t1
        .positions
        .iter()
        .zip(&t2.positions)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(diff / reference)
}

/// Integrated and approximate trajectories started on the same branch
/// (`x0 = A(1 - q/2)`, `v0` from the approximation), with their relative
/// RMS difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecularComparison {
    pub params: MathieuParams,
    pub secular_frequency: f64,
    pub integrated: Trajectory,
    pub approximate: Trajectory,
    pub rms_error: f64,
}

pub fn compare_with_secular_approximation(
    p: &MathieuParams,
    rf_frequency: f64,
    amplitude: f64,
    t_end: f64,
    dt: f64,
) -> Result<SecularComparison> {
    let approximate = approx_trajectory(p, rf_frequency, amplitude, t_end, dt)?;
    let x0 = approximate.positions[0];
    let v0 = approx_velocity(p, rf_frequency, amplitude, 0.0)?;
    let integrated = integrate_trajectory(p, rf_frequency, x0, v0, t_end, dt)?;
    let rms_error = micromotion_error(&integrated, &approximate)?;
    Ok(SecularComparison {
        params: *p,
        secular_frequency: secular_frequency(p, rf_frequency)?,
        integrated,
        approximate,
        rms_error,
    })
}

/// Ratio `|x(dt) - x(dt/2)| / |x(dt/2) - x(dt/4)|` of final positions. A
/// fourth-order integrator gives a value near 16.
pub fn convergence_ratio(p: &MathieuParams, rf_frequency: f64, x0: f64, v0: f64, t_end: f64, dt: f64) -> Result<f64> {
    let coarse = integrate_trajectory(p, rf_frequency, x0, v0, t_end, dt)?.last_position();
    let mid = integrate_trajectory(p, rf_frequency, x0, v0, t_end, dt / 2.0)?.last_position();
    let fine = integrate_trajectory(p, rf_frequency, x0, v0, t_end, dt / 4.0)?.last_position();
    Ok((coarse - mid).abs() / (mid - fine).abs())
}
