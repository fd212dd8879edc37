//! Hilbert space layout, states and laser-pulse evolution.

pub mod hilbert;
pub mod leakage;
pub mod pulse;
pub mod spectroscopy;
pub mod state;

pub use hilbert::{build_operators, HilbertSpec, Level, OperatorSet, Polarization, DEFAULT_DIMENSION_CAP};
pub use leakage::{com_pi_time, leakage_experiment, leakage_experiment_from, LeakageReport};
pub use pulse::{build_hamiltonian, evolve, evolve_sequence, sideband_pi_time, Hamiltonian, PulseKind, PulseSpec, Simulator};
pub use spectroscopy::{flopping_frequency, flopping_scan, FloppingScan};
pub use state::{fidelity, Marginal, StateVector};
