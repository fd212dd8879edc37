use alloc::string::String;

/// Errors raised by the simulation core.
///
/// Variants split into two families: input validation (the caller asked for
/// something ill-formed) and numerical failure (a solver or integrator did
/// not meet its tolerance). [`Error::is_numerical`] tells them apart.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unstable axis: a + q^2/2 = {radicand} < 0")]
    UnstableAxis { radicand: f64 },
    #[error("step size {dt} exceeds the micromotion limit {max}")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("time grids differ")]
    GridMismatch,
    #[error("reference trajectory has zero norm")]
    DegenerateReference,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("coincident ion positions")]
    SingularGeometry,
    #[error("eigensolver failed: off-diagonal norm {offdiag:e}")]
    Eigensolver { offdiag: f64 },
    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("unitarity violated: norm drift {drift:e}")]
    Unitarity { drift: f64 },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("states live in different Hilbert spaces")]
    SpecMismatch,
    #[error("invalid subsystem selector: {0}")]
    InvalidSelector(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("projection onto a zero-probability outcome ({probability:e})")]
    ZeroProbability { probability: f64 },
    #[error("Cirac-Zoller validity ratio {ratio:e} is above the threshold {threshold:e}")]
    ValidityThreshold { ratio: f64, threshold: f64 },
}

impl Error {
    /// True for solver/integrator failures, false for rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateReference
                | Error::Convergence { .. }
                | Error::SingularGeometry
                | Error::Eigensolver { .. }
                | Error::Unitarity { .. }
                | Error::ZeroProbability { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
