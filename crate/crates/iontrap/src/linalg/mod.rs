//! Small self-contained linear algebra: dense complex matrices with a Padé
//! exponential, row-compressed sparse operators with a Taylor propagator,
//! and real symmetric eigenproblems.

mod dense;
mod sparse;
mod symmetric;

pub use dense::{expm, propagator, CMatrix};
pub use sparse::{expm_multiply, SparseMatrix};
pub use symmetric::{cholesky_solve, jacobi_eigen, RMatrix};
