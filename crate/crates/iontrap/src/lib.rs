//! Pulse-level simulation of a linear Paul-trap quantum computer.
//!
//! The crate is `no_std` (with `alloc`) and covers classical trap dynamics,
//! the normal modes of an ion chain, laser-driven state evolution, gate
//! compilation into pulse sequences, and small protocols built on top.
#![no_std]

extern crate alloc;
// Modules import `num_traits::Float` for libm-backed math under
// `#[allow(unused_imports)]`: when std is in the build graph its inherent
// float methods take precedence and the import goes unused.
#[cfg(test)]
extern crate std;

pub mod algorithms;
pub mod chain;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod quantum;
pub mod trap;

pub use error::{Error, Result};
