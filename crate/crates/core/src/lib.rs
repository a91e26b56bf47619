//! Zero-rate holographic stabilizer codes on hyperbolic tilings.
//!
//! The pipeline: contract copies of a seed tensor on a layered hyperbolic
//! tiling into a boundary stabilizer code ([`lego`]), decode it under biased
//! IID Pauli noise with an exact tensor-network maximum-likelihood decoder
//! ([`decoder`]), and estimate code-capacity thresholds from layer-crossing
//! Monte Carlo curves ([`threshold`]) for comparison against the analytic
//! zero-rate hashing bound ([`hashing`]).

pub(crate) mod gf2;

pub mod decoder;
pub mod hashing;
pub mod lego;
pub mod noise;
pub mod pauli;
pub mod threshold;

pub use pauli::{Pauli, PauliOp, StabilizerCode};
