//! Minimum-error discrimination of multipartite quantum state ensembles.
//!
//! The crate is organised around the cones that appear when measurements are
//! restricted to separable operators:
//!
//! - [`operator`]: dense Hermitian operators on `C^{d_1} ⊗ … ⊗ C^{d_m}`.
//! - [`cones`]: separable certificates, block positivity (the dual cone of
//!   separable operators) and entanglement-witness detection.
//! - [`ensembles`]: ensembles, measurements, the reference families and the
//!   witness-driven constructions of nonlocal ensembles.
//! - [`discrimination`]: guessing probabilities, the two-state closed form
//!   and a fixed-point solver for the global optimum.
//! - [`bounds`]: dual operators `H`, complementary slackness and the
//!   criteria that decide whether separable measurements are optimal.

pub mod bounds;
pub mod cones;
pub mod discrimination;
pub mod ensembles;
mod error;
mod linalg;
pub mod operator;
pub mod wire;

pub use error::{Error, Result};
pub use operator::{
    eig_hermitian, ghz_state, tensor, Dims, HermitianOperator, ProductVector, Spectrum,
    StateVector,
};
