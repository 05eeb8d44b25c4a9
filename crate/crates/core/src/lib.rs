//! # minent-core
//!
//! Entropy functions on matrix subspaces: evaluation, derivative
//! certificates, tensor-product closure checks, and the real-field
//! additivity gap construction.
//!
//! ## Scope
//!
//! Given a subspace `K` of `m x n` matrices (complex or real) and a unit
//! Hilbert-Schmidt-norm point `x` in `K`, this crate can:
//!
//! - evaluate the von Neumann entropy of `x x*` and its p-norm relatives;
//! - compute closed-form first and second directional derivatives along
//!   tangent directions, with finite-difference oracles for both;
//! - classify directions by whether the second derivative of the entropy
//!   stays finite (the canonical block form of `(x, y)` under the SVD of
//!   `x` decides this);
//! - certify critical points, strong local minima of the von Neumann
//!   entropy under a local commutativity condition, and strong local
//!   maxima of the 2-norm entropy, all with explicit margins;
//! - estimate the minimum entropy output `H(K)` by projected gradient
//!   descent over the unit sphere of `K`, and measure additivity gaps
//!   `H(K1) + H(K2) - H(K1 (x) K2)`;
//! - build Radon-Hurwitz families of anticommuting skew-symmetric
//!   orthogonal matrices and reproduce the real-field additivity
//!   violation they generate.
//!
//! All entropies are in nats. Apart from explicitly seeded optimizer
//! restarts and direction sampling, every operation is a deterministic pure
//! function of its inputs.

#![forbid(unsafe_code)]

pub mod certify;
pub mod config;
pub mod counterexample;
pub mod entropy;
pub mod error;
pub mod matrix;
pub mod optimize;
pub mod spectral;
pub mod subspace;

pub use certify::{CertificateOptions, CertificateReport, Verdict};
pub use config::Tolerances;
pub use entropy::{MatrixPoint, RelativeEntropy, SpectralFunction};
pub use error::{Error, Result};
pub use matrix::{Field, Matrix};
pub use optimize::{OptimizerConfig, Sense};
pub use subspace::Subspace;
