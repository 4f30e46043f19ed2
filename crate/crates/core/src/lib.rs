//! Hybrid qubit/qudit quantum-state simulation.
//!
//! The crate simulates quantum information transfer between systems of
//! different dimensions: a qubit-qudit register algebra ([`hilbert`]), the
//! transfer protocols built on a controlled half-space swap together with the
//! merge/split generalizations and qudit-mediated multi-qubit gate synthesis
//! ([`protocols`]), a linear-optics backend reproducing the post-selected
//! photonic implementation with partially-distinguishable photons
//! ([`photonics`]), and Poissonian counting statistics with fidelity
//! estimation and tomography ([`stats`]).

pub mod error;
pub mod hilbert;
pub mod photonics;
pub mod protocols;
pub mod stats;
pub mod suite;

pub use error::{Error, Result};

/// Tolerance for algebraic identities (unitarity, exact permutations).
pub const TOL_ALGEBRAIC: f64 = 1e-12;

/// Tolerance for accumulated floating-point error in derived quantities.
pub const TOL_ACCUM: f64 = 1e-10;
