//! Simulation and analysis of spin squeezing by a quantum nondemolition
//! (QND) measurement followed by a rotation of the squeezed spin.
//!
//! Two linearly polarized probe pulses read out the collective spin of an
//! atomic ensemble through the Faraday interaction `H = α S_z J_z`. Between
//! them a fictitious magnetic field rotates the spin about `x` by an angle
//! `φ`. The crate provides:
//!
//! - [`coupling`]: the interaction strength κ from atomic and optical
//!   constants, and pulse-width to rotation-angle conversion.
//! - [`gaussian`]: a linearized Gaussian engine over the six quadratures
//!   `(J̃_y, J̃_z, S̃₁_y, S̃₁_z, S̃₂_y, S̃₂_z)`.
//! - [`analytics`]: closed forms for every variance of the protocol.
//! - [`montecarlo`]: seeded, order-independent sampling of measurement
//!   records with variance estimation and gain fitting.
//! - [`oracle`]: an exact Dicke/Fock-basis simulation for small ensembles
//!   that validates the linearization.
//! - [`cli`]: the `spinqnd` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod cli;
pub mod coupling;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod montecarlo;
pub mod optimize;
pub mod oracle;

pub use error::{Error, Result};
pub use gaussian::Probe;
pub use model::{
    Coord, ExperimentConfig, GaussianState, MeasurementRecord, PhysicalParams, Protocol, RotationPulse,
    VarianceReport,
};
