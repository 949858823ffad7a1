//! Simulator for a polarized ultracold Fermi gas coupled dispersively to a
//! single pumped standing-wave cavity mode.
//!
//! The intracavity intensity sets the depth of the optical lattice seen by the
//! atoms, and the atomic density distribution in turn shifts the cavity
//! resonance, closing a nonlinear loop. The crate provides
//!
//! - [`model`]: dimensionless parameters and the Gaussian-Wannier closed forms
//!   for the photon-number-dependent couplings `E`, `J`, `E1`, `J1`;
//! - [`fermisea`]: many-body occupations on the periodic quasi-momentum grid,
//!   the hopping expectation `B̃`, and the variational ground-state check;
//! - [`steadystate`]: the self-consistent photon-number equation, branch
//!   enumeration over parameter sweeps, and dynamical stability labels;
//! - [`dynamics`]: fixed-step integration of the truncated c-number field
//!   equations with exact photon-number difference commutators.
//!
//! All numerics are generic over the scalar type through [`Real`]; the
//! `*64` aliases at the crate root fix `f64`, which is what the command-line
//! front end and the acceptance suite use.

pub mod dynamics;
pub mod error;
pub mod fermisea;
pub mod model;
pub mod num;
pub mod steadystate;

pub use error::{Error, Result};
pub use num::Real;

/// `f64` system parameters.
pub type SystemParams64 = model::SystemParams<f64>;
/// `f64` physical (dimensionful) parameters.
pub type PhysicalParams64 = model::PhysicalParams<f64>;
/// `f64` lattice coupling coefficients.
pub type LatticeCoefficients64 = model::LatticeCoefficients<f64>;
/// `f64` momentum grid.
pub type MomentumGrid64 = fermisea::MomentumGrid<f64>;
/// `f64` Fermi-sea summary.
pub type FermiSeaSummary64 = fermisea::FermiSeaSummary<f64>;
/// `f64` steady-state branch.
pub type SteadyStateBranch64 = steadystate::SteadyStateBranch<f64>;
/// `f64` field state.
pub type FieldState64 = dynamics::FieldState<f64>;
/// `f64` field trajectory.
pub type FieldTrajectory64 = dynamics::FieldTrajectory<f64>;
