//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter set violates one of its invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Zero atomic detuning: the dispersive light shift is undefined.
    #[error("atomic detuning is zero; the dispersive limit is undefined")]
    ZeroAtomicDetuning,

    /// No optical lattice at the requested operating point.
    #[error("no optical lattice: {0}")]
    NoLattice(String),

    /// More fermions than lattice sites.
    #[error("capacity exceeded: {n_atoms} polarized fermions on {n_sites} sites")]
    Capacity { n_atoms: usize, n_sites: usize },

    /// An occupation state is malformed (duplicate or out-of-range index).
    #[error("invalid occupation: {0}")]
    InvalidOccupation(String),

    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
