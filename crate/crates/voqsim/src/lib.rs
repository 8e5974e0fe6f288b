//! Exact few-photon simulator of a vacuum/one-photon qubit teleportation
//! interferometer: Fock-state algebra, passive and active protocol variants,
//! detection statistics, Monte Carlo count emulation and fringe fitting.

pub mod cli;
pub mod elements;
pub mod error;
pub mod fit;
pub mod fock;
pub mod measure;
pub mod mc;
pub mod protocol;
pub mod report;

pub use error::{Error, Result};
pub use fock::{ModeRegistry, Occupation, PureState};
