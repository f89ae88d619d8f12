//! Monte Carlo wave-function simulation of qubit teleportation through a
//! chain of swap gates exposed to generalized amplitude damping.
//!
//! The trajectory engine ([`protocol`]) evolves one `2^n` state vector per
//! trajectory; the density-matrix [`oracle`] integrates the corresponding
//! master equation directly for small chains so the two can be compared.

pub mod error;
pub mod noise;
pub mod oracle;
pub mod protocol;
pub mod state;
pub mod sweep;

#[cfg(test)]
mod dense_reference;

pub use error::{Error, Result};
pub use noise::{NoJumpForm, NoiseModel};
pub use oracle::{run_protocol_density, DensityMatrix};
pub use protocol::{run_experiment, run_trajectory, ExperimentConfig, OutcomeMode, Schedule, TrajectoryStats};
pub use state::{QubitState, ReducedState, SingleQubitOperator, StateVector};
