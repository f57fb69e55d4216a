//! Exact entanglement dynamics of two dipole-coupled two-level atoms where
//! only the first atom sits in a lossless single-mode cavity prepared in a
//! thermal state.
//!
//! The pipeline is: [`model`] (parameters, initial product states, thermal
//! weights) -> [`sector`] (excitation-manifold eigensystems and propagators)
//! -> [`reduced`] (thermal average and partial trace over the field) ->
//! [`entanglement`] (partial transpose and negativity). [`oracle`] repeats
//! the evolution by brute force on the full truncated space and is used to
//! cross-check the sector path.

pub mod entanglement;
pub mod error;
pub mod model;
pub mod oracle;
pub mod reduced;
pub mod sector;
pub mod selfcheck;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{AtomicProductState, Level, SystemConfig, ThermalDistribution};
pub use reduced::{AtomicDensityMatrix, NegativitySeries, ReducedStateSolver};
