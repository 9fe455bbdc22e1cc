//! Figure data, sweeps, single-point simulations and the verification run
//! behind the `subharmonic` binary.

pub mod commands;
pub mod table;

pub use commands::{Failure, Status};
pub use table::Table;
