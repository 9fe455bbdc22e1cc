//! Direct simulation of the joint atom-cavity master equation on a
//! truncated Fock space.
//!
//! Basis order is atom ⊗ mode a ⊗ mode b with atomic levels
//! `(|a⟩, |b⟩, |c⟩) = (0, 1, 2)`. Each mode is cut off at `N` Fock states.

mod analysis;
mod density;
mod evolve;
mod generator;
mod operators;
mod residuals;

use thiserror::Error;

use crate::model::ParamError;
use crate::numerics::NumericsError;

pub use analysis::{
    convergence_check, simulated_observables, ConvergenceReport, CutoffOutcome, CutoffRun, SimulatedObservables,
    CUTOFF_AGREEMENT,
};
pub use density::{expectation, DensityOperator};
pub use evolve::{
    default_catalog, default_dt, evolve_to_steady_state, Convergence, EvolveOptions, Evolution, Trajectory,
    TRAJECTORY_COLUMNS, TRUNCATION_LIMIT,
};
pub use generator::{lindblad_rhs, CompactFunctional, EntryRef, Layout, Liouvillian};
pub use operators::{
    build_hamiltonian, build_operator_set, effective_hamiltonian, HilbertConfig, OperatorSet, ATOM_DIM, LEVEL_A,
    LEVEL_B, LEVEL_C,
};
pub use residuals::{
    moment_equations, moment_residuals, moment_residuals_with_stride, MomentEquation, ResidualEntry, ResidualReport,
};

#[derive(Debug, Error)]
pub enum LindbladError {
    #[error("invalid Hilbert-space configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid evolution options: {0}")]
    InvalidOptions(String),
    #[error("unknown operator {0:?}")]
    UnknownOperator(String),
    #[error("highest Fock level of mode {mode} holds population {population:e} at t = {t}; raise the cutoff")]
    TruncationOverflow { mode: char, population: f64, t: f64 },
    #[error("no steady state by t = {t}: max |drho/dt| = {max_derivative:e}")]
    NotConverged { t: f64, max_derivative: f64 },
    #[error("need at least 3 trajectory samples, found {found}")]
    TooFewSamples { found: usize },
    #[error("trajectory samples are not uniformly spaced")]
    NonUniformSampling,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
