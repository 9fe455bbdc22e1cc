//! Steady-state statistics of two subharmonic cavity modes driven through a
//! cascade three-level atom.
//!
//! Three independent routes to the same observables are provided:
//! closed forms ([`analytic`]), a linear solve of the moment equations
//! ([`moment_solver`]), and direct integration of the truncated Lindblad
//! master equation ([`lindblad`]). [`verification`] cross-checks them.

pub mod analytic;
pub mod format;
pub mod lindblad;
pub mod model;
pub mod moment_solver;
pub mod numerics;
pub mod observables;
pub mod verification;

pub use model::{ModelParams, ParamError, SweepGrid};
pub use observables::Observables;
