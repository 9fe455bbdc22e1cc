//! Small self-contained numerical kernel: dense complex LU, coordinate-format
//! sparse operators with Kronecker products, and a fixed-step RK4 integrator.
//!
//! Every kernel sums in a fixed order, so identical inputs give bitwise
//! identical outputs.

mod dense;
mod rk4;
mod sparse;

pub use dense::{lu_solve, DenseMatrix, LuFactors};
pub use num_complex::Complex64;
pub use rk4::{rk4_integrate, Finite, Rk4, Rk4Trajectory, StepPlan};
pub use sparse::{kron, spmv, SparseOperator};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is singular: pivot magnitude {magnitude:e} in column {column}")]
    SingularMatrix { column: usize, magnitude: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("invalid step configuration: {0}")]
    InvalidStep(String),
}

/// Shorthand for a purely real complex number.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);
