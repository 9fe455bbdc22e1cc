use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operators::HilbertConfig;
use super::LindbladError;
use crate::numerics::{DenseMatrix, NumericsError, SparseOperator};

/// Dense density matrix on the truncated joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DenseMatrix,
}

impl DensityOperator {
    pub fn from_matrix(matrix: DenseMatrix) -> Result<Self, LindbladError> {
        if !matrix.is_square() {
            return Err(NumericsError::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            }
            .into());
        }
        Ok(Self { matrix })
    }

    /// `|k⟩⟨k|`.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut matrix = DenseMatrix::zeros(dim, dim);
        matrix[(k, k)] = Complex64::new(1.0, 0.0);
        Self { matrix }
    }

    /// The atom in `|c⟩` with both modes in vacuum.
    pub fn ground(cfg: &HilbertConfig) -> Self {
        Self::basis_projector(cfg.dim(), cfg.index(super::operators::LEVEL_C, 0, 0))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `ρ − ρ†`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part of `ρ`.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let m = DMatrix::from_fn(n, n, |i, j| {
            0.5 * (self.matrix[(i, j)] + self.matrix[(j, i)].conj())
        });
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Tr(ρ O)`.
    pub fn expectation(&self, op: &SparseOperator) -> Result<Complex64, LindbladError> {
        if op.dim() != self.dim() {
            return Err(NumericsError::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            }
            .into());
        }
        Ok(op.triplets().map(|(j, i, v)| v * self.matrix[(i, j)]).sum())
    }

    /// Populations of the highest Fock level of mode a and of mode b.
    pub fn top_fock_populations(&self, cfg: &HilbertConfig) -> (f64, f64) {
        let top = cfg.fock_cutoff() - 1;
        let mut pa = 0.0;
        let mut pb = 0.0;
        for k in 0..self.dim() {
            let (_, na, nb) = cfg.decompose(k);
            let p = self.matrix[(k, k)].re;
            if na == top {
                pa += p;
            }
            if nb == top {
                pb += p;
            }
        }
        (pa, pb)
    }

    /// Checks the trace, Hermiticity and positivity tolerances.
    pub fn check_invariants(&self) -> Result<(), String> {
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
            return Err(format!("trace {tr} differs from 1"));
        }
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(format!("hermiticity error {herm:e}"));
        }
        let min = self.min_eigenvalue();
        if min < -1e-8 {
            return Err(format!("smallest eigenvalue {min:e}"));
        }
        Ok(())
    }
}

/// `Tr(ρ O)` as a free function.
pub fn expectation(rho: &DensityOperator, op: &SparseOperator) -> Result<Complex64, LindbladError> {
    rho.expectation(op)
}
