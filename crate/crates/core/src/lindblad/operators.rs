use num_complex::Complex64;

use super::LindbladError;
use crate::model::ModelParams;
use crate::numerics::{kron, SparseOperator, I};

/// Atomic basis indices.
pub const LEVEL_A: usize = 0;
pub const LEVEL_B: usize = 1;
pub const LEVEL_C: usize = 2;
pub const ATOM_DIM: usize = 3;

/// Truncated joint space atom ⊗ mode a ⊗ mode b, each mode holding Fock
/// states `|0⟩..|N-1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertConfig {
    fock_cutoff: usize,
}

impl HilbertConfig {
    pub fn new(fock_cutoff: usize) -> Result<Self, LindbladError> {
        if fock_cutoff < 2 {
            return Err(LindbladError::InvalidConfig(format!(
                "Fock cutoff must be at least 2, got {fock_cutoff}"
            )));
        }
        Ok(Self { fock_cutoff })
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn atom_dim(&self) -> usize {
        ATOM_DIM
    }

    /// `3 N²`.
    pub fn dim(&self) -> usize {
        ATOM_DIM * self.fock_cutoff * self.fock_cutoff
    }

    /// Joint index of `|level⟩ ⊗ |n_a⟩ ⊗ |n_b⟩`.
    pub fn index(&self, level: usize, n_a: usize, n_b: usize) -> usize {
        let n = self.fock_cutoff;
        debug_assert!(level < ATOM_DIM && n_a < n && n_b < n);
        (level * n + n_a) * n + n_b
    }

    /// Inverse of [`HilbertConfig::index`].
    pub fn decompose(&self, index: usize) -> (usize, usize, usize) {
        let n = self.fock_cutoff;
        (index / (n * n), (index / n) % n, index % n)
    }
}

/// Joint-space operators, all of dimension `3 N²`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSet {
    pub cfg: HilbertConfig,
    pub a: SparseOperator,
    pub b: SparseOperator,
    /// `|b⟩⟨a|`
    pub sigma_a: SparseOperator,
    /// `|c⟩⟨b|`
    pub sigma_b: SparseOperator,
    /// `|c⟩⟨a|`
    pub sigma_c: SparseOperator,
    pub eta_a: SparseOperator,
    pub eta_b: SparseOperator,
    pub eta_c: SparseOperator,
    pub identity: SparseOperator,
}

fn atomic(row: usize, col: usize, field_dim: usize) -> SparseOperator {
    let local = SparseOperator::outer(ATOM_DIM, row, col).expect("atomic levels are in range");
    kron(&local, &SparseOperator::identity(field_dim))
}

pub fn build_operator_set(cfg: HilbertConfig) -> OperatorSet {
    let n = cfg.fock_cutoff();
    let ann = SparseOperator::annihilation(n);
    let id_n = SparseOperator::identity(n);
    let id_atom = SparseOperator::identity(ATOM_DIM);
    let field_dim = n * n;
    OperatorSet {
        cfg,
        a: kron(&id_atom, &kron(&ann, &id_n)),
        b: kron(&id_atom, &kron(&id_n, &ann)),
        sigma_a: atomic(LEVEL_B, LEVEL_A, field_dim),
        sigma_b: atomic(LEVEL_C, LEVEL_B, field_dim),
        sigma_c: atomic(LEVEL_C, LEVEL_A, field_dim),
        eta_a: atomic(LEVEL_A, LEVEL_A, field_dim),
        eta_b: atomic(LEVEL_B, LEVEL_B, field_dim),
        eta_c: atomic(LEVEL_C, LEVEL_C, field_dim),
        identity: SparseOperator::identity(cfg.dim()),
    }
}

impl OperatorSet {
    pub fn dim(&self) -> usize {
        self.cfg.dim()
    }

    fn factor(&self, name: &str) -> Option<SparseOperator> {
        let op = match name {
            "a" => self.a.clone(),
            "a_dag" => self.a.adjoint(),
            "b" => self.b.clone(),
            "b_dag" => self.b.adjoint(),
            "sigma_a" => self.sigma_a.clone(),
            "sigma_a_dag" => self.sigma_a.adjoint(),
            "sigma_b" => self.sigma_b.clone(),
            "sigma_b_dag" => self.sigma_b.adjoint(),
            "sigma_c" => self.sigma_c.clone(),
            "sigma_c_dag" => self.sigma_c.adjoint(),
            "eta_a" => self.eta_a.clone(),
            "eta_b" => self.eta_b.clone(),
            "eta_c" => self.eta_c.clone(),
            "id" => self.identity.clone(),
            _ => return None,
        };
        Some(op)
    }

    /// Operator named by a `*`-separated product of factors, e.g.
    /// `"a_dag*sigma_a"`. Factors: `a`, `b`, `sigma_a`, `sigma_b`, `sigma_c`
    /// (each optionally suffixed `_dag`), `eta_a`, `eta_b`, `eta_c`, `id`.
    pub fn product(&self, name: &str) -> Result<SparseOperator, LindbladError> {
        let mut factors = name.split('*').map(str::trim);
        let first = factors.next().unwrap_or_default();
        let mut op = self
            .factor(first)
            .ok_or_else(|| LindbladError::UnknownOperator(name.to_string()))?;
        for f in factors {
            let next = self
                .factor(f)
                .ok_or_else(|| LindbladError::UnknownOperator(name.to_string()))?;
            op = op.matmul(&next);
        }
        Ok(op)
    }
}

/// `H = iε(ab − a†b†) + ig(σa† a − a† σa + σb† b − b† σb)`.
pub fn build_hamiltonian(ops: &OperatorSet, p: &ModelParams, g: f64) -> SparseOperator {
    let a_dag = ops.a.adjoint();
    let b_dag = ops.b.adjoint();
    let pump = &ops.a.matmul(&ops.b) - &a_dag.matmul(&b_dag);
    let upper = &ops.sigma_a.adjoint().matmul(&ops.a) - &a_dag.matmul(&ops.sigma_a);
    let lower = &ops.sigma_b.adjoint().matmul(&ops.b) - &b_dag.matmul(&ops.sigma_b);
    let coupling = &upper + &lower;
    &pump.scale(I * p.epsilon()) + &coupling.scale(I * g)
}

/// `H − (i/2) κ (a†a + b†b)`: the non-Hermitian part of the generator.
pub fn effective_hamiltonian(h: &SparseOperator, ops: &OperatorSet, kappa: f64) -> SparseOperator {
    let number = &ops.a.adjoint().matmul(&ops.a) + &ops.b.adjoint().matmul(&ops.b);
    h - &number.scale(Complex64::new(0.0, 0.5 * kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::coupling_from_gamma_c;
    use crate::numerics::spmv;

    fn ops(n: usize) -> OperatorSet {
        build_operator_set(HilbertConfig::new(n).unwrap())
    }

    fn basis(dim: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn config_validation_and_indexing() {
        assert!(HilbertConfig::new(1).is_err());
        let cfg = HilbertConfig::new(4).unwrap();
        assert_eq!(cfg.dim(), 48);
        for k in 0..cfg.dim() {
            let (l, na, nb) = cfg.decompose(k);
            assert_eq!(cfg.index(l, na, nb), k);
        }
    }

    #[test]
    fn ladder_matrix_elements() {
        let o = ops(2);
        let cfg = o.cfg;
        // Within each atomic level the only element of a is ⟨0,·|a|1,·⟩ = 1.
        for level in 0..3 {
            for nb in 0..2 {
                assert_eq!(o.a.get(cfg.index(level, 0, nb), cfg.index(level, 1, nb)), Complex64::new(1.0, 0.0));
            }
        }
        assert_eq!(o.a.nnz(), 6);
        let o = ops(5);
        let v = spmv(&o.b, &basis(o.dim(), o.cfg.index(LEVEL_C, 2, 4))).unwrap();
        assert_eq!(v[o.cfg.index(LEVEL_C, 2, 3)], Complex64::new(2.0, 0.0));
    }

    #[test]
    fn atomic_algebra() {
        let o = ops(3);
        assert_eq!(o.sigma_b.matmul(&o.sigma_a), o.sigma_c);
        assert_eq!(&(&o.eta_a + &o.eta_b) + &o.eta_c, o.identity);
        assert_eq!(o.sigma_a.adjoint().matmul(&o.sigma_a), o.eta_a);
    }

    #[test]
    fn canonical_commutator_below_cutoff() {
        let o = ops(4);
        let comm = &o.a.matmul(&o.a.adjoint()) - &o.a.adjoint().matmul(&o.a);
        for k in 0..o.dim() {
            let (_, na, _) = o.cfg.decompose(k);
            let expected = if na < 3 { 1.0 } else { -3.0 };
            assert!((comm.get(k, k) - expected).norm() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn product_names() {
        let o = ops(3);
        assert_eq!(o.product("a_dag*a").unwrap(), o.a.adjoint().matmul(&o.a));
        assert_eq!(o.product("eta_a").unwrap(), o.eta_a);
        assert!(matches!(o.product("a*q"), Err(LindbladError::UnknownOperator(_))));
    }

    #[test]
    fn hamiltonian_structure() {
        let o = ops(3);
        let zero = ModelParams::new(0.0, 0.8, 0.0).unwrap();
        assert_eq!(build_hamiltonian(&o, &zero, 0.0).nnz(), 0);

        let p = ModelParams::new(0.3, 0.8, 0.5).unwrap();
        let g = coupling_from_gamma_c(0.8, 0.5).unwrap();
        let h = build_hamiltonian(&o, &p, g);
        assert!(h.is_hermitian(1e-12));

        let cfg = o.cfg;
        let from = cfg.index(LEVEL_B, 0, 0);
        let to = cfg.index(LEVEL_C, 0, 1);
        assert!((h.get(to, from) - Complex64::new(0.0, -g)).norm() < 1e-15);
        assert!((h.get(from, to) - Complex64::new(0.0, g)).norm() < 1e-15);

        // Without the atom only the parametric term survives.
        let bare = build_hamiltonian(&o, &p, 0.0);
        let pump = (&o.a.matmul(&o.b) - &o.a.adjoint().matmul(&o.b.adjoint())).scale(I * 0.3);
        assert!(bare.max_abs_diff(&pump) < 1e-15);
    }
}
