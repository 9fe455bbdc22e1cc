//! The master-equation generator
//! `L(ρ) = −i[H, ρ] + κ Σ_J (J ρ J† − ½{J†J, ρ})`, `J ∈ {a, b}`.
//!
//! [`lindblad_rhs`] applies it to a dense matrix by sparse-dense products and
//! is the reference. [`Liouvillian`] is what the integrator runs: it keeps
//! only the upper triangle of the entries that can ever become nonzero from
//! the chosen initial state (found by a reachability search over the
//! generator's structure), and lists for each such entry the handful of
//! source entries feeding its derivative. For the initial state used here
//! that support is block diagonal in the conserved charge
//! `n_a − n_b − [atom in |b⟩]`, roughly a tenth of the full matrix.

use std::collections::VecDeque;

use num_complex::Complex64;

use super::density::DensityOperator;
use super::operators::{effective_hamiltonian, OperatorSet};
use crate::numerics::{DenseMatrix, SparseOperator, I};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn sparse_dense(op: &SparseOperator, m: &DenseMatrix) -> DenseMatrix {
    let n = m.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for (i, k, v) in op.triplets() {
        for j in 0..n {
            out[(i, j)] += v * m[(k, j)];
        }
    }
    out
}

fn dense_sparse(m: &DenseMatrix, op: &SparseOperator) -> DenseMatrix {
    let n = m.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for (k, j, v) in op.triplets() {
        for i in 0..n {
            out[(i, j)] += m[(i, k)] * v;
        }
    }
    out
}

/// Time derivative of `rho` under the master equation with Hamiltonian `h`.
pub fn lindblad_rhs(rho: &DensityOperator, h: &SparseOperator, ops: &OperatorSet, kappa: f64) -> DenseMatrix {
    let m = rho.matrix();
    let n = m.rows();
    let heff = effective_hamiltonian(h, ops, kappa);
    let left = sparse_dense(&heff, m);
    let right = dense_sparse(m, &heff.adjoint());
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = -I * (left[(i, j)] - right[(i, j)]);
        }
    }
    for jump in [&ops.a, &ops.b] {
        let sandwich = dense_sparse(&sparse_dense(jump, m), &jump.adjoint());
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += sandwich[(i, j)] * kappa;
            }
        }
    }
    out
}

/// Storage layout of the compact state: the active upper-triangle entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    dim: usize,
    /// `(row, col)` with `row <= col`, in row-major order.
    pairs: Vec<(u32, u32)>,
    /// Dense `dim × dim` map to a compact index, `u32::MAX` when inactive.
    lookup: Vec<u32>,
}

/// Reference to an entry of `ρ` through the compact state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryRef {
    Inactive,
    Direct(usize),
    Conjugate(usize),
}

impl Layout {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn entry(&self, i: usize, j: usize) -> EntryRef {
        let (r, c, conj) = if i <= j { (i, j, false) } else { (j, i, true) };
        match self.lookup[r * self.dim + c] {
            u32::MAX => EntryRef::Inactive,
            k if conj => EntryRef::Conjugate(k as usize),
            k => EntryRef::Direct(k as usize),
        }
    }

    /// `ρ_ij` read from a compact state.
    pub fn value(&self, state: &[Complex64], i: usize, j: usize) -> Complex64 {
        match self.entry(i, j) {
            EntryRef::Inactive => ZERO,
            EntryRef::Direct(k) => state[k],
            EntryRef::Conjugate(k) => state[k].conj(),
        }
    }

    pub fn compress(&self, rho: &DensityOperator) -> Vec<Complex64> {
        let m = rho.matrix();
        self.pairs
            .iter()
            .map(|&(i, j)| m[(i as usize, j as usize)])
            .collect()
    }

    pub fn expand(&self, state: &[Complex64]) -> DensityOperator {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (&(i, j), &v) in self.pairs.iter().zip(state) {
            let (i, j) = (i as usize, j as usize);
            m[(i, j)] = v;
            if i != j {
                m[(j, i)] = v.conj();
            }
        }
        DensityOperator::from_matrix(m).expect("layout matrices are square")
    }

    /// Compact indices of the diagonal entries.
    pub fn diagonal(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| i == j)
            .map(|(k, &(i, _))| (k, i as usize))
    }
}

/// Linear functional `state ↦ Σ c·y[s] + Σ d·conj(y[s'])` on compact states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompactFunctional {
    direct: Vec<(u32, Complex64)>,
    conjugate: Vec<(u32, Complex64)>,
}

impl CompactFunctional {
    /// `Tr(ρ O)` for the operator `op`.
    pub fn expectation(layout: &Layout, op: &SparseOperator) -> Self {
        let mut terms = TermBuilder::default();
        for (j, i, v) in op.triplets() {
            terms.push(layout.entry(i, j), v);
        }
        terms.finish()
    }

    pub fn apply(&self, state: &[Complex64]) -> Complex64 {
        let mut acc = ZERO;
        for &(s, c) in &self.direct {
            acc += c * state[s as usize];
        }
        for &(s, c) in &self.conjugate {
            acc += c * state[s as usize].conj();
        }
        acc
    }
}

#[derive(Default)]
struct TermBuilder {
    direct: Vec<(u32, Complex64)>,
    conjugate: Vec<(u32, Complex64)>,
}

impl TermBuilder {
    fn push(&mut self, entry: EntryRef, coef: Complex64) {
        match entry {
            EntryRef::Inactive => {}
            EntryRef::Direct(k) => self.direct.push((k as u32, coef)),
            // coef · conj(y) where the requested entry is the conjugate of y.
            EntryRef::Conjugate(k) => self.conjugate.push((k as u32, coef)),
        }
    }

    fn merge(mut v: Vec<(u32, Complex64)>) -> Vec<(u32, Complex64)> {
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(u32, Complex64)> = Vec::with_capacity(v.len());
        for (s, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += c,
                _ => out.push((s, c)),
            }
        }
        out.retain(|t| t.1 != ZERO);
        out
    }

    fn finish(self) -> CompactFunctional {
        CompactFunctional {
            direct: Self::merge(self.direct),
            conjugate: Self::merge(self.conjugate),
        }
    }
}

/// The generator restricted to a compact layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    layout: Layout,
    // CSR over compact rows; separate term lists for y and conj(y).
    direct_ptr: Vec<usize>,
    direct: Vec<(u32, Complex64)>,
    conj_ptr: Vec<usize>,
    conjugate: Vec<(u32, Complex64)>,
}

impl Liouvillian {
    /// Builds the generator on the entries reachable from `initial`.
    pub fn new(h: &SparseOperator, ops: &OperatorSet, kappa: f64, initial: &DensityOperator) -> Self {
        let heff = effective_hamiltonian(h, ops, kappa);
        let jumps = [ops.a.clone(), ops.b.clone()];
        let layout = reachable_layout(&heff, &jumps, initial);

        let mut direct_ptr = vec![0];
        let mut conj_ptr = vec![0];
        let mut direct = Vec::new();
        let mut conjugate = Vec::new();
        for &(k, l) in &layout.pairs {
            let (k, l) = (k as usize, l as usize);
            let mut terms = TermBuilder::default();
            // −i Σ_i Heff_ki ρ_il
            for (i, v) in heff.row(k) {
                terms.push(layout.entry(i, l), -I * v);
            }
            // +i Σ_j ρ_kj conj(Heff_lj)
            for (j, v) in heff.row(l) {
                terms.push(layout.entry(k, j), I * v.conj());
            }
            // κ Σ_J J_ki ρ_ij conj(J_lj)
            for jump in &jumps {
                for (i, x) in jump.row(k) {
                    for (j, y) in jump.row(l) {
                        terms.push(layout.entry(i, j), x * y.conj() * kappa);
                    }
                }
            }
            let f = terms.finish();
            direct.extend(f.direct);
            conjugate.extend(f.conjugate);
            direct_ptr.push(direct.len());
            conj_ptr.push(conjugate.len());
        }
        Self {
            layout,
            direct_ptr,
            direct,
            conj_ptr,
            conjugate,
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Number of stored coefficients.
    pub fn terms(&self) -> usize {
        self.direct.len() + self.conjugate.len()
    }

    /// Writes `dρ/dt` for the compact state `y` into `dy`.
    pub fn apply(&self, y: &[Complex64], dy: &mut [Complex64]) {
        for (m, out) in dy.iter_mut().enumerate() {
            let mut acc = ZERO;
            for &(s, c) in &self.direct[self.direct_ptr[m]..self.direct_ptr[m + 1]] {
                acc += c * y[s as usize];
            }
            for &(s, c) in &self.conjugate[self.conj_ptr[m]..self.conj_ptr[m + 1]] {
                acc += c * y[s as usize].conj();
            }
            *out = acc;
        }
    }
}

/// Entries reachable from the support of `initial` along the generator's
/// couplings: `(i,j) → (k,j)` for `Heff_ki ≠ 0`, `(i,j) → (i,l)` for
/// `Heff_lj ≠ 0`, and `(i,j) → (k,l)` for `J_ki J_lj ≠ 0`. Everything else
/// stays exactly zero for all time.
fn reachable_layout(heff: &SparseOperator, jumps: &[SparseOperator], initial: &DensityOperator) -> Layout {
    let dim = heff.dim();
    // Column access: row i of the adjoint lists every k with Heff_ki ≠ 0.
    let heff_cols = heff.adjoint();
    let jump_cols: Vec<SparseOperator> = jumps.iter().map(SparseOperator::adjoint).collect();

    let mut seen = vec![false; dim * dim];
    let mut queue = VecDeque::new();
    let m = initial.matrix();
    for i in 0..dim {
        for j in 0..dim {
            if m[(i, j)] != ZERO {
                seen[i * dim + j] = true;
                queue.push_back((i, j));
            }
        }
    }
    let mut visit = |i: usize, j: usize, queue: &mut VecDeque<(usize, usize)>| {
        if !seen[i * dim + j] {
            seen[i * dim + j] = true;
            queue.push_back((i, j));
        }
    };
    while let Some((i, j)) = queue.pop_front() {
        for k in heff_cols.row_cols(i) {
            visit(*k, j, &mut queue);
        }
        for l in heff_cols.row_cols(j) {
            visit(i, *l, &mut queue);
        }
        for jc in &jump_cols {
            for &k in jc.row_cols(i) {
                for &l in jc.row_cols(j) {
                    visit(k, l, &mut queue);
                }
            }
        }
    }

    let mut pairs = Vec::new();
    let mut lookup = vec![u32::MAX; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            if seen[i * dim + j] || seen[j * dim + i] {
                lookup[i * dim + j] = pairs.len() as u32;
                pairs.push((i as u32, j as u32));
            }
        }
    }
    Layout { dim, pairs, lookup }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::operators::{build_hamiltonian, build_operator_set, HilbertConfig, LEVEL_A, LEVEL_B};
    use crate::model::{coupling_from_gamma_c, ModelParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize, e: f64, gc: f64) -> (OperatorSet, SparseOperator, f64) {
        let ops = build_operator_set(HilbertConfig::new(n).unwrap());
        let p = ModelParams::new(e, 0.8, gc).unwrap();
        let g = coupling_from_gamma_c(0.8, gc).unwrap();
        let h = build_hamiltonian(&ops, &p, g);
        (ops, h, g)
    }

    fn random_density(dim: usize, seed: u64) -> DensityOperator {
        // ρ = A A† / Tr(A A†) for a random complex A.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                a[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let mut m = DenseMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = (0..dim).map(|k| a[(i, k)] * a[(j, k)].conj()).sum();
            }
        }
        let tr: Complex64 = (0..dim).map(|i| m[(i, i)]).sum();
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] /= tr;
            }
        }
        DensityOperator::from_matrix(m).unwrap()
    }

    #[test]
    fn dark_state_is_stationary() {
        let (ops, h, _) = setup(4, 0.0, 0.5);
        let rho = DensityOperator::ground(&ops.cfg);
        let d = lindblad_rhs(&rho, &h, &ops, 0.8);
        assert_eq!(d.norm_inf(), 0.0);
    }

    #[test]
    fn excited_atom_feeds_the_one_photon_sector() {
        let (ops, h, g) = setup(3, 0.0, 0.5);
        let cfg = ops.cfg;
        let top = cfg.index(LEVEL_A, 0, 0);
        let rho = DensityOperator::basis_projector(cfg.dim(), top);
        let d = lindblad_rhs(&rho, &h, &ops, 0.8);
        let target = cfg.index(LEVEL_B, 1, 0);
        // −i(H ρ − ρ H): H|a,0,0⟩ = −ig|b,1,0⟩, so the coherence is −g.
        assert!((d[(target, top)] - Complex64::new(-g, 0.0)).norm() < 1e-15);
        assert!((d[(top, target)] - Complex64::new(-g, 0.0)).norm() < 1e-15);
        // Populations do not move at first order.
        assert_eq!(d[(top, top)], ZERO);
        assert_eq!(d[(target, target)], ZERO);
    }

    #[test]
    fn derivative_is_traceless_and_hermitian() {
        let (ops, h, _) = setup(3, 0.3, 0.5);
        let rho = random_density(ops.dim(), 7);
        let d = lindblad_rhs(&rho, &h, &ops, 0.8);
        let tr: Complex64 = (0..ops.dim()).map(|i| d[(i, i)]).sum();
        assert!(tr.norm() < 1e-12);
        let d = DensityOperator::from_matrix(d).unwrap();
        assert!(d.hermiticity_error() < 1e-12);
    }

    #[test]
    fn compact_generator_matches_dense_reference() {
        let (ops, h, _) = setup(4, 0.3, 0.5);
        let initial = DensityOperator::ground(&ops.cfg);
        let lv = Liouvillian::new(&h, &ops, 0.8, &initial);
        let layout = lv.layout();
        assert!(layout.len() < ops.dim() * ops.dim() / 4);

        // A state living on the active entries only.
        let full = random_density(ops.dim(), 3);
        let y = layout.compress(&full);
        let rho = layout.expand(&y);
        let mut dy = vec![ZERO; y.len()];
        lv.apply(&y, &mut dy);
        let reference = lindblad_rhs(&rho, &h, &ops, 0.8);
        let dense = layout.expand(&dy);
        let mut worst: f64 = 0.0;
        for i in 0..ops.dim() {
            for j in 0..ops.dim() {
                worst = worst.max((dense.matrix()[(i, j)] - reference[(i, j)]).norm());
            }
        }
        assert!(worst < 1e-13, "max deviation {worst}");
    }

    #[test]
    fn layout_round_trip_and_functionals() {
        let (ops, h, _) = setup(3, 0.2, 0.1);
        let lv = Liouvillian::new(&h, &ops, 0.8, &DensityOperator::ground(&ops.cfg));
        let layout = lv.layout();
        let rho = layout.expand(&layout.compress(&random_density(ops.dim(), 11)));
        let y = layout.compress(&rho);
        assert_eq!(layout.expand(&y), rho);
        for op in [&ops.a.adjoint().matmul(&ops.b.adjoint()), &ops.sigma_c, &ops.identity] {
            let f = CompactFunctional::expectation(layout, op);
            assert!((f.apply(&y) - rho.expectation(op).unwrap()).norm() < 1e-14);
        }
    }
}
