use std::ops::{Add, Mul, Sub};

use super::{Complex64, DenseMatrix, NumericsError};

/// Square sparse complex operator in coordinate form.
///
/// Triplets are sorted by `(row, col)` and deduplicated once at construction
/// (duplicates are summed, exact zeros dropped); `row_ptr` indexes the start of
/// each row so the storage doubles as CSR.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOperator {
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self, NumericsError>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut raw: Vec<(usize, usize, Complex64)> = Vec::new();
        for (row, col, v) in triplets {
            if row >= dim || col >= dim {
                return Err(NumericsError::IndexOutOfRange { row, col, dim });
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(NumericsError::NonFiniteEntry { row, col });
            }
            raw.push((row, col, v));
        }
        // Stable sort keeps the summation order of duplicates fixed.
        raw.sort_by_key(|&(r, c, _)| (r, c));

        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(raw.len());
        for (r, c, v) in raw {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != Complex64::new(0.0, 0.0));

        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            dim,
            row_ptr,
            cols: merged.iter().map(|t| t.1).collect(),
            vals: merged.iter().map(|t| t.2).collect(),
        })
    }

    fn from_sorted_unchecked(dim: usize, merged: Vec<(usize, usize, Complex64)>) -> Self {
        Self::from_triplets(dim, merged).expect("indices produced internally are in range")
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        Self::from_sorted_unchecked(
            values.len(),
            values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
        )
    }

    /// `|row⟩⟨col|` on a space of dimension `dim`.
    pub fn outer(dim: usize, row: usize, col: usize) -> Result<Self, NumericsError> {
        Self::from_triplets(dim, [(row, col, Complex64::new(1.0, 0.0))])
    }

    /// Bosonic annihilation operator truncated to Fock states `|0⟩..|n-1⟩`:
    /// `⟨k-1|a|k⟩ = sqrt(k)`.
    pub fn annihilation(n: usize) -> Self {
        Self::from_sorted_unchecked(
            n,
            (1..n)
                .map(|k| (k - 1, k, Complex64::new((k as f64).sqrt(), 0.0)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzeros of row `i` as `(col, value)` pairs in increasing column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn row_cols(&self, i: usize) -> &[usize] {
        &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn row_vals(&self, i: usize) -> &[Complex64] {
        &self.vals[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// All nonzeros in `(row, col)` order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let cols = self.row_cols(i);
        match cols.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_sorted_unchecked(
            self.dim,
            self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect(),
        )
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_sorted_unchecked(
            self.dim,
            self.triplets().map(|(i, j, v)| (i, j, v * factor)).collect(),
        )
    }

    /// Sparse-sparse matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let mut out = Vec::new();
        for i in 0..self.dim {
            for (k, a) in self.row(i) {
                for (j, b) in rhs.row(k) {
                    out.push((i, j, a * b));
                }
            }
        }
        Self::from_sorted_unchecked(self.dim, out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other)
            .vals
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }
}

impl Add for &SparseOperator {
    type Output = SparseOperator;

    fn add(self, rhs: &SparseOperator) -> SparseOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        SparseOperator::from_sorted_unchecked(
            self.dim,
            self.triplets().chain(rhs.triplets()).collect(),
        )
    }
}

impl Sub for &SparseOperator {
    type Output = SparseOperator;

    fn sub(self, rhs: &SparseOperator) -> SparseOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        SparseOperator::from_sorted_unchecked(
            self.dim,
            self.triplets()
                .chain(rhs.triplets().map(|(i, j, v)| (i, j, -v)))
                .collect(),
        )
    }
}

impl Mul for &SparseOperator {
    type Output = SparseOperator;

    fn mul(self, rhs: &SparseOperator) -> SparseOperator {
        self.matmul(rhs)
    }
}

/// Kronecker product: entry `(i*dim_b + k, j*dim_b + l)` equals `A(i,j) * B(k,l)`.
pub fn kron(a: &SparseOperator, b: &SparseOperator) -> SparseOperator {
    let db = b.dim;
    let mut out = Vec::with_capacity(a.nnz() * b.nnz());
    for (i, j, x) in a.triplets() {
        for (k, l, y) in b.triplets() {
            out.push((i * db + k, j * db + l, x * y));
        }
    }
    SparseOperator::from_sorted_unchecked(a.dim * db, out)
}

/// Sparse matrix-vector product, accumulated row by row in column order.
pub fn spmv(a: &SparseOperator, x: &[Complex64]) -> Result<Vec<Complex64>, NumericsError> {
    if x.len() != a.dim {
        return Err(NumericsError::DimensionMismatch {
            expected: a.dim,
            found: x.len(),
        });
    }
    Ok((0..a.dim)
        .map(|i| {
            a.row(i)
                .fold(Complex64::new(0.0, 0.0), |acc, (j, v)| acc + v * x[j])
        })
        .collect())
}
