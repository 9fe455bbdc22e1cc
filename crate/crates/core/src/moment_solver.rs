//! Numerical solution of the stationary moment equations.
//!
//! Two small dense systems are assembled and solved with the in-house LU:
//!
//! * the atomic system in `⟨σa⟩, ⟨σb⟩, ⟨σc⟩` (complex) and the three
//!   populations (real), closed by completeness;
//! * the field system in ten second moments, each split into real and
//!   imaginary parts (20 real unknowns, fixed order in [`FIELD_LABELS`]).
//!
//! Nothing here consults the closed forms of [`crate::analytic`]; the two
//! modules are meant to be compared against each other.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::ModelParams;
use crate::numerics::{lu_solve, DenseMatrix, NumericsError};
use crate::observables::Observables;

/// Largest acceptable one-norm condition number of the field system.
pub const MAX_CONDITION: f64 = 1e14;
/// Agreement required between the two commutator evaluations.
pub const COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("field system is numerically singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },
    #[error("linear solve residual {residual:e} exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error(
        "commutator from atomic inputs ({from_atoms}) disagrees with the one from field moments ({from_fields})"
    )]
    InconsistentInputs { from_atoms: f64, from_fields: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Atomic expectation values: coherences `σa = |b⟩⟨a|`, `σb = |c⟩⟨b|`,
/// `σc = |c⟩⟨a|` and level populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicMoments {
    pub sigma_a: Complex64,
    pub sigma_b: Complex64,
    pub sigma_c: Complex64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub eta_c: f64,
}

impl AtomicMoments {
    /// Atom in the bottom level.
    pub const GROUND: Self = Self {
        sigma_a: Complex64::new(0.0, 0.0),
        sigma_b: Complex64::new(0.0, 0.0),
        sigma_c: Complex64::new(0.0, 0.0),
        eta_a: 0.0,
        eta_b: 0.0,
        eta_c: 1.0,
    };

    pub fn population_sum(&self) -> f64 {
        self.eta_a + self.eta_b + self.eta_c
    }

    /// `⟨σc + σc†⟩`.
    pub fn coherence_sum(&self) -> f64 {
        2.0 * self.sigma_c.re
    }
}

/// Outcome of the atomic solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomicSolution {
    Unique(AtomicMoments),
    /// Without pump the stationary conditions do not single out a state; the
    /// unpumped atom is taken to rest in its bottom level.
    DegeneratePump(AtomicMoments),
}

impl AtomicSolution {
    pub fn moments(&self) -> AtomicMoments {
        match *self {
            AtomicSolution::Unique(m) | AtomicSolution::DegeneratePump(m) => m,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, AtomicSolution::DegeneratePump(_))
    }
}

/// Stationary second moments of the two cavity modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMoments {
    /// `⟨a†a⟩`
    pub n_a: f64,
    /// `⟨aa†⟩`
    pub anti_a: f64,
    /// `⟨b†b⟩`
    pub n_b: f64,
    /// `⟨bb†⟩`
    pub anti_b: f64,
    /// `⟨ab⟩`
    pub ab: Complex64,
    /// `⟨ba⟩`
    pub ba: Complex64,
    /// `⟨a†b⟩`
    pub adag_b: Complex64,
    /// `⟨ba†⟩`
    pub b_adag: Complex64,
    /// `⟨a²⟩`
    pub a_sq: Complex64,
    /// `⟨b²⟩`
    pub b_sq: Complex64,
}

impl FieldMoments {
    pub const VACUUM: Self = Self {
        n_a: 0.0,
        anti_a: 1.0,
        n_b: 0.0,
        anti_b: 1.0,
        ab: Complex64::new(0.0, 0.0),
        ba: Complex64::new(0.0, 0.0),
        adag_b: Complex64::new(0.0, 0.0),
        b_adag: Complex64::new(0.0, 0.0),
        a_sq: Complex64::new(0.0, 0.0),
        b_sq: Complex64::new(0.0, 0.0),
    };

    fn to_unknowns(self) -> [Complex64; FIELD_UNKNOWNS] {
        let r = |x: f64| Complex64::new(x, 0.0);
        [
            r(self.n_a),
            r(self.anti_a),
            r(self.n_b),
            r(self.anti_b),
            self.ab,
            self.ba,
            self.adag_b,
            self.b_adag,
            self.a_sq,
            self.b_sq,
        ]
    }
}

/// Names of the ten complex field unknowns, in solve order.
pub const FIELD_MOMENTS: [&str; FIELD_UNKNOWNS] = [
    "n_a", "anti_a", "n_b", "anti_b", "ab", "ba", "adag_b", "b_adag", "a_sq", "b_sq",
];
const FIELD_UNKNOWNS: usize = 10;

/// Labels of the 20 real unknowns: real part of moment `k` at `2k`,
/// imaginary part at `2k + 1`.
pub const FIELD_LABELS: [&str; 2 * FIELD_UNKNOWNS] = [
    "re(n_a)", "im(n_a)", "re(anti_a)", "im(anti_a)", "re(n_b)", "im(n_b)", "re(anti_b)",
    "im(anti_b)", "re(ab)", "im(ab)", "re(ba)", "im(ba)", "re(adag_b)", "im(adag_b)",
    "re(b_adag)", "im(b_adag)", "re(a_sq)", "im(a_sq)", "re(b_sq)", "im(b_sq)",
];

const N_A: usize = 0;
const ANTI_A: usize = 1;
const N_B: usize = 2;
const ANTI_B: usize = 3;
const AB: usize = 4;
const BA: usize = 5;
const ADAG_B: usize = 6;
const B_ADAG: usize = 7;
const A_SQ: usize = 8;
const B_SQ: usize = 9;

/// A real linear system `matrix · x = rhs`, stored with complex entries whose
/// imaginary parts are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<Complex64>,
    pub labels: Vec<String>,
}

impl LinearSystem {
    fn residual(&self, x: &[Complex64]) -> Result<f64, NumericsError> {
        let ax = self.matrix.matvec(x)?;
        Ok(ax
            .iter()
            .zip(&self.rhs)
            .map(|(l, r)| (l - r).norm())
            .fold(0.0, f64::max))
    }

    fn rhs_norm(&self) -> f64 {
        self.rhs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// One complex stationary equation `Σ c·u + Σ d·conj(u) = rhs`.
struct ComplexRow {
    direct: Vec<(usize, Complex64)>,
    conjugated: Vec<(usize, Complex64)>,
    rhs: Complex64,
}

impl ComplexRow {
    fn new(rhs: Complex64) -> Self {
        Self {
            direct: Vec::new(),
            conjugated: Vec::new(),
            rhs,
        }
    }

    fn plus(mut self, unknown: usize, c: f64) -> Self {
        self.direct.push((unknown, Complex64::new(c, 0.0)));
        self
    }

    fn plus_conj(mut self, unknown: usize, d: f64) -> Self {
        self.conjugated.push((unknown, Complex64::new(d, 0.0)));
        self
    }

    /// Writes the real and imaginary parts as rows `2k` and `2k + 1`.
    fn split_into(&self, k: usize, a: &mut DenseMatrix, b: &mut [Complex64]) {
        let (re_row, im_row) = (2 * k, 2 * k + 1);
        let real = |x: f64| Complex64::new(x, 0.0);
        for &(j, c) in &self.direct {
            let (x, y) = (2 * j, 2 * j + 1);
            a[(re_row, x)] += real(c.re);
            a[(re_row, y)] += real(-c.im);
            a[(im_row, x)] += real(c.im);
            a[(im_row, y)] += real(c.re);
        }
        for &(j, d) in &self.conjugated {
            let (x, y) = (2 * j, 2 * j + 1);
            a[(re_row, x)] += real(d.re);
            a[(re_row, y)] += real(d.im);
            a[(im_row, x)] += real(d.im);
            a[(im_row, y)] += real(-d.re);
        }
        b[re_row] = real(self.rhs.re);
        b[im_row] = real(self.rhs.im);
    }
}

/// Solves the stationary atomic equations closed by completeness.
///
/// Every stationary condition carries the common factor
/// `κ²γc/(κ² − 4ε²)`; it is divided out so that the same rows serve at
/// `γc = 0`. At `ε = 0` the bottom-level state is returned, flagged.
pub fn solve_atomic_steady_state(p: &ModelParams) -> Result<AtomicSolution, MomentError> {
    if p.epsilon() == 0.0 {
        return Ok(AtomicSolution::DegeneratePump(AtomicMoments::GROUND));
    }
    let r = p.epsilon() / p.kappa();
    // Unknowns: re/im of σa, σb, σc, then η_a, η_b, η_c.
    const SA: usize = 0;
    const SB: usize = 1;
    const SC: usize = 2;
    const EA: usize = 6;
    const EB: usize = 7;
    const EC: usize = 8;
    let mut a = DenseMatrix::zeros(9, 9);
    let mut b = vec![Complex64::new(0.0, 0.0); 9];
    let mut set = |row: usize, col: usize, v: f64| a[(row, col)] += Complex64::new(v, 0.0);

    // σa/2 − r·conj(σb) = 0
    set(0, 2 * SA, 0.5);
    set(0, 2 * SB, -r);
    set(1, 2 * SA + 1, 0.5);
    set(1, 2 * SB + 1, r);
    // σb = 0
    set(2, 2 * SB, 1.0);
    set(3, 2 * SB + 1, 1.0);
    // σc/2 + r(η_b − η_c) = 0
    set(4, 2 * SC, 0.5);
    set(4, EB, r);
    set(4, EC, -r);
    set(5, 2 * SC + 1, 0.5);
    // η_a − r(σc + σc†) = 0
    set(6, EA, 1.0);
    set(6, 2 * SC, -2.0 * r);
    // η_b − η_a + r(σc + σc†) = 0
    set(7, EB, 1.0);
    set(7, EA, -1.0);
    set(7, 2 * SC, 2.0 * r);
    // Completeness replaces the redundant η_c equation.
    set(8, EA, 1.0);
    set(8, EB, 1.0);
    set(8, EC, 1.0);
    b[8] = Complex64::new(1.0, 0.0);

    let x = lu_solve(&a, &b)?;
    let c = |k: usize| Complex64::new(x[2 * k].re, x[2 * k + 1].re);
    Ok(AtomicSolution::Unique(AtomicMoments {
        sigma_a: c(SA),
        sigma_b: c(SB),
        sigma_c: c(SC),
        eta_a: x[EA].re,
        eta_b: x[EB].re,
        eta_c: x[EC].re,
    }))
}

/// Shorthands shared by assembly and the substitution check.
struct Coefficients {
    /// `ε/κ`
    r: f64,
    /// `κγc/(κ² − 4ε²)`
    g: f64,
}

impl Coefficients {
    fn new(p: &ModelParams) -> Self {
        let (e, k) = (p.epsilon(), p.kappa());
        Self {
            r: e / k,
            g: k * p.gamma_c() / (k * k - 4.0 * e * e),
        }
    }
}

/// Row `k` is the stationary equation whose leading unknown is moment `k`.
fn field_rows(p: &ModelParams, atoms: &AtomicMoments) -> [ComplexRow; FIELD_UNKNOWNS] {
    let Coefficients { r, g } = Coefficients::new(p);
    let x = atoms.coherence_sum();
    let z = |v: f64| Complex64::new(v, 0.0);
    [
        ComplexRow::new(z(-g * (r * x - atoms.eta_a)))
            .plus(N_A, 1.0)
            .plus(BA, r)
            .plus_conj(BA, r),
        ComplexRow::new(z(g * atoms.eta_b + 1.0))
            .plus(ANTI_A, 1.0)
            .plus(AB, r)
            .plus_conj(AB, r),
        ComplexRow::new(z(g * atoms.eta_b))
            .plus(N_B, 1.0)
            .plus(AB, r)
            .plus_conj(AB, r),
        ComplexRow::new(z(-g * (r * x - atoms.eta_c) + 1.0))
            .plus(ANTI_B, 1.0)
            .plus(BA, r)
            .plus_conj(BA, r),
        ComplexRow::new(z(-2.0 * r * g * atoms.eta_b - r))
            .plus(AB, 1.0)
            .plus(N_A, r)
            .plus(N_B, r),
        ComplexRow::new(-g * (z(r * (atoms.eta_a + atoms.eta_c)) - atoms.sigma_c) - r)
            .plus(BA, 1.0)
            .plus(N_A, r)
            .plus(N_B, r),
        ComplexRow::new(z(0.0))
            .plus(ADAG_B, 1.0)
            .plus_conj(A_SQ, r)
            .plus(B_SQ, r),
        ComplexRow::new(z(0.0))
            .plus(B_ADAG, 1.0)
            .plus_conj(A_SQ, r)
            .plus(B_SQ, r),
        ComplexRow::new(z(0.0))
            .plus(A_SQ, 1.0)
            .plus_conj(B_ADAG, r)
            .plus_conj(ADAG_B, r),
        ComplexRow::new(z(0.0))
            .plus(B_SQ, 1.0)
            .plus(B_ADAG, r)
            .plus(ADAG_B, r),
    ]
}

/// Builds the 20×20 real field system for the given atomic inputs.
pub fn assemble_field_system(p: &ModelParams, atoms: &AtomicMoments) -> LinearSystem {
    let n = 2 * FIELD_UNKNOWNS;
    let mut matrix = DenseMatrix::zeros(n, n);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for (k, row) in field_rows(p, atoms).iter().enumerate() {
        row.split_into(k, &mut matrix, &mut rhs);
    }
    LinearSystem {
        matrix,
        rhs,
        labels: FIELD_LABELS.iter().map(|s| s.to_string()).collect(),
    }
}

/// Solves an assembled field system and reassembles the moments.
pub fn solve_field_moments(sys: &LinearSystem) -> Result<FieldMoments, MomentError> {
    let n = 2 * FIELD_UNKNOWNS;
    if !sys.matrix.is_square() || sys.matrix.rows() != n || sys.rhs.len() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            found: sys.rhs.len(),
        }
        .into());
    }
    let condition = match sys.matrix.condition_number() {
        Ok(c) => c,
        Err(NumericsError::SingularMatrix { .. }) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    if !(condition <= MAX_CONDITION) {
        return Err(MomentError::SingularSystem { condition });
    }
    let x = lu_solve(&sys.matrix, &sys.rhs)?;
    let residual = sys.residual(&x)?;
    let limit = 1e-10 * (1.0 + sys.rhs_norm());
    if !(residual < limit) {
        return Err(MomentError::ResidualTooLarge { residual, limit });
    }
    let c = |k: usize| Complex64::new(x[2 * k].re, x[2 * k + 1].re);
    Ok(FieldMoments {
        n_a: x[2 * N_A].re,
        anti_a: x[2 * ANTI_A].re,
        n_b: x[2 * N_B].re,
        anti_b: x[2 * ANTI_B].re,
        ab: c(AB),
        ba: c(BA),
        adag_b: c(ADAG_B),
        b_adag: c(B_ADAG),
        a_sq: c(A_SQ),
        b_sq: c(B_SQ),
    })
}

/// `2 + κγc(⟨η_c⟩ − ⟨η_a⟩)/(κ² − 4ε²)`.
pub fn commutator_from_atoms(p: &ModelParams, atoms: &AtomicMoments) -> f64 {
    let Coefficients { g, .. } = Coefficients::new(p);
    2.0 + g * (atoms.eta_c - atoms.eta_a)
}

/// Maps solved moments to the two-mode observables.
///
/// The commutator is evaluated both from the atomic inputs and from the
/// field moments; disagreement means the inputs do not belong together.
pub fn observables_from_moments(
    m: &FieldMoments,
    atoms: &AtomicMoments,
    p: &ModelParams,
) -> Result<Observables, MomentError> {
    let from_atoms = commutator_from_atoms(p, atoms);
    let from_fields = (m.anti_a + m.anti_b) - (m.n_a + m.n_b);
    if !((from_atoms - from_fields).abs() <= COMMUTATOR_TOL * from_atoms.abs().max(1.0)) {
        return Err(MomentError::InconsistentInputs {
            from_atoms,
            from_fields,
        });
    }

    let normal = m.n_a + m.n_b + (m.adag_b + m.adag_b.conj()).re;
    let antinormal = m.anti_a + m.anti_b + (m.b_adag + m.b_adag.conj()).re;
    // ⟨c²⟩ = ⟨a²⟩ + ⟨b²⟩ + ⟨ab⟩ + ⟨ba⟩; ⟨c†²⟩ is its conjugate.
    let c_sq = m.a_sq + m.b_sq + m.ab + m.ba;
    let anomalous = 2.0 * c_sq.re;
    Ok(Observables {
        mean_photon: m.n_a + m.n_b,
        var_plus: normal + antinormal + anomalous,
        var_minus: normal + antinormal - anomalous,
        commutator: from_atoms,
        vacuum_level: 2.0 + p.gamma_c() / p.kappa(),
    })
}

/// Full pipeline: atomic solve, field solve, observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSolution {
    pub atoms: AtomicSolution,
    pub fields: FieldMoments,
    pub observables: Observables,
}

pub fn solve(p: &ModelParams) -> Result<MomentSolution, MomentError> {
    let atoms = solve_atomic_steady_state(p)?;
    let system = assemble_field_system(p, &atoms.moments());
    let fields = solve_field_moments(&system)?;
    let observables = observables_from_moments(&fields, &atoms.moments(), p)?;
    Ok(MomentSolution {
        atoms,
        fields,
        observables,
    })
}

/// Residuals of the ten complex stationary equations, evaluated directly
/// in complex arithmetic (not through the real split).
pub fn field_equation_residuals(
    p: &ModelParams,
    atoms: &AtomicMoments,
    m: &FieldMoments,
) -> [f64; FIELD_UNKNOWNS] {
    let u = m.to_unknowns();
    let mut out = [0.0; FIELD_UNKNOWNS];
    for (k, row) in field_rows(p, atoms).iter().enumerate() {
        let lhs: Complex64 = row.direct.iter().map(|&(j, c)| c * u[j]).sum::<Complex64>()
            + row
                .conjugated
                .iter()
                .map(|&(j, d)| d * u[j].conj())
                .sum::<Complex64>();
        out[k] = (lhs - row.rhs).norm();
    }
    out
}

/// Residuals of the intermediate relations obtained while eliminating the
/// field system by hand: the `⟨a†b⟩` chain that forces it to zero, and the
/// two linear relations coupling `⟨a†a⟩` and `⟨b†b⟩` to the atomic inputs.
pub fn intermediate_identity_residuals(
    p: &ModelParams,
    atoms: &AtomicMoments,
    m: &FieldMoments,
) -> [(&'static str, f64); 4] {
    let (e, k) = (p.epsilon(), p.kappa());
    let (e2, k2) = (e * e, k * k);
    let four_g2 = k * p.gamma_c();
    let cross = m.b_adag + m.adag_b;

    let chain_half = (m.adag_b - 2.0 * e2 / k2 * cross).norm();
    let chain_full = (m.adag_b - 4.0 * e2 / k2 * m.adag_b).norm();

    let d = k2 - 2.0 * e2;
    let pref = four_g2 / (d * (k2 - 4.0 * e2));
    let na = 2.0 * e2 / d
        + 2.0 * e2 / d * m.n_b
        + pref
            * (2.0 * e2 * atoms.eta_c + (2.0 * e2 + k2) * atoms.eta_a
                - 2.0 * e * k * atoms.coherence_sum());
    let nb = 2.0 * e2 / d + 2.0 * e2 / d * m.n_a + pref * (4.0 * e2 + k2) * atoms.eta_b;
    [
        ("adag_b vs cross sum", chain_half),
        ("adag_b self-consistency", chain_full),
        ("n_a relation", (m.n_a - na).abs()),
        ("n_b relation", (m.n_b - nb).abs()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(e: f64, k: f64, gc: f64) -> ModelParams {
        ModelParams::new(e, k, gc).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn atomic_reference_points() {
        for gc in [0.0, 0.5, 2.0] {
            let s = solve_atomic_steady_state(&params(0.3, 0.8, gc)).unwrap();
            assert!(!s.is_degenerate());
            let m = s.moments();
            assert!(close(m.eta_a, 0.36, 1e-14) && close(m.eta_c, 0.64, 1e-14));
            assert!(close(m.sigma_c.re, 0.48, 1e-14) && m.sigma_c.im.abs() < 1e-15);
            assert!(m.eta_b.abs() < 1e-15);
            assert!(m.sigma_a.norm() < 1e-15 && m.sigma_b.norm() < 1e-15);
        }
        let m = solve_atomic_steady_state(&params(0.2, 0.8, 0.5)).unwrap().moments();
        assert!(close(m.eta_a, 0.2, 1e-14) && close(m.eta_c, 0.8, 1e-14));
        assert!(close(m.sigma_c.re, 0.4, 1e-14));
    }

    #[test]
    fn unpumped_atom_is_flagged() {
        let s = solve_atomic_steady_state(&params(0.0, 0.8, 0.5)).unwrap();
        assert_eq!(s, AtomicSolution::DegeneratePump(AtomicMoments::GROUND));
    }

    #[test]
    fn vacuum_system() {
        let p = params(0.0, 0.8, 0.0);
        let sys = assemble_field_system(&p, &AtomicMoments::GROUND);
        assert_eq!(sys.labels.len(), 20);
        let m = solve_field_moments(&sys).unwrap();
        assert_eq!(m, FieldMoments::VACUUM);
        assert_eq!(m.anti_a - m.n_a, 1.0);
        // With no pump every row involves only its own unknown.
        for i in 0..20 {
            for j in 0..20 {
                if i != j {
                    assert_eq!(sys.matrix[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn bare_parametric_point() {
        let sol = solve(&params(0.3, 0.8, 0.0)).unwrap();
        let f = sol.fields;
        assert!(close(f.n_a, 0.642857, 1e-6) && close(f.n_b, 0.642857, 1e-6));
        assert!((f.ab - f.ba).norm() < 1e-14);
        assert_eq!(sol.observables.commutator, 2.0);
    }

    #[test]
    fn interacting_reference_point() {
        let sol = solve(&params(0.3, 0.8, 0.5)).unwrap();
        let f = sol.fields;
        assert!(close(f.n_a, 0.458035, 1e-6) && close(f.n_b, 0.570536, 1e-6));
        for z in [f.a_sq, f.b_sq, f.adag_b, f.b_adag] {
            assert!(z.norm() < 1e-12);
        }
        assert!(f.ab.re < 0.0 && f.ba.re < 0.0);
        assert!(f.ab.im.abs() < 1e-14 && f.ba.im.abs() < 1e-14);
        let o = sol.observables;
        assert!(close(o.mean_photon, 1.028571, 1e-6));
        assert!(close(o.var_plus, 1.714286, 1e-6));
        assert!(close(o.var_minus, 7.2, 1e-9));
        assert!(close(o.commutator, 2.4, 1e-12));
    }

    #[test]
    fn near_threshold_grows() {
        let near = solve(&params(0.39, 0.8, 0.5)).unwrap().observables.mean_photon;
        let mid = solve(&params(0.3, 0.8, 0.5)).unwrap().observables.mean_photon;
        assert!(near.is_finite() && near > mid);
    }

    #[test]
    fn vacuum_observables() {
        let o = observables_from_moments(&FieldMoments::VACUUM, &AtomicMoments::GROUND, &params(0.0, 0.8, 0.0))
            .unwrap();
        assert_eq!((o.mean_photon, o.var_plus, o.var_minus, o.commutator), (0.0, 2.0, 2.0, 2.0));
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let p = params(0.3, 0.8, 0.5);
        let fields = solve(&p).unwrap().fields;
        let err = observables_from_moments(&fields, &AtomicMoments::GROUND, &p).unwrap_err();
        assert!(matches!(err, MomentError::InconsistentInputs { .. }));
    }

    #[test]
    fn singular_system_is_reported() {
        let sys = LinearSystem {
            matrix: DenseMatrix::zeros(20, 20),
            rhs: vec![Complex64::new(0.0, 0.0); 20],
            labels: FIELD_LABELS.iter().map(|s| s.to_string()).collect(),
        };
        assert!(matches!(solve_field_moments(&sys), Err(MomentError::SingularSystem { .. })));
    }

    #[test]
    fn substitution_and_intermediate_identities() {
        for gc in [0.0, 0.25, 0.5, 1.0] {
            for i in 1..50 {
                let p = params(0.38 * i as f64 / 49.0, 0.8, gc);
                let sol = solve(&p).unwrap();
                let atoms = sol.atoms.moments();
                for (k, r) in field_equation_residuals(&p, &atoms, &sol.fields).iter().enumerate() {
                    assert!(*r < 1e-10, "row {} at gc {gc}, step {i}: {r}", FIELD_MOMENTS[k]);
                }
                for (name, r) in intermediate_identity_residuals(&p, &atoms, &sol.fields) {
                    assert!(r < 1e-10, "{name} at gc {gc}, step {i}: {r}");
                }
                let f = sol.fields;
                assert!(f.anti_a >= f.n_a && f.anti_b >= f.n_b);
                if gc == 0.0 {
                    assert!((f.ab - f.ba).norm() < 1e-12);
                }
            }
        }
    }
}
