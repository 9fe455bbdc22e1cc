//! Closed-form steady-state observables.
//!
//! Everything here is a rational function of `epsilon`, `kappa` and `gamma_c`
//! and is evaluated directly in double precision. The atomic state enters the
//! field formulas only through the populations and the real part of the
//! two-photon coherence `⟨σc⟩`, where `σc = |c⟩⟨a|`.

use crate::model::ModelParams;
use crate::observables::Observables;

/// Steady-state atomic populations and two-photon coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicSteadyState {
    /// Top level `|a⟩`.
    pub eta_a: f64,
    /// Intermediate level `|b⟩`.
    pub eta_b: f64,
    /// Bottom level `|c⟩`.
    pub eta_c: f64,
    /// `⟨|c⟩⟨a|⟩`, real at steady state.
    pub sigma_c: f64,
}

impl AtomicSteadyState {
    /// Atom sitting in the bottom level.
    pub const GROUND: Self = Self {
        eta_a: 0.0,
        eta_b: 0.0,
        eta_c: 1.0,
        sigma_c: 0.0,
    };

    pub fn population_sum(&self) -> f64 {
        self.eta_a + self.eta_b + self.eta_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariances {
    pub var_plus: f64,
    pub var_minus: f64,
}

pub fn atomic_steady_state(p: &ModelParams) -> AtomicSteadyState {
    let (e, k) = (p.epsilon(), p.kappa());
    let d = k * k + 4.0 * e * e;
    AtomicSteadyState {
        eta_a: 4.0 * e * e / d,
        eta_b: 0.0,
        eta_c: k * k / d,
        sigma_c: 2.0 * e * k / d,
    }
}

/// `n̄ = 2ε²/(κ²−4ε²) · [2 − κγc/(κ²+4ε²)]`.
pub fn mean_photon_number(p: &ModelParams) -> f64 {
    let (e, k, gc) = (p.epsilon(), p.kappa(), p.gamma_c());
    2.0 * e * e / (k * k - 4.0 * e * e) * (2.0 - k * gc / (k * k + 4.0 * e * e))
}

/// `(⟨a†a⟩, ⟨b†b⟩)` at the atomic steady state.
pub fn mode_occupations(p: &ModelParams) -> (f64, f64) {
    mode_occupations_for(p, &atomic_steady_state(p))
}

/// `(⟨a†a⟩, ⟨b†b⟩)` for arbitrary atomic expectation values.
pub fn mode_occupations_for(p: &ModelParams, atoms: &AtomicSteadyState) -> (f64, f64) {
    let (e, k, gc) = (p.epsilon(), p.kappa(), p.gamma_c());
    let (e2, k2) = (e * e, k * k);
    let base = 2.0 * e2 / (k2 - 4.0 * e2);
    // 4g² = κ γc
    let pref = k * gc / (k2 * (k2 - 4.0 * e2).powi(2));
    let coherence = 2.0 * atoms.sigma_c;
    let AtomicSteadyState {
        eta_a, eta_b, eta_c, ..
    } = *atoms;

    let n_a = base
        + pref
            * ((k2 * k2 - 4.0 * e2 * e2) * eta_a
                + 2.0 * e2 * (4.0 * e2 + k2) * eta_b
                + 2.0 * e2 * (k2 - 2.0 * e2) * eta_c
                - 2.0 * e * k * (k2 - 2.0 * e2) * coherence);
    let n_b = base
        + pref
            * (2.0 * e2 * (k2 + 2.0 * e2) * eta_a
                + (k2 + 4.0 * e2) * (k2 - 2.0 * e2) * eta_b
                + 4.0 * e2 * e2 * eta_c
                - 4.0 * e2 * e * k * coherence);
    (n_a, n_b)
}

/// `(⟨aa†⟩, ⟨bb†⟩)` at the atomic steady state.
pub fn antinormal_occupations(p: &ModelParams) -> (f64, f64) {
    antinormal_occupations_for(p, &atomic_steady_state(p))
}

/// `(⟨aa†⟩, ⟨bb†⟩)` for arbitrary atomic expectation values.
///
/// The `⟨η_c⟩` coefficient of `⟨bb†⟩` enters with a plus sign; that is the
/// sign for which `⟨bb†⟩ - ⟨b†b⟩` and `⟨aa†⟩ - ⟨a†a⟩` add up to the
/// commutator of [`commutator_expectation`].
pub fn antinormal_occupations_for(p: &ModelParams, atoms: &AtomicSteadyState) -> (f64, f64) {
    let (e, k, gc) = (p.epsilon(), p.kappa(), p.gamma_c());
    let (e2, k2) = (e * e, k * k);
    let base = 1.0 + 2.0 * e2 / (k2 - 4.0 * e2);
    let pref = k * gc / (k2 * (k2 - 4.0 * e2).powi(2));
    let coherence = 2.0 * atoms.sigma_c;
    let AtomicSteadyState {
        eta_a, eta_b, eta_c, ..
    } = *atoms;

    let anti_a = base
        + pref
            * (2.0 * e2 * (k2 + 2.0 * e2) * eta_a
                + (k2 + 4.0 * e2) * (k2 - 2.0 * e2) * eta_b
                + 4.0 * e2 * e2 * eta_c
                - 4.0 * e2 * e * k * coherence);
    let anti_b = base
        + pref
            * (4.0 * e2 * (k2 - e2) * eta_a
                + 2.0 * e2 * (4.0 * e2 + k2) * eta_b
                + (k2 * k2 - 2.0 * e2 * (k2 + 2.0 * e2)) * eta_c
                - 2.0 * e * k * (k2 - 2.0 * e2) * coherence);
    (anti_a, anti_b)
}

/// `⟨[c, c†]⟩ = 2 + κγc (⟨η_c⟩ − ⟨η_a⟩)/(κ² − 4ε²)`.
pub fn commutator_expectation(p: &ModelParams, atoms: &AtomicSteadyState) -> f64 {
    let (e, k, gc) = (p.epsilon(), p.kappa(), p.gamma_c());
    2.0 + k * gc * (atoms.eta_c - atoms.eta_a) / (k * k - 4.0 * e * e)
}

/// Plus/minus quadrature variances of the two-mode light.
///
/// The atomic contribution is written in factored form,
/// `(γc/κ)·[1 ± 2ε(κ² ∓ 2εκ − 4ε²)/((κ² + 4ε²)(κ ± 2ε))]`, which is the
/// familiar bracket over `(κ² + 4ε²)(κ² − 4ε²)²` with the common
/// `(κ ∓ 2ε)²` cancelled. It makes the `ε = 0` value `2 + γc/κ` exact.
pub fn quadrature_variances(p: &ModelParams) -> QuadratureVariances {
    let (e, k, gc) = (p.epsilon(), p.kappa(), p.gamma_c());
    let (e2, k2) = (e * e, k * k);
    let atom = gc / k;
    let plus_atomic = 2.0 * e * (k2 - 2.0 * e * k - 4.0 * e2) / ((k2 + 4.0 * e2) * (k + 2.0 * e));
    let minus_atomic = 2.0 * e * (k2 + 2.0 * e * k - 4.0 * e2) / ((k2 + 4.0 * e2) * (k - 2.0 * e));

    QuadratureVariances {
        var_plus: 2.0 - 4.0 * e / (k + 2.0 * e) + atom * (1.0 + plus_atomic),
        var_minus: 2.0 + 4.0 * e / (k - 2.0 * e) + atom * (1.0 - minus_atomic),
    }
}

/// Quadrature variance at `epsilon = 0`: `2 + γc/κ`.
pub fn vacuum_variance(p: &ModelParams) -> f64 {
    2.0 + p.gamma_c() / p.kappa()
}

/// Plus-quadrature squeezing relative to [`vacuum_variance`].
pub fn squeezing(p: &ModelParams) -> f64 {
    let vacuum = vacuum_variance(p);
    (vacuum - quadrature_variances(p).var_plus) / vacuum
}

/// Squeezing without the atom, `2ε/(κ + 2ε)`; tends to 1/2 at threshold.
pub fn bare_squeezing(p: &ModelParams) -> f64 {
    let (e, k) = (p.epsilon(), p.kappa());
    2.0 * e / (k + 2.0 * e)
}

/// Lower bound on `ΔC+ ΔC-`: `|2 + κγc/(κ² + 4ε²)|`.
pub fn uncertainty_bound(p: &ModelParams) -> f64 {
    let (e, k, gc) = (p.epsilon(), p.kappa(), p.gamma_c());
    (2.0 + k * gc / (k * k + 4.0 * e * e)).abs()
}

/// All closed-form observables at once.
pub fn observables(p: &ModelParams) -> Observables {
    let v = quadrature_variances(p);
    Observables {
        mean_photon: mean_photon_number(p),
        var_plus: v.var_plus,
        var_minus: v.var_minus,
        commutator: uncertainty_bound(p),
        vacuum_level: vacuum_variance(p),
    }
}
