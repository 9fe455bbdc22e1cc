/// Steady-state statistics of the two-mode light `c = a + b`.
///
/// `vacuum_level` is the plus-quadrature variance that squeezing is measured
/// against. The closed forms and the moment solver use `2 + gamma_c/kappa`;
/// a bosonic simulation uses 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub mean_photon: f64,
    pub var_plus: f64,
    pub var_minus: f64,
    /// Expectation of the commutator `[c, c†]`.
    pub commutator: f64,
    pub vacuum_level: f64,
}

impl Observables {
    /// Fractional reduction of the plus-quadrature variance below the vacuum level.
    pub fn squeezing(&self) -> f64 {
        (self.vacuum_level - self.var_plus) / self.vacuum_level
    }

    /// `ΔC+ ΔC-`.
    pub fn uncertainty_product(&self) -> f64 {
        (self.var_plus * self.var_minus).sqrt()
    }
}
