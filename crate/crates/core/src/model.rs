//! Model parameters and their validity domain.
//!
//! All rates share one arbitrary inverse-time unit. The stimulated emission
//! decay constant `gamma_c = 4 g^2 / kappa` is the canonical atom-field
//! parameter; the bare coupling `g` is derived from it when needed.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("pump rate epsilon = {epsilon} must satisfy epsilon < kappa/2 = {}", kappa / 2.0)]
    StabilityViolation { epsilon: f64, kappa: f64 },
    #[error("rate {name} = {value} must be positive")]
    NonPositiveRate { name: &'static str, value: f64 },
    #[error("coupling gamma_c = {0} must be non-negative")]
    NegativeCoupling(f64),
    #[error("pump rate epsilon = {0} must be non-negative")]
    NegativePump(f64),
    #[error("sweep grid: {0}")]
    InvalidGrid(String),
}

/// The three physical rates: pump conversion `epsilon`, cavity damping
/// `kappa`, and stimulated emission decay constant `gamma_c`.
///
/// Only constructible through validation, so any value in hand satisfies
/// `kappa > 0`, `0 <= epsilon < kappa/2` and `gamma_c >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    epsilon: f64,
    kappa: f64,
    gamma_c: f64,
}

impl ModelParams {
    pub fn new(epsilon: f64, kappa: f64, gamma_c: f64) -> Result<Self, ParamError> {
        check(epsilon, kappa, gamma_c)?;
        Ok(Self {
            epsilon,
            kappa,
            gamma_c,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }

    /// Same rates with a different pump.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self, ParamError> {
        Self::new(epsilon, self.kappa, self.gamma_c)
    }

    /// Same rates with a different atom-field coupling.
    pub fn with_gamma_c(&self, gamma_c: f64) -> Result<Self, ParamError> {
        Self::new(self.epsilon, self.kappa, gamma_c)
    }

    /// Bare atom-field coupling `g`.
    pub fn coupling(&self) -> f64 {
        coupling_from_gamma_c(self.kappa, self.gamma_c).expect("kappa validated positive")
    }
}

fn check(epsilon: f64, kappa: f64, gamma_c: f64) -> Result<(), ParamError> {
    // `!(x > 0)` also rejects NaN.
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(ParamError::NonPositiveRate {
            name: "kappa",
            value: kappa,
        });
    }
    if !(gamma_c >= 0.0) || !gamma_c.is_finite() {
        return Err(ParamError::NegativeCoupling(gamma_c));
    }
    if !(epsilon >= 0.0) {
        return Err(ParamError::NegativePump(epsilon));
    }
    if !(epsilon < kappa / 2.0) {
        return Err(ParamError::StabilityViolation { epsilon, kappa });
    }
    Ok(())
}

/// Re-checks every invariant; returns the parameters unchanged when they hold.
pub fn validate_params(p: ModelParams) -> Result<ModelParams, ParamError> {
    check(p.epsilon, p.kappa, p.gamma_c)?;
    Ok(p)
}

/// `g = sqrt(gamma_c * kappa / 4)`, the inverse of `gamma_c = 4 g^2 / kappa`.
pub fn coupling_from_gamma_c(kappa: f64, gamma_c: f64) -> Result<f64, ParamError> {
    if !(kappa > 0.0) {
        return Err(ParamError::NonPositiveRate {
            name: "kappa",
            value: kappa,
        });
    }
    if !(gamma_c >= 0.0) {
        return Err(ParamError::NegativeCoupling(gamma_c));
    }
    Ok((gamma_c * kappa / 4.0).sqrt())
}

/// `gamma_c = 4 g^2 / kappa`.
pub fn gamma_c_from_coupling(kappa: f64, g: f64) -> f64 {
    4.0 * g * g / kappa
}

/// Evenly spaced pump values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    epsilon_min: f64,
    epsilon_max: f64,
    steps: usize,
}

impl SweepGrid {
    /// Builds a grid whose endpoints lie inside the stability domain for `kappa`.
    pub fn new(epsilon_min: f64, epsilon_max: f64, steps: usize, kappa: f64) -> Result<Self, ParamError> {
        if steps < 2 {
            return Err(ParamError::InvalidGrid(format!("need at least 2 steps, got {steps}")));
        }
        if !(epsilon_min <= epsilon_max) {
            return Err(ParamError::InvalidGrid(format!(
                "epsilon_min {epsilon_min} exceeds epsilon_max {epsilon_max}"
            )));
        }
        check(epsilon_min, kappa, 0.0)?;
        check(epsilon_max, kappa, 0.0)?;
        Ok(Self {
            epsilon_min,
            epsilon_max,
            steps,
        })
    }

    pub fn epsilon_min(&self) -> f64 {
        self.epsilon_min
    }

    pub fn epsilon_max(&self) -> f64 {
        self.epsilon_max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn values(&self) -> Vec<f64> {
        let span = self.epsilon_max - self.epsilon_min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.epsilon_max
                } else {
                    self.epsilon_min + span * k as f64 / last
                }
            })
            .collect()
    }
}
