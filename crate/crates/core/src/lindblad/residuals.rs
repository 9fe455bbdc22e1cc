//! Exact equations of motion for first and second moments, checked against
//! a simulated trajectory by centered finite differences.
//!
//! Under the master equation each listed `d⟨X⟩/dt` is a fixed linear
//! combination of other expectation values (including mixed atom-field
//! products such as `⟨σa† a⟩`). Evaluating both sides on the simulated
//! trajectory leaves only the finite-difference error, which is `O(h²)` in
//! the sample spacing `h`, plus a truncation floor from the finite Fock space.

use num_complex::Complex64;

use super::evolve::Trajectory;
use super::LindbladError;
use crate::model::ModelParams;

/// `d⟨lhs⟩/dt = Σ coef·⟨op⟩ + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEquation {
    pub lhs: &'static str,
    pub terms: Vec<(f64, &'static str)>,
    pub constant: f64,
}

impl MomentEquation {
    pub fn label(&self) -> String {
        format!("d<{}>/dt", self.lhs)
    }
}

fn eq(lhs: &'static str, terms: Vec<(f64, &'static str)>, constant: f64) -> MomentEquation {
    MomentEquation { lhs, terms, constant }
}

/// The twelve cavity-moment and six atomic-moment equations.
pub fn moment_equations(kappa: f64, epsilon: f64, g: f64) -> Vec<MomentEquation> {
    let (k, e) = (kappa, epsilon);
    vec![
        eq("a", vec![(-k / 2.0, "a"), (-e, "b_dag"), (-g, "sigma_a")], 0.0),
        eq("b", vec![(-k / 2.0, "b"), (-e, "a_dag"), (-g, "sigma_b")], 0.0),
        eq(
            "a_dag*a",
            vec![(-k, "a_dag*a"), (-e, "b*a"), (-e, "a_dag*b_dag"), (-g, "sigma_a_dag*a"), (-g, "a_dag*sigma_a")],
            0.0,
        ),
        eq(
            "a*a_dag",
            vec![(-k, "a*a_dag"), (-e, "a*b"), (-e, "b_dag*a_dag"), (-g, "a*sigma_a_dag"), (-g, "sigma_a*a_dag")],
            k,
        ),
        eq(
            "b_dag*b",
            vec![(-k, "b_dag*b"), (-e, "a*b"), (-e, "b_dag*a_dag"), (-g, "sigma_b_dag*b"), (-g, "b_dag*sigma_b")],
            0.0,
        ),
        eq(
            "b*b_dag",
            vec![(-k, "b*b_dag"), (-e, "b*a"), (-e, "a_dag*b_dag"), (-g, "b*sigma_b_dag"), (-g, "sigma_b*b_dag")],
            k,
        ),
        eq(
            "a*b",
            vec![(-k, "a*b"), (-e, "a_dag*a"), (-e, "b_dag*b"), (-g, "sigma_a*b"), (-g, "a*sigma_b")],
            -e,
        ),
        eq(
            "b*a",
            vec![(-k, "b*a"), (-e, "a_dag*a"), (-e, "b_dag*b"), (-g, "b*sigma_a"), (-g, "sigma_b*a")],
            -e,
        ),
        eq(
            "a*a",
            vec![(-k, "a*a"), (-e, "a*b_dag"), (-e, "b_dag*a"), (-g, "a*sigma_a"), (-g, "sigma_a*a")],
            0.0,
        ),
        eq(
            "b*b",
            vec![(-k, "b*b"), (-e, "b*a_dag"), (-e, "a_dag*b"), (-g, "b*sigma_b"), (-g, "sigma_b*b")],
            0.0,
        ),
        eq(
            "a_dag*b",
            vec![(-k, "a_dag*b"), (-e, "a_dag*a_dag"), (-e, "b*b"), (-g, "sigma_a_dag*b"), (-g, "a_dag*sigma_b")],
            0.0,
        ),
        eq(
            "b*a_dag",
            vec![(-k, "b*a_dag"), (-e, "a_dag*a_dag"), (-e, "b*b"), (-g, "b*sigma_a_dag"), (-g, "sigma_b*a_dag")],
            0.0,
        ),
        eq("sigma_a", vec![(g, "eta_b*a"), (-g, "eta_a*a"), (g, "b_dag*sigma_c")], 0.0),
        eq("sigma_b", vec![(-g, "a_dag*sigma_c"), (g, "eta_c*b"), (-g, "eta_b*b")], 0.0),
        eq("sigma_c", vec![(g, "sigma_b*a"), (-g, "sigma_a*b")], 0.0),
        eq("eta_a", vec![(g, "sigma_a_dag*a"), (g, "a_dag*sigma_a")], 0.0),
        eq(
            "eta_b",
            vec![(g, "sigma_b_dag*b"), (g, "b_dag*sigma_b"), (-g, "sigma_a_dag*a"), (-g, "a_dag*sigma_a")],
            0.0,
        ),
        eq("eta_c", vec![(-g, "sigma_b_dag*b"), (-g, "b_dag*sigma_b")], 0.0),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualEntry {
    pub equation: String,
    pub max_residual: f64,
    /// Time at which the maximum occurs.
    pub at: f64,
}

/// Per-equation maximum absolute residual over the interior sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Finite-difference spacing used.
    pub spacing: f64,
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.max_residual).fold(0.0, f64::max)
    }

    pub fn get(&self, equation: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.equation == equation)
    }

    pub fn equations(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.equation.as_str()).collect()
    }
}

/// Residuals using the trajectory's own sample spacing.
pub fn moment_residuals(trajectory: &Trajectory, p: &ModelParams) -> Result<ResidualReport, LindbladError> {
    moment_residuals_with_stride(trajectory, p, 1)
}

/// Residuals using every `stride`-th sample, i.e. spacing `stride·Δt_sample`.
pub fn moment_residuals_with_stride(
    trajectory: &Trajectory,
    p: &ModelParams,
    stride: usize,
) -> Result<ResidualReport, LindbladError> {
    let stride = stride.max(1);
    let times = &trajectory.times;
    // Drop a trailing sample that is off the uniform grid (a run whose
    // length is not a multiple of the sample interval).
    let mut n = times.len();
    if n < 3 {
        return Err(LindbladError::TooFewSamples { found: n });
    }
    let dt = times[1] - times[0];
    if ((times[n - 1] - times[n - 2]) - dt).abs() > 1e-9 * dt {
        n -= 1;
    }
    for w in times[..n].windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(LindbladError::NonUniformSampling);
        }
    }
    let usable: Vec<usize> = (0..n).step_by(stride).collect();
    if usable.len() < 3 {
        return Err(LindbladError::TooFewSamples { found: usable.len() });
    }
    let h = dt * stride as f64;

    let idx = |name: &str| {
        trajectory
            .index_of(name)
            .ok_or_else(|| LindbladError::UnknownOperator(name.to_string()))
    };
    let mut entries = Vec::new();
    for equation in moment_equations(p.kappa(), p.epsilon(), p.coupling()) {
        let lhs = idx(equation.lhs)?;
        let terms = equation
            .terms
            .iter()
            .map(|&(c, op)| Ok((c, idx(op)?)))
            .collect::<Result<Vec<_>, LindbladError>>()?;
        let mut worst = 0.0;
        let mut at = times[usable[1]];
        for w in usable.windows(3) {
            let (prev, mid, next) = (&trajectory.values[w[0]], &trajectory.values[w[1]], &trajectory.values[w[2]]);
            let fd = (next[lhs] - prev[lhs]) / (2.0 * h);
            let rhs: Complex64 =
                terms.iter().map(|&(c, k)| mid[k] * c).sum::<Complex64>() + equation.constant;
            let r = (fd - rhs).norm();
            if r > worst {
                worst = r;
                at = times[w[1]];
            }
        }
        entries.push(ResidualEntry {
            equation: equation.label(),
            max_residual: worst,
            at,
        });
    }
    Ok(ResidualReport { spacing: h, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::evolve::{default_catalog, evolve_to_steady_state, EvolveOptions};
    use crate::lindblad::operators::{build_operator_set, HilbertConfig};

    #[test]
    fn eighteen_equations() {
        let eqs = moment_equations(0.8, 0.2, 0.1);
        assert_eq!(eqs.len(), 18);
        let labels: Vec<String> = eqs.iter().map(MomentEquation::label).collect();
        assert!(labels.contains(&"d<sigma_c>/dt".to_string()));
        assert!(labels.contains(&"d<a_dag*a>/dt".to_string()));
    }

    #[test]
    fn static_dark_state_has_zero_residuals() {
        let ops = build_operator_set(HilbertConfig::new(3).unwrap());
        let p = ModelParams::new(0.0, 0.8, 0.0).unwrap();
        let opts = EvolveOptions {
            t_max: 1.0,
            dt: 0.01,
            sample_every: 0.1,
            tol: 0.0,
            snapshots: 2,
            catalog: default_catalog(),
        };
        let ev = evolve_to_steady_state(&ops, &p, &opts).unwrap();
        let report = moment_residuals(&ev.trajectory, &p).unwrap();
        assert_eq!(report.entries.len(), 18);
        assert_eq!(report.max_residual(), 0.0);
    }

    #[test]
    fn short_trajectories_are_rejected() {
        let ops = build_operator_set(HilbertConfig::new(3).unwrap());
        let p = ModelParams::new(0.0, 0.8, 0.0).unwrap();
        let opts = EvolveOptions {
            t_max: 1.0,
            dt: 0.01,
            sample_every: 0.1,
            tol: 1e-8,
            snapshots: 2,
            catalog: default_catalog(),
        };
        let ev = evolve_to_steady_state(&ops, &p, &opts).unwrap();
        assert!(matches!(
            moment_residuals(&ev.trajectory, &p),
            Err(LindbladError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn residuals_shrink_quadratically() {
        let ops = build_operator_set(HilbertConfig::new(10).unwrap());
        let p = ModelParams::new(0.2, 0.8, 0.5).unwrap();
        let opts = EvolveOptions {
            t_max: 5.0,
            dt: 1e-3,
            sample_every: 0.025,
            tol: 0.0,
            snapshots: 2,
            catalog: default_catalog(),
        };
        let ev = evolve_to_steady_state(&ops, &p, &opts).unwrap();
        let coarse = moment_residuals_with_stride(&ev.trajectory, &p, 2).unwrap();
        let fine = moment_residuals_with_stride(&ev.trajectory, &p, 1).unwrap();
        assert!((coarse.spacing - 0.05).abs() < 1e-12);
        for (c, f) in coarse.entries.iter().zip(&fine.entries) {
            assert!(c.max_residual < 1e-3, "{} {}", c.equation, c.max_residual);
            if c.max_residual > 1e-9 {
                let ratio = c.max_residual / f.max_residual;
                assert!((3.0..=5.0).contains(&ratio), "{}: ratio {ratio}", c.equation);
            }
        }
    }
}
