use std::io::Write;

use num_complex::Complex64;

use super::density::DensityOperator;
use super::generator::{CompactFunctional, Layout, Liouvillian};
use super::operators::{build_hamiltonian, OperatorSet};
use super::residuals::moment_equations;
use super::LindbladError;
use crate::format::g9;
use crate::model::ModelParams;
use crate::numerics::{Rk4, StepPlan};

/// Population of the highest Fock level above which the truncation is
/// considered too small.
pub const TRUNCATION_LIMIT: f64 = 1e-4;

/// Moments written to trajectory CSV files, as `(column label, operator)`.
pub const TRAJECTORY_COLUMNS: [(&str, &str); 13] = [
    ("n_a", "a_dag*a"),
    ("anti_a", "a*a_dag"),
    ("n_b", "b_dag*b"),
    ("anti_b", "b*b_dag"),
    ("ab", "a*b"),
    ("ba", "b*a"),
    ("adag_b", "a_dag*b"),
    ("b_adag", "b*a_dag"),
    ("a_sq", "a*a"),
    ("b_sq", "b*b"),
    ("eta_a", "eta_a"),
    ("eta_b", "eta_b"),
    ("eta_c", "eta_c"),
];

/// Every operator whose expectation the moment-equation check needs, plus
/// the columns of [`TRAJECTORY_COLUMNS`].
pub fn default_catalog() -> Vec<String> {
    let mut names: Vec<String> = TRAJECTORY_COLUMNS.iter().map(|(_, op)| op.to_string()).collect();
    for eq in moment_equations(1.0, 1.0, 1.0) {
        names.push(eq.lhs.to_string());
        names.extend(eq.terms.iter().map(|(_, op)| op.to_string()));
    }
    let mut seen = std::collections::HashSet::new();
    names.retain(|n| seen.insert(n.clone()));
    names
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub t_max: f64,
    pub dt: f64,
    pub sample_every: f64,
    /// Early-stop threshold on `max |dρ/dt|`; zero disables early stopping.
    pub tol: f64,
    /// Number of full states kept for after-the-fact checks (besides the
    /// initial and final states).
    pub snapshots: usize,
    /// Operators whose expectation values are recorded at every sample.
    pub catalog: Vec<String>,
}

impl EvolveOptions {
    /// `t_max = 200/κ`, `dt = 0.01/max(κ, g, ε)`, a sample every 100 steps,
    /// `tol = 1e-8`.
    pub fn for_params(p: &ModelParams) -> Self {
        let dt = default_dt(p);
        let t_max = 200.0 / p.kappa();
        let plan = StepPlan::new(t_max, dt, dt).expect("defaults are positive");
        Self {
            t_max,
            dt,
            sample_every: 100.0 * plan.h,
            tol: 1e-8,
            snapshots: 8,
            catalog: default_catalog(),
        }
    }
}

pub fn default_dt(p: &ModelParams) -> f64 {
    0.01 / p.kappa().max(p.coupling()).max(p.epsilon())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convergence {
    Converged { t: f64 },
    NotConverged { max_derivative: f64 },
}

/// Expectation values recorded at uniformly spaced sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    /// `values[s][k]` is the expectation of `names[k]` at `times[s]`.
    pub values: Vec<Vec<Complex64>>,
    pub traces: Vec<f64>,
    pub derivative_norms: Vec<f64>,
    /// Highest-Fock-level populations of modes a and b.
    pub top_populations: Vec<(f64, f64)>,
}

impl Trajectory {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn series(&self, name: &str) -> Option<Vec<Complex64>> {
        let k = self.index_of(name)?;
        Some(self.values.iter().map(|v| v[k]).collect())
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.traces.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Writes `t` and the real and imaginary parts of the
    /// [`TRAJECTORY_COLUMNS`] moments as CSV.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<(), LindbladError> {
        let mut columns = Vec::new();
        for (label, op) in TRAJECTORY_COLUMNS {
            let k = self
                .index_of(op)
                .ok_or_else(|| LindbladError::UnknownOperator(op.to_string()))?;
            columns.push((label, k));
        }
        let mut header = String::from("t");
        for (label, _) in &columns {
            header.push_str(&format!(",re_{label},im_{label}"));
        }
        writeln!(out, "{header}")?;
        for (t, row) in self.times.iter().zip(&self.values) {
            let mut line = g9(*t);
            for &(_, k) in &columns {
                line.push(',');
                line.push_str(&g9(row[k].re));
                line.push(',');
                line.push_str(&g9(row[k].im));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub status: Convergence,
    pub trajectory: Trajectory,
    layout: Layout,
    final_state: Vec<Complex64>,
    snapshots: Vec<(f64, Vec<Complex64>)>,
}

impl Evolution {
    pub fn is_converged(&self) -> bool {
        matches!(self.status, Convergence::Converged { .. })
    }

    /// Turns a non-converged run into an error.
    pub fn require_converged(self) -> Result<Self, LindbladError> {
        match self.status {
            Convergence::Converged { .. } => Ok(self),
            Convergence::NotConverged { max_derivative } => Err(LindbladError::NotConverged {
                t: self.final_time(),
                max_derivative,
            }),
        }
    }

    pub fn final_time(&self) -> f64 {
        *self.trajectory.times.last().expect("trajectory holds the initial sample")
    }

    pub fn final_density(&self) -> DensityOperator {
        self.layout.expand(&self.final_state)
    }

    /// Full states kept along the run, including the initial and final ones.
    pub fn snapshot_densities(&self) -> Vec<(f64, DensityOperator)> {
        self.snapshots
            .iter()
            .map(|(t, y)| (*t, self.layout.expand(y)))
            .collect()
    }

    /// Number of independently stored density-matrix entries.
    pub fn active_entries(&self) -> usize {
        self.layout.len()
    }
}

struct Monitors {
    kernels: Vec<CompactFunctional>,
    diagonal: Vec<usize>,
    top_a: Vec<usize>,
    top_b: Vec<usize>,
}

impl Monitors {
    fn new(ops: &OperatorSet, layout: &Layout, catalog: &[String]) -> Result<Self, LindbladError> {
        let kernels = catalog
            .iter()
            .map(|name| Ok(CompactFunctional::expectation(layout, &ops.product(name)?)))
            .collect::<Result<Vec<_>, LindbladError>>()?;
        let top = ops.cfg.fock_cutoff() - 1;
        let mut diagonal = Vec::new();
        let mut top_a = Vec::new();
        let mut top_b = Vec::new();
        for (k, i) in layout.diagonal() {
            diagonal.push(k);
            let (_, na, nb) = ops.cfg.decompose(i);
            if na == top {
                top_a.push(k);
            }
            if nb == top {
                top_b.push(k);
            }
        }
        Ok(Self {
            kernels,
            diagonal,
            top_a,
            top_b,
        })
    }

    fn sum(idx: &[usize], y: &[Complex64]) -> f64 {
        idx.iter().map(|&k| y[k].re).sum()
    }
}

fn validate(opts: &EvolveOptions) -> Result<StepPlan, LindbladError> {
    if !(opts.t_max > 0.0 && opts.t_max.is_finite()) {
        return Err(LindbladError::InvalidOptions(format!("t_max must be positive, got {}", opts.t_max)));
    }
    if !(opts.tol >= 0.0) {
        return Err(LindbladError::InvalidOptions(format!("tol must be non-negative, got {}", opts.tol)));
    }
    Ok(StepPlan::new(opts.t_max, opts.dt, opts.sample_every)?)
}

/// Integrates the master equation from the atom in `|c⟩` and both modes in
/// vacuum until `max |dρ/dt| < tol` at a sample time, or until `t_max`.
///
/// Reaching `t_max` is reported through [`Evolution::status`], not as an
/// error. A highest-Fock-level population above [`TRUNCATION_LIMIT`] at any
/// sample aborts with [`LindbladError::TruncationOverflow`].
pub fn evolve_to_steady_state(
    ops: &OperatorSet,
    p: &ModelParams,
    opts: &EvolveOptions,
) -> Result<Evolution, LindbladError> {
    let plan = validate(opts)?;
    let h = build_hamiltonian(ops, p, p.coupling());
    let initial = DensityOperator::ground(&ops.cfg);
    let lv = Liouvillian::new(&h, ops, p.kappa(), &initial);
    let layout = lv.layout().clone();
    let monitors = Monitors::new(ops, &layout, &opts.catalog)?;

    let samples_planned = plan.steps / plan.sample_stride + 1;
    let snapshot_stride = (samples_planned / opts.snapshots.max(1)).max(1);

    let mut y = layout.compress(&initial);
    let mut dy = vec![Complex64::new(0.0, 0.0); y.len()];
    let mut trajectory = Trajectory {
        times: Vec::new(),
        names: opts.catalog.clone(),
        values: Vec::new(),
        traces: Vec::new(),
        derivative_norms: Vec::new(),
        top_populations: Vec::new(),
    };
    let mut snapshots = Vec::new();

    // Records a sample; returns the derivative norm.
    let record = |t: f64, y: &[Complex64], trajectory: &mut Trajectory, dy: &mut [Complex64]| {
        lv.apply(y, dy);
        let norm = dy.iter().map(|z| z.norm()).fold(0.0, f64::max);
        trajectory.times.push(t);
        trajectory.values.push(monitors.kernels.iter().map(|k| k.apply(y)).collect());
        trajectory.traces.push(Monitors::sum(&monitors.diagonal, y));
        trajectory.derivative_norms.push(norm);
        let tops = (Monitors::sum(&monitors.top_a, y), Monitors::sum(&monitors.top_b, y));
        trajectory.top_populations.push(tops);
        (norm, tops)
    };

    let check_top = |t: f64, (pa, pb): (f64, f64)| -> Result<(), LindbladError> {
        for (mode, pop) in [('a', pa), ('b', pb)] {
            if pop > TRUNCATION_LIMIT {
                return Err(LindbladError::TruncationOverflow { mode, population: pop, t });
            }
        }
        Ok(())
    };

    let (mut norm, tops) = record(0.0, &y, &mut trajectory, &mut dy);
    check_top(0.0, tops)?;
    snapshots.push((0.0, y.clone()));
    let mut status = Convergence::NotConverged { max_derivative: norm };
    if norm < opts.tol {
        status = Convergence::Converged { t: 0.0 };
    } else {
        let mut stepper = Rk4::new(y.len());
        let mut rhs = |_t: f64, y: &[Complex64], dy: &mut [Complex64]| lv.apply(y, dy);
        for n in 1..=plan.steps {
            stepper.step(&mut rhs, (n - 1) as f64 * plan.h, &mut y, plan.h);
            if n % plan.sample_stride != 0 && n != plan.steps {
                continue;
            }
            let t = n as f64 * plan.h;
            if !y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(crate::numerics::NumericsError::NonFiniteState { t }.into());
            }
            let tops;
            (norm, tops) = record(t, &y, &mut trajectory, &mut dy);
            check_top(t, tops)?;
            let sample = trajectory.times.len() - 1;
            if norm < opts.tol {
                status = Convergence::Converged { t };
                break;
            }
            status = Convergence::NotConverged { max_derivative: norm };
            if sample.is_multiple_of(snapshot_stride) && n != plan.steps {
                snapshots.push((t, y.clone()));
            }
        }
    }
    let t_end = *trajectory.times.last().expect("initial sample recorded");
    if snapshots.last().map(|s| s.0) != Some(t_end) {
        snapshots.push((t_end, y.clone()));
    }
    Ok(Evolution {
        status,
        trajectory,
        layout,
        final_state: y,
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::operators::{build_operator_set, HilbertConfig};

    fn quick_opts(t_max: f64) -> EvolveOptions {
        EvolveOptions {
            t_max,
            dt: 0.01,
            sample_every: 0.5,
            tol: 1e-8,
            snapshots: 4,
            catalog: default_catalog(),
        }
    }

    #[test]
    fn default_options() {
        let p = ModelParams::new(0.2, 0.8, 0.1).unwrap();
        let o = EvolveOptions::for_params(&p);
        assert_eq!(o.t_max, 250.0);
        assert!((o.dt - 0.0125).abs() < 1e-15);
        assert!((o.sample_every - 1.25).abs() < 1e-12);
        let catalog = default_catalog();
        assert!(catalog.contains(&"sigma_a_dag*a".to_string()));
        assert_eq!(catalog.len(), catalog.iter().collect::<std::collections::HashSet<_>>().len());
    }

    #[test]
    fn dark_state_returns_immediately() {
        let ops = build_operator_set(HilbertConfig::new(4).unwrap());
        let p = ModelParams::new(0.0, 0.8, 0.0).unwrap();
        let ev = evolve_to_steady_state(&ops, &p, &quick_opts(10.0)).unwrap();
        assert_eq!(ev.status, Convergence::Converged { t: 0.0 });
        assert_eq!(ev.final_density(), DensityOperator::ground(&ops.cfg));
        assert_eq!(ev.trajectory.times, vec![0.0]);
    }

    #[test]
    fn short_run_keeps_invariants() {
        let ops = build_operator_set(HilbertConfig::new(4).unwrap());
        let p = ModelParams::new(0.1, 0.8, 0.5).unwrap();
        let ev = evolve_to_steady_state(&ops, &p, &quick_opts(5.0)).unwrap();
        assert!(!ev.is_converged());
        assert_eq!(ev.trajectory.times.len(), 11);
        assert!(ev.trajectory.max_trace_drift() < 1e-12);
        let snaps = ev.snapshot_densities();
        assert!(snaps.len() >= 5);
        for (_, rho) in &snaps {
            rho.check_invariants().unwrap();
        }
        assert!(ev.require_converged().is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let ops = build_operator_set(HilbertConfig::new(2).unwrap());
        let p = ModelParams::new(0.35, 0.8, 0.0).unwrap();
        let err = evolve_to_steady_state(&ops, &p, &quick_opts(20.0)).unwrap_err();
        assert!(matches!(err, LindbladError::TruncationOverflow { .. }));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let ops = build_operator_set(HilbertConfig::new(3).unwrap());
        let p = ModelParams::new(0.1, 0.8, 0.1).unwrap();
        let ev = evolve_to_steady_state(&ops, &p, &quick_opts(1.0)).unwrap();
        let mut buf = Vec::new();
        ev.trajectory.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("t,re_n_a,im_n_a,re_anti_a"));
        assert_eq!(header.split(',').count(), 27);
        assert_eq!(lines.count(), 3);
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }
}
