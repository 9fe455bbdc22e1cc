use num_complex::Complex64;

use super::density::DensityOperator;
use super::evolve::{evolve_to_steady_state, EvolveOptions};
use super::operators::{build_operator_set, HilbertConfig, OperatorSet};
use super::LindbladError;
use crate::model::ModelParams;
use crate::numerics::{SparseOperator, I};
use crate::observables::Observables;

/// Observables of a simulated state.
///
/// The quadrature variances subtract the first moments, and the vacuum
/// reference is the bosonic value 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedObservables {
    pub observables: Observables,
    /// `⟨a⟩`, `⟨b⟩`.
    pub first_moments: (Complex64, Complex64),
    /// `⟨aa†⟩ − ⟨a†a⟩`, `⟨bb†⟩ − ⟨b†b⟩`; one minus truncation leakage.
    pub mode_commutators: (f64, f64),
    /// `⟨η_a⟩`, `⟨η_b⟩`, `⟨η_c⟩`.
    pub populations: (f64, f64, f64),
    /// `⟨σc⟩`.
    pub sigma_c: Complex64,
    /// Highest-Fock-level populations of modes a and b.
    pub top_populations: (f64, f64),
}

impl SimulatedObservables {
    /// `1 − var_plus/2`.
    pub fn squeezing(&self) -> f64 {
        self.observables.squeezing()
    }
}

pub fn simulated_observables(rho: &DensityOperator, ops: &OperatorSet) -> Result<SimulatedObservables, LindbladError> {
    let ev = |op: &SparseOperator| rho.expectation(op);
    let a_dag = ops.a.adjoint();
    let b_dag = ops.b.adjoint();
    let c = &ops.a + &ops.b;
    let c_dag = c.adjoint();
    let plus = &c_dag + &c;
    let minus = (&c_dag - &c).scale(I);

    let na = ev(&a_dag.matmul(&ops.a))?.re;
    let nb = ev(&b_dag.matmul(&ops.b))?.re;
    let anti_a = ev(&ops.a.matmul(&a_dag))?.re;
    let anti_b = ev(&ops.b.matmul(&b_dag))?.re;
    let variance = |q: &SparseOperator| -> Result<f64, LindbladError> {
        let mean = ev(q)?.re;
        Ok(ev(&q.matmul(q))?.re - mean * mean)
    };
    let commutator = ev(&(&c.matmul(&c_dag) - &c_dag.matmul(&c)))?.re;

    Ok(SimulatedObservables {
        observables: Observables {
            mean_photon: na + nb,
            var_plus: variance(&plus)?,
            var_minus: variance(&minus)?,
            commutator,
            vacuum_level: 2.0,
        },
        first_moments: (ev(&ops.a)?, ev(&ops.b)?),
        mode_commutators: (anti_a - na, anti_b - nb),
        populations: (ev(&ops.eta_a)?.re, ev(&ops.eta_b)?.re, ev(&ops.eta_c)?.re),
        sigma_c: ev(&ops.sigma_c)?,
        top_populations: rho.top_fock_populations(&ops.cfg),
    })
}

/// Change in observables below which two cutoffs are taken to agree.
pub const CUTOFF_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum CutoffOutcome {
    Converged(SimulatedObservables),
    /// The highest Fock level got too populated for this cutoff.
    Insufficient { mode: char, population: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffRun {
    pub fock_cutoff: usize,
    pub outcome: CutoffOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub runs: Vec<CutoffRun>,
    /// `(cutoff, next cutoff, largest change in n̄, var+ or var−)` for each
    /// pair of successive runs that both completed.
    pub changes: Vec<(usize, usize, f64)>,
    /// Smallest cutoff whose observables agree with those of the next
    /// cutoff in the sequence to within [`CUTOFF_AGREEMENT`].
    pub converged_at: Option<usize>,
}

impl ConvergenceReport {
    /// Observables at the converged cutoff.
    pub fn converged_observables(&self) -> Option<&SimulatedObservables> {
        let n = self.converged_at?;
        self.runs.iter().find(|r| r.fock_cutoff == n).and_then(|r| match &r.outcome {
            CutoffOutcome::Converged(o) => Some(o),
            CutoffOutcome::Insufficient { .. } => None,
        })
    }
}

/// Reruns the evolution for each cutoff and compares successive results.
///
/// A cutoff whose top Fock level overflows is recorded as insufficient and
/// the scan continues with the next one; a run that fails to reach a steady
/// state is an error.
pub fn convergence_check(
    p: &ModelParams,
    cutoffs: &[usize],
    opts: &EvolveOptions,
) -> Result<ConvergenceReport, LindbladError> {
    if cutoffs.len() < 2 || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LindbladError::InvalidConfig(format!(
            "need at least two increasing cutoffs, got {cutoffs:?}"
        )));
    }
    let mut runs = Vec::new();
    for &n in cutoffs {
        let ops = build_operator_set(HilbertConfig::new(n)?);
        let outcome = match evolve_to_steady_state(&ops, p, opts) {
            Ok(ev) => {
                let ev = ev.require_converged()?;
                CutoffOutcome::Converged(simulated_observables(&ev.final_density(), &ops)?)
            }
            Err(LindbladError::TruncationOverflow { mode, population, .. }) => {
                CutoffOutcome::Insufficient { mode, population }
            }
            Err(e) => return Err(e),
        };
        runs.push(CutoffRun { fock_cutoff: n, outcome });
    }

    let mut changes = Vec::new();
    let mut converged_at = None;
    for w in runs.windows(2) {
        if let (CutoffOutcome::Converged(prev), CutoffOutcome::Converged(cur)) = (&w[0].outcome, &w[1].outcome) {
            let (x, y) = (prev.observables, cur.observables);
            let change = (x.mean_photon - y.mean_photon)
                .abs()
                .max((x.var_plus - y.var_plus).abs())
                .max((x.var_minus - y.var_minus).abs());
            changes.push((w[0].fock_cutoff, w[1].fock_cutoff, change));
            if converged_at.is_none() && change < CUTOFF_AGREEMENT {
                converged_at = Some(w[0].fock_cutoff);
            }
        }
    }
    Ok(ConvergenceReport {
        runs,
        changes,
        converged_at,
    })
}
