use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use subharmonic::analytic;
use subharmonic::lindblad::{
    build_operator_set, default_dt, evolve_to_steady_state, moment_residuals, simulated_observables, Convergence,
    EvolveOptions, HilbertConfig, LindbladError,
};
use subharmonic::moment_solver::{self, MomentError};
use subharmonic::numerics::StepPlan;
use subharmonic::verification::{run_verification, Analytic, Bound, Check, Report, Selection};
use subharmonic::{ModelParams, ParamError, SweepGrid};

use crate::table::{emit, Table};

/// Process exit status for each way a run can end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    VerificationFailed = 1,
    Usage = 2,
    Numerical = 3,
}

/// A failed run: the message to print and the status to exit with.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            status: Status::Usage,
            error: error.into(),
        }
    }

    pub fn numerical(error: impl Into<anyhow::Error>) -> Self {
        Self {
            status: Status::Numerical,
            error: error.into(),
        }
    }
}

impl From<ParamError> for Failure {
    fn from(e: ParamError) -> Self {
        Self::usage(e)
    }
}

impl From<MomentError> for Failure {
    fn from(e: MomentError) -> Self {
        Self::numerical(e)
    }
}

impl From<LindbladError> for Failure {
    fn from(e: LindbladError) -> Self {
        match e {
            LindbladError::InvalidConfig(_) | LindbladError::InvalidOptions(_) | LindbladError::Param(_) => {
                Self::usage(e)
            }
            LindbladError::Numerics(subharmonic::numerics::NumericsError::InvalidStep(_)) => Self::usage(e),
            _ => Self::numerical(e),
        }
    }
}

pub type Outcome = Result<Status, Failure>;

/// Pump range shared by every sweep-type command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub eps_min: f64,
    pub eps_max: f64,
    pub steps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            eps_min: 0.0,
            eps_max: 0.35,
            steps: 50,
        }
    }
}

impl GridSpec {
    fn grid(&self, kappa: f64) -> Result<SweepGrid, ParamError> {
        SweepGrid::new(self.eps_min, self.eps_max, self.steps, kappa)
    }
}

fn write_out(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    emit(text, out.map(PathBuf::as_path))
        .with_context(|| match out {
            Some(p) => format!("cannot write {}", p.display()),
            None => "cannot write to stdout".to_string(),
        })
        .map_err(Failure::usage)
}

fn gamma_label(gc: f64) -> String {
    format!("nbar[gamma_c={gc}]")
}

/// Mean photon number against ε, one column per γc.
pub fn figure2_table(kappa: f64, gamma_c: &[f64], grid: &GridSpec) -> Result<Table, ParamError> {
    let grid = grid.grid(kappa)?;
    let mut header = vec!["epsilon".to_string()];
    header.extend(gamma_c.iter().map(|&gc| gamma_label(gc)));
    let mut table = Table::new(header);
    for e in grid.values() {
        let mut row = vec![e];
        for &gc in gamma_c {
            row.push(analytic::mean_photon_number(&ModelParams::new(e, kappa, gc)?));
        }
        table.push(row);
    }
    Ok(table)
}

/// Plus and minus quadrature variances with the vacuum reference.
pub fn figure3_table(kappa: f64, gamma_c: f64, grid: &GridSpec) -> Result<Table, ParamError> {
    let grid = grid.grid(kappa)?;
    let mut table = Table::new(["epsilon", "var_plus", "var_minus", "vacuum_level"]);
    for e in grid.values() {
        let p = ModelParams::new(e, kappa, gamma_c)?;
        let v = analytic::quadrature_variances(&p);
        table.push(vec![e, v.var_plus, v.var_minus, analytic::vacuum_variance(&p)]);
    }
    Ok(table)
}

/// Squeezing with and without the atom.
pub fn figure4_table(kappa: f64, gamma_c: f64, grid: &GridSpec) -> Result<Table, ParamError> {
    let grid = grid.grid(kappa)?;
    let mut table = Table::new(["epsilon", "S_interacting", "S_bare"]);
    for e in grid.values() {
        let p = ModelParams::new(e, kappa, gamma_c)?;
        table.push(vec![e, analytic::squeezing(&p), analytic::bare_squeezing(&p)]);
    }
    Ok(table)
}

pub const SWEEP_COLUMNS: [&str; 10] = [
    "epsilon",
    "mean_photon",
    "n_a",
    "n_b",
    "var_plus",
    "var_minus",
    "vacuum_level",
    "squeezing",
    "uncertainty_bound",
    "oracle_max_rel_diff",
];

/// Every closed-form observable, with the largest relative difference
/// from the moment solver in the last column.
pub fn sweep_table(kappa: f64, gamma_c: f64, grid: &GridSpec) -> Result<Table, Failure> {
    let grid = grid.grid(kappa)?;
    let mut table = Table::new(SWEEP_COLUMNS);
    for e in grid.values() {
        let p = ModelParams::new(e, kappa, gamma_c)?;
        let o = analytic::observables(&p);
        let (na, nb) = analytic::mode_occupations(&p);
        let s = analytic::squeezing(&p);
        let oracle = moment_solver::solve(&p)?;
        let rel = subharmonic::verification::relative_error;
        let diff = [
            rel(o.mean_photon, oracle.observables.mean_photon),
            rel(na, oracle.fields.n_a),
            rel(nb, oracle.fields.n_b),
            rel(o.var_plus, oracle.observables.var_plus),
            rel(o.var_minus, oracle.observables.var_minus),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        table.push(vec![
            e,
            o.mean_photon,
            na,
            nb,
            o.var_plus,
            o.var_minus,
            o.vacuum_level,
            s,
            analytic::uncertainty_bound(&p),
            diff,
        ]);
    }
    Ok(table)
}

const NBAR_FORMULA: &str = "nbar = 2e^2/(k^2 - 4e^2) * [2 - k*gc/(k^2 + 4e^2)]; gamma_c = 0 gives 4e^2/(k^2 - 4e^2)";
const VARIANCE_FORMULA: &str = "var_pm = 2 -/+ 4e/(k +/- 2e) + (gc/k)*[1 +/- 2e(k^2 -/+ 2ek - 4e^2)/((k^2 + 4e^2)(k +/- 2e))]";
const VACUUM_FORMULA: &str = "vacuum level = 2 + gc/k";
const SQUEEZING_FORMULA: &str = "S = (vacuum - var_plus)/vacuum; S_bare = 2e/(k + 2e)";

pub fn run_figure2(kappa: f64, gamma_c: &[f64], grid: &GridSpec, out: Option<&PathBuf>) -> Outcome {
    eprintln!("figure2: {NBAR_FORMULA}");
    eprintln!("figure2: gamma_c family {gamma_c:?}, kappa = {kappa}");
    let table = figure2_table(kappa, gamma_c, grid)?;
    write_out(&table.to_csv(), out)?;
    Ok(Status::Success)
}

pub fn run_figure3(kappa: f64, gamma_c: f64, grid: &GridSpec, out: Option<&PathBuf>) -> Outcome {
    eprintln!("figure3: {VARIANCE_FORMULA}");
    eprintln!("figure3: {VACUUM_FORMULA}");
    let table = figure3_table(kappa, gamma_c, grid)?;
    write_out(&table.to_csv(), out)?;
    Ok(Status::Success)
}

pub fn run_figure4(kappa: f64, gamma_c: f64, grid: &GridSpec, out: Option<&PathBuf>) -> Outcome {
    eprintln!("figure4: {SQUEEZING_FORMULA}");
    eprintln!("figure4: {VARIANCE_FORMULA}");
    let table = figure4_table(kappa, gamma_c, grid)?;
    write_out(&table.to_csv(), out)?;
    Ok(Status::Success)
}

pub fn run_sweep(kappa: f64, gamma_c: f64, grid: &GridSpec, out: Option<&PathBuf>) -> Outcome {
    eprintln!("sweep: {NBAR_FORMULA}");
    eprintln!("sweep: {VARIANCE_FORMULA}");
    eprintln!("sweep: oracle_max_rel_diff compares against the linear moment-equation solve");
    let table = sweep_table(kappa, gamma_c, grid)?;
    write_out(&table.to_csv(), out)?;
    Ok(Status::Success)
}

/// Inputs of `simulate`; `None` fields fall back to the model-derived defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub params: ModelParams,
    pub fock_cutoff: usize,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub sample_every: Option<f64>,
    pub tol: f64,
}

/// Sample spacing used when none is given: the step multiple closest to
/// 0.05, fine enough for a meaningful finite-difference residual check.
pub const DEFAULT_SAMPLE_SPACING: f64 = 0.05;

impl SimulateConfig {
    pub fn options(&self) -> Result<EvolveOptions, Failure> {
        let p = &self.params;
        let mut opts = EvolveOptions::for_params(p);
        opts.t_max = self.t_max.unwrap_or(opts.t_max);
        opts.dt = self.dt.unwrap_or_else(|| default_dt(p));
        opts.tol = self.tol;
        opts.sample_every = match self.sample_every {
            Some(s) => s,
            None => {
                let plan = StepPlan::new(opts.t_max, opts.dt, opts.dt).map_err(|e| Failure::usage(anyhow!(e)))?;
                (DEFAULT_SAMPLE_SPACING / plan.h).round().max(1.0) * plan.h
            }
        };
        Ok(opts)
    }
}

/// Runs the master equation, writes the trajectory and returns the
/// human-readable summary.
pub fn simulate(cfg: &SimulateConfig, out: Option<&PathBuf>) -> Result<(String, Status), Failure> {
    let p = &cfg.params;
    let ops = build_operator_set(HilbertConfig::new(cfg.fock_cutoff)?);
    let opts = cfg.options()?;
    let ev = evolve_to_steady_state(&ops, p, &opts)?;

    let mut csv = Vec::new();
    ev.trajectory.write_csv(&mut csv)?;
    write_out(std::str::from_utf8(&csv).expect("CSV is ASCII"), out)?;

    let sim = simulated_observables(&ev.final_density(), &ops)?;
    let closed = analytic::observables(p);
    let atoms = analytic::atomic_steady_state(p);
    let mut s = String::new();
    let (e, k, gc) = (p.epsilon(), p.kappa(), p.gamma_c());
    let _ = writeln!(s, "simulation: epsilon = {e}, kappa = {k}, gamma_c = {gc}, N = {}", cfg.fock_cutoff);
    let _ = writeln!(
        s,
        "  dt = {}, samples every {}, t_max = {}, tol = {:e}, {} active density-matrix entries",
        opts.dt,
        opts.sample_every,
        opts.t_max,
        opts.tol,
        ev.active_entries()
    );
    let status = match ev.status {
        Convergence::Converged { t } => {
            let _ = writeln!(s, "status: converged at t = {t}");
            Status::Success
        }
        Convergence::NotConverged { max_derivative } => {
            let _ = writeln!(
                s,
                "status: NOT converged by t = {}; max |drho/dt| = {max_derivative:e}",
                ev.final_time()
            );
            Status::Numerical
        }
    };
    let o = sim.observables;
    let _ = writeln!(s, "  {:<28}{:>14}{:>14}", "", "simulated", "closed form");
    for (name, a, b) in [
        ("mean photon number", o.mean_photon, closed.mean_photon),
        ("var_plus", o.var_plus, closed.var_plus),
        ("var_minus", o.var_minus, closed.var_minus),
        ("vacuum level", o.vacuum_level, closed.vacuum_level),
        ("squeezing", o.squeezing(), analytic::squeezing(p)),
        ("<[c, c+]>", o.commutator, analytic::commutator_expectation(p, &atoms)),
        ("<eta_a>", sim.populations.0, atoms.eta_a),
        ("<eta_b>", sim.populations.1, atoms.eta_b),
        ("<eta_c>", sim.populations.2, atoms.eta_c),
        ("Re <sigma_c>", sim.sigma_c.re, atoms.sigma_c),
    ] {
        let _ = writeln!(s, "  {name:<28}{a:>14.6}{b:>14.6}");
    }
    if o.mean_photon != 0.0 || closed.mean_photon != 0.0 {
        let dev = (o.mean_photon - closed.mean_photon).abs() / closed.mean_photon.abs().max(f64::MIN_POSITIVE);
        let _ = writeln!(s, "  relative deviation of mean photon number: {dev:.6}");
    }
    let _ = writeln!(
        s,
        "  note: the closed forms measure variances against 2 + gamma_c/kappa and give the commutator \
         2 + k*gc*(eta_c - eta_a)/(k^2 - 4e^2); a bosonic simulation has vacuum level 2 and commutator 1 per mode, \
         so only gamma_c = 0 is a like-for-like comparison"
    );
    let _ = writeln!(
        s,
        "  |<a>| = {:e}, |<b>| = {:e}; <aa+> - <a+a> = {:.10}, <bb+> - <b+b> = {:.10}",
        sim.first_moments.0.norm(),
        sim.first_moments.1.norm(),
        sim.mode_commutators.0,
        sim.mode_commutators.1
    );
    let _ = writeln!(
        s,
        "  top Fock populations (a, b) = ({:e}, {:e}); trace drift {:e}",
        sim.top_populations.0,
        sim.top_populations.1,
        ev.trajectory.max_trace_drift()
    );
    match moment_residuals(&ev.trajectory, p) {
        Ok(r) => {
            let _ = writeln!(
                s,
                "  moment-equation residuals (spacing {}): max {:e} over {} equations",
                r.spacing,
                r.max_residual(),
                r.entries.len()
            );
        }
        Err(err) => {
            let _ = writeln!(s, "  moment-equation residuals: not available ({err})");
        }
    }
    Ok((s, status))
}

pub fn run_simulate(cfg: &SimulateConfig, out: Option<&PathBuf>) -> Outcome {
    let (summary, status) = simulate(cfg, out)?;
    eprint!("{summary}");
    Ok(status)
}

/// Renders every figure table twice and compares the bytes.
pub fn determinism_checks() -> Vec<Check> {
    type Render = Box<dyn Fn() -> Result<String, Failure>>;
    let grid = GridSpec::default();
    let renders: [(&str, Render); 4] = [
        ("figure2", Box::new(move || Ok(figure2_table(0.8, &[0.0, 0.25, 0.5], &grid)?.to_csv()))),
        ("figure3", Box::new(move || Ok(figure3_table(0.8, 0.5, &grid)?.to_csv()))),
        ("figure4", Box::new(move || Ok(figure4_table(0.8, 0.5, &grid)?.to_csv()))),
        ("sweep", Box::new(move || Ok(sweep_table(0.8, 0.5, &grid)?.to_csv()))),
    ];
    renders
        .iter()
        .map(|(name, render)| match (render(), render()) {
            (Ok(a), Ok(b)) => {
                let differing = a.bytes().zip(b.bytes()).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
                Check::new(7, format!("{name} CSV differs between two renders (bytes)"), differing as f64, Bound::Exactly(0.0))
            }
            (Err(e), _) | (_, Err(e)) => Check::failed(7, format!("{name} CSV render"), e.error.to_string()),
        })
        .collect()
}

pub fn verification_report() -> Report {
    let mut report = run_verification(&Analytic, Selection::ALL);
    report.extend(determinism_checks());
    report
}

pub fn run_verify(out: Option<&PathBuf>) -> Outcome {
    let report = verification_report();
    let text = format!("{report}\n");
    print!("{text}");
    if let Some(path) = out {
        write_out(&text, Some(path))?;
    }
    Ok(if report.passed() {
        Status::Success
    } else {
        Status::VerificationFailed
    })
}
