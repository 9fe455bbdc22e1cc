use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subharmonic::ModelParams;
use subharmonic_cli::commands::{self, GridSpec, SimulateConfig};
use subharmonic_cli::{Failure, Status};

/// Two subharmonic cavity modes coupled to a cascade three-level atom:
/// steady-state figure data, sweeps, master-equation runs and self-checks.
#[derive(Parser)]
#[command(name = "subharmonic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Grid {
    /// Smallest pump amplitude epsilon.
    #[arg(long, default_value_t = 0.0)]
    eps_min: f64,
    /// Largest pump amplitude epsilon (must stay below kappa/2).
    #[arg(long, default_value_t = 0.35)]
    eps_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 50)]
    steps: usize,
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            eps_min: g.eps_min,
            eps_max: g.eps_max,
            steps: g.steps,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mean photon number against epsilon, one column per gamma_c.
    Figure2 {
        #[arg(long, default_value_t = 0.8)]
        kappa: f64,
        /// Repeat for several curves; defaults to 0, 0.25 and 0.5.
        #[arg(long = "gamma-c")]
        gamma_c: Vec<f64>,
        #[command(flatten)]
        grid: Grid,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plus/minus quadrature variances and the vacuum level.
    Figure3 {
        #[arg(long, default_value_t = 0.8)]
        kappa: f64,
        #[arg(long = "gamma-c", default_value_t = 0.5)]
        gamma_c: f64,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Squeezing with and without the atom.
    Figure4 {
        #[arg(long, default_value_t = 0.8)]
        kappa: f64,
        #[arg(long = "gamma-c", default_value_t = 0.5)]
        gamma_c: f64,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All closed-form observables plus the deviation from the moment solver.
    Sweep {
        #[arg(long, default_value_t = 0.8)]
        kappa: f64,
        #[arg(long = "gamma-c", default_value_t = 0.5)]
        gamma_c: f64,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrates the master equation to steady state; trajectory CSV to
    /// --out (or stdout), summary to stderr.
    Simulate {
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.8)]
        kappa: f64,
        #[arg(long = "gamma-c", default_value_t = 0.0)]
        gamma_c: f64,
        /// Fock states kept per mode.
        #[arg(long, default_value_t = 10)]
        fock_cutoff: usize,
        /// Defaults to 200/kappa.
        #[arg(long)]
        t_max: Option<f64>,
        /// Defaults to 0.01/max(kappa, g, epsilon).
        #[arg(long)]
        dt: Option<f64>,
        /// Trajectory sample spacing; a multiple of the step. Defaults to
        /// the multiple closest to 0.05.
        #[arg(long)]
        sample_every: Option<f64>,
        /// Stop once max |drho/dt| falls below this; 0 runs to t_max.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs every acceptance check and prints one line per check.
    Verify {
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(command: Command) -> Result<Status, Failure> {
    match command {
        Command::Figure2 {
            kappa,
            gamma_c,
            grid,
            out,
        } => {
            let family = if gamma_c.is_empty() { vec![0.0, 0.25, 0.5] } else { gamma_c };
            commands::run_figure2(kappa, &family, &grid.into(), out.as_ref())
        }
        Command::Figure3 {
            kappa,
            gamma_c,
            grid,
            out,
        } => commands::run_figure3(kappa, gamma_c, &grid.into(), out.as_ref()),
        Command::Figure4 {
            kappa,
            gamma_c,
            grid,
            out,
        } => commands::run_figure4(kappa, gamma_c, &grid.into(), out.as_ref()),
        Command::Sweep {
            kappa,
            gamma_c,
            grid,
            out,
        } => commands::run_sweep(kappa, gamma_c, &grid.into(), out.as_ref()),
        Command::Simulate {
            epsilon,
            kappa,
            gamma_c,
            fock_cutoff,
            t_max,
            dt,
            sample_every,
            tol,
            out,
        } => {
            let cfg = SimulateConfig {
                params: ModelParams::new(epsilon, kappa, gamma_c)?,
                fock_cutoff,
                t_max,
                dt,
                sample_every,
                tol,
            };
            commands::run_simulate(&cfg, out.as_ref())
        }
        Command::Verify { out } => commands::run_verify(out.as_ref()),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on its own for malformed arguments.
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(status) => ExitCode::from(status as u8),
        Err(Failure { status, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(status as u8)
        }
    }
}
