use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{ensure, Result};
use clap::{Args, Parser, Subcommand};
use opdiff::{RhsSampling, SchemeKind};
use opdiff_cli::{
    export_grids, run_convergence, run_experiment, run_stability, GridKind, RunConfig,
};

#[derive(Parser)]
#[command(
    version,
    about = "Bi-parabolic benchmark runs for second-order evolution schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run: grid, snapshots, error history, stability monitor
    Run(Flags),
    /// Error at T for a list of N, with observed orders
    Convergence(Flags),
    /// Stability monitors for a list of weights
    Stability(Flags),
    /// Export time grids for a list of N
    Grids(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Spatial mesh step, 1/h must be an integer
    #[arg(long, default_value_t = 2e-3)]
    h: f64,
    /// Final time
    #[arg(long = "T", default_value_t = 0.1)]
    t: f64,
    /// Number of time steps (comma list for sweeps)
    #[arg(long = "N", value_delimiter = ',', default_value = "100")]
    n: Vec<usize>,
    /// Scheme weight (comma list for stability audits)
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    sigma: Vec<f64>,
    /// vector, three-level-uniform or three-level-nonuniform
    #[arg(long, default_value = "vector")]
    scheme: SchemeKind,
    #[arg(long, value_enum, default_value_t = GridKind::Uniform)]
    grid: GridKind,
    /// Relative spread of random steps
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// point or average
    #[arg(long = "rhs-sampling", default_value = "point")]
    rhs_sampling: RhsSampling,
    /// Snapshot times for solution.csv
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Flags {
    fn config(&self) -> RunConfig {
        RunConfig {
            alpha: self.alpha,
            h: self.h,
            final_time: self.t,
            steps: self.n[0],
            sigma: self.sigma[0],
            scheme: self.scheme,
            grid: self.grid,
            q: self.q,
            seed: self.seed,
            rhs_sampling: self.rhs_sampling,
            snapshots: self.snapshots.clone(),
            out: self.out.clone(),
        }
    }

    fn single(&self) -> Result<RunConfig> {
        ensure!(self.n.len() == 1, "run takes a single --N");
        ensure!(self.sigma.len() == 1, "this command takes a single --sigma");
        Ok(self.config())
    }
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run(flags) => {
            let outcome = run_experiment(&flags.single()?)?;
            println!("eps(T) = {:.6e}", outcome.final_error);
            if !outcome.report.passed() {
                eprintln!(
                    "stability monitor violated, max relative excess {:.3e}",
                    outcome.report.max_violation()
                );
            }
            Ok(outcome.report.passed())
        }
        Command::Convergence(flags) => {
            ensure!(flags.sigma.len() == 1, "convergence takes a single --sigma");
            for row in run_convergence(&flags.config(), &flags.n)? {
                match row.order {
                    Some(p) => println!(
                        "N={:<6} eps={:.6e} order={p:.3}",
                        row.steps, row.final_error
                    ),
                    None => println!("N={:<6} eps={:.6e}", row.steps, row.final_error),
                }
            }
            Ok(true)
        }
        Command::Stability(flags) => {
            ensure!(flags.n.len() == 1, "stability takes a single --N");
            let reports = run_stability(&flags.config(), &flags.sigma)?;
            let mut ok = true;
            for r in &reports {
                let mode = format!("{:?}", r.mode).to_lowercase();
                println!(
                    "sigma={} {} all_ok={} ({mode})",
                    r.sigma,
                    r.scheme,
                    r.all_ok()
                );
                if !r.passed() {
                    ok = false;
                    eprintln!(
                        "sigma={}: stability monitor violated, max relative excess {:.3e}",
                        r.sigma,
                        r.max_violation()
                    );
                }
            }
            Ok(ok)
        }
        Command::Grids(flags) => {
            for g in export_grids(&flags.config(), &flags.n)? {
                let s = g.stats();
                println!(
                    "N={} min={:.6e} max={:.6e} max ratio={:.4}",
                    g.len(),
                    s.min_step,
                    s.max_step,
                    s.max_pairwise_ratio()
                );
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
