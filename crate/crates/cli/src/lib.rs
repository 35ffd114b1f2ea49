//! Experiment driver for the bi-parabolic benchmark: single runs, convergence
//! sweeps, stability audits and grid export, all written as CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use opdiff::{
    assemble, check_three_level_estimate, check_vector_estimate, l2_error, observed_order,
    random_grid, run_three_level_nonuniform, run_three_level_uniform, run_vector_scheme,
    uniform_grid, BiparabolicProblem, RhsSampling, SchemeKind, SecondOrderProblem, StabilityReport,
    TimeGrid, Trajectory,
};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GridKind {
    Uniform,
    Random,
}

impl std::fmt::Display for GridKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GridKind::Uniform => "uniform",
            GridKind::Random => "random",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub alpha: f64,
    pub h: f64,
    pub final_time: f64,
    pub steps: usize,
    pub sigma: f64,
    pub scheme: SchemeKind,
    pub grid: GridKind,
    pub q: f64,
    pub seed: u64,
    pub rhs_sampling: RhsSampling,
    /// Requested snapshot times; empty means `T/4, T/2, 3T/4, T`.
    pub snapshots: Vec<f64>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            h: 2e-3,
            final_time: 0.1,
            steps: 100,
            sigma: 0.5,
            scheme: SchemeKind::Vector,
            grid: GridKind::Uniform,
            q: 0.5,
            seed: 1,
            rhs_sampling: RhsSampling::Point,
            snapshots: Vec::new(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scheme == SchemeKind::ThreeLevelUniform && self.grid == GridKind::Random {
            bail!("three-level-uniform needs --grid uniform");
        }
        if self.scheme == SchemeKind::ThreeLevelNonuniform && self.sigma != 0.5 {
            bail!(
                "three-level-nonuniform has fixed weight 0.5, got --sigma {}",
                self.sigma
            );
        }
        ensure!(
            self.sigma >= 0.0 && self.sigma.is_finite(),
            "--sigma must be >= 0"
        );
        ensure!(
            self.final_time > 0.0 && self.final_time.is_finite(),
            "--T must be positive"
        );
        ensure!(
            self.alpha >= 0.0 && self.alpha.is_finite(),
            "--alpha must be >= 0"
        );
        for &t in &self.snapshots {
            ensure!(
                (0.0..=self.final_time).contains(&t),
                "snapshot {t} outside [0, {}]",
                self.final_time
            );
        }
        Ok(())
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        Self {
            steps,
            ..self.clone()
        }
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self {
            sigma,
            ..self.clone()
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        Ok(match self.grid {
            GridKind::Uniform => uniform_grid(self.final_time, self.steps)?,
            GridKind::Random => random_grid(self.final_time, self.steps, self.q, self.seed)?,
        })
    }

    fn snapshot_times(&self) -> Vec<f64> {
        if self.snapshots.is_empty() {
            [0.25, 0.5, 0.75, 1.0]
                .iter()
                .map(|f| f * self.final_time)
                .collect()
        } else {
            self.snapshots.clone()
        }
    }

    /// `key=value` lines with every setting, enough to repeat the run.
    pub fn meta(&self, command: &str, extra: &[(&str, String)]) -> String {
        let mut out = String::new();
        let snapshots: Vec<String> = self
            .snapshot_times()
            .iter()
            .map(|t| t.to_string())
            .collect();
        let fields = [
            ("command", command.to_string()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("alpha", self.alpha.to_string()),
            ("h", self.h.to_string()),
            ("T", self.final_time.to_string()),
            ("N", self.steps.to_string()),
            ("sigma", self.sigma.to_string()),
            ("scheme", self.scheme.to_string()),
            ("grid", self.grid.to_string()),
            ("q", self.q.to_string()),
            ("seed", self.seed.to_string()),
            ("rhs-sampling", self.rhs_sampling.to_string()),
            ("snapshots", snapshots.join(",")),
        ];
        for (k, v) in fields.iter().chain(extra) {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn prepare(config: &RunConfig) -> Result<(BiparabolicProblem, SecondOrderProblem)> {
    config.validate()?;
    let bench = assemble(config.alpha, config.h)?;
    let problem = bench
        .to_problem()
        .context("the time integrators need alpha > 0")?;
    Ok((bench, problem))
}

fn integrate(
    config: &RunConfig,
    problem: &SecondOrderProblem,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    Ok(match config.scheme {
        SchemeKind::Vector => run_vector_scheme(problem, grid, config.sigma, config.rhs_sampling)?,
        SchemeKind::ThreeLevelUniform => run_three_level_uniform(problem, grid, config.sigma)?,
        SchemeKind::ThreeLevelNonuniform => {
            run_three_level_nonuniform(problem, grid, config.rhs_sampling)?
        }
    })
}

fn audit(problem: &SecondOrderProblem, traj: &Trajectory) -> Result<StabilityReport> {
    Ok(match traj.scheme() {
        SchemeKind::ThreeLevelUniform => check_three_level_estimate(traj, problem)?,
        _ => check_vector_estimate(traj, problem)?,
    })
}

/// Index of the level closest to `t`.
fn nearest_level(grid: &TimeGrid, t: f64) -> usize {
    let levels = grid.levels();
    let i = levels.partition_point(|&l| l < t);
    if i == 0 {
        0
    } else if i == levels.len() || t - levels[i - 1] <= levels[i] - t {
        i - 1
    } else {
        i
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_error: f64,
    pub errors: Vec<f64>,
    pub report: StabilityReport,
}

/// One experiment: writes `grid.csv`, `solution.csv`, `error.csv`,
/// `stability.csv` and `meta.txt` into `config.out`.
pub fn run_experiment(config: &RunConfig) -> Result<RunOutcome> {
    let (bench, problem) = prepare(config)?;
    let grid = config.time_grid()?;
    let traj = integrate(config, &problem, &grid)?;
    let report = audit(&problem, &traj)?;

    let errors = grid
        .levels()
        .par_iter()
        .zip(traj.y().par_iter())
        .map(|(&t, y)| Ok(l2_error(y, &bench.exact_solution(t), config.h)?))
        .collect::<Result<Vec<f64>>>()?;

    let mut error_csv = String::from("n,t_n,tau_n,eps\n");
    for (n, (&t, e)) in grid.levels().iter().zip(&errors).enumerate() {
        let tau = if n == 0 {
            String::new()
        } else {
            num(grid.steps()[n - 1])
        };
        let _ = writeln!(error_csv, "{n},{},{tau},{}", num(t), num(*e));
    }

    let picked: Vec<usize> = config
        .snapshot_times()
        .iter()
        .map(|&t| nearest_level(&grid, t))
        .collect();
    let mut solution_csv = String::from("x");
    for &i in &picked {
        let _ = write!(solution_csv, ",u_{}", grid.levels()[i]);
    }
    solution_csv.push('\n');
    for (j, x) in bench.nodes().iter().enumerate() {
        solution_csv.push_str(&num(*x));
        for &i in &picked {
            let _ = write!(solution_csv, ",{}", num(traj.y()[i][j]));
        }
        solution_csv.push('\n');
    }

    let final_error = *errors.last().expect("grid has levels");
    fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    write_file(&config.out, "grid.csv", &grid.to_csv())?;
    write_file(&config.out, "solution.csv", &solution_csv)?;
    write_file(&config.out, "error.csv", &error_csv)?;
    write_file(&config.out, "stability.csv", &report.to_csv())?;
    let extra = [
        ("eps_T", num(final_error)),
        (
            "stability_mode",
            format!("{:?}", report.mode).to_lowercase(),
        ),
        ("stability_passed", report.passed().to_string()),
    ];
    write_file(&config.out, "meta.txt", &config.meta("run", &extra))?;
    Ok(RunOutcome {
        final_error,
        errors,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub steps: usize,
    pub final_error: f64,
    /// `None` on the first row.
    pub order: Option<f64>,
}

/// Error at `T` for each step count; writes `convergence.csv` and `meta.txt`.
/// Random grids reuse `config.seed` for every `N`.
pub fn run_convergence(config: &RunConfig, step_counts: &[usize]) -> Result<Vec<ConvergenceRow>> {
    ensure!(
        step_counts.len() >= 2,
        "a convergence sweep needs at least two values of N"
    );
    let (bench, problem) = prepare(config)?;
    let exact = bench.exact_solution(config.final_time);
    let errors = step_counts
        .par_iter()
        .map(|&n| {
            let cfg = config.with_steps(n);
            let traj = integrate(&cfg, &problem, &cfg.time_grid()?)?;
            Ok((n, l2_error(traj.final_y(), &exact, config.h)?))
        })
        .collect::<Result<Vec<(usize, f64)>>>()?;
    let orders = observed_order(&errors)?;
    let rows: Vec<ConvergenceRow> = errors
        .iter()
        .enumerate()
        .map(|(i, &(steps, final_error))| ConvergenceRow {
            steps,
            final_error,
            order: i.checked_sub(1).map(|k| orders[k]),
        })
        .collect();

    let mut csv = String::from("N,eps_T,order\n");
    for r in &rows {
        let order = r.order.map(num).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{order}", r.steps, num(r.final_error));
    }
    fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    write_file(&config.out, "convergence.csv", &csv)?;
    let list: Vec<String> = step_counts.iter().map(|n| n.to_string()).collect();
    write_file(
        &config.out,
        "meta.txt",
        &config.meta("convergence", &[("N_list", list.join(","))]),
    )?;
    Ok(rows)
}

/// Stability report per weight; writes `stability_sigma_<sigma>.csv`,
/// `stability_summary.csv` and `meta.txt`.
pub fn run_stability(config: &RunConfig, sigmas: &[f64]) -> Result<Vec<StabilityReport>> {
    ensure!(!sigmas.is_empty(), "no weights given");
    for &s in sigmas {
        config.with_sigma(s).validate()?;
    }
    let (_, problem) = prepare(config)?;
    let grid = config.time_grid()?;
    let reports = sigmas
        .par_iter()
        .map(|&s| {
            audit(
                &problem,
                &integrate(&config.with_sigma(s), &problem, &grid)?,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    let mut summary = String::from("sigma,scheme,all_ok,max_violation\n");
    for r in &reports {
        let _ = writeln!(
            summary,
            "{},{},{},{}",
            r.sigma,
            r.scheme,
            r.all_ok(),
            num(r.max_violation())
        );
        write_file(
            &config.out,
            &format!("stability_sigma_{}.csv", r.sigma),
            &r.to_csv(),
        )?;
    }
    write_file(&config.out, "stability_summary.csv", &summary)?;
    let list: Vec<String> = sigmas.iter().map(|s| s.to_string()).collect();
    let observed: Vec<String> = reports
        .iter()
        .filter_map(|r| r.note.as_ref().map(|n| format!("sigma {}: {n}", r.sigma)))
        .collect();
    let mut extra = vec![("sigma_list", list.join(","))];
    if !observed.is_empty() {
        extra.push(("observe_notes", observed.join("; ")));
    }
    write_file(&config.out, "meta.txt", &config.meta("stability", &extra))?;
    Ok(reports)
}

/// Writes `grid_N<n>.csv` for each step count and `meta.txt`.
pub fn export_grids(config: &RunConfig, step_counts: &[usize]) -> Result<Vec<TimeGrid>> {
    ensure!(!step_counts.is_empty(), "no values of N given");
    config.validate()?;
    fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    let mut grids = Vec::new();
    for &n in step_counts {
        let grid = config.with_steps(n).time_grid()?;
        write_file(&config.out, &format!("grid_N{n}.csv"), &grid.to_csv())?;
        grids.push(grid);
    }
    let list: Vec<String> = step_counts.iter().map(|n| n.to_string()).collect();
    write_file(
        &config.out,
        "meta.txt",
        &config.meta("grids", &[("N_list", list.join(","))]),
    )?;
    Ok(grids)
}
