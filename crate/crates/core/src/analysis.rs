//! Stability monitors, grid error norm and observed convergence order.
//!
//! The monitors evaluate the discrete a priori estimates along a computed
//! trajectory. Each inequality is checked with a fixed relative slack of
//! [`SLACK`] to absorb round-off.

use std::fmt::Write as _;

use crate::error::{check_len, Error, Result};
use crate::linops::{dot, PolyOperator};
use crate::schemes::{
    recover_aux, sample_rhs, RhsSampling, SchemeKind, SecondOrderProblem, Trajectory, VectorState,
};

/// Relative slack applied to every checked inequality.
pub const SLACK: f64 = 1e-12;

/// Energy operator `C + (sigma - 1/4) tau^2 A` of the three-level scheme.
#[derive(Debug, Clone)]
pub struct EnergyOperator {
    pub op: PolyOperator,
    pub spd: bool,
}

pub fn energy_operator(
    c: &PolyOperator,
    a: &PolyOperator,
    sigma: f64,
    tau: f64,
) -> Result<EnergyOperator> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {tau}"
        )));
    }
    let op = c.combine(1.0, a, (sigma - 0.25) * tau * tau)?;
    let spd = op.is_spd();
    Ok(EnergyOperator { op, spd })
}

/// `|(y^n - y^{n-1}) / tau|_D^2 + |(y^n + y^{n-1}) / 2|_A^2`.
pub fn three_level_energy(
    y_n: &[f64],
    y_nm1: &[f64],
    tau: f64,
    energy_op: &PolyOperator,
    a: &PolyOperator,
) -> Result<f64> {
    let (diff, mean) = diff_and_mean(y_n, y_nm1, tau)?;
    let kinetic = energy_op.weighted_norm(&diff)?;
    let potential = a.weighted_norm(&mean)?;
    Ok(kinetic * kinetic + potential * potential)
}

fn diff_and_mean(y_n: &[f64], y_nm1: &[f64], tau: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(y_n.len(), y_nm1.len())?;
    let diff = y_n.iter().zip(y_nm1).map(|(a, b)| (a - b) / tau).collect();
    let mean = y_n.iter().zip(y_nm1).map(|(a, b)| 0.5 * (a + b)).collect();
    Ok((diff, mean))
}

/// `(|y|_C^2 + |w|_{A^{-1}}^2)^{1/2}`.
pub fn vector_monitor(state: &VectorState, c: &PolyOperator, a: &PolyOperator) -> Result<f64> {
    let yc = c.weighted_norm(&state.y)?;
    let wa = a.inv_weighted_norm(&state.w)?;
    Ok((yc * yc + wa * wa).sqrt())
}

/// Whether a report's inequalities are binding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorMode {
    /// Preconditions of the estimate hold; violations fail the report.
    Assert,
    /// Below the weight threshold (or non-SPD energy operator); values are
    /// recorded without asserting.
    Observe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRecord {
    pub n: usize,
    pub t: f64,
    pub monitor: f64,
    /// Cumulative bound from the initial level and the forcing.
    pub bound: f64,
    /// Both the one-level and the cumulative inequality hold.
    pub ok: bool,
    /// Largest relative excess over either inequality; 0 when satisfied.
    pub violation: f64,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub scheme: SchemeKind,
    pub sigma: f64,
    pub sampling: RhsSampling,
    pub mode: MonitorMode,
    pub note: Option<String>,
    pub records: Vec<StabilityRecord>,
}

impl StabilityReport {
    pub fn all_ok(&self) -> bool {
        self.records.iter().all(|r| r.ok)
    }

    /// False only for an asserted report with a violation.
    pub fn passed(&self) -> bool {
        self.mode == MonitorMode::Observe || self.all_ok()
    }

    pub fn max_violation(&self) -> f64 {
        self.records.iter().map(|r| r.violation).fold(0.0, f64::max)
    }

    /// Monitor values are nonincreasing from level to level within the slack.
    pub fn is_nonincreasing(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].monitor <= w[0].monitor + SLACK * w[0].monitor.abs())
    }

    /// CSV `n,t_n,monitor,bound,ok`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,t_n,monitor,bound,ok\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{}",
                r.n, r.t, r.monitor, r.bound, r.ok
            );
        }
        out
    }
}

/// Relative excess of `lhs` over `rhs`; 0 when `lhs <= rhs` within the slack.
fn excess(lhs: f64, rhs: f64) -> f64 {
    if lhs <= rhs + SLACK * rhs.abs() {
        0.0
    } else if rhs != 0.0 {
        (lhs - rhs) / rhs.abs()
    } else {
        lhs - rhs
    }
}

/// Checks `E^{n+1} <= E^n + tau/2 |f^n|^2_{B^{-1}}` and its cumulative form
/// along a uniform three-level trajectory. Records start at level 1.
pub fn check_three_level_estimate(
    trajectory: &Trajectory,
    problem: &SecondOrderProblem,
) -> Result<StabilityReport> {
    if trajectory.scheme() != SchemeKind::ThreeLevelUniform {
        return Err(Error::InvalidParameter(format!(
            "three-level estimate applies to three-level-uniform runs, got {}",
            trajectory.scheme()
        )));
    }
    let sigma = trajectory.sigma();
    let grid = trajectory.grid();
    let tau = grid.steps()[0];
    let energy = energy_operator(problem.c(), problem.a(), sigma, tau)?;
    let mode = if sigma >= 0.25 && energy.spd {
        MonitorMode::Assert
    } else {
        MonitorMode::Observe
    };
    let note = if sigma < 0.25 {
        Some(format!(
            "sigma = {sigma} is below 0.25; the estimate is not guaranteed"
        ))
    } else {
        (!energy.spd).then(|| "energy operator is not positive definite".to_string())
    };

    let b_inv = if problem.is_homogeneous() {
        None
    } else {
        Some(problem.b().factorize()?)
    };
    let ys = trajectory.y();
    let levels = grid.levels();
    let mut records = Vec::with_capacity(ys.len() - 1);
    let mut prev_energy = 0.0;
    let mut bound = 0.0;
    let mut forcing_term = 0.0;
    for n in 1..ys.len() {
        let value = if energy.spd {
            three_level_energy(&ys[n], &ys[n - 1], tau, &energy.op, problem.a())?
        } else {
            // indefinite energy: keep the signed quadratic forms
            let (diff, mean) = diff_and_mean(&ys[n], &ys[n - 1], tau)?;
            energy.op.quadratic_form(&diff)? + problem.a().quadratic_form(&mean)?
        };
        let (step_excess, cumulative_excess) = if n == 1 {
            bound = value;
            (0.0, 0.0)
        } else {
            bound += forcing_term;
            (
                excess(value, prev_energy + forcing_term),
                excess(value, bound),
            )
        };
        let violation = step_excess.max(cumulative_excess);
        records.push(StabilityRecord {
            n,
            t: levels[n],
            monitor: value,
            bound,
            ok: violation == 0.0,
            violation,
        });
        prev_energy = value;
        // forcing at level n enters the estimate for level n + 1
        forcing_term = match &b_inv {
            Some(f) if n < ys.len() - 1 => {
                let fn_ = problem.rhs(levels[n])?;
                let x = f.solve(&fn_)?;
                0.5 * tau * dot(&x, &fn_)
            }
            _ => 0.0,
        };
    }
    Ok(StabilityReport {
        scheme: trajectory.scheme(),
        sigma,
        sampling: trajectory.sampling(),
        mode,
        note,
        records,
    })
}

/// Checks `M^{n+1} <= M^n + tau_{n+1} |f^{n+sigma}|_{A^{-1}}` and
/// `M^{n+1} <= M^0 + sum_k tau_{k+1} |f^{k+sigma}|_{A^{-1}}` for the vector
/// monitor `M`. Works for vector and eliminated-scheme trajectories; for the
/// latter the auxiliary variable is rebuilt first.
pub fn check_vector_estimate(
    trajectory: &Trajectory,
    problem: &SecondOrderProblem,
) -> Result<StabilityReport> {
    let w = recover_aux(problem, trajectory)?;
    let sigma = trajectory.sigma();
    let sampling = trajectory.sampling();
    let mode = if sigma >= 0.5 {
        MonitorMode::Assert
    } else {
        MonitorMode::Observe
    };
    let a_inv = problem.a().factorize()?;
    let grid = trajectory.grid();
    let levels = grid.levels();
    let steps = grid.steps();

    let monitor = |n: usize| -> Result<f64> {
        let yc = problem.c().weighted_norm(&trajectory.y()[n])?;
        let wa = a_inv.inv_weighted_norm(&w[n])?;
        Ok((yc * yc + wa * wa).sqrt())
    };

    let mut records = Vec::with_capacity(levels.len());
    let m0 = monitor(0)?;
    records.push(StabilityRecord {
        n: 0,
        t: 0.0,
        monitor: m0,
        bound: m0,
        ok: true,
        violation: 0.0,
    });
    let mut bound = m0;
    let mut prev = m0;
    for n in 0..steps.len() {
        let tau = steps[n];
        let forcing = if problem.is_homogeneous() {
            0.0
        } else {
            let f = sample_rhs(problem, levels[n], tau, sigma, sampling)?;
            tau * a_inv.inv_weighted_norm(&f)?
        };
        bound += forcing;
        let value = monitor(n + 1)?;
        let violation = excess(value, prev + forcing).max(excess(value, bound));
        records.push(StabilityRecord {
            n: n + 1,
            t: levels[n + 1],
            monitor: value,
            bound,
            ok: violation == 0.0,
            violation,
        });
        prev = value;
    }
    Ok(StabilityReport {
        scheme: trajectory.scheme(),
        sigma,
        sampling,
        mode,
        note: (sigma < 0.5)
            .then(|| format!("sigma = {sigma} is below 0.5; the estimate is not guaranteed")),
        records,
    })
}

/// Grid norm `(sum_x (y(x) - u(x))^2 h)^{1/2}` over interior nodes.
pub fn l2_error(y: &[f64], u_exact: &[f64], h: f64) -> Result<f64> {
    check_len(u_exact.len(), y.len())?;
    let sq: f64 = y.iter().zip(u_exact).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sq * h).sqrt())
}

/// Order estimates `ln(e_1 / e_2) / ln(N_2 / N_1)` for consecutive pairs.
pub fn observed_order(errors: &[(usize, f64)]) -> Result<Vec<f64>> {
    if let Some((_, e)) = errors.iter().find(|(_, e)| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "errors must be positive, got {e}"
        )));
    }
    errors
        .windows(2)
        .map(|w| {
            let ((n1, e1), (n2, e2)) = (w[0], w[1]);
            if n2 <= n1 {
                return Err(Error::InvalidParameter(
                    "step counts must be strictly increasing".into(),
                ));
            }
            Ok((e1 / e2).ln() / (n2 as f64 / n1 as f64).ln())
        })
        .collect()
}
