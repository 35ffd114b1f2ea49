//! Bi-parabolic benchmark `(d/dt + D) u + alpha (d/dt + D)^2 u = 0` on the
//! unit interval with homogeneous Dirichlet conditions.
//!
//! Written as `C u'' + B u' + A u = 0` with `C = alpha I`, `B = I + 2 alpha D`,
//! `A = D + alpha D^2`, where `D` is the three-point grid Laplacian on the
//! interior nodes `x_j = j h`, `j = 1..M-1`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::linops::{FactoredOperator, PolyOperator, SymTridiag};
use crate::schemes::{SecondOrderProblem, StepSolver};

/// Number of intervals `M = 1/h`, rejecting non-integer or too-coarse meshes.
pub fn intervals(h: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidMesh(h));
    }
    let m = (1.0 / h).round();
    if m < 2.0 || (m * h - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidMesh(h));
    }
    Ok(m as usize)
}

/// `D y = -(y(x+h) - 2 y(x) + y(x-h)) / h^2` with `y = 0` off the interior nodes.
pub fn build_laplacian(h: f64) -> Result<SymTridiag> {
    let m = intervals(h)?;
    let inv_h2 = (m * m) as f64;
    SymTridiag::new(vec![2.0 * inv_h2; m - 1], vec![-inv_h2; m - 2])
}

/// Interior nodes `j / M`.
pub fn nodes(h: f64) -> Result<Vec<f64>> {
    let m = intervals(h)?;
    Ok((1..m).map(|j| j as f64 / m as f64).collect())
}

/// `u0(x) = x` for `x <= 1/2`, `0` otherwise.
pub fn ramp_initial(h: f64) -> Result<Vec<f64>> {
    Ok(nodes(h)?
        .into_iter()
        .map(|x| if x <= 0.5 { x } else { 0.0 })
        .collect())
}

/// Assembled benchmark: mesh, Laplacian, initial data and its sine expansion.
#[derive(Debug, Clone)]
pub struct BiparabolicProblem {
    alpha: f64,
    h: f64,
    m: usize,
    laplacian: Arc<SymTridiag>,
    u0: Vec<f64>,
    eigenvalues: Vec<f64>,
    modal_u0: Vec<f64>,
    // sin(pi r / M), r = 0..2M
    sines: Vec<f64>,
}

pub fn assemble(alpha: f64, h: f64) -> Result<BiparabolicProblem> {
    BiparabolicProblem::new(alpha, h, None)
}

impl BiparabolicProblem {
    /// Benchmark with the ramp initial data, or with `u0` when given.
    pub fn new(alpha: f64, h: f64, u0: Option<Vec<f64>>) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be >= 0, got {alpha}"
            )));
        }
        let m = intervals(h)?;
        let laplacian = Arc::new(build_laplacian(h)?);
        let u0 = match u0 {
            Some(u) => {
                check_len(m - 1, u.len())?;
                u
            }
            None => ramp_initial(h)?,
        };
        let sines: Vec<f64> = (0..2 * m)
            .map(|r| (PI * r as f64 / m as f64).sin())
            .collect();
        let eigenvalues = (1..m)
            .map(|k| {
                let s = (PI * k as f64 / (2 * m) as f64).sin();
                4.0 * (m * m) as f64 * s * s
            })
            .collect();
        let mut this = Self {
            alpha,
            h,
            m,
            laplacian,
            u0,
            eigenvalues,
            modal_u0: Vec::new(),
            sines,
        };
        this.modal_u0 = this.sine_coefficients(&this.u0);
        Ok(this)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of interior nodes `M - 1`.
    pub fn dim(&self) -> usize {
        self.m - 1
    }

    pub fn nodes(&self) -> Vec<f64> {
        (1..self.m).map(|j| j as f64 / self.m as f64).collect()
    }

    pub fn laplacian(&self) -> &Arc<SymTridiag> {
        &self.laplacian
    }

    pub fn u0(&self) -> &[f64] {
        &self.u0
    }

    /// `lambda_k = (4 / h^2) sin^2(k pi h / 2)`, `k = 1..M-1`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `C = alpha I`
    pub fn c(&self) -> PolyOperator {
        PolyOperator::new(Arc::clone(&self.laplacian), self.alpha, 0.0, 0.0)
    }

    /// `B = I + 2 alpha D`
    pub fn b(&self) -> PolyOperator {
        PolyOperator::new(Arc::clone(&self.laplacian), 1.0, 2.0 * self.alpha, 0.0)
    }

    /// `A = D + alpha D^2`
    pub fn a(&self) -> PolyOperator {
        PolyOperator::new(Arc::clone(&self.laplacian), 0.0, 1.0, self.alpha)
    }

    /// Cauchy problem with `u'(0) = 0` and the factored step solver installed.
    /// Needs `alpha > 0`, since `C` must be positive definite.
    pub fn to_problem(&self) -> Result<SecondOrderProblem> {
        let problem = SecondOrderProblem::new(
            self.c(),
            self.b(),
            self.a(),
            self.u0.clone(),
            vec![0.0; self.dim()],
        )?;
        Ok(problem.with_step_solver(Arc::new(BiparabolicSolver { alpha: self.alpha })))
    }

    fn sine(&self, k: usize, j: usize) -> f64 {
        self.sines[(k * j) % (2 * self.m)]
    }

    /// Coefficients in the basis `sin(k pi x_j)`.
    pub fn sine_coefficients(&self, u: &[f64]) -> Vec<f64> {
        let scale = 2.0 / self.m as f64;
        (1..self.m)
            .map(|k| scale * (1..self.m).map(|j| u[j - 1] * self.sine(k, j)).sum::<f64>())
            .collect()
    }

    /// Inverse of [`Self::sine_coefficients`].
    pub fn sine_synthesis(&self, coeffs: &[f64]) -> Vec<f64> {
        (1..self.m)
            .map(|j| (1..self.m).map(|k| coeffs[k - 1] * self.sine(k, j)).sum())
            .collect()
    }

    /// Growth factor of mode `lambda` at time `t`:
    /// `(1 + alpha (1 - e^{-t/alpha}) lambda) e^{-lambda t}`, or `e^{-lambda t}` for `alpha = 0`.
    pub fn mode_factor(&self, lambda: f64, t: f64) -> f64 {
        let decay = (-lambda * t).exp();
        if self.alpha == 0.0 {
            decay
        } else {
            (1.0 - self.alpha * lambda * (-t / self.alpha).exp_m1()) * decay
        }
    }

    /// Exact solution of the semi-discrete problem at time `t`, evaluated in
    /// the sine eigenbasis of `D`. The formula is analytic in `t`, so negative
    /// times are evaluated too.
    pub fn exact_solution(&self, t: f64) -> Vec<f64> {
        let coeffs: Vec<f64> = self
            .eigenvalues
            .iter()
            .zip(&self.modal_u0)
            .map(|(&lambda, &c)| self.mode_factor(lambda, t) * c)
            .collect();
        self.sine_synthesis(&coeffs)
    }

    /// Step operator `R = alpha I + p (I + 2 alpha D) + p^2 (D + alpha D^2)`, `p = tau / 2`.
    pub fn step_operator(&self, tau: f64) -> PolyOperator {
        let p = 0.5 * tau;
        let a = self.alpha;
        PolyOperator::new(
            Arc::clone(&self.laplacian),
            a + p,
            p * p + 2.0 * a * p,
            a * p * p,
        )
    }

    /// Factors of `R = (p D + I)(alpha p D + (p + alpha) I)`.
    pub fn step_factors(&self, tau: f64) -> Result<FactoredOperator> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter(
                "factored solve needs alpha > 0".into(),
            ));
        }
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step must be >= 0, got {tau}"
            )));
        }
        let p = 0.5 * tau;
        FactoredOperator::from_linear_factors(
            &self.laplacian,
            1.0,
            &[(p, 1.0), (self.alpha * p, p + self.alpha)],
        )
    }

    /// Solves `R y = rhs` with two shifted tridiagonal eliminations.
    pub fn factored_step_solve(&self, tau: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        self.step_factors(tau)?.solve(rhs)
    }
}

/// Free-function form of [`BiparabolicProblem::factored_step_solve`].
pub fn factored_step_solve(
    problem: &BiparabolicProblem,
    tau: f64,
    rhs: &[f64],
) -> Result<Vec<f64>> {
    problem.factored_step_solve(tau, rhs)
}

/// Recognises the bi-parabolic step operator `R` for some `p > 0` and uses
/// its closed-form factors; other operators go through the generic path.
/// The vector step operator at weight `sigma` is `R` with `p = sigma tau`.
///
/// The three-level operator `C + tau/2 B + sigma tau^2 A` has discriminant
/// `tau^2 (alpha^2 (1 - 4 sigma) + sigma^2 tau^2)`, negative for
/// `sigma > 1/4` and small steps; such operators are eliminated as a complex
/// conjugate pair of shifted tridiagonal factors.
#[derive(Debug, Clone, Copy)]
pub struct BiparabolicSolver {
    pub alpha: f64,
}

impl BiparabolicSolver {
    fn match_half_step(&self, op: &PolyOperator) -> Option<f64> {
        let (c0, c1, c2) = op.coeffs();
        let a = self.alpha;
        let p = c0 - a;
        if !(p > 0.0) {
            return None;
        }
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs();
        (close(c1, p * p + 2.0 * a * p) && close(c2, a * p * p)).then_some(p)
    }
}

impl StepSolver for BiparabolicSolver {
    fn factorize(&self, op: &PolyOperator) -> Result<FactoredOperator> {
        match self.match_half_step(op) {
            Some(p) => FactoredOperator::from_linear_factors(
                op.base(),
                1.0,
                &[(p, 1.0), (self.alpha * p, p + self.alpha)],
            ),
            None => match op.factorize() {
                Err(Error::ComplexRoots { .. }) => op.factorize_conjugate_pair(),
                other => other,
            },
        }
    }
}
