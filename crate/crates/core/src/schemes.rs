//! Time integrators for `C u'' + B u' + A u = f`, `u(0) = u0`, `u'(0) = u0'`.
//!
//! * [`run_vector_scheme`]: two-level weighted scheme for the first-order
//!   system in `(u, v)`, `v = C u' + B u`, valid on any grid.
//! * [`run_three_level_uniform`]: classical three-level weighted scheme,
//!   uniform grids only.
//! * [`run_three_level_nonuniform`]: the vector scheme at `sigma = 1/2` with
//!   the auxiliary variable eliminated, giving a three-level scheme in `y`
//!   with the variable weight `tau_{n+1} / (tau_n + tau_{n+1})`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::linops::{FactoredOperator, PolyOperator};
use crate::timegrid::TimeGrid;

pub type RhsFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Right-hand side `f(t)`.
#[derive(Clone)]
pub enum Forcing {
    Zero,
    Function(RhsFn),
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Zero => f.write_str("Zero"),
            Forcing::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// How `f^{n+sigma}` is formed for a step from `t_n` of length `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhsSampling {
    /// `f(t_n + sigma tau)`
    #[default]
    Point,
    /// `sigma f(t_n + tau) + (1 - sigma) f(t_n)`
    Average,
}

impl fmt::Display for RhsSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RhsSampling::Point => "point",
            RhsSampling::Average => "average",
        })
    }
}

impl FromStr for RhsSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "point" => Ok(RhsSampling::Point),
            "average" => Ok(RhsSampling::Average),
            other => Err(Error::InvalidParameter(format!(
                "unknown rhs sampling '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Vector,
    ThreeLevelUniform,
    ThreeLevelNonuniform,
}

impl SchemeKind {
    /// Smallest weight for which the scheme's a priori estimate is guaranteed.
    pub fn stability_threshold(self) -> f64 {
        match self {
            SchemeKind::Vector | SchemeKind::ThreeLevelNonuniform => 0.5,
            SchemeKind::ThreeLevelUniform => 0.25,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Vector => "vector",
            SchemeKind::ThreeLevelUniform => "three-level-uniform",
            SchemeKind::ThreeLevelNonuniform => "three-level-nonuniform",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vector" => Ok(SchemeKind::Vector),
            "three-level-uniform" => Ok(SchemeKind::ThreeLevelUniform),
            "three-level-nonuniform" => Ok(SchemeKind::ThreeLevelNonuniform),
            other => Err(Error::InvalidParameter(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Factors per-step operators. Problems with known structure can install a
/// specialized solver; anything it does not recognise should fall back to
/// [`PolyOperator::factorize`].
pub trait StepSolver: Send + Sync {
    fn factorize(&self, op: &PolyOperator) -> Result<FactoredOperator>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GenericSolver;

impl StepSolver for GenericSolver {
    fn factorize(&self, op: &PolyOperator) -> Result<FactoredOperator> {
        op.factorize()
    }
}

/// Cauchy problem `C u'' + B u' + A u = f(t)`, `u(0) = u0`, `u'(0) = du0`.
#[derive(Clone)]
pub struct SecondOrderProblem {
    c: PolyOperator,
    b: PolyOperator,
    a: PolyOperator,
    forcing: Forcing,
    u0: Vec<f64>,
    du0: Vec<f64>,
    solver: Arc<dyn StepSolver>,
}

impl fmt::Debug for SecondOrderProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecondOrderProblem")
            .field("c", &self.c.coeffs())
            .field("b", &self.b.coeffs())
            .field("a", &self.a.coeffs())
            .field("dim", &self.dim())
            .field("forcing", &self.forcing)
            .finish()
    }
}

impl SecondOrderProblem {
    /// Validates that `C`, `B`, `A` share one base matrix, pass the pivot
    /// test, and match the initial data in dimension.
    pub fn new(
        c: PolyOperator,
        b: PolyOperator,
        a: PolyOperator,
        u0: Vec<f64>,
        du0: Vec<f64>,
    ) -> Result<Self> {
        if !c.same_base(&b) || !c.same_base(&a) {
            return Err(Error::BaseMismatch);
        }
        check_len(c.dim(), u0.len())?;
        check_len(c.dim(), du0.len())?;
        if !(c.is_spd() && b.is_spd() && a.is_spd()) {
            return Err(Error::NotSpd);
        }
        Ok(Self {
            c,
            b,
            a,
            forcing: Forcing::Zero,
            u0,
            du0,
            solver: Arc::new(GenericSolver),
        })
    }

    pub fn with_forcing<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        self.forcing = Forcing::Function(Arc::new(f));
        self
    }

    pub fn with_step_solver(mut self, solver: Arc<dyn StepSolver>) -> Self {
        self.solver = solver;
        self
    }

    pub fn step_solver(&self) -> &Arc<dyn StepSolver> {
        &self.solver
    }

    pub fn c(&self) -> &PolyOperator {
        &self.c
    }

    pub fn b(&self) -> &PolyOperator {
        &self.b
    }

    pub fn a(&self) -> &PolyOperator {
        &self.a
    }

    pub fn u0(&self) -> &[f64] {
        &self.u0
    }

    pub fn du0(&self) -> &[f64] {
        &self.du0
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.forcing, Forcing::Zero)
    }

    pub fn rhs(&self, t: f64) -> Result<Vec<f64>> {
        match &self.forcing {
            Forcing::Zero => Ok(vec![0.0; self.dim()]),
            Forcing::Function(f) => {
                let v = f(t);
                check_len(self.dim(), v.len())?;
                Ok(v)
            }
        }
    }

    pub(crate) fn factorize(&self, op: &PolyOperator) -> Result<FactoredOperator> {
        self.solver.factorize(op)
    }
}

/// Grid unknowns `(y, w)` at time `t`; `w` approximates `C u' + B u`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorState {
    pub t: f64,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

/// `y = u0`, `w = C u0' + B u0`, `t = 0`.
pub fn init_vector_state(problem: &SecondOrderProblem) -> Result<VectorState> {
    let mut w = problem.c.apply(&problem.du0)?;
    for (wi, bi) in w.iter_mut().zip(problem.b.apply(&problem.u0)?) {
        *wi += bi;
    }
    Ok(VectorState {
        t: 0.0,
        y: problem.u0.clone(),
        w,
    })
}

/// `f^{n+sigma}` for the step `[t_n, t_n + tau]`.
pub fn sample_rhs(
    problem: &SecondOrderProblem,
    t_n: f64,
    tau: f64,
    sigma: f64,
    sampling: RhsSampling,
) -> Result<Vec<f64>> {
    if problem.is_homogeneous() {
        return Ok(vec![0.0; problem.dim()]);
    }
    match sampling {
        RhsSampling::Point => problem.rhs(t_n + sigma * tau),
        RhsSampling::Average => {
            let lo = problem.rhs(t_n)?;
            let hi = problem.rhs(t_n + tau)?;
            Ok(lo
                .iter()
                .zip(&hi)
                .map(|(l, h)| sigma * h + (1.0 - sigma) * l)
                .collect())
        }
    }
}

/// `C + sigma tau B + sigma^2 tau^2 A`.
pub fn vector_step_operator(
    problem: &SecondOrderProblem,
    tau: f64,
    sigma: f64,
) -> Result<PolyOperator> {
    problem.c.combine(1.0, &problem.b, sigma * tau)?.combine(
        1.0,
        &problem.a,
        sigma * sigma * tau * tau,
    )
}

/// Remembers the factorization of the last step operator, so constant-step
/// runs factor once.
struct FactorCache {
    coeffs: Option<(f64, f64, f64)>,
    factored: Option<FactoredOperator>,
}

impl FactorCache {
    fn new() -> Self {
        Self {
            coeffs: None,
            factored: None,
        }
    }

    fn get(
        &mut self,
        problem: &SecondOrderProblem,
        op: &PolyOperator,
    ) -> Result<&FactoredOperator> {
        if self.coeffs != Some(op.coeffs()) || self.factored.is_none() {
            self.factored = Some(problem.factorize(op)?);
            self.coeffs = Some(op.coeffs());
        }
        Ok(self.factored.as_ref().expect("just factored"))
    }
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn step_with(
    problem: &SecondOrderProblem,
    state: &VectorState,
    tau: f64,
    sigma: f64,
    sampling: RhsSampling,
    cache: &mut FactorCache,
) -> Result<VectorState> {
    check_len(problem.dim(), state.y.len())?;
    check_len(problem.dim(), state.w.len())?;
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {tau}"
        )));
    }
    let f = sample_rhs(problem, state.t, tau, sigma, sampling)?;
    let ay = problem.a.apply(&state.y)?;

    // chi1 = w - (1 - sigma) tau A y + tau f
    let mut chi1 = state.w.clone();
    axpy(-(1.0 - sigma) * tau, &ay, &mut chi1);
    axpy(tau, &f, &mut chi1);

    // chi2 = (C - (1 - sigma) tau B) y + (1 - sigma) tau w
    let mut chi2 = problem.c.apply(&state.y)?;
    axpy(-(1.0 - sigma) * tau, &problem.b.apply(&state.y)?, &mut chi2);
    axpy((1.0 - sigma) * tau, &state.w, &mut chi2);

    axpy(sigma * tau, &chi1, &mut chi2);
    let op = vector_step_operator(problem, tau, sigma)?;
    let y = cache.get(problem, &op)?.solve(&chi2)?;

    let mut w = chi1;
    axpy(-sigma * tau, &problem.a.apply(&y)?, &mut w);
    Ok(VectorState {
        t: state.t + tau,
        y,
        w,
    })
}

/// One step of the two-level vector scheme from `state` over `tau`.
pub fn vector_step(
    problem: &SecondOrderProblem,
    state: &VectorState,
    tau: f64,
    sigma: f64,
    sampling: RhsSampling,
) -> Result<VectorState> {
    step_with(
        problem,
        state,
        tau,
        sigma,
        sampling,
        &mut FactorCache::new(),
    )
}

/// Computed solution on every level of a grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    scheme: SchemeKind,
    sigma: f64,
    sampling: RhsSampling,
    grid: TimeGrid,
    y: Vec<Vec<f64>>,
    w: Option<Vec<Vec<f64>>>,
}

impl Trajectory {
    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Sampling of the right-hand side. The uniform three-level scheme always
    /// samples `f` at the levels and reports [`RhsSampling::Point`].
    pub fn sampling(&self) -> RhsSampling {
        self.sampling
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `y^n` for `n = 0..=N`.
    pub fn y(&self) -> &[Vec<f64>] {
        &self.y
    }

    /// `w^n` for the vector scheme.
    pub fn w(&self) -> Option<&[Vec<f64>]> {
        self.w.as_deref()
    }

    pub fn final_y(&self) -> &[f64] {
        self.y.last().expect("trajectory has levels")
    }

    /// True when `sigma` is below the weight that guarantees stability.
    pub fn below_stability_threshold(&self) -> bool {
        self.sigma < self.scheme.stability_threshold()
    }

    /// Vector states; `None` unless the trajectory carries `w`.
    pub fn states(&self) -> Option<Vec<VectorState>> {
        let w = self.w.as_ref()?;
        Some(
            self.grid
                .levels()
                .iter()
                .zip(&self.y)
                .zip(w)
                .map(|((t, y), w)| VectorState {
                    t: *t,
                    y: y.clone(),
                    w: w.clone(),
                })
                .collect(),
        )
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "weight must be >= 0, got {sigma}"
        )))
    }
}

fn at_level(level: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::Step {
        level,
        source: Box::new(e),
    }
}

/// Runs the two-level vector scheme over `grid`.
pub fn run_vector_scheme(
    problem: &SecondOrderProblem,
    grid: &TimeGrid,
    sigma: f64,
    sampling: RhsSampling,
) -> Result<Trajectory> {
    check_sigma(sigma)?;
    let mut cache = FactorCache::new();
    let mut state = init_vector_state(problem)?;
    let mut ys = Vec::with_capacity(grid.len() + 1);
    let mut ws = Vec::with_capacity(grid.len() + 1);
    ys.push(state.y.clone());
    ws.push(state.w.clone());
    for (n, (&tau, &t_next)) in grid.steps().iter().zip(&grid.levels()[1..]).enumerate() {
        state = step_with(problem, &state, tau, sigma, sampling, &mut cache)
            .map_err(at_level(n + 1))?;
        state.t = t_next;
        ys.push(state.y.clone());
        ws.push(state.w.clone());
    }
    Ok(Trajectory {
        scheme: SchemeKind::Vector,
        sigma,
        sampling,
        grid: grid.clone(),
        y: ys,
        w: Some(ws),
    })
}

/// Runs the classical three-level weighted scheme with the first-order start
/// `y^1 = u0 + tau u0'`. Requires a uniform grid with at least two steps.
pub fn run_three_level_uniform(
    problem: &SecondOrderProblem,
    grid: &TimeGrid,
    sigma: f64,
) -> Result<Trajectory> {
    check_sigma(sigma)?;
    if grid.len() < 2 {
        return Err(Error::TooFewSteps {
            needed: 2,
            found: grid.len(),
        });
    }
    if !grid.is_uniform() {
        return Err(Error::NonUniformGrid);
    }
    let tau = grid.steps()[0];
    let levels = grid.levels();

    let mut ys = Vec::with_capacity(grid.len() + 1);
    ys.push(problem.u0.clone());
    let mut y1 = problem.u0.clone();
    axpy(tau, &problem.du0, &mut y1);
    ys.push(y1);

    // C + tau/2 B + sigma tau^2 A
    let op = problem.c.combine(1.0, &problem.b, 0.5 * tau)?.combine(
        1.0,
        &problem.a,
        sigma * tau * tau,
    )?;
    let factored = problem.factorize(&op).map_err(at_level(2))?;

    for n in 1..grid.len() {
        let (prev, cur) = (&ys[n - 1], &ys[n]);
        let step = || -> Result<Vec<f64>> {
            let two_cur_minus_prev: Vec<f64> =
                cur.iter().zip(prev).map(|(c, p)| 2.0 * c - p).collect();
            let mut rhs = problem.c.apply(&two_cur_minus_prev)?;
            axpy(0.5 * tau, &problem.b.apply(prev)?, &mut rhs);
            let mix: Vec<f64> = cur
                .iter()
                .zip(prev)
                .map(|(c, p)| (1.0 - 2.0 * sigma) * c + sigma * p)
                .collect();
            axpy(-tau * tau, &problem.a.apply(&mix)?, &mut rhs);
            if !problem.is_homogeneous() {
                axpy(tau * tau, &problem.rhs(levels[n])?, &mut rhs);
            }
            factored.solve(&rhs)
        };
        let next = step().map_err(at_level(n + 1))?;
        ys.push(next);
    }
    Ok(Trajectory {
        scheme: SchemeKind::ThreeLevelUniform,
        sigma,
        sampling: RhsSampling::Point,
        grid: grid.clone(),
        y: ys,
        w: None,
    })
}

/// Runs the eliminated three-level scheme on an arbitrary grid. The first
/// level comes from one vector step at `sigma = 1/2`; every later level solves
/// `(C + tau/2 B + tau^2/4 A) y^{n+1} = chi` with `tau = tau_{n+1}`.
pub fn run_three_level_nonuniform(
    problem: &SecondOrderProblem,
    grid: &TimeGrid,
    sampling: RhsSampling,
) -> Result<Trajectory> {
    const SIGMA: f64 = 0.5;
    if grid.len() < 2 {
        return Err(Error::TooFewSteps {
            needed: 2,
            found: grid.len(),
        });
    }
    let steps = grid.steps();
    let levels = grid.levels();
    let mut cache = FactorCache::new();

    let start = init_vector_state(problem)?;
    let first =
        step_with(problem, &start, steps[0], SIGMA, sampling, &mut cache).map_err(at_level(1))?;
    let mut ys = Vec::with_capacity(grid.len() + 1);
    ys.push(start.y);
    ys.push(first.y);

    for n in 1..grid.len() {
        let tau_prev = steps[n - 1];
        let tau = steps[n];
        let (prev, cur) = (&ys[n - 1], &ys[n]);
        let mut step = || -> Result<Vec<f64>> {
            let ratio = tau / tau_prev;
            // C (y^n + (tau_{n+1}/tau_n)(y^n - y^{n-1}))
            let extrap: Vec<f64> = cur
                .iter()
                .zip(prev)
                .map(|(c, p)| c + ratio * (c - p))
                .collect();
            let mut rhs = problem.c.apply(&extrap)?;
            axpy(0.5 * tau, &problem.b.apply(prev)?, &mut rhs);
            let mix: Vec<f64> = cur
                .iter()
                .zip(prev)
                .map(|(c, p)| (tau + tau_prev) * c + tau_prev * p)
                .collect();
            axpy(-0.25 * tau, &problem.a.apply(&mix)?, &mut rhs);
            if !problem.is_homogeneous() {
                let f_next = sample_rhs(problem, levels[n], tau, SIGMA, sampling)?;
                let f_prev = sample_rhs(problem, levels[n - 1], tau_prev, SIGMA, sampling)?;
                axpy(0.5 * tau * tau, &f_next, &mut rhs);
                axpy(0.5 * tau * tau_prev, &f_prev, &mut rhs);
            }
            let op = vector_step_operator(problem, tau, SIGMA)?;
            cache.get(problem, &op)?.solve(&rhs)
        };
        let next = step().map_err(at_level(n + 1))?;
        ys.push(next);
    }
    Ok(Trajectory {
        scheme: SchemeKind::ThreeLevelNonuniform,
        sigma: SIGMA,
        sampling,
        grid: grid.clone(),
        y: ys,
        w: None,
    })
}

/// Auxiliary variable `w^n` along a trajectory.
///
/// Vector-scheme trajectories carry it. For the eliminated scheme it is rebuilt
/// from the first vector equation at `sigma = 1/2`:
/// `w^{n+1} = 2 (C (y^{n+1} - y^n) / tau + B (y^{n+1} + y^n) / 2) - w^n`, `w^0 = C u0' + B u0`.
pub fn recover_aux(problem: &SecondOrderProblem, trajectory: &Trajectory) -> Result<Vec<Vec<f64>>> {
    if let Some(w) = trajectory.w() {
        return Ok(w.to_vec());
    }
    if trajectory.scheme == SchemeKind::ThreeLevelUniform {
        return Err(Error::InvalidParameter(
            "the uniform three-level scheme has no auxiliary variable".into(),
        ));
    }
    let mut ws = Vec::with_capacity(trajectory.y.len());
    ws.push(init_vector_state(problem)?.w);
    for (n, &tau) in trajectory.grid.steps().iter().enumerate() {
        let (cur, next) = (&trajectory.y[n], &trajectory.y[n + 1]);
        let diff: Vec<f64> = next.iter().zip(cur).map(|(a, b)| (a - b) / tau).collect();
        let mean: Vec<f64> = next.iter().zip(cur).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut w = problem.c.apply(&diff)?;
        axpy(1.0, &problem.b.apply(&mean)?, &mut w);
        for (wi, wp) in w.iter_mut().zip(&ws[n]) {
            *wi = 2.0 * *wi - wp;
        }
        ws.push(w);
    }
    Ok(ws)
}
