//! Uniform and randomly perturbed time grids on `[0, T]`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Strictly increasing levels `0 = t_0 < t_1 < ... < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    steps: Vec<f64>,
    levels: Vec<f64>,
    seed: Option<u64>,
}

/// Step-size summary of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridStats {
    pub min_step: f64,
    pub max_step: f64,
    /// `max_n max(tau_{n+1} / tau_n, tau_n / tau_{n+1})`; 1 for single-step grids.
    pub max_adjacent_ratio: f64,
}

impl GridStats {
    /// Largest ratio between any two steps of the grid.
    pub fn max_pairwise_ratio(&self) -> f64 {
        self.max_step / self.min_step
    }
}

/// Compensated running sum.
#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn total(steps: &[f64]) -> f64 {
    let mut s = NeumaierSum::default();
    steps.iter().for_each(|&x| s.add(x));
    s.value()
}

impl TimeGrid {
    /// Builds a grid from explicit steps. The last level is the compensated
    /// sum of all steps.
    pub fn from_steps(steps: Vec<f64>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one step".into()));
        }
        if let Some(bad) = steps.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-positive step {bad}")));
        }
        let mut levels = Vec::with_capacity(steps.len() + 1);
        levels.push(0.0);
        let mut acc = NeumaierSum::default();
        for &tau in &steps {
            acc.add(tau);
            levels.push(acc.value());
        }
        Ok(Self {
            steps,
            levels,
            seed: None,
        })
    }

    /// `steps[n - 1]` is the step ending at level `n`.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of steps `N`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.levels.last().expect("grid has levels")
    }

    /// Seed that generated a random grid.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// True when all steps agree with the first to `1e-12` relative.
    pub fn is_uniform(&self) -> bool {
        let tau = self.steps[0];
        self.steps.iter().all(|s| (s - tau).abs() <= 1e-12 * tau)
    }

    pub fn stats(&self) -> GridStats {
        grid_stats(self)
    }

    /// CSV with header `n,t_n,tau_n`; the `tau_n` cell is empty on row 0.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,t_n,tau_n\n");
        for (n, t) in self.levels.iter().enumerate() {
            if n == 0 {
                let _ = writeln!(out, "0,{t:.16e},");
            } else {
                let _ = writeln!(out, "{n},{t:.16e},{:.16e}", self.steps[n - 1]);
            }
        }
        out
    }
}

/// `N` equal steps of `T / N`.
pub fn uniform_grid(final_time: f64, steps: usize) -> Result<TimeGrid> {
    if !(final_time > 0.0) || !final_time.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "final time must be positive, got {final_time}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidGrid("number of steps must be >= 1".into()));
    }
    TimeGrid::from_steps(vec![final_time / steps as f64; steps])
}

/// Random steps `tau (1 + q (xi - 1/2))`, `tau = T / N`, `xi ~ U[0, 1)`,
/// rescaled by one common factor so the grid ends at `T`.
pub fn random_grid(final_time: f64, steps: usize, q: f64, seed: u64) -> Result<TimeGrid> {
    if !(0.0..2.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in [0, 2), got {q}"
        )));
    }
    let uniform = uniform_grid(final_time, steps)?;
    let mut grid = if q == 0.0 {
        uniform
    } else {
        let tau = final_time / steps as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..steps)
            .map(|_| tau * (1.0 + q * (rng.random::<f64>() - 0.5)))
            .collect();
        let factor = final_time / total(&raw);
        TimeGrid::from_steps(raw.into_iter().map(|s| s * factor).collect())?
    };
    grid.seed = Some(seed);
    Ok(grid)
}

pub fn grid_stats(grid: &TimeGrid) -> GridStats {
    let steps = grid.steps();
    let min_step = steps.iter().copied().fold(f64::INFINITY, f64::min);
    let max_step = steps.iter().copied().fold(0.0, f64::max);
    let max_adjacent_ratio = steps
        .windows(2)
        .map(|w| (w[1] / w[0]).max(w[0] / w[1]))
        .fold(1.0, f64::max);
    GridStats {
        min_step,
        max_step,
        max_adjacent_ratio,
    }
}
