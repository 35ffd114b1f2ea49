#![allow(dead_code, clippy::needless_range_loop)]

use std::sync::Arc;

use opdiff::{PolyOperator, SecondOrderProblem, SymTridiag};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Diagonally dominant, hence SPD, tridiagonal matrix.
pub fn random_base(rng: &mut ChaCha8Rng, n: usize) -> Arc<SymTridiag> {
    let off: Vec<f64> = (0..n.saturating_sub(1))
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let diag = (0..n).map(|_| rng.random_range(2.0..4.0)).collect();
    Arc::new(SymTridiag::new(diag, off).unwrap())
}

/// SPD operator with real roots: either `c0 I + c1 D` or `k (D + r1 I)(D + r2 I)`
/// with `r1, r2 > 0`.
pub fn random_spd_op(rng: &mut ChaCha8Rng, base: &Arc<SymTridiag>) -> PolyOperator {
    if rng.random_bool(0.5) {
        PolyOperator::new(
            Arc::clone(base),
            rng.random_range(0.1..2.0),
            rng.random_range(0.0..2.0),
            0.0,
        )
    } else {
        let k = rng.random_range(0.05..1.0);
        let r1 = rng.random_range(0.1..3.0);
        let r2 = rng.random_range(0.1..3.0);
        PolyOperator::new(Arc::clone(base), k * r1 * r2, k * (r1 + r2), k)
    }
}

/// `(D + r I)(g0 I + g1 D)` with positive `r`, `g0` and nonnegative `g1`.
fn shared_factor_op(
    rng: &mut ChaCha8Rng,
    base: &Arc<SymTridiag>,
    r: f64,
    linear: bool,
) -> PolyOperator {
    let g0 = rng.random_range(0.1..2.0);
    let g1 = if linear {
        0.0
    } else {
        rng.random_range(0.0..1.0)
    };
    PolyOperator::new(Arc::clone(base), r * g0, g0 + r * g1, g1)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_problem(seed: u64, n: usize, forced: bool) -> SecondOrderProblem {
    let mut r = rng(seed);
    let base = random_base(&mut r, n);
    // every combination of C, B, A keeps the common factor (D + r I), so all
    // step operators factor over the reals
    let shift = r.random_range(0.1..2.0);
    let c = shared_factor_op(&mut r, &base, shift, true);
    let b = shared_factor_op(&mut r, &base, shift, false);
    let a = shared_factor_op(&mut r, &base, shift, false);
    let u0 = random_vec(&mut r, n);
    let du0 = random_vec(&mut r, n);
    let p = SecondOrderProblem::new(c, b, a, u0, du0).unwrap();
    if forced {
        let amp = random_vec(&mut r, n);
        p.with_forcing(move |t| {
            amp.iter()
                .enumerate()
                .map(|(i, a)| a * (t * (i + 1) as f64).cos())
                .collect()
        })
    } else {
        p
    }
}

/// Steps drawn from `[0.75, 1.25] * tau`, so any two differ by at most 5/3.
pub fn random_steps(seed: u64, count: usize, tau: f64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| tau * r.random_range(0.75..=1.25))
        .collect()
}

pub fn dense_matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(m: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
            .unwrap();
        a.swap(k, p);
        x.swap(k, p);
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (x[k] - s) / a[k][k];
    }
    x
}

/// Dense Cholesky success as an SPD oracle.
pub fn dense_is_spd(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let d = m[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        l[j][j] = d.sqrt();
        for i in (j + 1)..n {
            l[i][j] = (m[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>()) / l[j][j];
        }
    }
    true
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `max_n |a^n - b^n|_inf / max_n |b^n|_inf`.
pub fn max_relative_deviation(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let scale = b.iter().map(|v| max_abs(v)).fold(0.0, f64::max);
    let dev = a
        .iter()
        .zip(b)
        .map(|(x, y)| max_abs(&sub(x, y)))
        .fold(0.0, f64::max);
    dev / scale
}

/// Grid norm of the residual of `C u'' + B u' + A u = 0` for the exact
/// solution at `t`, derivatives replaced by central differences with step `delta`.
pub fn exact_residual(bench: &opdiff::BiparabolicProblem, t: f64, delta: f64) -> f64 {
    let up = bench.exact_solution(t + delta);
    let u = bench.exact_solution(t);
    let um = bench.exact_solution(t - delta);
    let n = u.len();
    let second: Vec<f64> = (0..n)
        .map(|i| (up[i] - 2.0 * u[i] + um[i]) / (delta * delta))
        .collect();
    let first: Vec<f64> = (0..n).map(|i| (up[i] - um[i]) / (2.0 * delta)).collect();
    let c = bench.c().apply(&second).unwrap();
    let b = bench.b().apply(&first).unwrap();
    let a = bench.a().apply(&u).unwrap();
    let r: Vec<f64> = (0..n).map(|i| c[i] + b[i] + a[i]).collect();
    opdiff::l2_error(&r, &vec![0.0; n], bench.h()).unwrap()
}
