//! Symmetric tridiagonal matrices and real polynomial operators
//! `c0 I + c1 D + c2 D^2` built on them.
//!
//! Every operator in the crate (the problem coefficients, step operators,
//! energy operators) is a quadratic polynomial in one shared tridiagonal
//! matrix. Solves therefore reduce to at most two shifted tridiagonal
//! eliminations once the polynomial is factored over the reals.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};

/// Discriminants in `[-DISCRIMINANT_TIE * scale, 0)` are treated as a double root.
const DISCRIMINANT_TIE: f64 = 1e-14;

/// Euclidean inner product.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Euclidean norm.
pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Symmetric tridiagonal matrix, storing the main diagonal and one off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidParameter(
                "matrix dimension must be >= 1".into(),
            ));
        }
        check_len(diag.len() - 1, offdiag.len())?;
        Ok(Self { diag, offdiag })
    }

    /// `value * I` of dimension `n`.
    pub fn scaled_identity(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n], vec![0.0; n.saturating_sub(1)])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.offdiag[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Dense copy, row major. Intended for tests and small diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.offdiag[i];
                m[i + 1][i] = self.offdiag[i];
            }
        }
        m
    }
}

/// The polynomial operator `c0 I + c1 D + c2 D^2` for a symmetric tridiagonal `D`.
#[derive(Debug, Clone)]
pub struct PolyOperator {
    base: Arc<SymTridiag>,
    c0: f64,
    c1: f64,
    c2: f64,
}

impl PartialEq for PolyOperator {
    fn eq(&self, other: &Self) -> bool {
        self.same_base(other) && self.coeffs() == other.coeffs()
    }
}

impl PolyOperator {
    pub fn new(base: Arc<SymTridiag>, c0: f64, c1: f64, c2: f64) -> Self {
        Self { base, c0, c1, c2 }
    }

    pub fn identity(base: Arc<SymTridiag>) -> Self {
        Self::new(base, 1.0, 0.0, 0.0)
    }

    /// `c0 I` on the dimension of `base`.
    pub fn scalar(base: Arc<SymTridiag>, c0: f64) -> Self {
        Self::new(base, c0, 0.0, 0.0)
    }

    /// `D` itself.
    pub fn base_matrix(base: Arc<SymTridiag>) -> Self {
        Self::new(base, 0.0, 1.0, 0.0)
    }

    pub fn base(&self) -> &Arc<SymTridiag> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `(c0, c1, c2)`.
    pub fn coeffs(&self) -> (f64, f64, f64) {
        (self.c0, self.c1, self.c2)
    }

    pub fn same_base(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base
    }

    /// `self_weight * self + other_weight * other`.
    pub fn combine(&self, self_weight: f64, other: &Self, other_weight: f64) -> Result<Self> {
        if !self.same_base(other) {
            return Err(Error::BaseMismatch);
        }
        Ok(Self::new(
            Arc::clone(&self.base),
            self_weight * self.c0 + other_weight * other.c0,
            self_weight * self.c1 + other_weight * other.c1,
            self_weight * self.c2 + other_weight * other.c2,
        ))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            Arc::clone(&self.base),
            factor * self.c0,
            factor * self.c1,
            factor * self.c2,
        )
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        let n = self.dim();
        let mut out: Vec<f64> = x.iter().map(|v| self.c0 * v).collect();
        if self.c1 != 0.0 || self.c2 != 0.0 {
            let mut dx = vec![0.0; n];
            self.base.apply_into(x, &mut dx);
            if self.c2 != 0.0 {
                let mut ddx = vec![0.0; n];
                self.base.apply_into(&dx, &mut ddx);
                for i in 0..n {
                    out[i] += self.c1 * dx[i] + self.c2 * ddx[i];
                }
            } else {
                for i in 0..n {
                    out[i] += self.c1 * dx[i];
                }
            }
        }
        Ok(out)
    }

    /// `(P u, u)` evaluated as `c0 |u|^2 + c1 (D u, u) + c2 |D u|^2`.
    pub fn quadratic_form(&self, u: &[f64]) -> Result<f64> {
        check_len(self.dim(), u.len())?;
        let mut q = self.c0 * dot(u, u);
        if self.c1 != 0.0 || self.c2 != 0.0 {
            let mut du = vec![0.0; u.len()];
            self.base.apply_into(u, &mut du);
            q += self.c1 * dot(&du, u) + self.c2 * dot(&du, &du);
        }
        Ok(q)
    }

    /// `|u|_P = (P u, u)^{1/2}`.
    pub fn weighted_norm(&self, u: &[f64]) -> Result<f64> {
        let q = self.quadratic_form(u)?;
        if q < 0.0 {
            return Err(Error::NegativeQuadraticForm(q));
        }
        Ok(q.sqrt())
    }

    /// `|u|_{P^{-1}} = (P^{-1} u, u)^{1/2}`.
    pub fn inv_weighted_norm(&self, u: &[f64]) -> Result<f64> {
        self.factorize()?.inv_weighted_norm(u)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), b.len())?;
        self.factorize()?.solve(b)
    }

    /// Checks positive definiteness, then factors the polynomial over the
    /// reals as `c2 (D - r1 I)(D - r2 I)` (or its linear/constant reduction)
    /// and eliminates each shifted factor.
    pub fn factorize(&self) -> Result<FactoredOperator> {
        if !self.is_spd() {
            return Err(Error::NotSpd);
        }
        let (c0, c1, c2) = self.coeffs();
        if c2 == 0.0 {
            return FactoredOperator::from_linear_factors(&self.base, 1.0, &[(c1, c0)]);
        }
        let discriminant = c1 * c1 - 4.0 * c2 * c0;
        let scale = (c1 * c1).max((4.0 * c2 * c0).abs());
        let (r1, r2) = if discriminant >= 0.0 {
            let sq = discriminant.sqrt();
            let q = -0.5 * (c1 + sq.copysign(c1));
            if q == 0.0 {
                (0.0, 0.0)
            } else {
                (q / c2, c0 / q)
            }
        } else if discriminant >= -DISCRIMINANT_TIE * scale {
            let r = -c1 / (2.0 * c2);
            (r, r)
        } else {
            return Err(Error::ComplexRoots { discriminant });
        };
        FactoredOperator::from_linear_factors(&self.base, c2, &[(1.0, -r1), (1.0, -r2)])
    }

    /// Symmetric band of the assembled matrix: `bands[k][i] = P[i][i + k]`.
    /// Factors an SPD operator whose polynomial has complex roots as
    /// `c2 (D + s I)(D + conj(s) I)` with `s = c1 / (2 c2) + i sqrt(-disc) / (2 c2)`.
    /// [`Self::factorize`] never takes this route.
    pub fn factorize_conjugate_pair(&self) -> Result<FactoredOperator> {
        if !self.is_spd() {
            return Err(Error::NotSpd);
        }
        let (c0, c1, c2) = self.coeffs();
        let discriminant = c1 * c1 - 4.0 * c2 * c0;
        if !(c2 > 0.0 && discriminant < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "no conjugate root pair for coefficients ({c0}, {c1}, {c2})"
            )));
        }
        let shift = Complex64::new(c1 / (2.0 * c2), (-discriminant).sqrt() / (2.0 * c2));
        FactoredOperator::from_conjugate_pair(&self.base, c2, shift)
    }

    pub fn banded(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let d = self.base.diag();
        let e = self.base.offdiag();
        let mut main: Vec<f64> = d.iter().map(|di| self.c0 + self.c1 * di).collect();
        let mut first: Vec<f64> = e.iter().map(|ei| self.c1 * ei).collect();
        if self.c2 == 0.0 {
            return if self.c1 == 0.0 {
                vec![main]
            } else {
                vec![main, first]
            };
        }
        let mut second = vec![0.0; n.saturating_sub(2)];
        for i in 0..n {
            let mut sq = d[i] * d[i];
            if i > 0 {
                sq += e[i - 1] * e[i - 1];
            }
            if i + 1 < n {
                sq += e[i] * e[i];
                first[i] += self.c2 * e[i] * (d[i] + d[i + 1]);
            }
            if i + 2 < n {
                second[i] = self.c2 * e[i] * e[i + 1];
            }
            main[i] += self.c2 * sq;
        }
        vec![main, first, second]
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let bands = self.banded();
        let mut m = vec![vec![0.0; n]; n];
        for (k, band) in bands.iter().enumerate() {
            for (i, v) in band.iter().enumerate() {
                m[i][i + k] = *v;
                m[i + k][i] = *v;
            }
        }
        m
    }

    /// True iff an unpivoted `L D L^T` factorization of the assembled band
    /// matrix produces only positive pivots.
    pub fn is_spd(&self) -> bool {
        banded_ldl_pivots(&self.banded()).is_some_and(|p| p.iter().all(|&d| d > 0.0))
    }
}

/// Pivot test for positive definiteness. See [`PolyOperator::is_spd`].
pub fn spd_check(op: &PolyOperator) -> bool {
    op.is_spd()
}

/// Pivots of the symmetric band factorization; `None` once a pivot is not
/// positive (the elimination cannot continue meaningfully past it).
fn banded_ldl_pivots(bands: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = bands[0].len();
    let bw = bands.len() - 1;
    let entry = |i: usize, j: usize| -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        if hi - lo > bw {
            0.0
        } else {
            bands[hi - lo][lo]
        }
    };
    // lower[i][m] = L[i][i - m]
    let mut lower = vec![[0.0f64; 3]; n];
    let mut pivots = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = entry(j, j);
        for m in 1..=bw.min(j) {
            dj -= lower[j][m] * lower[j][m] * pivots[j - m];
        }
        if !(dj > 0.0) || !dj.is_finite() {
            return None;
        }
        pivots.push(dj);
        for i in (j + 1)..n.min(j + bw + 1) {
            let mut s = entry(i, j);
            for k in i.saturating_sub(bw)..j {
                if j - k <= bw {
                    s -= lower[i][i - k] * lower[j][j - k] * pivots[k];
                }
            }
            lower[i][i - j] = s / dj;
        }
    }
    Some(pivots)
}

/// `L D L^T` factors of one symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
struct TridiagLdl {
    pivots: Vec<f64>,
    multipliers: Vec<f64>,
}

impl TridiagLdl {
    fn new(diag: &[f64], offdiag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut pivots = Vec::with_capacity(n);
        let mut multipliers = Vec::with_capacity(n.saturating_sub(1));
        let mut d = diag[0];
        for i in 0..n {
            if i > 0 {
                let l = offdiag[i - 1] / pivots[i - 1];
                multipliers.push(l);
                d = diag[i] - l * offdiag[i - 1];
            }
            if d == 0.0 || !d.is_finite() {
                return Err(Error::SingularFactor { row: i });
            }
            pivots.push(d);
        }
        Ok(Self {
            pivots,
            multipliers,
        })
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 1..n {
            x[i] -= self.multipliers[i - 1] * x[i - 1];
        }
        x[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = x[i] / self.pivots[i] - self.multipliers[i] * x[i + 1];
        }
    }
}

/// `L D L^T` factors of `D + s I` for complex `s` with `Re s > 0` (complex
/// symmetric, so no conjugation in the factors).
#[derive(Debug, Clone)]
struct ComplexTridiagLdl {
    pivots: Vec<Complex64>,
    multipliers: Vec<Complex64>,
}

impl ComplexTridiagLdl {
    fn new(base: &SymTridiag, shift: Complex64) -> Result<Self> {
        let n = base.dim();
        let mut pivots: Vec<Complex64> = Vec::with_capacity(n);
        let mut multipliers = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let mut d = base.diag()[i] + shift;
            if i > 0 {
                let e = base.offdiag()[i - 1];
                let l = e / pivots[i - 1];
                multipliers.push(l);
                d -= l * e;
            }
            if d.norm() == 0.0 || !d.is_finite() {
                return Err(Error::SingularFactor { row: i });
            }
            pivots.push(d);
        }
        Ok(Self {
            pivots,
            multipliers,
        })
    }

    /// Solves with the factors, or with their conjugates.
    fn solve_in_place(&self, x: &mut [Complex64], conjugate: bool) {
        let n = x.len();
        let c = |z: Complex64| if conjugate { z.conj() } else { z };
        for i in 1..n {
            let prev = x[i - 1];
            x[i] -= c(self.multipliers[i - 1]) * prev;
        }
        x[n - 1] /= c(self.pivots[n - 1]);
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] = x[i] / c(self.pivots[i]) - c(self.multipliers[i]) * next;
        }
    }
}

#[derive(Debug, Clone)]
enum Factor {
    Real(TridiagLdl),
    /// `(D + s I)(D + conj(s) I)`
    Pair(ComplexTridiagLdl),
}

/// A polynomial operator written as `scale * prod_k (a_k D + b_k I)` with
/// every factor already eliminated. Solves cost O(n) per factor.
#[derive(Debug, Clone)]
pub struct FactoredOperator {
    dim: usize,
    scale: f64,
    factors: Vec<Factor>,
}

impl FactoredOperator {
    /// Factors `scale * prod (a D + b I)` for the given `(a, b)` pairs.
    pub fn from_linear_factors(
        base: &SymTridiag,
        scale: f64,
        factors: &[(f64, f64)],
    ) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::SingularFactor { row: 0 });
        }
        let factors = factors
            .iter()
            .map(|&(a, b)| {
                let diag: Vec<f64> = base.diag().iter().map(|d| a * d + b).collect();
                let off: Vec<f64> = base.offdiag().iter().map(|e| a * e).collect();
                TridiagLdl::new(&diag, &off).map(Factor::Real)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: base.dim(),
            scale,
            factors,
        })
    }

    /// Factors `scale * (D + s I)(D + conj(s) I)`, the real operator
    /// `scale * (D^2 + 2 Re(s) D + |s|^2 I)`. Needs `Re s > 0`.
    pub fn from_conjugate_pair(base: &SymTridiag, scale: f64, shift: Complex64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::SingularFactor { row: 0 });
        }
        if !(shift.re > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "conjugate pair shift needs a positive real part, got {shift}"
            )));
        }
        Ok(Self {
            dim: base.dim(),
            scale,
            factors: vec![Factor::Pair(ComplexTridiagLdl::new(base, shift)?)],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, b.len())?;
        let mut x: Vec<f64> = b.iter().map(|v| v / self.scale).collect();
        for f in &self.factors {
            match f {
                Factor::Real(ldl) => ldl.solve_in_place(&mut x),
                Factor::Pair(ldl) => {
                    let mut z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                    ldl.solve_in_place(&mut z, false);
                    ldl.solve_in_place(&mut z, true);
                    for (xi, zi) in x.iter_mut().zip(&z) {
                        *xi = zi.re;
                    }
                }
            }
        }
        Ok(x)
    }

    pub fn inv_weighted_norm(&self, u: &[f64]) -> Result<f64> {
        let x = self.solve(u)?;
        let q = dot(&x, u);
        if q < 0.0 {
            return Err(Error::NegativeQuadraticForm(q));
        }
        Ok(q.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(m: usize) -> Arc<SymTridiag> {
        let h = 1.0 / m as f64;
        let n = m - 1;
        Arc::new(
            SymTridiag::new(
                vec![2.0 / (h * h); n],
                vec![-1.0 / (h * h); n.saturating_sub(1)],
            )
            .unwrap(),
        )
    }

    fn scalar_base(v: f64) -> Arc<SymTridiag> {
        Arc::new(SymTridiag::new(vec![v], vec![]).unwrap())
    }

    #[test]
    fn identity_apply() {
        let base = Arc::new(SymTridiag::scaled_identity(3, 5.0).unwrap());
        let id = PolyOperator::identity(base);
        assert_eq!(id.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn apply_scalar_cases() {
        let d = laplacian(2);
        assert_eq!(d.diag(), &[8.0]);
        let dop = PolyOperator::base_matrix(Arc::clone(&d));
        assert_eq!(dop.apply(&[1.0]).unwrap(), vec![8.0]);
        let b = PolyOperator::new(d, 1.0, 0.02, 0.0);
        assert!((b.apply(&[1.0]).unwrap()[0] - 1.16).abs() < 1e-15);
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let op = PolyOperator::identity(laplacian(4));
        assert_eq!(
            op.apply(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 1
            })
        );
        assert!(op.solve(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn solve_examples() {
        let id = PolyOperator::identity(laplacian(5));
        assert_eq!(
            id.solve(&[1.0, -2.0, 3.0, 4.0]).unwrap(),
            vec![1.0, -2.0, 3.0, 4.0]
        );

        let d = PolyOperator::base_matrix(laplacian(3));
        let x = d.solve(&[9.0, 9.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);

        // D + 0.5 D^2 with D = [2] is [4]
        let a = PolyOperator::new(scalar_base(2.0), 0.0, 1.0, 0.5);
        let x = a.solve(&[8.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn solve_rejects_complex_roots() {
        // D^2 + I has no real factorization but is SPD
        let op = PolyOperator::new(laplacian(6), 1.0, 0.0, 1.0);
        assert!(op.is_spd());
        assert!(matches!(
            op.solve(&[1.0; 5]),
            Err(Error::ComplexRoots { .. })
        ));
    }

    #[test]
    fn conjugate_pair_solve() {
        let op = PolyOperator::new(laplacian(6), 100.0, 2.0, 1.0);
        assert!(op.factorize().is_err());
        let b = [1.0, -2.0, 0.5, 3.0, 0.25];
        let x = op.factorize_conjugate_pair().unwrap().solve(&b).unwrap();
        let r = op.apply(&x).unwrap();
        let res: f64 = r
            .iter()
            .zip(&b)
            .map(|(p, q)| (p - q).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(res <= 1e-12 * norm(&b));
        // real roots are refused
        assert!(PolyOperator::new(laplacian(6), 1.0, 3.0, 1.0)
            .factorize_conjugate_pair()
            .is_err());
    }

    #[test]
    fn near_double_root_is_accepted() {
        // (D + I)^2 with the discriminant nudged slightly negative
        let c1 = 2.0;
        let c0 = 1.0 + 1e-16;
        let op = PolyOperator::new(laplacian(6), c0, c1, 1.0);
        let b = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let x = op.solve(&b).unwrap();
        let r = op.apply(&x).unwrap();
        let res: f64 = r
            .iter()
            .zip(&b)
            .map(|(p, q)| (p - q).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(res <= 1e-12 * norm(&b));
    }

    #[test]
    fn solve_rejects_non_spd() {
        let op = PolyOperator::new(laplacian(4), -1.0, 0.0, 0.0);
        assert_eq!(op.solve(&[1.0, 1.0, 1.0]), Err(Error::NotSpd));
    }

    #[test]
    fn weighted_norm_examples() {
        let id = PolyOperator::identity(laplacian(3));
        assert!((id.weighted_norm(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-15);
        let c = PolyOperator::scalar(scalar_base(8.0), 0.01);
        assert!((c.weighted_norm(&[1.0]).unwrap() - 0.1).abs() < 1e-15);
        let d = PolyOperator::base_matrix(laplacian(3));
        assert!((d.weighted_norm(&[1.0, 0.0]).unwrap() - 18f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn weighted_norm_raises_on_negative_form() {
        let op = PolyOperator::new(laplacian(3), -1.0, 0.0, 0.0);
        assert!(matches!(
            op.weighted_norm(&[1.0, 1.0]),
            Err(Error::NegativeQuadraticForm(_))
        ));
    }

    #[test]
    fn inv_weighted_norm_examples() {
        let id = PolyOperator::identity(laplacian(3));
        assert!((id.inv_weighted_norm(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-15);
        let a = PolyOperator::scalar(scalar_base(1.0), 4.0);
        assert!((a.inv_weighted_norm(&[2.0]).unwrap() - 1.0).abs() < 1e-15);
        let d = PolyOperator::base_matrix(laplacian(3));
        assert!((d.inv_weighted_norm(&[9.0, 9.0]).unwrap() - 18f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn spd_check_examples() {
        for m in [2, 3, 10, 101] {
            assert!(spd_check(&PolyOperator::base_matrix(laplacian(m))));
        }
        assert!(!spd_check(&PolyOperator::new(laplacian(5), 0.0, 0.0, 0.0)));
        // indefinite: D - lambda_max-ish I
        assert!(!spd_check(&PolyOperator::new(
            laplacian(5),
            -60.0,
            1.0,
            0.0
        )));
    }

    #[test]
    fn combine_requires_shared_base() {
        let a = PolyOperator::identity(laplacian(4));
        let b = PolyOperator::identity(laplacian(5));
        assert_eq!(a.combine(1.0, &b, 1.0), Err(Error::BaseMismatch));
        // equal-valued bases in different allocations are accepted
        let c = PolyOperator::base_matrix(laplacian(4));
        let s = a.combine(2.0, &c, 3.0).unwrap();
        assert_eq!(s.coeffs(), (2.0, 3.0, 0.0));
    }

    #[test]
    fn banded_matches_dense_square() {
        let base =
            Arc::new(SymTridiag::new(vec![3.0, 4.0, 5.0, 6.0], vec![-1.0, 0.5, 2.0]).unwrap());
        let dense = base.to_dense();
        let n = 4;
        let mut sq = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                sq[i][j] = (0..n).map(|k| dense[i][k] * dense[k][j]).sum();
            }
        }
        let op = PolyOperator::new(base, 0.0, 0.0, 1.0);
        let got = op.to_dense();
        for i in 0..n {
            for j in 0..n {
                assert!((got[i][j] - sq[i][j]).abs() < 1e-14, "{i},{j}");
            }
        }
    }
}
