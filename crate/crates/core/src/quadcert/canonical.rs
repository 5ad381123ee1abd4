use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed, Zero};

use super::{psd_check, QuadError, QuadraticForm};
use crate::rational::{rationalize, to_f64, Rational};

/// Eigenvalues below this fraction of the largest count as zero.
pub const RANK_THRESHOLD: f64 = 1e-9;
/// Denominator cap for the rationalized transform.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// `y = matrix · x + offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub matrix: Vec<Vec<Rational>>,
    pub offset: Vec<Rational>,
}

impl AffineMap {
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, o)| row.iter().zip(x).fold(o.clone(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// Exact inverse, if the matrix is invertible.
    pub fn inverse(&self) -> Option<AffineMap> {
        let n = self.matrix.len();
        let mut aug: Vec<Vec<Rational>> = self
            .matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                r
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
            aug.swap(col, pivot);
            let inv = aug[col][col].recip();
            for v in aug[col].iter_mut() {
                *v *= &inv;
            }
            for r in 0..n {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    let pivot_row = aug[col].clone();
                    for (v, p) in aug[r].iter_mut().zip(&pivot_row) {
                        *v -= &f * p;
                    }
                }
            }
        }
        let matrix: Vec<Vec<Rational>> = aug.into_iter().map(|r| r[n..].to_vec()).collect();
        let offset = matrix
            .iter()
            .map(|row| -row.iter().zip(&self.offset).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect();
        Some(AffineMap { matrix, offset })
    }
}

/// `q(x) = a + Σ_{i ≤ m1} y_{m+i} − Σ_{i ≤ m} y_i²` with `y = forward(x)`,
/// up to the rationalization of the eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Canonical {
    pub m: usize,
    pub m1: usize,
    pub constant: Rational,
    pub form: QuadraticForm,
    pub forward: AffineMap,
    /// `q ∘ forward⁻¹`, computed exactly.
    pub pullback: QuadraticForm,
    /// Largest coefficient gap between `pullback` and `form`.
    pub residual: f64,
    pub eigenvalues: Vec<f64>,
}

/// Brings a concave quadratic to the canonical form through an orthogonal
/// change of variables, completing squares and collapsing the linear terms
/// on the null space into one coordinate (which sets `a = −1/4`).
pub fn canonicalize_quadratic(q: &QuadraticForm) -> Result<Canonical, QuadError> {
    let n = q.nvars();
    let neg: Vec<Vec<Rational>> = q.quad.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
    if !psd_check(&neg)?.is_psd() {
        return Err(QuadError::NotConcave);
    }
    let c = DMatrix::from_fn(n, n, |i, j| to_f64(&neg[i][j]));
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let top = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let m = eigenvalues.iter().filter(|&&l| l > RANK_THRESHOLD * top && l > 0.0).count();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .take(m)
        .map(|&k| {
            let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            // Sign convention: the largest entry is positive.
            let big = v.iter().copied().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
            if big < 0.0 {
                v.iter().map(|x| -x).collect()
            } else {
                v
            }
        })
        .collect();

    let b: Vec<f64> = q.linear.iter().map(to_f64).collect();
    let dot = |u: &[f64], w: &[f64]| -> f64 { u.iter().zip(w).map(|(a, b)| a * b).sum() };
    let mut null_b = b.clone();
    for v in &vectors {
        let t = dot(v, &b);
        null_b.iter_mut().zip(v).for_each(|(x, vi)| *x -= t * vi);
    }
    let b_scale = b.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let m1 = usize::from(null_b.iter().any(|x| x.abs() > 1e-9 * b_scale));
    if n != m + m1 {
        return Err(QuadError::ContainsLines { dimension: n, m, m1 });
    }

    let r = |x: f64| rationalize(x, MAX_DENOMINATOR);
    let mut matrix = Vec::with_capacity(n);
    let mut offset = Vec::with_capacity(n);
    let mut a = to_f64(&q.constant);
    for (k, v) in vectors.iter().enumerate() {
        let lam = eigenvalues[k];
        let beta = dot(v, &b);
        matrix.push(v.iter().map(|x| r(x * lam.sqrt())).collect());
        offset.push(r(-beta / (2.0 * lam.sqrt())));
        a += beta * beta / (4.0 * lam);
    }
    let constant = if m1 == 1 {
        matrix.push(null_b.iter().map(|&x| r(x)).collect());
        offset.push(r(a + 0.25));
        Rational::new((-1).into(), 4.into())
    } else {
        r(a)
    };
    let forward = AffineMap { matrix, offset };
    let inverse = forward.inverse().ok_or(QuadError::RankAmbiguous)?;

    let mut form = QuadraticForm::zero(n);
    form.constant = constant.clone();
    for i in 0..m {
        form.quad[i][i] = -Rational::one();
    }
    if m1 == 1 {
        form.linear[m] = Rational::one();
    }
    let pullback = q.compose(&inverse);
    let residual = pullback.max_difference(&form);
    Ok(Canonical { m, m1, constant, form, forward, pullback, residual, eigenvalues })
}
