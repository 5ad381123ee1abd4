use num_traits::{Signed, Zero};

use super::QuadError;
use crate::rational::Rational;

/// `M = Σ_k d_k l_k l_kᵀ` with every `d_k > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdlFactorization {
    /// Pivot indices in elimination order.
    pub pivots: Vec<usize>,
    pub columns: Vec<Vec<Rational>>,
    pub diagonal: Vec<Rational>,
}

impl LdlFactorization {
    pub fn reconstruct(&self, n: usize) -> Vec<Vec<Rational>> {
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (l, d) in self.columns.iter().zip(&self.diagonal) {
            for i in 0..n {
                if l[i].is_zero() {
                    continue;
                }
                let li = &l[i] * d;
                for j in 0..n {
                    m[i][j] += &li * &l[j];
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsdResult {
    Psd(LdlFactorization),
    /// `vᵀ M v < 0`.
    NotPsd { witness: Vec<Rational> },
}

impl PsdResult {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdResult::Psd(_))
    }
}

pub fn is_symmetric(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    m.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

pub fn quadratic_value(m: &[Vec<Rational>], v: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (i, row) in m.iter().enumerate() {
        if v[i].is_zero() {
            continue;
        }
        let mut r = Rational::zero();
        for (a, x) in row.iter().zip(v) {
            r += a * x;
        }
        s += &v[i] * r;
    }
    s
}

/// Exact pivoted elimination: eliminate on the largest positive diagonal
/// until none is left; the remaining block must then be zero.
pub fn psd_check(m: &[Vec<Rational>]) -> Result<PsdResult, QuadError> {
    if !is_symmetric(m) {
        return Err(QuadError::Asymmetric);
    }
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    let mut diagonal = Vec::new();

    let witness = loop {
        if let Some(&i) = active.iter().find(|&&i| a[i][i].is_negative()) {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::from_integer(1.into());
            break Some(v);
        }
        let pivot = active.iter().copied().filter(|&i| a[i][i].is_positive()).max_by(|&i, &j| {
            a[i][i].cmp(&a[j][j]).then(j.cmp(&i))
        });
        let Some(p) = pivot else {
            // Zero diagonal: any non-zero entry a_ij gives (e_i − sign(a_ij) e_j)ᵀ A (…) < 0.
            let off = active
                .iter()
                .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                .find(|&(i, j)| i < j && !a[i][j].is_zero());
            break off.map(|(i, j)| {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::from_integer(1.into());
                v[j] = if a[i][j].is_positive() { Rational::from_integer((-1).into()) } else { v[i].clone() };
                v
            });
        };
        let d = a[p][p].clone();
        let mut l = vec![Rational::zero(); n];
        for &i in &active {
            l[i] = &a[i][p] / &d;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            if l[i].is_zero() {
                continue;
            }
            for &j in &active {
                let delta = &l[i] * &a[p][j];
                a[i][j] -= delta;
            }
        }
        pivots.push(p);
        columns.push(l);
        diagonal.push(d);
    };

    match witness {
        None => Ok(PsdResult::Psd(LdlFactorization { pivots, columns, diagonal })),
        Some(mut v) => {
            // Undo the eliminations: v_p = −Σ l_i v_i keeps vᵀAv equal to the Schur form.
            for (p, l) in pivots.iter().zip(&columns).rev() {
                let mut s = Rational::zero();
                for (i, li) in l.iter().enumerate() {
                    if i != *p && !li.is_zero() {
                        s += li * &v[i];
                    }
                }
                v[*p] = -s;
            }
            debug_assert!(quadratic_value(m, &v).is_negative());
            Ok(PsdResult::NotPsd { witness: v })
        }
    }
}
