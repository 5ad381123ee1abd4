//! Exact rational feasibility for `A·v = b` with per-variable sign constraints.
//!
//! The solver is a dense-tableau phase-1 simplex with Bland's rule. Every
//! answer carries its own proof: a witness `v` when feasible, a Farkas ray
//! `y` when not.
//!
//! Farkas orientation used throughout the crate: `yᵀA_j ≥ 0` for every
//! non-negative column `j`, `yᵀA_j = 0` for every free column, and `yᵀb < 0`.
//! If a feasible `v` existed, `yᵀb = Σ_j (yᵀA_j) v_j ≥ 0` would contradict it.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarSign {
    Free,
    NonNegative,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("right-hand side has {got} entries, expected {expected}")]
    RhsLength { got: usize, expected: usize },
    #[error("sign vector has {got} entries, expected {expected}")]
    SignLength { got: usize, expected: usize },
}

/// Find `v` with `A·v = b` and `v_j ≥ 0` for every non-negative column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    sign: Vec<VarSign>,
}

impl LpProblem {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>, sign: Vec<VarSign>) -> Result<Self, LpError> {
        let cols = sign.len();
        if b.len() != a.len() {
            return Err(LpError::RhsLength { got: b.len(), expected: a.len() });
        }
        for (row, r) in a.iter().enumerate() {
            if r.len() != cols {
                return Err(LpError::RaggedRow { row, got: r.len(), expected: cols });
            }
        }
        Ok(LpProblem { a, b, sign })
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.sign.len()
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.a
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.b
    }

    pub fn signs(&self) -> &[VarSign] {
        &self.sign
    }

    /// Exact check of `A·v = b` and the sign constraints.
    pub fn check_witness(&self, v: &[Rational]) -> bool {
        if v.len() != self.cols() {
            return false;
        }
        let signs_ok = v
            .iter()
            .zip(&self.sign)
            .all(|(x, s)| *s == VarSign::Free || !x.is_negative());
        signs_ok
            && self.a.iter().zip(&self.b).all(|(row, bi)| {
                let lhs: Rational = row.iter().zip(v).map(|(a, x)| a * x).sum();
                &lhs == bi
            })
    }

    /// Exact check of the Farkas invariant documented at module level.
    pub fn check_farkas(&self, y: &[Rational]) -> bool {
        if y.len() != self.rows() {
            return false;
        }
        let yb: Rational = y.iter().zip(&self.b).map(|(a, b)| a * b).sum();
        if !yb.is_negative() {
            return false;
        }
        (0..self.cols()).all(|j| {
            let ya: Rational = y.iter().zip(&self.a).map(|(yi, row)| yi * &row[j]).sum();
            match self.sign[j] {
                VarSign::Free => ya.is_zero(),
                VarSign::NonNegative => !ya.is_negative(),
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible { witness: Vec<Rational> },
    Infeasible { farkas_ray: Vec<Rational> },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible { .. })
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    objective: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let nz: Vec<usize> = (0..self.width).filter(|&k| !self.rows[r][k].is_zero()).collect();
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &k in &nz {
                let t = &f * &pivot_row[k];
                row[k] -= t;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.objective);
        self.basis[r] = c;
    }
}

/// Decides feasibility exactly. Terminates by Bland's rule.
pub fn solve_feasibility(problem: &LpProblem) -> LpOutcome {
    let m = problem.rows();

    // Standard form: free columns split into a (+) and a (−) copy.
    let mut columns: Vec<(usize, bool)> = Vec::new();
    for (j, s) in problem.sign.iter().enumerate() {
        columns.push((j, false));
        if *s == VarSign::Free {
            columns.push((j, true));
        }
    }
    let ns = columns.len();
    let width = ns + m + 1;

    let flip: Vec<bool> = problem.b.iter().map(|b| b.is_negative()).collect();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let sgn = if flip[i] { -Rational::one() } else { Rational::one() };
        let mut row = vec![Rational::zero(); width];
        for (k, &(j, neg)) in columns.iter().enumerate() {
            let a = &problem.a[i][j];
            if !a.is_zero() {
                row[k] = if neg { -(a * &sgn) } else { a * &sgn };
            }
        }
        row[ns + i] = Rational::one();
        row[width - 1] = &problem.b[i] * &sgn;
        rows.push(row);
    }
    // Phase-1 reduced costs: c_j − 1ᵀA'_j with c = 1 on artificials.
    let mut objective = vec![Rational::zero(); width];
    for row in &rows {
        for k in 0..ns {
            objective[k] -= &row[k];
        }
        objective[width - 1] -= &row[width - 1];
    }
    let mut t = Tableau { rows, objective, basis: (ns..ns + m).collect(), width };

    loop {
        let Some(enter) = (0..ns).find(|&k| t.objective[k].is_negative()) else {
            break;
        };
        let rhs = t.rhs();
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            let a = &t.rows[i][enter];
            if !a.is_positive() {
                continue;
            }
            let ratio = &t.rows[i][rhs] / a;
            leave = match leave {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br || (ratio == br && t.basis[i] < t.basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        // Phase 1 is bounded below by zero, so a leaving row always exists.
        let (r, _) = leave.expect("phase-1 objective is bounded");
        t.pivot(r, enter);
    }

    let rhs = t.rhs();
    let infeasibility: Rational = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= ns)
        .map(|(i, _)| t.rows[i][rhs].clone())
        .sum();

    if infeasibility.is_zero() {
        let mut witness = vec![Rational::zero(); problem.cols()];
        for (i, &bv) in t.basis.iter().enumerate() {
            if bv < ns {
                let (j, neg) = columns[bv];
                let val = &t.rows[i][rhs];
                if neg {
                    witness[j] -= val;
                } else {
                    witness[j] += val;
                }
            }
        }
        debug_assert!(problem.check_witness(&witness));
        return LpOutcome::Feasible { witness };
    }

    // Phase-1 dual: yᵀ = c_Bᵀ B⁻¹, where B⁻¹ sits under the artificial columns.
    let mut dual = vec![Rational::zero(); m];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv >= ns {
            for (k, d) in dual.iter_mut().enumerate() {
                *d += &t.rows[i][ns + k];
            }
        }
    }
    // The phase-1 dual proves b'ᵀy > 0 with A'ᵀy ≤ 0; undo the row flips and negate.
    let farkas_ray: Vec<Rational> = dual
        .into_iter()
        .zip(&flip)
        .map(|(y, &f)| if f { y } else { -y })
        .collect();
    debug_assert!(problem.check_farkas(&farkas_ray));
    LpOutcome::Infeasible { farkas_ray }
}
