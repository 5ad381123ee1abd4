//! Degree-2 certificates `p + ε(1 + Σx_i²) = σ + λq + μh` with `σ` a sum of
//! squares, `λ ≥ 0` and `μ` free, for `p ≥ 0` on `{q ≥ 0, h = 0}` with `q`
//! concave and `h ≥ 0`.
//!
//! `σ` is certified by an exact PSD check of its Gram matrix in the basis
//! `(1, x_1, …, x_n)`. The pair `(λ, μ)` is found by a grid search in
//! `λ = sinh(u ln 10)`, `μ = sinh(v ln 10)`, refined around the best cell.

mod canonical;
mod psd;

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

pub use canonical::{canonicalize_quadratic, AffineMap, Canonical, MAX_DENOMINATOR, RANK_THRESHOLD};
pub use psd::{is_symmetric, psd_check, quadratic_value, LdlFactorization, PsdResult};

use crate::hierarchy::{value, CertificateParseError};
use crate::lp::{solve_feasibility, LpOutcome, LpProblem, VarSign};
use crate::poly::{Monomial, PolyError, Polynomial};
use crate::rational::{format_rational, parse_rational, rationalize, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadError {
    #[error("matrix is not symmetric")]
    Asymmetric,
    #[error("polynomial has degree {0}, above 2")]
    NotQuadratic(u32),
    #[error("q is not concave")]
    NotConcave,
    #[error("h is not non-negative")]
    NotNonnegative,
    #[error("{{q ≥ 0}} contains lines: n = {dimension}, m = {m}, m1 = {m1}")]
    ContainsLines { dimension: usize, m: usize, m1: usize },
    #[error("the rank of the quadratic part is ambiguous at the eigenvalue threshold")]
    RankAmbiguous,
    #[error("the sample point is not in {{q ≥ 0, h = 0}}")]
    BadSamplePoint,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `c + bᵀx + xᵀQx` with `Q` symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    pub constant: Rational,
    pub linear: Vec<Rational>,
    pub quad: Vec<Vec<Rational>>,
}

impl QuadraticForm {
    pub fn zero(n: usize) -> Self {
        QuadraticForm {
            constant: Rational::zero(),
            linear: vec![Rational::zero(); n],
            quad: vec![vec![Rational::zero(); n]; n],
        }
    }

    pub fn nvars(&self) -> usize {
        self.linear.len()
    }

    pub fn from_polynomial(p: &Polynomial) -> Result<Self, QuadError> {
        let n = p.nvars();
        let mut f = QuadraticForm::zero(n);
        let half = Rational::new(1.into(), 2.into());
        for (m, c) in p.terms() {
            let nz: Vec<(usize, u32)> =
                m.exponents().iter().copied().enumerate().filter(|(_, e)| *e > 0).collect();
            match (m.degree(), nz.as_slice()) {
                (0, _) => f.constant = c.clone(),
                (1, [(i, _)]) => f.linear[*i] = c.clone(),
                (2, [(i, 2)]) => f.quad[*i][*i] = c.clone(),
                (2, [(i, 1), (j, 1)]) => {
                    f.quad[*i][*j] = c * &half;
                    f.quad[*j][*i] = c * &half;
                }
                (d, _) => return Err(QuadError::NotQuadratic(d)),
            }
        }
        Ok(f)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let n = self.nvars();
        let mut p = Polynomial::constant(n, self.constant.clone());
        for (i, b) in self.linear.iter().enumerate() {
            p.add_term(Monomial::var(n, i), b.clone());
        }
        for i in 0..n {
            for j in 0..n {
                p.add_term(Monomial::var(n, i).mul(&Monomial::var(n, j)), self.quad[i][j].clone());
            }
        }
        p
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        let lin = self.linear.iter().zip(x).fold(Rational::zero(), |acc, (b, v)| acc + b * v);
        &self.constant + lin + quadratic_value(&self.quad, x)
    }

    /// `[[c, bᵀ/2], [b/2, Q]]`, so that `f(x) = (1, x)ᵀ G (1, x)`.
    pub fn gram(&self) -> Vec<Vec<Rational>> {
        let n = self.nvars();
        let half = Rational::new(1.into(), 2.into());
        let mut g = vec![vec![Rational::zero(); n + 1]; n + 1];
        g[0][0] = self.constant.clone();
        for i in 0..n {
            g[0][i + 1] = &self.linear[i] * &half;
            g[i + 1][0] = g[0][i + 1].clone();
            for j in 0..n {
                g[i + 1][j + 1] = self.quad[i][j].clone();
            }
        }
        g
    }

    pub fn from_gram(g: &[Vec<Rational>]) -> Self {
        let n = g.len() - 1;
        let two = Rational::from_integer(2.into());
        QuadraticForm {
            constant: g[0][0].clone(),
            linear: (0..n).map(|i| &g[0][i + 1] * &two).collect(),
            quad: (0..n).map(|i| (0..n).map(|j| g[i + 1][j + 1].clone()).collect()).collect(),
        }
    }

    fn combine(&self, other: &QuadraticForm, c: &Rational) -> QuadraticForm {
        QuadraticForm {
            constant: &self.constant + c * &other.constant,
            linear: self.linear.iter().zip(&other.linear).map(|(a, b)| a + c * b).collect(),
            quad: self
                .quad
                .iter()
                .zip(&other.quad)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + c * b).collect())
                .collect(),
        }
    }

    /// `f(M y + o)`.
    pub fn compose(&self, map: &AffineMap) -> QuadraticForm {
        let n = map.matrix.len();
        let subs: Vec<Polynomial> = (0..self.nvars())
            .map(|i| {
                let coeffs: Vec<Rational> = map.matrix[i].clone();
                debug_assert_eq!(coeffs.len(), n);
                Polynomial::affine(map.offset[i].clone(), &coeffs)
            })
            .collect();
        let p = self.to_polynomial().substitute(&subs).expect("arity checked");
        QuadraticForm::from_polynomial(&p).expect("affine maps keep degree 2")
    }

    pub fn max_difference(&self, other: &QuadraticForm) -> f64 {
        let a = self.gram();
        let b = other.gram();
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| to_f64(&(x - y)).abs())
            .fold(0.0, f64::max)
    }
}

/// `1 + Σ x_i²`.
pub fn shift_form(n: usize) -> QuadraticForm {
    let mut f = QuadraticForm::zero(n);
    f.constant = Rational::one();
    for i in 0..n {
        f.quad[i][i] = Rational::one();
    }
    f
}

/// `p + ε(1 + Σx_i²) − λq − μh = (1, x)ᵀ G (1, x)` with `G ⪰ 0` and `λ ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticCertificate {
    pub lambda: Rational,
    pub mu: Rational,
    pub epsilon: Rational,
    pub sigma_gram: Vec<Vec<Rational>>,
}

/// Outcome of an exact certificate check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticVerification {
    pub identity_holds: bool,
    pub lambda_nonnegative: bool,
    pub epsilon_nonnegative: bool,
    pub psd: Option<PsdResult>,
}

impl QuadraticVerification {
    pub fn is_valid(&self) -> bool {
        self.identity_holds
            && self.lambda_nonnegative
            && self.epsilon_nonnegative
            && self.psd.as_ref().is_some_and(PsdResult::is_psd)
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.identity_holds {
            out.push("Gram matrix does not match p + ε(1 + Σx²) − λq − μh".to_string());
        }
        if !self.lambda_nonnegative {
            out.push("λ is negative".to_string());
        }
        if !self.epsilon_nonnegative {
            out.push("ε is negative".to_string());
        }
        match &self.psd {
            None => out.push("Gram matrix is not symmetric".to_string()),
            Some(PsdResult::NotPsd { witness }) => {
                let w: Vec<String> = witness.iter().map(format_rational).collect();
                out.push(format!("Gram matrix is not PSD: vᵀGv < 0 for v = ({})", w.join(", ")));
            }
            Some(PsdResult::Psd(_)) => {}
        }
        out
    }
}

impl QuadraticCertificate {
    fn residual(&self, p: &QuadraticForm, q: &QuadraticForm, h: &QuadraticForm) -> QuadraticForm {
        p.combine(&shift_form(p.nvars()), &self.epsilon).combine(q, &-&self.lambda).combine(h, &-&self.mu)
    }

    pub fn verify(&self, p: &QuadraticForm, q: &QuadraticForm, h: &QuadraticForm) -> QuadraticVerification {
        let n = p.nvars();
        let shapes = q.nvars() == n && h.nvars() == n && self.sigma_gram.len() == n + 1;
        let identity_holds = shapes && self.residual(p, q, h).gram() == self.sigma_gram;
        let psd = psd_check(&self.sigma_gram).ok();
        QuadraticVerification {
            identity_holds,
            lambda_nonnegative: !self.lambda.is_negative(),
            epsilon_nonnegative: !self.epsilon.is_negative(),
            psd,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "lambda: {}", format_rational(&self.lambda)).unwrap();
        writeln!(s, "mu: {}", format_rational(&self.mu)).unwrap();
        writeln!(s, "epsilon: {}", format_rational(&self.epsilon)).unwrap();
        writeln!(s, "gram: {}", self.sigma_gram.len()).unwrap();
        for row in &self.sigma_gram {
            let r: Vec<String> = row.iter().map(format_rational).collect();
            writeln!(s, "{}", r.join(" ")).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, CertificateParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |line: usize, message: String| CertificateParseError::Line { line, message };
        let mut rational = |key: &str| -> Result<Rational, CertificateParseError> {
            let (line, v) = value(&mut lines, key)?;
            parse_rational(v).map_err(|e| bad(line, e.to_string()))
        };
        let lambda = rational("lambda")?;
        let mu = rational("mu")?;
        let epsilon = rational("epsilon")?;
        let (line, size) = value(&mut lines, "gram")?;
        let size: usize = size.parse().map_err(|_| bad(line, "`gram` must be a size".into()))?;
        let mut sigma_gram = Vec::with_capacity(size);
        for _ in 0..size {
            let (line, text) = lines.next().ok_or(CertificateParseError::Truncated)?;
            let row: Vec<Rational> = text
                .split_whitespace()
                .map(|t| parse_rational(t).map_err(|e| bad(line, e.to_string())))
                .collect::<Result<_, _>>()?;
            if row.len() != size {
                return Err(bad(line, format!("expected {size} entries")));
            }
            sigma_gram.push(row);
        }
        if let Some((line, _)) = lines.next() {
            return Err(bad(line, "unexpected trailing line".into()));
        }
        Ok(QuadraticCertificate { lambda, mu, epsilon, sigma_gram })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadSearchOptions {
    pub epsilon: Rational,
    /// Grid points per axis.
    pub grid: usize,
    pub refinements: usize,
    /// `u ∈ [0, u_max]` for `λ`, `v ∈ [−v_max, v_max]` for `μ`.
    pub u_max: f64,
    pub v_max: f64,
    /// A point of `{q ≥ 0, h = 0}`, checked exactly when given.
    pub sample_point: Option<Vec<Rational>>,
}

impl Default for QuadSearchOptions {
    fn default() -> Self {
        QuadSearchOptions {
            epsilon: Rational::zero(),
            grid: 33,
            refinements: 3,
            u_max: 6.0,
            v_max: 6.0,
            sample_point: None,
        }
    }
}

/// The least negative smallest eigenvalue seen by the search.
#[derive(Debug, Clone, PartialEq)]
pub struct BestCandidate {
    pub lambda: Rational,
    pub mu: Rational,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadOutcome {
    Found { certificate: QuadraticCertificate, candidates_checked: usize },
    NotFound { best: Option<BestCandidate>, candidates_checked: usize },
}

impl QuadOutcome {
    pub fn certificate(&self) -> Option<&QuadraticCertificate> {
        match self {
            QuadOutcome::Found { certificate, .. } => Some(certificate),
            QuadOutcome::NotFound { .. } => None,
        }
    }
}

fn coordinate(t: f64) -> f64 {
    (t * std::f64::consts::LN_10).sinh()
}

fn min_eigenvalue(g: &[Vec<Rational>]) -> f64 {
    let n = g.len();
    let m = DMatrix::from_fn(n, n, |i, j| to_f64(&g[i][j]));
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `target = λq + μh` exactly with `λ ≥ 0`.
fn exact_combination(target: &QuadraticForm, q: &QuadraticForm, h: &QuadraticForm) -> Option<(Rational, Rational)> {
    let (t, gq, gh) = (target.gram(), q.gram(), h.gram());
    let n = t.len();
    let idx: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let a: Vec<Vec<Rational>> = idx.iter().map(|&(i, j)| vec![gq[i][j].clone(), gh[i][j].clone()]).collect();
    let b: Vec<Rational> = idx.iter().map(|&(i, j)| t[i][j].clone()).collect();
    let lp = LpProblem::new(a, b, vec![VarSign::NonNegative, VarSign::Free]).ok()?;
    match solve_feasibility(&lp) {
        LpOutcome::Feasible { witness } => Some((witness[0].clone(), witness[1].clone())),
        LpOutcome::Infeasible { .. } => None,
    }
}

/// Searches `(λ, μ)` for a certificate of `p + ε(1 + Σx_i²)` on
/// `{q ≥ 0, h = 0}`. `q` must be concave and `h` non-negative; both are
/// checked exactly.
pub fn certify_quadratic(
    p: &QuadraticForm,
    q: &QuadraticForm,
    h: &QuadraticForm,
    options: &QuadSearchOptions,
) -> Result<QuadOutcome, QuadError> {
    let n = p.nvars();
    for f in [q, h] {
        if f.nvars() != n {
            return Err(PolyError::VarMismatch { left: n, right: f.nvars() }.into());
        }
    }
    let neg_q: Vec<Vec<Rational>> = q.quad.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
    if !psd_check(&neg_q)?.is_psd() {
        return Err(QuadError::NotConcave);
    }
    if !psd_check(&h.gram())?.is_psd() {
        return Err(QuadError::NotNonnegative);
    }
    if let Some(x) = &options.sample_point {
        if x.len() != n || q.evaluate(x).is_negative() || !h.evaluate(x).is_zero() {
            return Err(QuadError::BadSamplePoint);
        }
    }
    let target = p.combine(&shift_form(n), &options.epsilon);
    let build = |lambda: Rational, mu: Rational| {
        let cert = QuadraticCertificate { lambda, mu, epsilon: options.epsilon.clone(), sigma_gram: Vec::new() };
        let gram = cert.residual(p, q, h).gram();
        QuadraticCertificate { sigma_gram: gram, ..cert }
    };

    if let Some((lambda, mu)) = exact_combination(&target, q, h) {
        let cert = build(lambda, mu);
        if cert.verify(p, q, h).is_valid() {
            return Ok(QuadOutcome::Found { certificate: cert, candidates_checked: 0 });
        }
    }

    let k = options.grid.max(2);
    let step_u = options.u_max / (k - 1) as f64;
    let step_v = 2.0 * options.v_max / (k - 1) as f64;
    let (mut u_lo, mut v_lo) = (0.0, -options.v_max);
    let (mut du, mut dv) = (step_u, step_v);
    let mut checked = 0;
    let mut best: Option<BestCandidate> = None;
    for _ in 0..=options.refinements {
        let cells: Vec<(f64, f64)> =
            (0..k).flat_map(|i| (0..k).map(move |j| (u_lo + i as f64 * du, v_lo + j as f64 * dv))).collect();
        let results: Vec<(f64, f64, QuadraticCertificate, bool, f64)> = cells
            .par_iter()
            .map(|&(u, v)| {
                let u = u.max(0.0);
                let lambda = rationalize(coordinate(u), MAX_DENOMINATOR);
                let mu = rationalize(coordinate(v), MAX_DENOMINATOR);
                let cert = build(lambda, mu);
                let ok = psd_check(&cert.sigma_gram).map(|r| r.is_psd()).unwrap_or(false);
                let score = min_eigenvalue(&cert.sigma_gram);
                (u, v, cert, ok, score)
            })
            .collect();
        checked += results.len();
        let found = results
            .iter()
            .filter(|r| r.3)
            .max_by(|a, b| a.4.total_cmp(&b.4));
        if let Some((_, _, cert, _, _)) = found {
            assert!(cert.verify(p, q, h).is_valid(), "search produced an invalid certificate");
            return Ok(QuadOutcome::Found { certificate: cert.clone(), candidates_checked: checked });
        }
        let top = results.iter().max_by(|a, b| a.4.total_cmp(&b.4)).expect("nonempty grid");
        if best.as_ref().is_none_or(|b| top.4 > b.min_eigenvalue) {
            best = Some(BestCandidate {
                lambda: top.2.lambda.clone(),
                mu: top.2.mu.clone(),
                min_eigenvalue: top.4,
            });
        }
        // Zoom to two cells on each side of the best one.
        u_lo = (top.0 - 2.0 * du).max(0.0);
        v_lo = top.1 - 2.0 * dv;
        du *= 4.0 / (k - 1) as f64;
        dv *= 4.0 / (k - 1) as f64;
    }
    Ok(QuadOutcome::NotFound { best, candidates_checked: checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::rational::{frac, int};

    fn form(s: &str, n: usize) -> QuadraticForm {
        QuadraticForm::from_polynomial(&parse_polynomial(s, &Polynomial::default_names(n)).unwrap()).unwrap()
    }

    #[test]
    fn polynomial_round_trip() {
        let p = parse_polynomial("3 - x1 + 2*x1*x2 - x2^2 + x3", &Polynomial::default_names(3)).unwrap();
        let f = QuadraticForm::from_polynomial(&p).unwrap();
        assert_eq!(f.to_polynomial(), p);
        assert_eq!(QuadraticForm::from_gram(&f.gram()), f);
        let x = [int(2), frac(1, 3), int(-1)];
        assert_eq!(f.evaluate(&x), p.evaluate(&x).unwrap());
        assert!(matches!(
            QuadraticForm::from_polynomial(&parse_polynomial("x1^3", &Polynomial::default_names(1)).unwrap()),
            Err(QuadError::NotQuadratic(3))
        ));
    }

    #[test]
    fn trivial_multipliers() {
        let q = form("x3 - 1/4 - x1^2 - x2^2", 3);
        let h = form("x1^2 + x2^2", 3);
        let o = QuadSearchOptions::default();
        let c = certify_quadratic(&q, &q, &h, &o).unwrap();
        let c = c.certificate().unwrap();
        assert_eq!((c.lambda.clone(), c.mu.clone()), (int(1), int(0)));
        let c = certify_quadratic(&h, &q, &h, &o).unwrap();
        let c = c.certificate().unwrap();
        assert_eq!((c.lambda.clone(), c.mu.clone()), (int(0), int(1)));
    }

    #[test]
    fn inputs_are_validated() {
        let q = form("x3 - 1/4 - x1^2 - x2^2", 3);
        let h = form("x1^2 + x2^2", 3);
        let p = form("x1", 3);
        let o = QuadSearchOptions::default();
        assert_eq!(certify_quadratic(&p, &form("x1^2", 3), &h, &o), Err(QuadError::NotConcave));
        assert_eq!(certify_quadratic(&p, &q, &form("x1", 3), &o), Err(QuadError::NotNonnegative));
        let bad = QuadSearchOptions { sample_point: Some(vec![int(1), int(0), int(2)]), ..o.clone() };
        assert_eq!(certify_quadratic(&p, &q, &h, &bad), Err(QuadError::BadSamplePoint));
        let good = QuadSearchOptions { sample_point: Some(vec![int(0), int(0), int(1)]), ..o };
        assert!(certify_quadratic(&h, &q, &h, &good).is_ok());
    }

    #[test]
    fn negative_targets_are_not_found() {
        // p = −1 is negative everywhere on U.
        let q = form("x3 - 1/4 - x1^2 - x2^2", 3);
        let h = form("x1^2 + x2^2", 3);
        let out = certify_quadratic(&form("-1", 3), &q, &h, &QuadSearchOptions::default()).unwrap();
        match out {
            QuadOutcome::NotFound { best, candidates_checked } => {
                assert!(best.unwrap().min_eigenvalue < 0.0);
                assert_eq!(candidates_checked, 4 * 33 * 33);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certificate_text_round_trip_and_tamper() {
        let q = form("x3 - 1/4 - x1^2 - x2^2", 3);
        let h = form("x1^2 + x2^2", 3);
        let p = form("x3*x1 + x3*x2", 3);
        let o = QuadSearchOptions { epsilon: frac(1, 100), ..Default::default() };
        let out = certify_quadratic(&p, &q, &h, &o).unwrap();
        let cert = out.certificate().expect("certified");
        let back = QuadraticCertificate::from_text(&cert.to_text()).unwrap();
        assert_eq!(&back, cert);
        let mut bad = cert.clone();
        bad.mu += int(1);
        assert!(!bad.verify(&p, &q, &h).is_valid());
        let mut bad = cert.clone();
        bad.sigma_gram[1][1] -= int(1000);
        assert!(!bad.verify(&p, &q, &h).is_valid());
    }

    #[test]
    fn canonical_examples() {
        let c = canonicalize_quadratic(&form("x2 - 1/4 - x1^2", 2)).unwrap();
        assert_eq!((c.m, c.m1, c.constant.clone()), (1, 1, frac(-1, 4)));
        assert_eq!(c.forward.matrix, vec![vec![int(1), int(0)], vec![int(0), int(1)]]);
        assert_eq!(c.forward.offset, vec![int(0), int(0)]);
        assert_eq!(c.residual, 0.0);

        let c = canonicalize_quadratic(&form("1 - x1^2 - x2^2", 2)).unwrap();
        assert_eq!((c.m, c.m1, c.constant.clone()), (2, 0, int(1)));

        assert!(matches!(canonicalize_quadratic(&form("x1", 2)), Err(QuadError::ContainsLines { .. })));
        let c = canonicalize_quadratic(&form("x1", 1)).unwrap();
        assert_eq!((c.m, c.m1), (0, 1));
        assert_eq!(canonicalize_quadratic(&form("x1^2", 1)), Err(QuadError::NotConcave));
    }

    #[test]
    fn canonical_form_matches_on_sample_points() {
        // A rotated and shifted paraboloid and a rotated ellipse.
        for s in ["2 + x1 - 3*x2 + x3 - x1^2 - 2*x2^2 + x1*x2", "5 - 2*x1^2 - 2*x2^2 - 2*x1*x2 + x1"] {
            let n = if s.contains("x3") { 3 } else { 2 };
            let q = form(s, n);
            let c = canonicalize_quadratic(&q).unwrap();
            assert!(c.residual < 1e-4, "{s}: residual {}", c.residual);
            for k in 0..20 {
                let x: Vec<Rational> = (0..n).map(|i| frac((k * 7 + i as i64 * 3) % 11 - 5, 3)).collect();
                let y = c.forward.apply(&x);
                let exact = to_f64(&q.evaluate(&x));
                let canon = to_f64(&c.form.evaluate(&y));
                assert!((exact - canon).abs() < 1e-3 * (1.0 + exact.abs()), "{s}: {exact} vs {canon}");
                // Exact after the rationalized map.
                assert_eq!(c.pullback.evaluate(&y), q.evaluate(&c.forward.inverse().unwrap().apply(&y)));
            }
        }
    }
}
