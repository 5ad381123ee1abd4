//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are stored in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic. The canonical text form lists terms from the largest
//! monomial down, so the same polynomial always prints the same way.

mod float;
mod homogen;
pub mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, Rational};

pub use float::FloatPolynomial;
pub use homogen::{compactify_point, AnchorVector};
pub use parse::{parse_polynomial, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable-count mismatch: {left} vs {right}")]
    VarMismatch { left: usize, right: usize },
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("degree {degree} exceeds the bound {bound}")]
    DegreeTooHigh { degree: u32, bound: u32 },
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("1 + a^T x vanishes at the given point")]
    SingularCompactification,
    #[error("anchor entry {index} is not strictly positive")]
    InvalidAnchor { index: usize },
}

/// Exponent vector `x^α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::one();
        for (x, &e) in point.iter().zip(&self.0) {
            if e > 0 {
                acc *= num_traits::pow(x.clone(), e as usize);
            }
        }
        acc
    }

    /// Every monomial in `nvars` variables with total degree at most `max_degree`, ascending.
    pub fn all_up_to(nvars: usize, max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for deg in 0..=max_degree {
            let mut cur = vec![0u32; nvars];
            compositions(nvars, deg, 0, &mut cur, &mut out);
        }
        out.sort();
        out
    }
}

fn compositions(nvars: usize, remaining: u32, idx: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if nvars == 0 {
        if remaining == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if idx == nvars - 1 {
        cur[idx] = remaining;
        out.push(Monomial(cur.clone()));
        cur[idx] = 0;
        return;
    }
    for e in 0..=remaining {
        cur[idx] = e;
        compositions(nvars, remaining - e, idx + 1, cur, out);
    }
    cur[idx] = 0;
}

impl Ord for Monomial {
    /// Graded lex: total degree first, then the first differing exponent
    /// (a larger power of an earlier variable is the larger monomial).
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    /// The coordinate polynomial `x_{index+1}`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        Self::term(Monomial::var(nvars, index), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    /// Linear form `c + Σ a_i x_i`.
    pub fn affine(constant: Rational, coefficients: &[Rational]) -> Self {
        let n = coefficients.len();
        let mut p = Polynomial::constant(n, constant);
        for (i, a) in coefficients.iter().enumerate() {
            p.add_term(Monomial::var(n, i), a.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` stands for the degree of the zero polynomial (−∞).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one(self.nvars))
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    fn check_same(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::VarMismatch { left: self.nvars, right: other.nvars })
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Exact product. Fails when the operands live in different variable counts.
    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_same(other)?;
        let mut out = Polynomial::zero(self.nvars);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        assert_eq!(m.nvars(), self.nvars, "monomial arity mismatch");
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::Arity { expected: self.nvars, got: point.len() });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            acc += c * m.eval(point);
        }
        Ok(acc)
    }

    /// Composition `p(subs_1, …, subs_n)`.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Polynomial, PolyError> {
        if subs.len() != self.nvars {
            return Err(PolyError::Arity { expected: self.nvars, got: subs.len() });
        }
        let target = match subs.first() {
            Some(s) => s.nvars,
            None => return Ok(self.clone()),
        };
        if let Some(bad) = subs.iter().find(|s| s.nvars != target) {
            return Err(PolyError::VarMismatch { left: target, right: bad.nvars });
        }
        // Cache the powers of each substituted polynomial.
        let mut powers: Vec<Vec<Polynomial>> = subs.iter().map(|s| vec![Polynomial::one(target), s.clone()]).collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            for (mm, cc) in t.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// Embeds into `nvars + extra` variables; the new variables are appended.
    pub fn extend_vars(&self, extra: usize) -> Polynomial {
        let n = self.nvars + extra;
        Polynomial {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(n, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Homogeneous component of the given total degree.
    pub fn component(&self, degree: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Canonical text with caller-supplied variable names, largest monomial first.
    pub fn to_text(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.nvars, "name list arity mismatch");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = m.degree() == 0;
            if is_const || !mag.is_one() {
                factors.push(format_rational(&mag));
            }
            for (name, &e) in names.iter().zip(m.exponents()) {
                match e {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    pub fn default_names(nvars: usize) -> Vec<String> {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&Polynomial::default_names(self.nvars)))
    }
}

// Operator forms panic on variable-count mismatch; the `checked_*` methods report it.

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn c(n: usize, v: i64) -> Polynomial {
        Polynomial::constant(n, int(v))
    }

    fn example_h() -> Polynomial {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let a = &(&x1 * &x2) + &c(2, 1);
        let b = &x1 - &x2;
        &a * &b.pow(2)
    }

    #[test]
    fn binomial_square() {
        let d = &x(2, 0) - &x(2, 1);
        assert_eq!((&d * &d).to_string(), "x1^2 - 2*x1*x2 + x2^2");
    }

    #[test]
    fn product_with_zero() {
        let p = &x(2, 0) + &c(2, 3);
        let z = Polynomial::zero(2);
        assert!((&p * &z).is_zero());
        assert_eq!((&p * &z).degree(), None);
    }

    #[test]
    fn example_h_expansion() {
        // hand expansion of (x1 x2 + 1)(x1 - x2)^2
        assert_eq!(
            example_h().to_string(),
            "x1^3*x2 - 2*x1^2*x2^2 + x1*x2^3 + x1^2 - 2*x1*x2 + x2^2"
        );
    }

    #[test]
    fn mismatch_is_an_error() {
        let err = x(2, 0).checked_mul(&x(3, 0)).unwrap_err();
        assert_eq!(err, PolyError::VarMismatch { left: 2, right: 3 });
    }

    #[test]
    fn degree_of_product() {
        let p = &x(2, 0) + &c(2, 1);
        let q = &x(2, 1).pow(3) - &x(2, 0);
        assert_eq!((&p * &q).degree(), Some(4));
    }

    #[test]
    fn evaluate_on_example_sequence() {
        let q = &x(2, 1).pow(4) - &x(2, 0).pow(4);
        let pt = [int(2), frac(-1, 2)];
        assert_eq!(q.evaluate(&pt).unwrap(), frac(-255, 16));
        assert!(example_h().evaluate(&pt).unwrap().is_zero());
        let p = &(&x(2, 0) * &x(2, 1)) + &c(2, 7);
        assert_eq!(p.evaluate(&[int(0), int(0)]).unwrap(), int(7));
        assert!(p.evaluate(&[int(0)]).is_err());
    }

    #[test]
    fn substitute_examples() {
        // x1 + x2 at (x^2 + x + 1, x^2 + 1)
        let t = x(1, 0);
        let a = &(&t.pow(2) + &t) + &c(1, 1);
        let b = &t.pow(2) + &c(1, 1);
        let p = &x(2, 0) + &x(2, 1);
        assert_eq!(p.substitute(&[a, b]).unwrap().to_string(), "2*x1^2 + x1 + 2");

        let p = x(1, 0).pow(2);
        let sub = &x(2, 0) - &x(2, 1);
        assert_eq!(p.substitute(&[sub]).unwrap().to_string(), "x1^2 - 2*x1*x2 + x2^2");

        let h = example_h();
        assert_eq!(h.substitute(&[x(2, 0), x(2, 1)]).unwrap(), h);
        assert!(h.substitute(&[x(2, 0)]).is_err());
    }

    #[test]
    fn text_form_of_constants_and_fractions() {
        assert_eq!(Polynomial::constant(2, frac(3, 4)).to_string(), "3/4");
        assert_eq!(Polynomial::zero(3).to_string(), "0");
        let p = &Polynomial::constant(1, frac(-1, 2)) - &x(1, 0).scale(&frac(5, 3));
        assert_eq!(p.to_string(), "-5/3*x1 - 1/2");
    }

    #[test]
    fn all_monomials_count() {
        assert_eq!(Monomial::all_up_to(3, 4).len(), 35);
        assert_eq!(Monomial::all_up_to(2, 0).len(), 1);
        let ms = Monomial::all_up_to(2, 2);
        let mut sorted = ms.clone();
        sorted.sort();
        assert_eq!(ms, sorted);
    }
}
