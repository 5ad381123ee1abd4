//! Leading forms, degree-`d` homogenization and the compactification map
//! `x ↦ (1, x) / (1 + aᵀx)` that sends a pointed cone onto a bounded slice.

use num_traits::{One, Signed, Zero};

use super::{Monomial, PolyError, Polynomial};
use crate::rational::Rational;

impl Polynomial {
    /// Homogeneous component of highest total degree.
    pub fn leading_form(&self) -> Result<Polynomial, PolyError> {
        let d = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        Ok(self.component(d))
    }

    /// `p̄(x0, x) = x0^d · p(x / x0)` in `nvars + 1` variables, `x0` first.
    ///
    /// The zero polynomial homogenizes to zero for every `d`.
    pub fn homogenize(&self, d: u32) -> Result<Polynomial, PolyError> {
        if let Some(deg) = self.degree() {
            if deg > d {
                return Err(PolyError::DegreeTooHigh { degree: deg, bound: d });
            }
        }
        let n = self.nvars() + 1;
        Ok(Polynomial::from_terms(
            n,
            self.terms().map(|(m, c)| {
                let mut e = Vec::with_capacity(n);
                e.push(d - m.degree());
                e.extend_from_slice(m.exponents());
                (Monomial::new(e), c.clone())
            }),
        ))
    }
}

/// A vector `a` with `aᵀx > 0` on the cone minus the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorVector(Vec<Rational>);

impl AnchorVector {
    /// The all-ones anchor of the non-negative orthant.
    pub fn ones(nvars: usize) -> Self {
        AnchorVector(vec![Rational::one(); nvars])
    }

    /// Anchor for the orthant; every entry must be strictly positive.
    pub fn for_orthant(a: Vec<Rational>) -> Result<Self, PolyError> {
        if let Some(index) = a.iter().position(|v| !v.is_positive()) {
            return Err(PolyError::InvalidAnchor { index });
        }
        Ok(AnchorVector(a))
    }

    /// Anchor for a polyhedral cone; `aᵀg > 0` must hold for each generator.
    pub fn for_generators(a: Vec<Rational>, generators: &[Vec<Rational>]) -> Result<Self, PolyError> {
        for (index, g) in generators.iter().enumerate() {
            if g.len() != a.len() {
                return Err(PolyError::Arity { expected: a.len(), got: g.len() });
            }
            let dot: Rational = a.iter().zip(g).map(|(x, y)| x * y).sum();
            if !dot.is_positive() {
                return Err(PolyError::InvalidAnchor { index });
            }
        }
        Ok(AnchorVector(a))
    }

    /// Unchecked construction, for cones whose anchor is validated elsewhere.
    pub fn new_unchecked(a: Vec<Rational>) -> Self {
        AnchorVector(a)
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, x: &[Rational]) -> Rational {
        self.0.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    /// The affine form `1 + aᵀx`.
    pub fn one_plus_form(&self) -> Polynomial {
        Polynomial::affine(Rational::one(), &self.0)
    }
}

/// `x̄ = (1, x) / (1 + aᵀx)`.
pub fn compactify_point(x: &[Rational], a: &AnchorVector) -> Result<Vec<Rational>, PolyError> {
    if x.len() != a.len() {
        return Err(PolyError::Arity { expected: a.len(), got: x.len() });
    }
    let denom = Rational::one() + a.dot(x);
    if denom.is_zero() {
        return Err(PolyError::SingularCompactification);
    }
    let inv = denom.recip();
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(inv.clone());
    out.extend(x.iter().map(|v| v * &inv));
    Ok(out)
}
