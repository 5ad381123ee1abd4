use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use super::{factor_polynomial, FactorKind};
use crate::poly::{parse_polynomial, Monomial, PolyError, Polynomial};
use crate::rational::{format_rational, parse_rational, Rational};

/// Index `(α, β)` of a term `x^α g^β`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub alpha: Monomial,
    pub beta: Vec<u32>,
}

impl TermKey {
    pub fn new(alpha: Monomial, beta: Vec<u32>) -> Self {
        TermKey { alpha, beta }
    }

    /// `x^α g^β`.
    pub fn expand(&self, gens: &[Polynomial]) -> Polynomial {
        let n = self.alpha.nvars();
        let mut acc = Polynomial::term(self.alpha.clone(), Rational::from_integer(1.into()));
        for (g, &b) in gens.iter().zip(&self.beta) {
            if b > 0 {
                acc = &acc * &g.pow(b);
            }
        }
        debug_assert_eq!(acc.nvars(), n);
        acc
    }

    fn text(&self) -> String {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        format!("{} | {}", join(self.alpha.exponents()), join(&self.beta))
    }
}

/// `(1 + Σx_i + Σg_j)^r · p = Σ c_{α,β} x^α g^β` with every `c_{α,β} > 0`
/// (or `(Σx_i)^r · p = …` for a [`FactorKind::Form`] certificate).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopositiveCertificate {
    pub nvars: usize,
    pub factor: FactorKind,
    pub level: u32,
    pub degree: u32,
    pub generators: Vec<Polynomial>,
    pub terms: BTreeMap<TermKey, Rational>,
}

impl CopositiveCertificate {
    /// Left-hand side multiplier, e.g. `(1 + Σx_i + Σg_j)^r`.
    pub fn factor_power(&self) -> Polynomial {
        factor_polynomial(self.factor, self.nvars, &self.generators).pow(self.level)
    }

    /// `Σ c_{α,β} x^α g^β`, with the powers of each generator computed once.
    pub fn expand_rhs(&self) -> Polynomial {
        let mut cache: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
        let mut out = Polynomial::zero(self.nvars);
        for (key, c) in &self.terms {
            let gb = cache.entry(key.beta.clone()).or_insert_with(|| {
                TermKey::new(Monomial::one(self.nvars), key.beta.clone()).expand(&self.generators)
            });
            for (m, v) in gb.mul_monomial(&key.alpha).terms() {
                out.add_term(m.clone(), v * c);
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let names = Polynomial::default_names(self.nvars);
        let mut s = String::new();
        writeln!(s, "variables: {}", self.nvars).unwrap();
        writeln!(s, "factor: {}", self.factor.name()).unwrap();
        writeln!(s, "level: {}", self.level).unwrap();
        writeln!(s, "degree: {}", self.degree).unwrap();
        writeln!(s, "generators: {}", self.generators.len()).unwrap();
        for g in &self.generators {
            writeln!(s, "{}", g.to_text(&names)).unwrap();
        }
        for (key, c) in &self.terms {
            writeln!(s, "{} | {}", format_rational(c), key.text()).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, CertificateParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        Self::from_lines(&mut lines)
    }

    pub(crate) fn from_lines<'a>(
        lines: &mut impl Iterator<Item = (usize, &'a str)>,
    ) -> Result<Self, CertificateParseError> {
        let nvars = header(lines, "variables")?;
        let factor = match value(lines, "factor")?.1 {
            "affine" => FactorKind::Affine,
            "form" => FactorKind::Form,
            _ => return Err(CertificateParseError::Line { line: 0, message: "factor must be `affine` or `form`".into() }),
        };
        let level = header(lines, "level")? as u32;
        let degree = header(lines, "degree")? as u32;
        let k = header(lines, "generators")?;
        let names = Polynomial::default_names(nvars);
        let mut generators = Vec::with_capacity(k);
        for _ in 0..k {
            let (line, text) = lines.next().ok_or(CertificateParseError::Truncated)?;
            let g = parse_polynomial(text, &names)
                .map_err(|e| CertificateParseError::Line { line, message: e.to_string() })?;
            generators.push(g);
        }
        let mut terms = BTreeMap::new();
        for (line, text) in lines {
            let bad = |message: &str| CertificateParseError::Line { line, message: message.to_string() };
            let parts: Vec<&str> = text.split('|').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad("expected `c | alpha | beta`"));
            }
            let c = parse_rational(parts[0]).map_err(|e| bad(&e.to_string()))?;
            let exps = |s: &str| -> Result<Vec<u32>, CertificateParseError> {
                s.split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| bad("bad exponent")))
                    .collect()
            };
            let alpha = exps(parts[1])?;
            let beta = exps(parts[2])?;
            if alpha.len() != nvars || beta.len() != k {
                return Err(bad("exponent vector has the wrong length"));
            }
            if terms.insert(TermKey::new(Monomial::new(alpha), beta), c).is_some() {
                return Err(bad("duplicate term"));
            }
        }
        Ok(CopositiveCertificate { nvars, factor, level, degree, generators, terms })
    }
}

/// Reads a `key: value` line.
pub(crate) fn value<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
) -> Result<(usize, &'a str), CertificateParseError> {
    let (line, text) = lines.next().ok_or(CertificateParseError::Truncated)?;
    let value = text
        .strip_prefix(key)
        .and_then(|rest| rest.trim_start().strip_prefix(':'))
        .ok_or_else(|| CertificateParseError::Line { line, message: format!("expected `{key}: ...`") })?;
    Ok((line, value.trim()))
}

pub(crate) fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<usize, CertificateParseError> {
    let (line, value) = value(lines, key)?;
    value
        .parse()
        .map_err(|_| CertificateParseError::Line { line, message: format!("`{key}` must be a non-negative integer") })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificateParseError {
    #[error("certificate ends early")]
    Truncated,
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

/// Outcome of an exact identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    /// `lhs − rhs`; zero when the identity holds.
    pub difference: Polynomial,
    pub nonpositive_terms: Vec<TermKey>,
    pub over_degree_terms: Vec<TermKey>,
    pub arity_mismatch: bool,
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        !self.arity_mismatch
            && self.difference.is_zero()
            && self.nonpositive_terms.is_empty()
            && self.over_degree_terms.is_empty()
    }

    /// Human-readable list of everything that went wrong, one item per line.
    pub fn diff_lines(&self) -> Vec<String> {
        let names = Polynomial::default_names(self.difference.nvars());
        let mut out = Vec::new();
        if self.arity_mismatch {
            out.push("variable count of the certificate does not match the target".to_string());
        }
        for (m, c) in self.difference.terms().rev() {
            let mono = Polynomial::term(m.clone(), Rational::from_integer(1.into())).to_text(&names);
            out.push(format!("monomial {mono}: lhs - rhs = {}", format_rational(c)));
        }
        for key in &self.nonpositive_terms {
            out.push(format!("coefficient of term {} is not positive", key.text()));
        }
        for key in &self.over_degree_terms {
            out.push(format!("term {} exceeds the degree budget", key.text()));
        }
        out
    }
}

/// Re-expands both sides of the certificate identity for `p` and compares them exactly.
pub fn verify_certificate(cert: &CopositiveCertificate, p: &Polynomial) -> Verification {
    let arity_mismatch = cert.nvars != p.nvars()
        || cert.generators.iter().any(|g| g.nvars() != cert.nvars)
        || cert.terms.keys().any(|k| k.alpha.nvars() != cert.nvars || k.beta.len() != cert.generators.len());
    if arity_mismatch {
        return Verification {
            difference: Polynomial::zero(p.nvars()),
            nonpositive_terms: Vec::new(),
            over_degree_terms: Vec::new(),
            arity_mismatch,
        };
    }
    let nonpositive_terms = cert
        .terms
        .iter()
        .filter(|(_, c)| !c.is_positive())
        .map(|(k, _)| k.clone())
        .collect();
    let lhs = &cert.factor_power() * p;
    let budget = super::degree_budget(cert.factor, &cert.generators, cert.level, cert.degree);
    let over_degree_terms = cert
        .terms
        .keys()
        .filter(|k| weighted_degree(k, &cert.generators) > budget)
        .cloned()
        .collect();
    let difference = &lhs - &cert.expand_rhs();
    Verification { difference, nonpositive_terms, over_degree_terms, arity_mismatch }
}

pub(crate) fn weighted_degree(key: &TermKey, gens: &[Polynomial]) -> u32 {
    key.alpha.degree()
        + key
            .beta
            .iter()
            .zip(gens)
            .map(|(b, g)| b * g.degree().unwrap_or(0))
            .sum::<u32>()
}

impl From<PolyError> for CertificateParseError {
    fn from(e: PolyError) -> Self {
        CertificateParseError::Line { line: 0, message: e.to_string() }
    }
}

pub(crate) fn drop_zeros(terms: &mut BTreeMap<TermKey, Rational>) {
    terms.retain(|_, c| !c.is_zero());
}
