use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use super::ReductionError;
use crate::hierarchy::{
    header, search_levels, value, verify_certificate, CertificateParseError, CopositiveCertificate, FactorKind,
    FreePart, LevelRay, SearchOptions, SearchOutcome, Verification,
};
use crate::lp::{solve_feasibility, LpOutcome, LpProblem, VarSign};
use crate::poly::{parse_polynomial, Monomial, PolyError, Polynomial};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::sets::{ConeKind, SetDescriptor};

/// `(p + ε(1 + aᵀx)^d)∘G − Σ (h_i∘G)·q_i` has the copositive certificate
/// `copositive`, where `x = Gλ` maps the orthant onto a polyhedral cone
/// (`G = I` for the orthant itself) and the `q_i` are in the variables `λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityCertificate {
    pub epsilon: Rational,
    pub degree: u32,
    pub anchor: Vec<Rational>,
    /// Generators of a polyhedral cone; `None` for the orthant.
    pub cone_generators: Option<Vec<Vec<Rational>>>,
    /// Set equalities followed by `h`, in the original variables.
    pub equalities: Vec<Polynomial>,
    pub multipliers: Vec<Polynomial>,
    pub copositive: CopositiveCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftOutcome {
    Found { certificate: Box<EqualityCertificate>, levels_tried: u32 },
    NotFound { rays: Vec<LevelRay>, levels_tried: u32, exhausted: Option<String> },
}

impl LiftOutcome {
    pub fn certificate(&self) -> Option<&EqualityCertificate> {
        match self {
            LiftOutcome::Found { certificate, .. } => Some(certificate),
            LiftOutcome::NotFound { .. } => None,
        }
    }

    pub fn levels_tried(&self) -> u32 {
        match self {
            LiftOutcome::Found { levels_tried, .. } | LiftOutcome::NotFound { levels_tried, .. } => *levels_tried,
        }
    }
}

/// `x_i = Σ_j G_j[i] λ_j`.
fn cone_substitution(n: usize, gens: &[Vec<Rational>]) -> Vec<Polynomial> {
    (0..n)
        .map(|i| {
            let coeffs: Vec<Rational> = gens.iter().map(|g| g[i].clone()).collect();
            Polynomial::affine(Rational::zero(), &coeffs)
        })
        .collect()
}

impl EqualityCertificate {
    fn pull(&self, q: &Polynomial) -> Result<Polynomial, PolyError> {
        match &self.cone_generators {
            None => Ok(q.clone()),
            Some(gens) => q.substitute(&cone_substitution(q.nvars(), gens)),
        }
    }

    /// The polynomial the copositive part certifies.
    pub fn reduced_target(&self, p: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.anchor.len() != p.nvars() {
            return Err(PolyError::Arity { expected: p.nvars(), got: self.anchor.len() });
        }
        let a = Polynomial::affine(Rational::from_integer(1.into()), &self.anchor);
        let shifted = p + &a.pow(self.degree).scale(&self.epsilon);
        let mut out = self.pull(&shifted)?;
        if self.multipliers.len() != self.equalities.len() {
            return Err(PolyError::Arity { expected: self.equalities.len(), got: self.multipliers.len() });
        }
        for (h, q) in self.equalities.iter().zip(&self.multipliers) {
            let hp = self.pull(h)?;
            if hp.nvars() != q.nvars() {
                return Err(PolyError::VarMismatch { left: hp.nvars(), right: q.nvars() });
            }
            out = &out - &(&hp * q);
        }
        Ok(out)
    }

    /// Exact check of the whole identity against `p`.
    pub fn verify(&self, p: &Polynomial) -> Verification {
        let bad_shape = self.epsilon.is_negative()
            || self.equalities.iter().any(|h| h.nvars() != p.nvars())
            || self.cone_generators.as_ref().is_some_and(|g| g.iter().any(|v| v.len() != p.nvars()));
        match self.reduced_target(p) {
            Ok(target) if !bad_shape => verify_certificate(&self.copositive, &target),
            _ => Verification {
                difference: Polynomial::zero(p.nvars()),
                nonpositive_terms: Vec::new(),
                over_degree_terms: Vec::new(),
                arity_mismatch: true,
            },
        }
    }

    /// Whether the certificate is about `set ∩ h⁻¹(0)`.
    pub fn matches_problem(&self, set: &SetDescriptor, h: &Polynomial) -> bool {
        let mut eqs = set.equalities.clone();
        eqs.push(h.clone());
        let gens = match &set.cone {
            ConeKind::Polyhedral { generators } => Some(generators.clone()),
            _ => None,
        };
        eqs == self.equalities && gens == self.cone_generators
    }

    pub fn to_text(&self) -> String {
        let n = self.anchor.len();
        let names = Polynomial::default_names(n);
        let row = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        writeln!(s, "epsilon: {}", format_rational(&self.epsilon)).unwrap();
        writeln!(s, "degree: {}", self.degree).unwrap();
        writeln!(s, "anchor: {}", row(&self.anchor)).unwrap();
        match &self.cone_generators {
            None => writeln!(s, "cone generators: 0").unwrap(),
            Some(gens) => {
                writeln!(s, "cone generators: {}", gens.len()).unwrap();
                for g in gens {
                    writeln!(s, "{}", row(g)).unwrap();
                }
            }
        }
        writeln!(s, "equalities: {}", self.equalities.len()).unwrap();
        for h in &self.equalities {
            writeln!(s, "{}", h.to_text(&names)).unwrap();
        }
        writeln!(s, "multipliers: {}", self.multipliers.len()).unwrap();
        for q in &self.multipliers {
            writeln!(s, "{}", q.to_text(&Polynomial::default_names(q.nvars()))).unwrap();
        }
        s.push_str(&self.copositive.to_text());
        s
    }

    pub fn from_text(text: &str) -> Result<Self, CertificateParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let lines = &mut lines;
        let bad = |line: usize, message: String| CertificateParseError::Line { line, message };
        let rationals = |line: usize, text: &str| -> Result<Vec<Rational>, CertificateParseError> {
            text.split_whitespace().map(|t| parse_rational(t).map_err(|e| bad(line, e.to_string()))).collect()
        };
        let (line, eps) = value(lines, "epsilon")?;
        let epsilon = parse_rational(eps).map_err(|e| bad(line, e.to_string()))?;
        let degree = header(lines, "degree")? as u32;
        let (line, a) = value(lines, "anchor")?;
        let anchor = rationals(line, a)?;
        let n = anchor.len();
        let k = header(lines, "cone generators")?;
        let cone_generators = if k == 0 {
            None
        } else {
            let mut gens = Vec::with_capacity(k);
            for _ in 0..k {
                let (line, text) = lines.next().ok_or(CertificateParseError::Truncated)?;
                let g = rationals(line, text)?;
                if g.len() != n {
                    return Err(bad(line, "generator length differs from the anchor".into()));
                }
                gens.push(g);
            }
            Some(gens)
        };
        let lifted = if k == 0 { n } else { k };
        let mut polys = |key: &str, nvars: usize| -> Result<Vec<Polynomial>, CertificateParseError> {
            let count = header(lines, key)?;
            let names = Polynomial::default_names(nvars);
            (0..count)
                .map(|_| {
                    let (line, text) = lines.next().ok_or(CertificateParseError::Truncated)?;
                    parse_polynomial(text, &names).map_err(|e| bad(line, e.to_string()))
                })
                .collect()
        };
        let equalities = polys("equalities", n)?;
        let multipliers = polys("multipliers", lifted)?;
        let copositive = CopositiveCertificate::from_lines(lines)?;
        Ok(EqualityCertificate { epsilon, degree, anchor, cone_generators, equalities, multipliers, copositive })
    }
}

/// Whether `target = Σ h_i q_i` exactly within the degree bounds.
fn ideal_combination(target: &Polynomial, free: &[FreePart]) -> Option<Vec<Polynomial>> {
    let mut rows: Vec<Monomial> = target.terms().map(|(m, _)| m.clone()).collect();
    let mut cols: Vec<Polynomial> = Vec::new();
    for part in free {
        for m in &part.monomials {
            let c = part.h.mul_monomial(m);
            rows.extend(c.terms().map(|(m, _)| m.clone()));
            cols.push(c);
        }
    }
    if cols.is_empty() {
        return None;
    }
    rows.sort();
    rows.dedup();
    let a: Vec<Vec<Rational>> = rows.iter().map(|r| cols.iter().map(|c| c.coefficient(r)).collect()).collect();
    let b: Vec<Rational> = rows.iter().map(|r| target.coefficient(r)).collect();
    let lp = LpProblem::new(a, b, vec![VarSign::Free; cols.len()]).ok()?;
    match solve_feasibility(&lp) {
        LpOutcome::Feasible { witness } => {
            let mut out = Vec::with_capacity(free.len());
            let mut values = witness.into_iter();
            for part in free {
                let mut q = Polynomial::zero(target.nvars());
                for m in &part.monomials {
                    q.add_term(m.clone(), values.next().expect("one value per column"));
                }
                out.push(q);
            }
            Some(out)
        }
        LpOutcome::Infeasible { .. } => None,
    }
}

/// Searches for `p + ε(1 + aᵀx)^d = Σ h_i q_i + (copositive part)` over
/// `S ∩ h⁻¹(0)`, where the `h_i` are the equalities of `S` followed by `h`
/// and `deg q_i ≤ d − deg h_i`. The copositive part is searched with the
/// Pólya hierarchy over the inequalities of `S`; a polyhedral cone is first
/// mapped onto an orthant through its generators.
pub fn lift_equality(
    p: &Polynomial,
    set: &SetDescriptor,
    h: &Polynomial,
    d: u32,
    epsilon: &Rational,
    options: &SearchOptions,
) -> Result<LiftOutcome, ReductionError> {
    set.validate()?;
    let n = set.nvars;
    for q in [p, h] {
        if q.nvars() != n {
            return Err(PolyError::VarMismatch { left: n, right: q.nvars() }.into());
        }
    }
    if epsilon.is_negative() {
        return Err(ReductionError::NegativeEpsilon);
    }
    let cone_generators = match &set.cone {
        ConeKind::Orthant => None,
        ConeKind::Polyhedral { generators } => Some(generators.clone()),
        ConeKind::Lorentz => return Err(ReductionError::UnsupportedCone),
        ConeKind::FullSpace => return Err(ReductionError::Set(crate::sets::SetError::NotPointed)),
    };
    let anchor = set.anchor_vector()?;
    let mut equalities = set.equalities.clone();
    equalities.push(h.clone());
    for q in equalities.iter().chain(std::iter::once(p)) {
        let deg = q.degree().unwrap_or(0);
        if deg > d {
            return Err(ReductionError::DegreeBound { degree: deg, bound: d });
        }
    }

    let subs = cone_generators.as_ref().map(|g| cone_substitution(n, g));
    let pull = |q: &Polynomial| -> Result<Polynomial, PolyError> {
        match &subs {
            None => Ok(q.clone()),
            Some(s) => q.substitute(s),
        }
    };
    let k = cone_generators.as_ref().map_or(n, Vec::len);
    let target = pull(&(p + &anchor.one_plus_form().pow(d).scale(epsilon)))?;
    let free: Vec<FreePart> = equalities
        .iter()
        .map(|hi| {
            let hp = pull(hi)?;
            let room = d - hi.degree().unwrap_or(0);
            Ok(FreePart { h: hp, monomials: Monomial::all_up_to(k, room) })
        })
        .collect::<Result<_, PolyError>>()?;
    let gens: Vec<Polynomial> = set.inequalities.iter().map(&pull).collect::<Result<_, _>>()?;

    let finish = |copositive: CopositiveCertificate, multipliers: Vec<Polynomial>, levels_tried: u32| {
        let cert = EqualityCertificate {
            epsilon: epsilon.clone(),
            degree: d,
            anchor: anchor.as_slice().to_vec(),
            cone_generators: cone_generators.clone(),
            equalities: equalities.clone(),
            multipliers,
            copositive,
        };
        assert!(cert.verify(p).is_valid(), "equality lift produced an invalid certificate");
        LiftOutcome::Found { certificate: Box::new(cert), levels_tried }
    };

    if let Some(multipliers) = ideal_combination(&target, &free) {
        let empty = CopositiveCertificate {
            nvars: k,
            factor: FactorKind::Affine,
            level: 0,
            degree: d,
            generators: gens.clone(),
            terms: Default::default(),
        };
        return Ok(finish(empty, multipliers, 1));
    }

    Ok(match search_levels(FactorKind::Affine, &target, &free, &gens, d, options)? {
        SearchOutcome::Certified { solution, levels_tried, .. } => {
            finish(solution.certificate, solution.multipliers, levels_tried)
        }
        SearchOutcome::InfeasibleAtAllLevels { rays, levels_tried } => {
            LiftOutcome::NotFound { rays, levels_tried, exhausted: None }
        }
        SearchOutcome::Exhausted { rays, levels_tried, reason } => {
            LiftOutcome::NotFound { rays, levels_tried, exhausted: Some(reason) }
        }
    })
}

/// `ε = 0` followed by `10⁻⁶, 10⁻⁵, …, 10⁻¹`.
pub fn epsilon_schedule() -> Vec<Rational> {
    std::iter::once(Rational::zero())
        .chain((1..=6).rev().map(|k| Rational::new(1.into(), num_bigint::BigInt::from(10).pow(k))))
        .collect()
}

/// Runs [`lift_equality`] over `schedule` in order and stops at the first
/// certificate, so the reported `ε` is the smallest scheduled one that works.
pub fn lift_equality_scheduled(
    p: &Polynomial,
    set: &SetDescriptor,
    h: &Polynomial,
    d: u32,
    schedule: &[Rational],
    options: &SearchOptions,
) -> Result<(Rational, LiftOutcome), ReductionError> {
    let mut last = None;
    for eps in schedule {
        let outcome = lift_equality(p, set, h, d, eps, options)?;
        if outcome.certificate().is_some() {
            return Ok((eps.clone(), outcome));
        }
        last = Some((eps.clone(), outcome));
    }
    last.ok_or(ReductionError::EmptySchedule)
}
