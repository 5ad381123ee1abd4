//! Reductions of equality, inequality and non-conic problems to copositive
//! problems over an orthant, and the counterexample for sets that violate the
//! horizon-cone condition.

mod counterexample;
mod equality;

use std::fmt::Write as _;

use num_traits::{One, Zero};

pub use counterexample::{build_counterexample, Counterexample, CounterexampleOptions};
pub use equality::{epsilon_schedule, lift_equality, lift_equality_scheduled, EqualityCertificate, LiftOutcome};

use crate::hierarchy::{HierarchyError, SearchOptions};
use crate::poly::{PolyError, Polynomial};
use crate::rational::{format_rational, Rational};
use crate::sets::{ConeKind, HorizonHint, SetDescriptor, SetError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("the equality lift needs an orthant or a polyhedral cone")]
    UnsupportedCone,
    #[error("the non-conic lift is for sets given over the full space")]
    NotFullSpace,
    #[error("degree {degree} exceeds the bound {bound}")]
    DegreeBound { degree: u32, bound: u32 },
    #[error("epsilon must be non-negative")]
    NegativeEpsilon,
    #[error("the epsilon schedule is empty")]
    EmptySchedule,
    #[error("the lifted certificate uses a polyhedral cone map, which has no back-substitution")]
    NoBackSubstitution,
    #[error("counterexample refused: {0}")]
    Refused(String),
}

/// How `deg h` enters the inequality lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InequalityBranch {
    Constant,
    Linear,
    Higher,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// `S ∩ {h ≥ 0}` lifted to `S × R_+` with the slack `t = x_{n+1}`.
    Inequality { original_vars: usize, h: Polynomial, branch: InequalityBranch },
    /// `S ⊆ Rⁿ` lifted to `{(z, y) ∈ R^{2n}_+ : z − y ∈ S}`.
    NonConic { original_vars: usize },
}

/// An equality problem `target ≥ 0` on `set ∩ equality⁻¹(0)` produced by a lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedProblem {
    pub target: Polynomial,
    pub set: SetDescriptor,
    pub equality: Polynomial,
    pub degree: u32,
    /// Degree bound of the multiplier of `equality`.
    pub free_multiplier_degree: u32,
    pub provenance: Provenance,
}

/// Both sides of a lifted certificate identity after back-substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrip {
    pub lhs: Polynomial,
    pub rhs: Polynomial,
    /// Image of the lifted equality; zero for the inequality lift.
    pub equality_image: Polynomial,
}

impl RoundTrip {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

impl LiftedProblem {
    fn original_vars(&self) -> usize {
        match &self.provenance {
            Provenance::Inequality { original_vars, .. } | Provenance::NonConic { original_vars } => *original_vars,
        }
    }

    /// Lifted variables as polynomials in the original ones.
    pub fn back_substitution(&self) -> Vec<Polynomial> {
        let n = self.original_vars();
        match &self.provenance {
            Provenance::Inequality { h, .. } => {
                let mut subs: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
                subs.push(h.clone());
                subs
            }
            Provenance::NonConic { .. } => {
                let sq = |i: usize| Polynomial::var(n, i).pow(2);
                let one = Polynomial::one(n);
                let z = (0..n).map(|i| &(&sq(i) + &Polynomial::var(n, i)) + &one);
                let y = (0..n).map(|i| &sq(i) + &one);
                z.chain(y).collect()
            }
        }
    }

    pub fn pull_back(&self, q: &Polynomial) -> Result<Polynomial, PolyError> {
        q.substitute(&self.back_substitution())
    }

    pub fn solve(&self, epsilon: &Rational, options: &SearchOptions) -> Result<LiftOutcome, ReductionError> {
        lift_equality(&self.target, &self.set, &self.equality, self.degree, epsilon, options)
    }

    /// Substitutes the back-substitution into both sides of the identity
    /// `F^r·(target + εA^d − Σ h_i q_i) = Σ c_{α,β} x^α g^β` of `cert`.
    pub fn round_trip(&self, cert: &EqualityCertificate) -> Result<RoundTrip, ReductionError> {
        if cert.cone_generators.is_some() {
            return Err(ReductionError::NoBackSubstitution);
        }
        let reduced = cert.reduced_target(&self.target)?;
        let lifted_lhs = &cert.copositive.factor_power() * &reduced;
        let lifted_rhs = cert.copositive.expand_rhs();
        Ok(RoundTrip {
            lhs: self.pull_back(&lifted_lhs)?,
            rhs: self.pull_back(&lifted_rhs)?,
            equality_image: self.pull_back(&self.equality)?,
        })
    }

    /// The lifted problem in the problem-file format, headed by a comment
    /// block describing the lift.
    pub fn to_problem_text(&self) -> String {
        let n = self.set.nvars;
        let names = Polynomial::default_names(n);
        let orig = Polynomial::default_names(self.original_vars());
        let mut s = String::new();
        match &self.provenance {
            Provenance::Inequality { h, branch, .. } => {
                writeln!(s, "# inequality lift of h = {}", h.to_text(&orig)).unwrap();
                writeln!(s, "# branch: {branch:?}").unwrap();
            }
            Provenance::NonConic { .. } => writeln!(s, "# non-conic lift x = z - y").unwrap(),
        }
        for (v, b) in names.iter().zip(self.back_substitution()) {
            writeln!(s, "# {v} <- {}", b.to_text(&orig)).unwrap();
        }
        writeln!(s, "vars: {}", names.join(" ")).unwrap();
        writeln!(s, "p: {}", self.target.to_text(&names)).unwrap();
        match &self.set.cone {
            ConeKind::Orthant => writeln!(s, "cone: orthant").unwrap(),
            ConeKind::FullSpace => writeln!(s, "cone: free").unwrap(),
            ConeKind::Lorentz => writeln!(s, "cone: lorentz").unwrap(),
            ConeKind::Polyhedral { generators } => {
                writeln!(s, "cone: polyhedral").unwrap();
                for g in generators {
                    let row: Vec<String> = g.iter().map(format_rational).collect();
                    writeln!(s, "ray: {}", row.join(" ")).unwrap();
                }
            }
        }
        if let Some(a) = &self.set.anchor {
            let row: Vec<String> = a.iter().map(format_rational).collect();
            writeln!(s, "anchor: {}", row.join(" ")).unwrap();
        }
        for e in &self.set.equalities {
            writeln!(s, "eq: {}", e.to_text(&names)).unwrap();
        }
        for g in &self.set.inequalities {
            writeln!(s, "ineq: {}", g.to_text(&names)).unwrap();
        }
        writeln!(s, "h: {}", self.equality.to_text(&names)).unwrap();
        writeln!(s, "option d = {}", self.degree).unwrap();
        s
    }
}

/// `h²`, a non-negative equality with the same zero set.
pub fn square_trick(h: &Polynomial, d: u32) -> Result<Polynomial, ReductionError> {
    let deg = h.degree().unwrap_or(0);
    if 2 * deg > d {
        return Err(ReductionError::DegreeBound { degree: 2 * deg, bound: d });
    }
    Ok(h.pow(2))
}

/// `S × R_+`, with the anchor extended by `1`.
fn with_half_line(set: &SetDescriptor) -> Result<SetDescriptor, ReductionError> {
    let n = set.nvars;
    let cone = match &set.cone {
        ConeKind::Orthant => ConeKind::Orthant,
        ConeKind::Polyhedral { generators } => {
            let mut gens: Vec<Vec<Rational>> = generators
                .iter()
                .map(|g| g.iter().cloned().chain(std::iter::once(Rational::zero())).collect())
                .collect();
            let mut axis = vec![Rational::zero(); n + 1];
            axis[n] = Rational::one();
            gens.push(axis);
            ConeKind::Polyhedral { generators: gens }
        }
        ConeKind::Lorentz => return Err(ReductionError::UnsupportedCone),
        ConeKind::FullSpace => return Err(SetError::NotPointed.into()),
    };
    let mut out = SetDescriptor::new(n + 1, cone);
    out.equalities = set.equalities.iter().map(|e| e.extend_vars(1)).collect();
    out.inequalities = set.inequalities.iter().map(|g| g.extend_vars(1)).collect();
    out.anchor = set.anchor.as_ref().map(|a| a.iter().cloned().chain(std::iter::once(Rational::one())).collect());
    Ok(out)
}

/// `p ≥ 0` on `S ∩ {h ≥ 0}` becomes `p ≥ 0` on `(S × R_+) ∩ g⁻¹(0)` with
/// `g(x, t) = (1 + aᵀx)^{d − 2 deg h}(h(x) − t)²`. A certificate of the
/// lifted problem gives one for the original after `t = h(x)`.
///
/// For constant `h`, `deg g = d + 2`, so the lifted degree is raised to it.
pub fn lift_inequality(
    p: &Polynomial,
    set: &SetDescriptor,
    h: &Polynomial,
    d: u32,
) -> Result<LiftedProblem, ReductionError> {
    set.validate()?;
    let n = set.nvars;
    for q in [p, h] {
        if q.nvars() != n {
            return Err(PolyError::VarMismatch { left: n, right: q.nvars() }.into());
        }
    }
    let deg_h = h.degree().unwrap_or(0);
    if 2 * deg_h > d {
        return Err(ReductionError::DegreeBound { degree: deg_h, bound: d / 2 });
    }
    let deg_p = p.degree().unwrap_or(0);
    if deg_p > d {
        return Err(ReductionError::DegreeBound { degree: deg_p, bound: d });
    }
    let a = set.anchor_vector()?;
    let lifted = with_half_line(set)?;
    let t = Polynomial::var(n + 1, n);
    let slack = &h.extend_vars(1) - &t;
    let equality = &a.one_plus_form().extend_vars(1).pow(d - 2 * deg_h) * &slack.pow(2);
    let deg_g = equality.degree().unwrap_or(0);
    let degree = d.max(deg_g);
    let branch = match deg_h {
        0 => InequalityBranch::Constant,
        1 => InequalityBranch::Linear,
        _ => InequalityBranch::Higher,
    };
    Ok(LiftedProblem {
        target: p.extend_vars(1),
        set: lifted,
        equality,
        degree,
        free_multiplier_degree: degree - deg_g,
        provenance: Provenance::Inequality { original_vars: n, h: h.clone(), branch },
    })
}

/// `p ≥ 0` on `S ∩ h⁻¹(0)` for `S ⊆ Rⁿ` becomes `p(z − y) ≥ 0` on
/// `{(z, y) ∈ R^{2n}_+ : z − y ∈ S, h(z − y) = 0}`. Back-substituting
/// `z = x² + x + 1`, `y = x² + 1` doubles every degree.
pub fn nonconic_lift(
    p: &Polynomial,
    set: &SetDescriptor,
    h: &Polynomial,
    d: u32,
) -> Result<LiftedProblem, ReductionError> {
    set.validate()?;
    if set.cone != ConeKind::FullSpace {
        return Err(ReductionError::NotFullSpace);
    }
    let n = set.nvars;
    for q in [p, h] {
        if q.nvars() != n {
            return Err(PolyError::VarMismatch { left: n, right: q.nvars() }.into());
        }
    }
    for q in [p, h] {
        let deg = q.degree().unwrap_or(0);
        if deg > d {
            return Err(ReductionError::DegreeBound { degree: deg, bound: d });
        }
    }
    let diff: Vec<Polynomial> = (0..n).map(|i| &Polynomial::var(2 * n, i) - &Polynomial::var(2 * n, n + i)).collect();
    let sub = |q: &Polynomial| q.substitute(&diff);
    let mut lifted = SetDescriptor::orthant(2 * n);
    lifted.equalities = set.equalities.iter().map(sub).collect::<Result<_, _>>()?;
    lifted.inequalities = set.inequalities.iter().map(sub).collect::<Result<_, _>>()?;
    lifted.hint = Some(HorizonHint::DifferenceLift { base: Box::new(set.clone()) });
    let equality = sub(h)?;
    Ok(LiftedProblem {
        target: sub(p)?,
        set: lifted,
        degree: d,
        free_multiplier_degree: d - h.degree().unwrap_or(0),
        equality,
        provenance: Provenance::NonConic { original_vars: n },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::DEFAULT_INDEX_CAP;
    use crate::poly::parse_polynomial;
    use crate::rational::{frac, int};

    fn poly(s: &str, n: usize) -> Polynomial {
        parse_polynomial(s, &Polynomial::default_names(n)).unwrap()
    }

    fn options(r_max: u32) -> SearchOptions {
        SearchOptions { r_max, index_cap: DEFAULT_INDEX_CAP, parallel: false }
    }

    #[test]
    fn p_in_the_ideal_needs_no_copositive_part() {
        let s = SetDescriptor::orthant(1);
        let out = lift_equality(&poly("x1*(1 + x1)", 1), &s, &poly("x1", 1), 2, &int(0), &options(2)).unwrap();
        let cert = out.certificate().expect("found");
        assert_eq!(cert.multipliers, vec![poly("1 + x1", 1)]);
        assert!(cert.copositive.terms.is_empty());

        let h = poly("(x1*x2 + 1)*(x1 - x2)^2", 2);
        let out = lift_equality(&h, &SetDescriptor::orthant(2), &h, 4, &int(0), &options(1)).unwrap();
        let cert = out.certificate().expect("found");
        assert_eq!(cert.multipliers, vec![poly("1", 2)]);
        assert!(cert.copositive.terms.is_empty());
    }

    #[test]
    fn equality_lift_uses_the_multiplier() {
        // x1 − x2 ≥ 0 is false on the orthant but holds on x1 = x2 + 1.
        let s = SetDescriptor::orthant(2);
        let out = lift_equality(&poly("x1 - x2", 2), &s, &poly("x1 - x2 - 1", 2), 1, &int(0), &options(2)).unwrap();
        let cert = out.certificate().expect("found");
        assert!(cert.verify(&poly("x1 - x2", 2)).is_valid());
        let text = cert.to_text();
        assert_eq!(EqualityCertificate::from_text(&text).unwrap(), *cert);
    }

    #[test]
    fn polyhedral_cones_are_mapped_to_the_orthant() {
        // Cone over (1, 0) and (1, 1): x2 ≥ 0 and x1 − x2 ≥ 0.
        let gens = vec![vec![int(1), int(0)], vec![int(1), int(1)]];
        let s = SetDescriptor::new(2, ConeKind::Polyhedral { generators: gens }).with_anchor(vec![int(1), int(0)]);
        let p = poly("x1 - x2", 2);
        let out = lift_equality(&p, &s, &poly("x1 - 3", 2), 1, &int(0), &options(1)).unwrap();
        let cert = out.certificate().expect("found");
        assert!(cert.verify(&p).is_valid());
        assert!(cert.matches_problem(&s, &poly("x1 - 3", 2)));
        assert_eq!(EqualityCertificate::from_text(&cert.to_text()).unwrap(), *cert);
        // Not copositive on the orthant itself.
        let out = lift_equality(&p, &SetDescriptor::orthant(2), &poly("x1 - 3", 2), 1, &int(0), &options(2)).unwrap();
        assert!(out.certificate().is_none());
    }

    #[test]
    fn tampered_equality_certificate_fails() {
        let s = SetDescriptor::orthant(2);
        let p = poly("x1 - x2", 2);
        let out = lift_equality(&p, &s, &poly("x1 - x2 - 1", 2), 1, &int(0), &options(2)).unwrap();
        let mut cert = out.certificate().unwrap().clone();
        cert.multipliers[0] = &cert.multipliers[0] + &poly("1/1000", 2);
        let v = cert.verify(&p);
        assert!(!v.is_valid());
        assert!(!v.diff_lines().is_empty());
    }

    #[test]
    fn epsilon_is_monotone() {
        // x1^2 − x1 + 1/4 = (x1 − 1/2)^2 is not certified at ε = 0 by Pólya.
        let s = SetDescriptor::orthant(1);
        let p = poly("x1^2 - x1 + 1/4", 1);
        let h = poly("0", 1);
        let small = lift_equality(&p, &s, &h, 2, &frac(1, 10), &options(6)).unwrap();
        let r = small.levels_tried();
        assert!(small.certificate().is_some());
        let big = lift_equality(&p, &s, &h, 2, &frac(1, 2), &options(6)).unwrap();
        assert!(big.certificate().is_some());
        assert!(big.levels_tried() <= r);
        assert!(lift_equality(&p, &s, &h, 2, &int(0), &options(4)).unwrap().certificate().is_none());
    }

    #[test]
    fn scheduled_epsilon_is_the_smallest_that_works() {
        let s = SetDescriptor::orthant(1);
        let p = poly("x1^2 - x1 + 1/4", 1);
        let (eps, out) = lift_equality_scheduled(&p, &s, &poly("0", 1), 2, &epsilon_schedule(), &options(6)).unwrap();
        assert!(out.certificate().is_some());
        assert!(eps > int(0));
        let smaller: Vec<Rational> = epsilon_schedule().into_iter().filter(|e| *e < eps).collect();
        for e in smaller {
            assert!(lift_equality(&p, &s, &poly("0", 1), 2, &e, &options(6)).unwrap().certificate().is_none());
        }
    }

    #[test]
    fn square_trick_examples() {
        assert_eq!(square_trick(&poly("x1 - x2", 2), 2).unwrap(), poly("x1^2 - 2*x1*x2 + x2^2", 2));
        assert_eq!(square_trick(&poly("0", 2), 0).unwrap(), poly("0", 2));
        let h = poly("x1^3 - x1*x2 + 2", 2);
        let sq = square_trick(&h, 6).unwrap();
        assert_eq!(sq.leading_form().unwrap(), h.leading_form().unwrap().pow(2));
        assert!(matches!(square_trick(&h, 5), Err(ReductionError::DegreeBound { .. })));
    }

    #[test]
    fn inequality_lift_shapes() {
        let s = SetDescriptor::orthant(2);
        let net = poly("(x2 - x1^2)*(2*x1^2 - x2)", 2);
        let lifted = lift_inequality(&poly("x1", 2), &s, &net, 8).unwrap();
        assert_eq!(lifted.equality, (&net.extend_vars(1) - &Polynomial::var(3, 2)).pow(2));
        assert_eq!((lifted.degree, lifted.free_multiplier_degree), (8, 0));
        assert_eq!(lifted.pull_back(&lifted.equality).unwrap(), Polynomial::zero(2));

        let lin = lift_inequality(&poly("x1", 2), &s, &poly("x1 - 1", 2), 4).unwrap();
        assert_eq!(lin.equality.degree(), Some(4));
        assert!(matches!(lin.provenance, Provenance::Inequality { branch: InequalityBranch::Linear, .. }));

        let c = lift_inequality(&poly("x1", 2), &s, &poly("2", 2), 2).unwrap();
        let expected = &poly("(1 + x1 + x2)^2", 3) * &poly("(2 - x3)^2", 3);
        assert_eq!(c.equality, expected);
        assert_eq!((c.degree, c.free_multiplier_degree), (4, 0));

        assert!(matches!(lift_inequality(&poly("x1", 2), &s, &net, 7), Err(ReductionError::DegreeBound { .. })));
    }

    #[test]
    fn linear_inequality_round_trip() {
        // x1 ≥ 1 on the orthant; p = x1 − 1/2 > 0 there.
        let s = SetDescriptor::orthant(1);
        let lifted = lift_inequality(&poly("x1 - 1/2", 1), &s, &poly("x1 - 1", 1), 2).unwrap();
        let out = lifted.solve(&frac(1, 10), &options(6)).unwrap();
        let cert = out.certificate().expect("found");
        let rt = lifted.round_trip(cert).unwrap();
        assert!(rt.holds());
        assert!(rt.equality_image.is_zero());
    }

    #[test]
    fn nonconic_lift_example() {
        let s = SetDescriptor::full_space(1);
        let lifted = nonconic_lift(&poly("x1^2", 1), &s, &poly("x1", 1), 2).unwrap();
        assert_eq!(lifted.target, poly("(x1 - x2)^2", 2));
        assert_eq!(lifted.equality, poly("x1 - x2", 2));
        assert_eq!(lifted.set.cone, ConeKind::Orthant);
        assert_eq!(lifted.pull_back(&lifted.target).unwrap(), poly("x1^2", 1));
        let out = lifted.solve(&int(0), &options(1)).unwrap();
        let cert = out.certificate().expect("p̂ = g·(z − y)");
        let rt = lifted.round_trip(cert).unwrap();
        assert!(rt.holds());
        assert!(lifted.to_problem_text().contains("# x1 <- x1^2 + x1 + 1"));
    }

    #[test]
    fn nonconic_back_substitution_doubles_degrees() {
        let s = SetDescriptor::full_space(2);
        let p = poly("x1^3 - 2*x1*x2 + 5*x2 - 7", 2);
        let lifted = nonconic_lift(&p, &s, &poly("x1", 2), 3).unwrap();
        assert_eq!(lifted.pull_back(&lifted.target).unwrap(), p);
        let g = lifted.pull_back(&poly("x1 * x3", 4)).unwrap();
        assert_eq!(g.degree(), Some(4));
    }
}
