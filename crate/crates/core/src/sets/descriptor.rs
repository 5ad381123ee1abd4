use num_traits::{One, Signed, Zero};

use crate::poly::{AnchorVector, PolyError, Polynomial};
use crate::rational::{to_f64, Rational};

/// The closed convex cone that contains the set, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeKind {
    /// `R^n_+`.
    Orthant,
    /// `cone(g_1, …, g_k)`, assumed pointed.
    Polyhedral { generators: Vec<Vec<Rational>> },
    /// Second-order cone `x_n ≥ ‖(x_1, …, x_{n-1})‖`; the last variable is the axis.
    Lorentz,
    /// No cone containment.
    FullSpace,
}

/// Extra structure a set may carry so that its horizon cone can be computed exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HorizonHint {
    /// The set is `{(z, y) ∈ R^{2n}_+ : z − y ∈ base}`.
    DifferenceLift { base: Box<SetDescriptor> },
}

/// `{x ∈ cone : h_i(x) = 0, g_j(x) ≥ 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDescriptor {
    pub nvars: usize,
    pub cone: ConeKind,
    pub equalities: Vec<Polynomial>,
    pub inequalities: Vec<Polynomial>,
    pub hint: Option<HorizonHint>,
    pub anchor: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("constraint has {got} variables, the set has {expected}")]
    Arity { expected: usize, got: usize },
    #[error("cone generator {index} has the wrong length")]
    GeneratorLength { index: usize },
    #[error("a polyhedral cone needs a user-supplied anchor vector")]
    MissingAnchor,
    #[error("the set is not contained in a pointed cone; apply the non-conic lift first")]
    NotPointed,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl SetDescriptor {
    pub fn new(nvars: usize, cone: ConeKind) -> Self {
        SetDescriptor { nvars, cone, equalities: Vec::new(), inequalities: Vec::new(), hint: None, anchor: None }
    }

    pub fn orthant(nvars: usize) -> Self {
        Self::new(nvars, ConeKind::Orthant)
    }

    pub fn full_space(nvars: usize) -> Self {
        Self::new(nvars, ConeKind::FullSpace)
    }

    pub fn with_equality(mut self, h: Polynomial) -> Self {
        assert_eq!(h.nvars(), self.nvars, "equality arity");
        self.equalities.push(h);
        self
    }

    pub fn with_inequality(mut self, g: Polynomial) -> Self {
        assert_eq!(g.nvars(), self.nvars, "inequality arity");
        self.inequalities.push(g);
        self
    }

    pub fn with_anchor(mut self, a: Vec<Rational>) -> Self {
        self.anchor = Some(a);
        self
    }

    pub fn validate(&self) -> Result<(), SetError> {
        for p in self.equalities.iter().chain(&self.inequalities) {
            if p.nvars() != self.nvars {
                return Err(SetError::Arity { expected: self.nvars, got: p.nvars() });
            }
        }
        if let ConeKind::Polyhedral { generators } = &self.cone {
            if let Some(index) = generators.iter().position(|g| g.len() != self.nvars) {
                return Err(SetError::GeneratorLength { index });
            }
        }
        if self.is_pointed() {
            self.anchor_vector()?;
        }
        Ok(())
    }

    pub fn is_pointed(&self) -> bool {
        !matches!(self.cone, ConeKind::FullSpace)
    }

    /// `a` with `aᵀx > 0` on the cone minus the origin: all ones for the
    /// orthant, the axis for the Lorentz cone, user-supplied otherwise.
    pub fn anchor_vector(&self) -> Result<AnchorVector, SetError> {
        match &self.cone {
            ConeKind::Orthant => match &self.anchor {
                Some(a) => Ok(AnchorVector::for_orthant(a.clone())?),
                None => Ok(AnchorVector::ones(self.nvars)),
            },
            ConeKind::Lorentz => {
                let mut a = vec![Rational::zero(); self.nvars];
                if let Some(last) = a.last_mut() {
                    *last = Rational::one();
                }
                Ok(AnchorVector::new_unchecked(a))
            }
            ConeKind::Polyhedral { generators } => {
                let a = self.anchor.clone().ok_or(SetError::MissingAnchor)?;
                Ok(AnchorVector::for_generators(a, generators)?)
            }
            ConeKind::FullSpace => Err(SetError::NotPointed),
        }
    }

    /// The same cone with no constraints.
    pub fn cone_only(&self) -> SetDescriptor {
        SetDescriptor::new(self.nvars, self.cone.clone()).with_anchor_opt(self.anchor.clone())
    }

    fn with_anchor_opt(mut self, a: Option<Vec<Rational>>) -> Self {
        self.anchor = a;
        self
    }

    /// Exact membership of a rational point (cone membership is exact for the
    /// orthant and the full space; Lorentz and polyhedral cones are checked
    /// through their defining inequalities / a non-negative combination test).
    pub fn contains(&self, x: &[Rational]) -> Result<bool, SetError> {
        if x.len() != self.nvars {
            return Err(SetError::Arity { expected: self.nvars, got: x.len() });
        }
        let in_cone = match &self.cone {
            ConeKind::Orthant => x.iter().all(|v| !v.is_negative()),
            ConeKind::FullSpace => true,
            ConeKind::Lorentz => {
                let (axis, rest) = x.split_last().expect("nonempty");
                let sq: Rational = rest.iter().map(|v| v * v).sum();
                !axis.is_negative() && axis * axis >= sq
            }
            ConeKind::Polyhedral { generators } => in_polyhedral_cone(x, generators),
        };
        if !in_cone {
            return Ok(false);
        }
        for h in &self.equalities {
            if !h.evaluate(x)?.is_zero() {
                return Ok(false);
            }
        }
        for g in &self.inequalities {
            if g.evaluate(x)?.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }


    pub(crate) fn generators_f64(&self) -> Option<Vec<Vec<f64>>> {
        match &self.cone {
            ConeKind::Polyhedral { generators } => {
                Some(generators.iter().map(|g| g.iter().map(to_f64).collect()).collect())
            }
            _ => None,
        }
    }
}

fn in_polyhedral_cone(x: &[Rational], generators: &[Vec<Rational>]) -> bool {
    use crate::lp::{solve_feasibility, LpProblem, VarSign};
    let n = x.len();
    let a: Vec<Vec<Rational>> = (0..n).map(|i| generators.iter().map(|g| g[i].clone()).collect()).collect();
    let lp = LpProblem::new(a, x.to_vec(), vec![VarSign::NonNegative; generators.len()]).expect("dimensions");
    solve_feasibility(&lp).is_feasible()
}
