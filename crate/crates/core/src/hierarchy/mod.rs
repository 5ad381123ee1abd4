//! The Pólya-type LP hierarchy.
//!
//! Level `r` asks for non-negative `c_{α,β}` with
//! `(1 + Σx_i + Σg_j)^r · p = Σ c_{α,β} x^α g^β`, matched coefficient by
//! coefficient. The index set is truncated by weighted degree
//! `|α| + Σ β_j deg g_j ≤ r·deg(factor) + d`.

mod certificate;

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

pub use certificate::{verify_certificate, CertificateParseError, CopositiveCertificate, TermKey, Verification};
pub(crate) use certificate::{header, value};

use crate::lp::{solve_feasibility, LpOutcome, LpProblem, VarSign};
use crate::poly::{Monomial, PolyError, Polynomial};
use crate::rational::Rational;
use crate::sets::{ConeKind, SetDescriptor};

pub const DEFAULT_INDEX_CAP: usize = 200_000;
pub const DEFAULT_R_MAX: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HierarchyError {
    #[error("level {level} needs {needed} LP columns, above the index cap of {cap}")]
    IndexCap { level: u32, needed: usize, cap: usize },
    #[error("the Pólya hierarchy needs an orthant set; map other cones to the orthant first")]
    NotOrthant,
    #[error("the set has equality constraints; use the equality lift")]
    HasEqualities,
    #[error("target has degree {degree}, above the budget d = {d}")]
    DegreeBudget { degree: u32, d: u32 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub r_max: u32,
    pub index_cap: usize,
    /// Solve all levels concurrently; the smallest feasible level still wins.
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { r_max: DEFAULT_R_MAX, index_cap: DEFAULT_INDEX_CAP, parallel: false }
    }
}

/// Which multiplier the hierarchy uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// `1 + Σ x_i + Σ g_j`.
    Affine,
    /// `Σ x_i`, for forms with no generators (Pólya's theorem for forms).
    Form,
}

impl FactorKind {
    /// `Form` exactly when `p` is a nonzero form and there are no generators.
    pub fn for_target(p: &Polynomial, gens: &[Polynomial]) -> FactorKind {
        if gens.is_empty() && !p.is_zero() && p.is_homogeneous() {
            FactorKind::Form
        } else {
            FactorKind::Affine
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FactorKind::Affine => "affine",
            FactorKind::Form => "form",
        }
    }
}

pub fn factor_polynomial(kind: FactorKind, nvars: usize, gens: &[Polynomial]) -> Polynomial {
    match kind {
        FactorKind::Affine => polya_factor(nvars, gens),
        FactorKind::Form => &polya_factor(nvars, &[]) - &Polynomial::one(nvars),
    }
}

/// `1 + Σ x_i + Σ g_j`.
pub fn polya_factor(nvars: usize, gens: &[Polynomial]) -> Polynomial {
    let mut f = Polynomial::one(nvars);
    for i in 0..nvars {
        f.add_term(Monomial::var(nvars, i), Rational::from_integer(1.into()));
    }
    for g in gens {
        f = &f + g;
    }
    f
}

fn factor_degree(gens: &[Polynomial]) -> u32 {
    gens.iter().filter_map(Polynomial::degree).fold(1, u32::max)
}

/// Largest weighted degree `|α| + Σ β_j deg g_j` allowed at level `r`.
pub(crate) fn degree_budget(kind: FactorKind, gens: &[Polynomial], level: u32, d: u32) -> u32 {
    match kind {
        FactorKind::Affine => level * factor_degree(gens) + d,
        FactorKind::Form => level + d,
    }
}

/// One LP column of a coefficient-matching system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    /// Coefficient of monomial `monomial` in the free multiplier of equality `equality`.
    Free { equality: usize, monomial: Monomial },
    /// `c_{α,β} ≥ 0`.
    Term(TermKey),
}

/// A free multiplier: the column for `m` is `factor^r · h · m`.
#[derive(Debug, Clone)]
pub(crate) struct FreePart {
    pub h: Polynomial,
    pub monomials: Vec<Monomial>,
}

/// Coefficient-matching LP for one level.
#[derive(Debug, Clone)]
pub struct PolyaSystem {
    pub factor: FactorKind,
    pub level: u32,
    pub degree: u32,
    pub generators: Vec<Polynomial>,
    /// The polynomial being represented (`factor^r · target`).
    pub lhs: Polynomial,
    /// One row per monomial, in this order.
    pub rows: Vec<Monomial>,
    pub columns: Vec<Column>,
    pub lp: LpProblem,
}

/// Generator exponent vectors with `Σ β_j deg g_j ≤ budget`. Constant
/// generators are used at most once, since their powers add nothing.
fn beta_vectors(gens: &[Polynomial], budget: u32) -> Vec<(Vec<u32>, u32)> {
    let mut out = vec![(Vec::new(), 0u32)];
    for g in gens {
        let deg = g.degree().unwrap_or(0);
        let mut next = Vec::new();
        for (beta, w) in &out {
            let max_b = if deg == 0 { 1 } else { (budget - w) / deg };
            for b in 0..=max_b {
                let mut nb = beta.clone();
                nb.push(b);
                next.push((nb, w + b * deg));
            }
        }
        out = next;
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of monomials of degree ≤ `d` in `n` variables.
fn monomial_count(n: usize, d: u32) -> usize {
    binomial(n as u64 + d as u64, n as u64).min(usize::MAX as u64) as usize
}

pub(crate) fn build_system(
    kind: FactorKind,
    target: &Polynomial,
    free: &[FreePart],
    gens: &[Polynomial],
    level: u32,
    d: u32,
    index_cap: usize,
) -> Result<PolyaSystem, HierarchyError> {
    let n = target.nvars();
    for g in gens.iter().chain(free.iter().map(|f| &f.h)) {
        if g.nvars() != n {
            return Err(PolyError::VarMismatch { left: n, right: g.nvars() }.into());
        }
    }
    if let Some(deg) = target.degree() {
        if deg > d {
            return Err(HierarchyError::DegreeBudget { degree: deg, d });
        }
    }
    let budget = degree_budget(kind, gens, level, d);
    // Both sides of a form identity are homogeneous of degree `budget`.
    let min_alpha = |w: u32| if kind == FactorKind::Form { budget - w } else { 0 };
    let betas = beta_vectors(gens, budget);
    let free_cols: usize = free.iter().map(|f| f.monomials.len()).sum();
    let needed = betas
        .iter()
        .fold(free_cols, |acc, (_, w)| {
            let lower = if min_alpha(*w) == 0 { 0 } else { monomial_count(n, min_alpha(*w) - 1) };
            acc.saturating_add(monomial_count(n, budget - w) - lower)
        });
    if needed > index_cap {
        return Err(HierarchyError::IndexCap { level, needed, cap: index_cap });
    }

    let factor = factor_polynomial(kind, n, gens).pow(level);
    let lhs = &factor * target;

    let mut columns = Vec::with_capacity(needed);
    let mut column_polys: Vec<Polynomial> = Vec::with_capacity(needed);
    for (k, part) in free.iter().enumerate() {
        let base = &factor * &part.h;
        for m in &part.monomials {
            columns.push(Column::Free { equality: k, monomial: m.clone() });
            column_polys.push(base.mul_monomial(m));
        }
    }
    let mut powers: HashMap<Vec<u32>, Polynomial> = HashMap::new();
    for (beta, w) in &betas {
        let gb = powers
            .entry(beta.clone())
            .or_insert_with(|| TermKey::new(Monomial::one(n), beta.clone()).expand(gens))
            .clone();
        for alpha in Monomial::all_up_to(n, budget - w).into_iter().filter(|a| a.degree() >= min_alpha(*w)) {
            column_polys.push(gb.mul_monomial(&alpha));
            columns.push(Column::Term(TermKey::new(alpha, beta.clone())));
        }
    }

    let mut row_index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for m in lhs.terms().map(|(m, _)| m).chain(column_polys.iter().flat_map(|p| p.terms().map(|(m, _)| m))) {
        let next = row_index.len();
        row_index.entry(m.clone()).or_insert(next);
    }
    // Renumber rows in graded-lex order for deterministic output.
    let rows: Vec<Monomial> = row_index.keys().cloned().collect();
    let position: HashMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();

    let ncols = columns.len();
    let mut a = vec![vec![Rational::zero(); ncols]; rows.len()];
    for (j, poly) in column_polys.iter().enumerate() {
        for (m, c) in poly.terms() {
            a[position[m]][j] = c.clone();
        }
    }
    let mut b = vec![Rational::zero(); rows.len()];
    for (m, c) in lhs.terms() {
        b[position[m]] = c.clone();
    }
    let signs = columns
        .iter()
        .map(|c| match c {
            Column::Free { .. } => VarSign::Free,
            Column::Term(_) => VarSign::NonNegative,
        })
        .collect();
    let lp = LpProblem::new(a, b, signs).expect("consistent by construction");
    Ok(PolyaSystem { factor: kind, level, degree: d, generators: gens.to_vec(), lhs, rows, columns, lp })
}

/// Coefficient-matching LP of level `r` for `p` over the orthant with
/// generators `gens`. The factor is chosen by [`FactorKind::for_target`].
pub fn polya_expand(
    p: &Polynomial,
    gens: &[Polynomial],
    r: u32,
    index_cap: usize,
) -> Result<PolyaSystem, HierarchyError> {
    let d = p.degree().unwrap_or(0);
    build_system(FactorKind::for_target(p, gens), p, &[], gens, r, d, index_cap)
}

/// Farkas ray of one infeasible level; `y[i]` pairs with `rows[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelRay {
    pub level: u32,
    pub rows: Vec<Monomial>,
    pub farkas_ray: Vec<Rational>,
}

/// Feasible level, decoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSolution {
    pub certificate: CopositiveCertificate,
    /// One multiplier per free part, in the original order.
    pub multipliers: Vec<Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Certified { solution: LevelSolution, rays: Vec<LevelRay>, levels_tried: u32 },
    InfeasibleAtAllLevels { rays: Vec<LevelRay>, levels_tried: u32 },
    /// The search stopped before `r_max`, e.g. at the index cap.
    Exhausted { rays: Vec<LevelRay>, levels_tried: u32, reason: String },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&CopositiveCertificate> {
        match self {
            SearchOutcome::Certified { solution, .. } => Some(&solution.certificate),
            _ => None,
        }
    }

    pub fn rays(&self) -> &[LevelRay] {
        match self {
            SearchOutcome::Certified { rays, .. }
            | SearchOutcome::InfeasibleAtAllLevels { rays, .. }
            | SearchOutcome::Exhausted { rays, .. } => rays,
        }
    }

    pub fn levels_tried(&self) -> u32 {
        match self {
            SearchOutcome::Certified { levels_tried, .. }
            | SearchOutcome::InfeasibleAtAllLevels { levels_tried, .. }
            | SearchOutcome::Exhausted { levels_tried, .. } => *levels_tried,
        }
    }
}

enum LevelResult {
    Feasible(LevelSolution),
    Infeasible(LevelRay),
    TooLarge(HierarchyError),
}

fn decode(system: &PolyaSystem, witness: &[Rational], free: &[FreePart], nvars: usize) -> LevelSolution {
    let mut terms = BTreeMap::new();
    let mut multipliers = vec![Polynomial::zero(nvars); free.len()];
    for (col, v) in system.columns.iter().zip(witness) {
        if v.is_zero() {
            continue;
        }
        match col {
            Column::Free { equality, monomial } => multipliers[*equality].add_term(monomial.clone(), v.clone()),
            Column::Term(key) => {
                terms.insert(key.clone(), v.clone());
            }
        }
    }
    certificate::drop_zeros(&mut terms);
    LevelSolution {
        certificate: CopositiveCertificate {
            nvars,
            factor: system.factor,
            level: system.level,
            degree: system.degree,
            generators: system.generators.clone(),
            terms,
        },
        multipliers,
    }
}

fn solve_level(
    kind: FactorKind,
    target: &Polynomial,
    free: &[FreePart],
    gens: &[Polynomial],
    level: u32,
    d: u32,
    index_cap: usize,
) -> Result<LevelResult, HierarchyError> {
    let system = match build_system(kind, target, free, gens, level, d, index_cap) {
        Ok(s) => s,
        Err(e @ HierarchyError::IndexCap { .. }) => return Ok(LevelResult::TooLarge(e)),
        Err(e) => return Err(e),
    };
    Ok(match solve_feasibility(&system.lp) {
        LpOutcome::Feasible { witness } => {
            assert!(system.lp.check_witness(&witness), "LP witness failed its own check");
            LevelResult::Feasible(decode(&system, &witness, free, target.nvars()))
        }
        LpOutcome::Infeasible { farkas_ray } => {
            assert!(system.lp.check_farkas(&farkas_ray), "Farkas ray failed its own check");
            LevelResult::Infeasible(LevelRay { level, rows: system.rows, farkas_ray })
        }
    })
}

/// Runs levels `0..=r_max` and keeps the smallest feasible one.
pub(crate) fn search_levels(
    kind: FactorKind,
    target: &Polynomial,
    free: &[FreePart],
    gens: &[Polynomial],
    d: u32,
    options: &SearchOptions,
) -> Result<SearchOutcome, HierarchyError> {
    let levels: Vec<u32> = (0..=options.r_max).collect();
    let run = |&level: &u32| solve_level(kind, target, free, gens, level, d, options.index_cap);

    let results: Vec<Result<LevelResult, HierarchyError>> = if options.parallel {
        levels.par_iter().map(run).collect()
    } else {
        let mut out = Vec::new();
        for level in &levels {
            let r = run(level);
            let stop = !matches!(r, Ok(LevelResult::Infeasible(_)));
            out.push(r);
            if stop {
                break;
            }
        }
        out
    };

    let mut rays = Vec::new();
    for (tried, result) in results.into_iter().enumerate() {
        match result? {
            LevelResult::Infeasible(ray) => rays.push(ray),
            LevelResult::Feasible(solution) => {
                return Ok(SearchOutcome::Certified { solution, rays, levels_tried: tried as u32 + 1 });
            }
            LevelResult::TooLarge(e) => {
                if tried == 0 {
                    return Err(e);
                }
                return Ok(SearchOutcome::Exhausted { rays, levels_tried: tried as u32, reason: e.to_string() });
            }
        }
    }
    Ok(SearchOutcome::InfeasibleAtAllLevels { levels_tried: options.r_max + 1, rays })
}

/// Searches for a copositive certificate of `p` over an orthant set described
/// by inequalities. Every returned certificate has been verified exactly.
///
/// A form of degree `d` with no generators is searched with the factor
/// `Σ x_i`; the affine factor can never certify a form with a negative
/// coefficient, since the lowest-degree part of `(1 + Σx_i)^r p` is `p`.
pub fn certify_copositive(
    p: &Polynomial,
    set: &SetDescriptor,
    d: u32,
    options: &SearchOptions,
) -> Result<SearchOutcome, HierarchyError> {
    if set.cone != ConeKind::Orthant {
        return Err(HierarchyError::NotOrthant);
    }
    if !set.equalities.is_empty() {
        return Err(HierarchyError::HasEqualities);
    }
    if p.nvars() != set.nvars {
        return Err(PolyError::VarMismatch { left: set.nvars, right: p.nvars() }.into());
    }
    let kind = match p.degree() {
        Some(deg) if deg == d => FactorKind::for_target(p, &set.inequalities),
        _ => FactorKind::Affine,
    };
    let outcome = search_levels(kind, p, &[], &set.inequalities, d, options)?;
    if let Some(cert) = outcome.certificate() {
        assert!(verify_certificate(cert, p).is_valid(), "search produced an invalid certificate");
    }
    Ok(outcome)
}
