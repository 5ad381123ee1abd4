//! Exact horizon cones for structured families.
//!
//! * sets cut out of a polyhedral cone (or the full space) by affine
//!   constraints: `rec S = {x ∈ K : ã_i x = 0, b̃_j x ≥ 0}` when `S ≠ ∅`;
//! * paraboloid epigraphs `a·x_n + b − Σ_{i<n} q_i x_i² ≥ 0` with `a, q_i > 0`:
//!   the ray `e_n`;
//! * the set `(x2 − x1²)(2x1² − x2) ≥ 0` in `R²_+`: the ray `e_2`;
//! * difference lifts `{(z, y) ∈ R^{2n}_+ : z − y ∈ U}`:
//!   `{(z, y) ≥ 0 : z − y ∈ rec U}`.
//!
//! Extreme rays of `{v ≥ 0 : Mv = 0}` are found by enumerating minimal
//! supports, which is exact and fine at the sizes used here.

use num_traits::{One, Signed, Zero};

use super::probe::{normalized, DirectionSet};
use super::{ConeKind, HorizonHint, SetDescriptor};
use crate::lp::{solve_feasibility, LpProblem, VarSign};
use crate::poly::{parse_polynomial, Monomial, Polynomial};
use crate::rational::{to_f64, Rational};

/// Largest number of columns for support enumeration.
const MAX_ENUMERATION_COLUMNS: usize = 18;

/// `cone(generators)`; `empty` marks `rec ∅ = ∅`, as opposed to `{0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizonCone {
    pub nvars: usize,
    pub generators: Vec<Vec<Rational>>,
    pub empty: bool,
    pub family: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no built-in horizon family matches this set")]
pub struct Unsupported;

impl HorizonCone {
    /// Exact membership `x ∈ cone(generators)`.
    pub fn contains(&self, x: &[Rational]) -> bool {
        if self.empty {
            return false;
        }
        if x.iter().all(Zero::is_zero) {
            return true;
        }
        if self.generators.is_empty() {
            return false;
        }
        let a: Vec<Vec<Rational>> =
            (0..self.nvars).map(|i| self.generators.iter().map(|g| g[i].clone()).collect()).collect();
        let lp = LpProblem::new(a, x.to_vec(), vec![VarSign::NonNegative; self.generators.len()])
            .expect("dimensions");
        solve_feasibility(&lp).is_feasible()
    }

    pub fn to_direction_set(&self) -> DirectionSet {
        let directions: Vec<Vec<f64>> =
            self.generators.iter().map(|g| normalized(&g.iter().map(to_f64).collect::<Vec<_>>())).collect();
        let w = if directions.is_empty() { 0.0 } else { 1.0 / directions.len() as f64 };
        DirectionSet {
            weights: vec![w; directions.len()],
            samples: directions.clone(),
            directions,
            diagnostics: Vec::new(),
            note: Some(format!("exact ({})", self.family)),
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// Null space of the columns `cols` of `m`, by exact reduced row echelon form.
fn nullspace(m: &[Vec<Rational>], cols: &[usize]) -> Vec<Vec<Rational>> {
    let k = cols.len();
    let mut a: Vec<Vec<Rational>> = m.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        a[r].iter_mut().for_each(|v| *v *= &inv);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (v, pv) in a[i].iter_mut().zip(pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); k];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

/// Extreme rays of `{v ∈ R^k_+ : Mv = 0}`, by minimal supports.
fn extreme_rays(m: &[Vec<Rational>], k: usize) -> Result<Vec<Vec<Rational>>, Unsupported> {
    if k > MAX_ENUMERATION_COLUMNS {
        return Err(Unsupported);
    }
    let mut rays: Vec<Vec<Rational>> = Vec::new();
    let mut supports: Vec<u32> = Vec::new();
    for mask in 1u32..(1 << k) {
        // A minimal support contains no smaller support already found.
        if supports.iter().any(|s| s & mask == *s) {
            continue;
        }
        let cols: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let ns = nullspace(m, &cols);
        if ns.len() != 1 {
            continue;
        }
        let mut w = ns.into_iter().next().expect("one vector");
        if w.iter().all(|x| x.is_negative()) {
            w.iter_mut().for_each(|x| *x = -x.clone());
        }
        if !w.iter().all(|x| x.is_positive()) {
            continue;
        }
        let mut v = vec![Rational::zero(); k];
        for (c, val) in cols.iter().zip(w) {
            v[*c] = val;
        }
        supports.push(mask);
        rays.push(v);
    }
    Ok(rays)
}

/// Scales to unit 1-norm so equal directions compare equal.
fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    let s: Rational = v.iter().map(|x| x.abs()).sum();
    v.into_iter().map(|x| x / &s).collect()
}

fn dedupe(mut gens: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    gens.retain(|g| g.iter().any(|x| !x.is_zero()));
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for g in gens.into_iter().map(primitive) {
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out.sort();
    let mut i = 0;
    while i < out.len() {
        let rest: Vec<Vec<Rational>> = out.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        let redundant = HorizonCone { nvars: out[i].len(), generators: rest, empty: false, family: "" }.contains(&out[i]);
        if redundant {
            out.remove(i);
        } else {
            i += 1;
        }
    }
    out
}

/// `x = G λ` with `λ ≥ 0` parameterizing the ambient cone.
fn parameterization(set: &SetDescriptor) -> Result<Vec<Vec<Rational>>, Unsupported> {
    let n = set.nvars;
    match &set.cone {
        ConeKind::Orthant => Ok((0..n).map(|i| unit(n, i)).collect()),
        ConeKind::Polyhedral { generators } => Ok(generators.clone()),
        ConeKind::FullSpace => Ok((0..n)
            .map(|i| unit(n, i))
            .chain((0..n).map(|i| unit(n, i).into_iter().map(|x| -x).collect()))
            .collect()),
        ConeKind::Lorentz => Err(Unsupported),
    }
}

/// `(constant, linear coefficients)` of a polynomial of degree ≤ 1.
fn affine_parts(p: &Polynomial) -> Option<(Rational, Vec<Rational>)> {
    if p.degree().unwrap_or(0) > 1 {
        return None;
    }
    let n = p.nvars();
    Some((p.constant_term(), (0..n).map(|i| p.coefficient(&Monomial::var(n, i))).collect()))
}

fn linear_family(set: &SetDescriptor) -> Result<HorizonCone, Unsupported> {
    let gens = parameterization(set)?;
    let eqs: Vec<_> = set.equalities.iter().map(affine_parts).collect::<Option<_>>().ok_or(Unsupported)?;
    let ineqs: Vec<_> = set.inequalities.iter().map(affine_parts).collect::<Option<_>>().ok_or(Unsupported)?;
    let k = gens.len();
    let m_ineq = ineqs.len();
    let dot = |a: &[Rational], g: &[Rational]| -> Rational { a.iter().zip(g).map(|(x, y)| x * y).sum() };

    // Rows over (λ, s): ãGλ = −c for equalities, b̃Gλ − s = −c for inequalities.
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (c, a) in &eqs {
        let mut row: Vec<Rational> = gens.iter().map(|g| dot(a, g)).collect();
        row.extend(std::iter::repeat_n(Rational::zero(), m_ineq));
        rows.push(row);
        rhs.push(-c.clone());
    }
    for (j, (c, b)) in ineqs.iter().enumerate() {
        let mut row: Vec<Rational> = gens.iter().map(|g| dot(b, g)).collect();
        row.extend((0..m_ineq).map(|i| if i == j { -Rational::one() } else { Rational::zero() }));
        rows.push(row);
        rhs.push(-c.clone());
    }
    let feasible = solve_feasibility(
        &LpProblem::new(rows.clone(), rhs, vec![VarSign::NonNegative; k + m_ineq]).expect("dimensions"),
    )
    .is_feasible();
    if !feasible {
        return Ok(HorizonCone { nvars: set.nvars, generators: Vec::new(), empty: true, family: "affine" });
    }
    let rays = extreme_rays(&rows, k + m_ineq)?;
    let projected = rays
        .into_iter()
        .map(|v| {
            (0..set.nvars)
                .map(|i| gens.iter().zip(&v).map(|(g, l)| &g[i] * l).sum())
                .collect::<Vec<Rational>>()
        })
        .collect();
    Ok(HorizonCone { nvars: set.nvars, generators: dedupe(projected), empty: false, family: "affine" })
}

fn paraboloid_family(set: &SetDescriptor) -> Result<HorizonCone, Unsupported> {
    let n = set.nvars;
    if n < 2
        || !matches!(set.cone, ConeKind::FullSpace | ConeKind::Lorentz)
        || !set.equalities.is_empty()
        || set.inequalities.len() != 1
    {
        return Err(Unsupported);
    }
    let g = &set.inequalities[0];
    let axis = Monomial::var(n, n - 1);
    let mut ok = g.coefficient(&axis).is_positive();
    for (m, c) in g.terms() {
        let e = m.exponents();
        let allowed = m.degree() == 0
            || *m == axis
            || (m.degree() == 2 && e[n - 1] == 0 && e.iter().any(|&x| x == 2) && c.is_negative());
        ok &= allowed;
    }
    for i in 0..n - 1 {
        let mut e = vec![0; n];
        e[i] = 2;
        ok &= g.coefficient(&Monomial::new(e)).is_negative();
    }
    if !ok {
        return Err(Unsupported);
    }
    Ok(HorizonCone { nvars: n, generators: vec![unit(n, n - 1)], empty: false, family: "paraboloid" })
}

fn band_family(set: &SetDescriptor) -> Result<HorizonCone, Unsupported> {
    if set.nvars != 2 || set.cone != ConeKind::Orthant || !set.equalities.is_empty() || set.inequalities.len() != 1 {
        return Err(Unsupported);
    }
    let band = parse_polynomial("(x2 - x1^2)*(2*x1^2 - x2)", &Polynomial::default_names(2)).expect("literal");
    let g = &set.inequalities[0];
    let m = Monomial::new(vec![4, 0]);
    let ratio = g.coefficient(&m) / band.coefficient(&m);
    if !ratio.is_positive() || band.scale(&ratio) != *g {
        return Err(Unsupported);
    }
    Ok(HorizonCone { nvars: 2, generators: vec![unit(2, 1)], empty: false, family: "parabola band" })
}

fn difference_family(set: &SetDescriptor, base: &SetDescriptor) -> Result<HorizonCone, Unsupported> {
    let n = base.nvars;
    if set.nvars != 2 * n || set.cone != ConeKind::Orthant {
        return Err(Unsupported);
    }
    let rec_u = horizon_symbolic(base)?;
    if rec_u.empty {
        return Ok(HorizonCone { nvars: 2 * n, generators: Vec::new(), empty: true, family: "difference lift" });
    }
    // Columns (z, y, μ) ≥ 0 with z − y − Σ μ_k u_k = 0.
    let k = 2 * n + rec_u.generators.len();
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row = vec![Rational::zero(); k];
            row[i] = Rational::one();
            row[n + i] = -Rational::one();
            for (j, u) in rec_u.generators.iter().enumerate() {
                row[2 * n + j] = -u[i].clone();
            }
            row
        })
        .collect();
    let rays = extreme_rays(&rows, k)?;
    let projected = rays.into_iter().map(|v| v[..2 * n].to_vec()).collect();
    Ok(HorizonCone { nvars: 2 * n, generators: dedupe(projected), empty: false, family: "difference lift" })
}

/// Exact horizon cone for the built-in families.
pub fn horizon_symbolic(set: &SetDescriptor) -> Result<HorizonCone, Unsupported> {
    if let Some(HorizonHint::DifferenceLift { base }) = &set.hint {
        if let Ok(cone) = difference_family(set, base) {
            return Ok(cone);
        }
    }
    linear_family(set).or_else(|_| paraboloid_family(set)).or_else(|_| band_family(set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn poly(s: &str, n: usize) -> Polynomial {
        parse_polynomial(s, &Polynomial::default_names(n)).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn polyhedral_cone_is_its_own_horizon() {
        let gens = vec![ints(&[1, 0]), ints(&[1, 1]), ints(&[2, 1])];
        let s = SetDescriptor::new(2, ConeKind::Polyhedral { generators: gens });
        let h = horizon_symbolic(&s).unwrap();
        assert_eq!(h.generators.len(), 2);
        assert!(h.contains(&ints(&[3, 1])));
        assert!(!h.contains(&ints(&[0, 1])));
    }

    #[test]
    fn paraboloid_ray() {
        let s = SetDescriptor::full_space(3).with_inequality(poly("x3 - 1/4 - x1^2 - x2^2", 3));
        let h = horizon_symbolic(&s).unwrap();
        assert_eq!(h.generators, vec![ints(&[0, 0, 1])]);
        let bad = SetDescriptor::full_space(3).with_inequality(poly("x3 - 1/4 - x1^2", 3));
        assert_eq!(horizon_symbolic(&bad), Err(Unsupported));
    }

    #[test]
    fn band_ray() {
        let s = SetDescriptor::orthant(2).with_inequality(poly("3*(x2 - x1^2)*(2*x1^2 - x2)", 2));
        assert_eq!(horizon_symbolic(&s).unwrap().generators, vec![ints(&[0, 1])]);
    }

    #[test]
    fn difference_lift_of_a_point() {
        let u = SetDescriptor::full_space(1).with_equality(poly("x1 - 1", 1));
        let mut t = SetDescriptor::orthant(2).with_equality(poly("x1 - x2 - 1", 2));
        t.hint = Some(HorizonHint::DifferenceLift { base: Box::new(u) });
        let h = horizon_symbolic(&t).unwrap();
        assert_eq!(h.family, "difference lift");
        assert_eq!(h.generators.len(), 1);
        assert!(h.contains(&ints(&[1, 1])));
        // The affine family agrees without the hint.
        t.hint = None;
        assert_eq!(horizon_symbolic(&t).unwrap().generators, h.generators);
    }

    #[test]
    fn affine_sets() {
        // Half-line x1 ≥ 1 in R: rec = R_+.
        let s = SetDescriptor::full_space(1).with_inequality(poly("x1 - 1", 1));
        assert_eq!(horizon_symbolic(&s).unwrap().generators, vec![ints(&[1])]);
        // Empty set.
        let s = SetDescriptor::orthant(2).with_equality(poly("x1 + x2 + 1", 2));
        assert!(horizon_symbolic(&s).unwrap().empty);
        // Whole line: both directions.
        let s = SetDescriptor::full_space(1);
        assert_eq!(horizon_symbolic(&s).unwrap().generators.len(), 2);
    }
}
