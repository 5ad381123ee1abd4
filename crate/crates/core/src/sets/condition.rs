//! Checks of `rec(S ∩ h⁻¹(0)) = rec S ∩ h̃⁻¹(0)` and its inequality variant.
//!
//! The inclusion `⊆` always holds, so only `⊇` is tested: every direction of
//! the right-hand side must be matched by a direction of the left-hand side.
//! Exact answers come from constant leading forms, evidently non-negative
//! `h`, and the symbolic families; otherwise both sides are sampled. A probed
//! direction is matched within one cluster angle and unmatched beyond two;
//! anything in between is reported as `Unknown`.

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::probe::{angle, cluster, horizon_probe, normalized, DirectionSet, ProbeOptions, Sampler};
use super::symbolic::{horizon_symbolic, HorizonCone};
use super::{ConeKind, SetDescriptor, SetError};
use crate::poly::{FloatPolynomial, PolyError, Polynomial};
use crate::rational::to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionStatus {
    Holds,
    Fails,
    Unknown,
}

impl ConditionStatus {
    pub fn name(self) -> &'static str {
        match self {
            ConditionStatus::Holds => "holds",
            ConditionStatus::Fails => "fails",
            ConditionStatus::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Decided from the shape of `h` alone.
    Exact,
    /// Both sides computed symbolically.
    Symbolic,
    Probe,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Symbolic => "symbolic",
            Method::Probe => "probe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// `h = 0`.
    Equality,
    /// `h ≥ 0`.
    Inequality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    pub status: ConditionStatus,
    pub method: Method,
    /// Unit direction in `rec S ∩ h̃⁻¹(0)` (or `h̃⁻¹(R_+)`) that the left-hand side misses.
    pub witness: Option<Vec<f64>>,
    /// `|h̃(witness)|` for equalities, `max(0, −h̃(witness))` for inequalities.
    pub witness_residual: Option<f64>,
    pub lhs_directions: Vec<Vec<f64>>,
    pub rhs_directions: Vec<Vec<f64>>,
    /// Angle from each right-hand direction to the nearest left-hand sample, in degrees.
    pub match_angles_deg: Vec<f64>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    fn exact(kind: ConditionKind, status: ConditionStatus, note: &str) -> Self {
        ConditionReport {
            kind,
            status,
            method: Method::Exact,
            witness: None,
            witness_residual: None,
            lhs_directions: Vec::new(),
            rhs_directions: Vec::new(),
            match_angles_deg: Vec::new(),
            notes: vec![note.to_string()],
        }
    }

    pub fn to_text(&self) -> String {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ");
        let mut s = format!("status {}\nmethod {}\n", self.status.name(), self.method.name());
        if let Some(w) = &self.witness {
            s.push_str(&format!("witness {}\n", fmt(w)));
        }
        if let Some(r) = self.witness_residual {
            s.push_str(&format!("witness_residual {r:e}\n"));
        }
        for d in &self.lhs_directions {
            s.push_str(&format!("lhs {}\n", fmt(d)));
        }
        for (d, a) in self.rhs_directions.iter().zip(self.match_angles_deg.iter().map(Some).chain(std::iter::repeat(None))) {
            match a {
                Some(a) => s.push_str(&format!("rhs {} nearest {:.3}\n", fmt(d), a)),
                None => s.push_str(&format!("rhs {}\n", fmt(d))),
            }
        }
        for n in &self.notes {
            s.push_str(&format!("note {n}\n"));
        }
        s
    }
}

pub fn check_condition_eq(
    set: &SetDescriptor,
    h: &Polynomial,
    options: &ProbeOptions,
) -> Result<ConditionReport, SetError> {
    check(set, h, ConditionKind::Equality, options)
}

pub fn check_condition_ineq(
    set: &SetDescriptor,
    h: &Polynomial,
    options: &ProbeOptions,
) -> Result<ConditionReport, SetError> {
    check(set, h, ConditionKind::Inequality, options)
}

/// `h ≥ 0` on the whole cone, read off the coefficients.
fn evidently_nonnegative(set: &SetDescriptor, h: &Polynomial) -> bool {
    let even = h.terms().all(|(m, c)| c.is_positive() && m.exponents().iter().all(|e| e % 2 == 0));
    even || (set.cone == ConeKind::Orthant && h.has_nonnegative_coefficients())
}

fn constrained(set: &SetDescriptor, p: Polynomial, kind: ConditionKind) -> SetDescriptor {
    match kind {
        ConditionKind::Equality => set.clone().with_equality(p),
        ConditionKind::Inequality => set.clone().with_inequality(p),
    }
}

fn residual(ht: &FloatPolynomial, d: &[f64], kind: ConditionKind) -> f64 {
    let v = ht.eval(d);
    match kind {
        ConditionKind::Equality => v.abs(),
        ConditionKind::Inequality => (-v).max(0.0),
    }
}

/// Right-hand side as a union of cones, when it is decidable exactly from
/// generators of `rec S`.
fn rhs_exact(rec_s: &HorizonCone, ht: &Polynomial, kind: ConditionKind) -> Option<Vec<HorizonCone>> {
    let n = rec_s.nvars;
    if rec_s.empty || rec_s.generators.is_empty() {
        return Some(vec![rec_s.clone()]);
    }
    if ht.degree() == Some(1) {
        let cone = SetDescriptor::new(n, ConeKind::Polyhedral { generators: rec_s.generators.clone() });
        return horizon_symbolic(&constrained(&cone, ht.clone(), kind)).ok().map(|c| vec![c]);
    }
    zero_faces(rec_s, ht, kind)
}

/// For `h̃(Gλ)` with coefficients of one sign, the zero set on `λ ≥ 0` is the
/// union of the faces spanned by supports that contain no monomial support.
fn zero_faces(rec_s: &HorizonCone, ht: &Polynomial, kind: ConditionKind) -> Option<Vec<HorizonCone>> {
    let k = rec_s.generators.len();
    if k > 16 {
        return None;
    }
    let subs: Vec<Polynomial> = (0..rec_s.nvars)
        .map(|i| {
            let coeffs: Vec<crate::Rational> = rec_s.generators.iter().map(|g| g[i].clone()).collect();
            Polynomial::affine(crate::Rational::zero(), &coeffs)
        })
        .collect();
    let pulled = ht.substitute(&subs).ok()?;
    let all_nonneg = pulled.terms().all(|(_, c)| c.is_positive());
    let all_nonpos = pulled.terms().all(|(_, c)| c.is_negative());
    let whole = vec![rec_s.clone()];
    match kind {
        ConditionKind::Inequality if all_nonneg => return Some(whole),
        ConditionKind::Inequality if !all_nonpos => return None,
        ConditionKind::Equality if !(all_nonneg || all_nonpos) => return None,
        _ => {}
    }
    if pulled.is_zero() {
        return Some(whole);
    }
    let supports: Vec<u32> = pulled
        .terms()
        .map(|(m, _)| m.exponents().iter().enumerate().filter(|(_, e)| **e > 0).fold(0, |acc, (i, _)| acc | 1 << i))
        .collect();
    let free = |mask: u32| supports.iter().all(|t| t & !mask != 0);
    let full: u32 = (1u32 << k) - 1;
    let mut faces: Vec<u32> = (0..=full).filter(|&m| free(m)).collect();
    let all = faces.clone();
    faces.retain(|&m| !all.iter().any(|&o| o != m && o & m == m));
    Some(
        faces
            .into_iter()
            .map(|m| HorizonCone {
                generators: (0..k).filter(|i| m >> i & 1 == 1).map(|i| rec_s.generators[i].clone()).collect(),
                ..rec_s.clone()
            })
            .collect(),
    )
}

/// Samples `cone(generators) ∩ {h̃ = 0 or ≥ 0}` on the unit sphere.
fn sample_cone_section(
    generators: &[Vec<f64>],
    n: usize,
    ht: &Polynomial,
    kind: ConditionKind,
    options: &ProbeOptions,
) -> Vec<Vec<f64>> {
    let gens: Vec<Vec<crate::Rational>> = generators
        .iter()
        .map(|g| g.iter().map(|x| crate::rational::rationalize(*x, 1_000_000)).collect())
        .collect();
    let cone = SetDescriptor::new(n, ConeKind::Polyhedral { generators: gens });
    let section = constrained(&cone, ht.clone(), kind);
    let sampler = Sampler::new(&section, options.tolerance, options.max_iterations);
    (0..options.samples)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ i as u64);
            sampler.sample(1.0, &mut rng).map(|x| normalized(&x))
        })
        .collect()
}

/// Cluster members closest to their centroid, so each one is an actual sample.
fn representatives(samples: &[Vec<f64>], options: &ProbeOptions) -> Vec<Vec<f64>> {
    cluster(samples, options.cluster_angle())
        .into_iter()
        .map(|c| {
            let best = c
                .members
                .iter()
                .min_by(|&&a, &&b| {
                    angle(&samples[a], &c.representative).total_cmp(&angle(&samples[b], &c.representative))
                })
                .expect("nonempty cluster");
            samples[*best].clone()
        })
        .collect()
}

fn check(
    set: &SetDescriptor,
    h: &Polynomial,
    kind: ConditionKind,
    options: &ProbeOptions,
) -> Result<ConditionReport, SetError> {
    set.validate()?;
    if !set.is_pointed() {
        return Err(SetError::NotPointed);
    }
    if h.nvars() != set.nvars {
        return Err(SetError::Arity { expected: set.nvars, got: h.nvars() });
    }
    let ht = h.leading_form().map_err(SetError::from)?;
    if ht.degree() == Some(0) {
        return Ok(ConditionReport::exact(kind, ConditionStatus::Holds, "h is constant: both sides coincide"));
    }
    if kind == ConditionKind::Inequality && evidently_nonnegative(set, h) {
        return Ok(ConditionReport::exact(kind, ConditionStatus::Holds, "h ≥ 0 on the cone: both sides are rec S"));
    }

    let lhs_set = constrained(set, h.clone(), kind);
    let rec_s = horizon_symbolic(set).ok();
    let rhs_sym = rec_s.as_ref().and_then(|r| rhs_exact(r, &ht, kind));
    let lhs_sym = horizon_symbolic(&lhs_set).ok();

    if let (Some(lhs), Some(rhs)) = (&lhs_sym, &rhs_sym) {
        return Ok(compare_exact(lhs, rhs, &ht, kind));
    }
    let rhs_sym = rhs_sym.map(union_directions);

    let ht_f = FloatPolynomial::new(&ht);
    let mut notes = Vec::new();
    let rhs_dirs: Vec<Vec<f64>> = match (&rhs_sym, &rec_s) {
        (Some(rhs), _) => {
            notes.push("right-hand side exact".into());
            rhs.clone()
        }
        (None, Some(rec)) => {
            let gens = rec.to_direction_set().directions;
            representatives(&sample_cone_section(&gens, set.nvars, &ht, kind, options), options)
        }
        (None, None) => {
            // Sample rec S, then intersect near the sampled directions.
            let probe = horizon_probe(set, options);
            notes.push(format!("rec S probed: {} clusters", probe.len()));
            let section = sample_cone_section(&probe.directions, set.nvars, &ht, kind, options);
            let near: Vec<Vec<f64>> = section
                .into_iter()
                .filter(|d| probe.samples.iter().any(|s| angle(s, d) <= options.cluster_angle()))
                .collect();
            representatives(&near, options)
        }
    };

    let lhs_probe: DirectionSet = match &lhs_sym {
        Some(cone) => {
            notes.push("left-hand side exact".into());
            let mut d = cone.to_direction_set();
            d.samples.extend(sample_cone_section(&d.directions, set.nvars, &Polynomial::zero(set.nvars), kind, options));
            d
        }
        None => horizon_probe(&lhs_set, options),
    };

    let theta = options.cluster_angle();
    let matches: Vec<f64> = rhs_dirs
        .iter()
        .map(|d| {
            lhs_probe
                .samples
                .iter()
                .chain(&lhs_probe.directions)
                .map(|s| angle(s, d))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut report = ConditionReport {
        kind,
        status: ConditionStatus::Holds,
        method: Method::Probe,
        witness: None,
        witness_residual: None,
        lhs_directions: lhs_probe.directions.clone(),
        rhs_directions: rhs_dirs.clone(),
        match_angles_deg: matches.iter().map(|a| a.to_degrees()).collect(),
        notes,
    };
    if rhs_dirs.is_empty() {
        report.notes.push("right-hand side is {0}".into());
        return Ok(report);
    }
    let lhs_never_sampled = lhs_sym.is_none() && lhs_probe.diagnostics.iter().all(|d| d.accepted == 0);
    if lhs_never_sampled {
        report.status = ConditionStatus::Unknown;
        report.notes.push("no point of the left-hand set was sampled at any radius".into());
        return Ok(report);
    }
    let (worst, worst_angle) = matches
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &a)| if a > acc.1 { (i, a) } else { acc });
    if worst_angle >= 2.0 * theta {
        report.status = ConditionStatus::Fails;
        report.witness_residual = Some(residual(&ht_f, &rhs_dirs[worst], kind));
        report.witness = Some(rhs_dirs[worst].clone());
    } else if worst_angle > theta {
        report.status = ConditionStatus::Unknown;
        report.notes.push("a right-hand direction is matched only within two cluster angles".into());
    }
    // The one-sided inclusion, checked on the samples.
    let stray = lhs_probe
        .directions
        .iter()
        .filter(|d| residual(&ht_f, d, kind) > 1e-3 * ht_f.abs_scale(d).max(1e-12))
        .count();
    if stray > 0 {
        report.notes.push(format!("{stray} left-hand directions are off h̃⁻¹; probe accuracy is limited"));
    }
    Ok(report)
}

/// Generators of every cone of the union plus one interior direction per cone.
fn union_directions(cones: Vec<HorizonCone>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in &cones {
        let dirs = c.to_direction_set().directions;
        if dirs.len() > 1 {
            let mut mid = vec![0.0; c.nvars];
            for d in &dirs {
                mid.iter_mut().zip(d).for_each(|(m, x)| *m += x);
            }
            out.push(normalized(&mid));
        }
        out.extend(dirs);
    }
    let mut dedup: Vec<Vec<f64>> = Vec::new();
    for d in out {
        if !dedup.iter().any(|e| angle(e, &d) < 1e-12) {
            dedup.push(d);
        }
    }
    dedup
}

fn compare_exact(lhs: &HorizonCone, rhs: &[HorizonCone], ht: &Polynomial, kind: ConditionKind) -> ConditionReport {
    let lhs_dirs = lhs.to_direction_set().directions;
    let rhs_gens: Vec<&Vec<crate::Rational>> = rhs.iter().flat_map(|c| &c.generators).collect();
    let rhs_dirs: Vec<Vec<f64>> =
        rhs_gens.iter().map(|g| normalized(&g.iter().map(to_f64).collect::<Vec<_>>())).collect();
    let missing = rhs_gens.iter().position(|g| !lhs.contains(g));
    let ht_f = FloatPolynomial::new(ht);
    let family = rhs.first().map_or("", |c| c.family);
    let mut report = ConditionReport {
        kind,
        status: ConditionStatus::Holds,
        method: Method::Symbolic,
        witness: None,
        witness_residual: None,
        lhs_directions: lhs_dirs,
        rhs_directions: rhs_dirs.clone(),
        match_angles_deg: Vec::new(),
        notes: vec![format!("rec S ∩ h̃ side: {family}; left-hand side: {}", lhs.family)],
    };
    if let Some(i) = missing {
        report.status = ConditionStatus::Fails;
        report.witness = Some(rhs_dirs[i].clone());
        report.witness_residual = Some(residual(&ht_f, &rhs_dirs[i], kind));
        let exact = ht.evaluate(rhs_gens[i]).map_err(|e: PolyError| e).ok();
        if let Some(v) = exact {
            report.notes.push(format!("h̃(witness) = {} exactly", to_f64(&v)));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn poly(s: &str, n: usize) -> Polynomial {
        parse_polynomial(s, &Polynomial::default_names(n)).unwrap()
    }

    fn quick() -> ProbeOptions {
        ProbeOptions { samples: 500, ..Default::default() }
    }

    #[test]
    fn constant_h_holds() {
        let s = SetDescriptor::orthant(2);
        let r = check_condition_eq(&s, &poly("1", 2), &quick()).unwrap();
        assert_eq!((r.status, r.method), (ConditionStatus::Holds, Method::Exact));
        let r = check_condition_ineq(&s, &poly("-1", 2), &quick()).unwrap();
        assert_eq!(r.status, ConditionStatus::Holds);
        let r = check_condition_ineq(&s, &poly("x1^2", 2), &quick()).unwrap();
        assert_eq!(r.status, ConditionStatus::Holds);
    }

    #[test]
    fn linear_cases_are_symbolic() {
        let s = SetDescriptor::orthant(2);
        let r = check_condition_eq(&s, &poly("x1 - x2 + 1", 2), &quick()).unwrap();
        assert_eq!((r.status, r.method), (ConditionStatus::Holds, Method::Symbolic));
        // x1 + x2 = 1 is bounded, but h̃ = x1 + x2 vanishes only at 0 on the orthant.
        let r = check_condition_eq(&s, &poly("x1 + x2 - 1", 2), &quick()).unwrap();
        assert_eq!(r.status, ConditionStatus::Holds);
        // x1 − 1 ≤ 0 strip: rec = {0} × R_+ but h̃ = −x1 ≥ 0 gives the same.
        let r = check_condition_ineq(&s, &poly("1 - x1", 2), &quick()).unwrap();
        assert_eq!(r.status, ConditionStatus::Holds);
    }

    #[test]
    fn full_space_is_rejected() {
        let s = SetDescriptor::full_space(2);
        assert_eq!(check_condition_eq(&s, &poly("x1", 2), &quick()), Err(SetError::NotPointed));
    }

    #[test]
    fn sign_definite_leading_forms_give_faces() {
        let rec = horizon_symbolic(&SetDescriptor::orthant(3)).unwrap();
        // x1*x2 vanishes on the coordinate planes x1 = 0 and x2 = 0.
        let faces = zero_faces(&rec, &poly("x1*x2", 3), ConditionKind::Equality).unwrap();
        let spans: Vec<usize> = faces.iter().map(|f| f.generators.len()).collect();
        assert_eq!(spans, vec![2, 2]);
        // −x1^4 ≥ 0 only where x1 = 0.
        let faces = zero_faces(&rec, &poly("-x1^4", 3), ConditionKind::Inequality).unwrap();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].generators.len(), 2);
        assert!(zero_faces(&rec, &poly("x1^2 - x2^2", 3), ConditionKind::Equality).is_none());
    }

    #[test]
    fn band_inequality_is_symbolic() {
        let s = SetDescriptor::orthant(2);
        let r = check_condition_ineq(&s, &poly("(x2 - x1^2)*(2*x1^2 - x2)", 2), &quick()).unwrap();
        assert_eq!((r.status, r.method), (ConditionStatus::Holds, Method::Symbolic));
        assert_eq!(r.rhs_directions, vec![vec![0.0, 1.0]]);
    }
}
