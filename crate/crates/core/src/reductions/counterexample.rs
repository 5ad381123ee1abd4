use num_traits::Signed;

use super::ReductionError;
use crate::poly::{FloatPolynomial, Polynomial};
use crate::rational::{floor_to_denominator, to_f64, Rational};
use crate::sets::{angle, horizon_probe, horizon_symbolic, sample_points, ProbeOptions, SetDescriptor};

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleOptions {
    pub probe: ProbeOptions,
    /// Radii at which `S ∩ h⁻¹(0)` is sampled for the distance estimate.
    pub radii: Vec<f64>,
    /// `ε` is rounded down to this denominator.
    pub denominator: u64,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        CounterexampleOptions {
            probe: ProbeOptions { samples: 2_000, ..Default::default() },
            radii: (-2..=12).map(|k| 10f64.powf(k as f64 / 2.0)).collect(),
            denominator: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub p: Polynomial,
    pub epsilon: Rational,
    /// The witness scaled to `aᵀs = 1`.
    pub s: Vec<Rational>,
    pub anchor: Vec<Rational>,
    /// Smallest sampled distance from the compactified zero set to `(0, s)`.
    pub distance: f64,
    pub sampled_points: usize,
}

fn refuse(reason: impl Into<String>) -> ReductionError {
    ReductionError::Refused(reason.into())
}

/// Builds `p = A^{d−2}(1 + ‖x − A s‖² − ε² A²)` with `A = 1 + aᵀx` for a
/// direction `s ∈ rec S ∩ h̃⁻¹(0)` outside `rec(S ∩ h⁻¹(0))`. Then `p ≥ 0` on
/// `S ∩ h⁻¹(0)` while the homogenization of `p` is `−ε²` at `(0, s)`.
///
/// `ε` is half the sampled distance between the compactified zero set and
/// `(0, s)`, rounded down; limit points `(0, u/aᵀu)` of sampled horizon
/// directions `u` count as part of the compactified set.
pub fn build_counterexample(
    set: &SetDescriptor,
    h: &Polynomial,
    s: &[Rational],
    d: u32,
    options: &CounterexampleOptions,
) -> Result<Counterexample, ReductionError> {
    set.validate()?;
    let n = set.nvars;
    if h.nvars() != n || s.len() != n {
        return Err(crate::poly::PolyError::Arity { expected: n, got: s.len().min(h.nvars()) }.into());
    }
    if d < 2 {
        return Err(refuse("the construction needs d ≥ 2"));
    }
    let a = set.anchor_vector()?;
    let scale = a.dot(s);
    if !scale.is_positive() {
        return Err(refuse("aᵀs must be positive"));
    }
    let s: Vec<Rational> = s.iter().map(|v| v / &scale).collect();
    let s_f: Vec<f64> = s.iter().map(to_f64).collect();

    let ht = h.leading_form()?;
    let ht_f = FloatPolynomial::new(&ht);
    if ht_f.eval(&s_f).abs() > options.probe.tolerance * ht_f.abs_scale(&s_f).max(1.0) {
        return Err(refuse("s is not a zero of the leading form of h"));
    }
    let in_rec = match horizon_symbolic(set) {
        Ok(cone) => cone.contains(&s),
        Err(_) => {
            let probe = horizon_probe(set, &options.probe);
            probe.samples.iter().any(|u| angle(u, &s_f) <= options.probe.cluster_angle())
        }
    };
    if !in_rec {
        return Err(refuse("s is not a horizon direction of S"));
    }

    let zero_set = set.clone().with_equality(h.clone());
    let a_f: Vec<f64> = a.as_slice().iter().map(to_f64).collect();
    let dot = |x: &[f64]| -> f64 { a_f.iter().zip(x).map(|(p, q)| p * q).sum() };
    let probe = ProbeOptions { radii: options.radii.clone(), ..options.probe.clone() };
    let mut distance = f64::INFINITY;
    let mut sampled_points = 0;
    for (_, points) in sample_points(&zero_set, &probe) {
        for x in points {
            let w = 1.0 + dot(&x);
            let mut sq = (1.0 / w).powi(2);
            for (xi, si) in x.iter().zip(&s_f) {
                sq += (xi / w - si).powi(2);
            }
            distance = distance.min(sq.sqrt());
            sampled_points += 1;
        }
    }
    if sampled_points == 0 {
        return Err(refuse("no point of S ∩ h⁻¹(0) was sampled"));
    }
    let directions: Vec<Vec<f64>> = match horizon_symbolic(&zero_set) {
        Ok(cone) => cone.to_direction_set().samples,
        Err(_) => horizon_probe(&zero_set, &options.probe).samples,
    };
    for u in directions {
        let w = dot(&u);
        if w > 0.0 {
            let sq: f64 = u.iter().zip(&s_f).map(|(ui, si)| (ui / w - si).powi(2)).sum();
            distance = distance.min(sq.sqrt());
        }
    }
    let epsilon = floor_to_denominator(distance / 2.0, options.denominator);
    if !epsilon.is_positive() {
        return Err(refuse("(0, s) lies on the compactified zero set, so s is a horizon direction of it"));
    }

    let big_a = a.one_plus_form();
    let mut inner = Polynomial::one(n);
    for (i, si) in s.iter().enumerate() {
        let diff = &Polynomial::var(n, i) - &big_a.scale(si);
        inner = &inner + &diff.pow(2);
    }
    inner = &inner - &big_a.pow(2).scale(&(&epsilon * &epsilon));
    let p = &big_a.pow(d - 2) * &inner;
    Ok(Counterexample { p, epsilon, s, anchor: a.as_slice().to_vec(), distance, sampled_points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::rational::{frac, int};

    fn poly(s: &str, n: usize) -> Polynomial {
        parse_polynomial(s, &Polynomial::default_names(n)).unwrap()
    }

    fn quick() -> CounterexampleOptions {
        let mut o = CounterexampleOptions::default();
        o.probe.samples = 300;
        o
    }

    #[test]
    fn example_construction() {
        let h = poly("(x1*x2 + 1)*(x1 - x2)^2", 2);
        let c = build_counterexample(&SetDescriptor::orthant(2), &h, &[int(2), int(0)], 4, &quick()).unwrap();
        assert_eq!(c.s, vec![int(1), int(0)]);
        // The true distance is 1/√2; probed directions are accurate to about 1e-3 rad.
        assert!(c.epsilon <= frac(353_553, 1_000_000) && c.epsilon >= frac(352, 1000), "{}", c.epsilon);
        let bar = c.p.homogenize(4).unwrap();
        assert_eq!(bar.evaluate(&[int(0), int(1), int(0)]).unwrap(), -(&c.epsilon * &c.epsilon));
    }

    #[test]
    fn compact_sets_are_refused() {
        let s = SetDescriptor::orthant(2).with_inequality(poly("1 - x1 - x2", 2));
        let r = build_counterexample(&s, &poly("x1 - x2", 2), &[int(1), int(1)], 2, &quick());
        assert!(matches!(r, Err(ReductionError::Refused(_))));
    }

    #[test]
    fn valid_horizon_directions_are_refused() {
        // rec(R²_+ ∩ {x1 = x2}) contains (1, 1), so no ε > 0 exists.
        let r = build_counterexample(&SetDescriptor::orthant(2), &poly("x1 - x2", 2), &[int(1), int(1)], 2, &quick());
        assert!(matches!(r, Err(ReductionError::Refused(_))));
        // (1, 0) is not a zero of h̃ = x1 − x2.
        let r = build_counterexample(&SetDescriptor::orthant(2), &poly("x1 - x2", 2), &[int(1), int(0)], 2, &quick());
        assert!(matches!(r, Err(ReductionError::Refused(_))));
    }
}
