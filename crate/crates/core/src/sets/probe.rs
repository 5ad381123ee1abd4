//! Numeric horizon probe.
//!
//! Points of the set are sampled on spheres of growing radius: a random start
//! inside the cone is pulled onto the constraints by projected Gauss–Newton
//! steps that keep the point on the sphere and inside the cone. Accepted
//! points are normalized and clustered by angle.
//!
//! Membership is relaxed two ways. `|h(x)| ≤ τ·Σ_α |c_α x^α|` accepts values
//! that are small relative to the cancellation in evaluating `h`;
//! `|h(x)| ≤ 1e-24·Σ_α |c_α| R^{|α|}` accepts values far below rounding at
//! scale `R`, which only happens when all terms vanish together (sums of
//! squares). A plain `|h(x)| ≤ τR^{deg h}` would admit points such as
//! `(R, 0)` for `h = (x1x2 + 1)(x1 − x2)²`, where `h = R²`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use super::{ConeKind, SetDescriptor};
use crate::poly::{FloatPolynomial, Polynomial};
use crate::rational::to_f64;

/// Values below this fraction of `Σ|c_α|R^{|α|}` count as exact zeros.
const ZERO_FLOOR: f64 = 1e-24;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    pub radii: Vec<f64>,
    pub samples: usize,
    pub cluster_angle_deg: f64,
    pub seed: u64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            radii: (1..=6).map(|k| 10f64.powi(k)).collect(),
            samples: 20_000,
            cluster_angle_deg: 5.0,
            seed: 0,
            tolerance: 1e-6,
            max_iterations: 80,
        }
    }
}

impl ProbeOptions {
    pub fn cluster_angle(&self) -> f64 {
        self.cluster_angle_deg.to_radians()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusDiagnostic {
    pub radius: f64,
    pub attempted: usize,
    pub accepted: usize,
}

/// Estimated horizon directions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DirectionSet {
    /// Unit cluster representatives.
    pub directions: Vec<Vec<f64>>,
    /// Fraction of the clustered samples in each cluster.
    pub weights: Vec<f64>,
    /// Every accepted unit direction from the radii used for clustering.
    pub samples: Vec<Vec<f64>>,
    pub diagnostics: Vec<RadiusDiagnostic>,
    pub note: Option<String>,
}

impl DirectionSet {
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    /// Plain-text report, one direction per line with its weight.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (d, w) in self.directions.iter().zip(&self.weights) {
            let coords: Vec<String> = d.iter().map(|v| format!("{v:.6}")).collect();
            s.push_str(&format!("direction {} weight {:.4}\n", coords.join(" "), w));
        }
        for diag in &self.diagnostics {
            s.push_str(&format!(
                "radius {:e} accepted {}/{}\n",
                diag.radius, diag.accepted, diag.attempted
            ));
        }
        if let Some(note) = &self.note {
            s.push_str(&format!("note {note}\n"));
        }
        s
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn normalized(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

/// Angle between two nonzero vectors, in radians.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
}

#[derive(Debug, Clone, Copy)]
enum Domain {
    Clamp,
    Lorentz,
    Free,
}

struct Constraint {
    poly: FloatPolynomial,
    /// `(|c_α|, |α|)` for the degree scale.
    weights: Vec<(f64, i32)>,
}

impl Constraint {
    fn new(p: &Polynomial) -> Self {
        Constraint {
            poly: FloatPolynomial::new(p),
            weights: p.terms().map(|(m, c)| (to_f64(c).abs(), m.degree() as i32)).collect(),
        }
    }

    fn degree_scale(&self, radius: f64) -> f64 {
        let s: f64 = self.weights.iter().map(|(c, d)| c * radius.powi(*d)).sum();
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// Admissible deviation from zero at `x`.
    fn slack(&self, x: &[f64], radius: f64, tol: f64) -> f64 {
        (tol * self.poly.abs_scale(x)).max(ZERO_FLOOR * self.degree_scale(radius))
    }
}

/// Pulls random points of a cone onto `h_i = 0`, `g_j ≥ 0` at a fixed radius.
pub(crate) struct Sampler {
    n: usize,
    /// `x = M v`; `None` is the identity.
    map: Option<Vec<Vec<f64>>>,
    domain: Domain,
    eqs: Vec<Constraint>,
    ineqs: Vec<Constraint>,
    tol: f64,
    max_iterations: usize,
}

impl Sampler {
    pub(crate) fn new(set: &SetDescriptor, tol: f64, max_iterations: usize) -> Self {
        let (map, domain) = match &set.cone {
            ConeKind::Orthant => (None, Domain::Clamp),
            ConeKind::Lorentz => (None, Domain::Lorentz),
            ConeKind::FullSpace => (None, Domain::Free),
            ConeKind::Polyhedral { .. } => (set.generators_f64(), Domain::Clamp),
        };
        Sampler {
            n: set.nvars,
            map,
            domain,
            eqs: set.equalities.iter().map(Constraint::new).collect(),
            ineqs: set.inequalities.iter().map(Constraint::new).collect(),
            tol,
            max_iterations,
        }
    }

    fn params(&self) -> usize {
        self.map.as_ref().map_or(self.n, Vec::len)
    }

    fn point(&self, v: &[f64]) -> Vec<f64> {
        match &self.map {
            None => v.to_vec(),
            Some(gens) => {
                let mut x = vec![0.0; self.n];
                for (g, &l) in gens.iter().zip(v) {
                    for (xi, gi) in x.iter_mut().zip(g) {
                        *xi += l * gi;
                    }
                }
                x
            }
        }
    }

    /// `Mᵀ w`.
    fn pull_back(&self, w: &[f64]) -> Vec<f64> {
        match &self.map {
            None => w.to_vec(),
            Some(gens) => gens.iter().map(|g| g.iter().zip(w).map(|(a, b)| a * b).sum()).collect(),
        }
    }

    fn start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let k = self.params();
        match self.domain {
            Domain::Clamp if self.map.is_some() => (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect(),
            Domain::Clamp => (0..k).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect(),
            Domain::Free => (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
            Domain::Lorentz => {
                let mut v: Vec<f64> = (0..k - 1).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let spread: f64 = rng.sample(Exp1);
                v.push(norm(&v) * (1.0 + spread) + 1e-3);
                v
            }
        }
    }

    fn project(&self, v: &mut [f64]) {
        match self.domain {
            Domain::Free => {}
            Domain::Clamp => v.iter_mut().for_each(|x| *x = x.max(0.0)),
            Domain::Lorentz => {
                let (t, rest) = v.split_last_mut().expect("nonempty");
                let r = norm(rest);
                if r <= *t {
                    return;
                }
                if r <= -*t {
                    rest.iter_mut().for_each(|x| *x = 0.0);
                    *t = 0.0;
                    return;
                }
                let a = (r + *t) / 2.0;
                rest.iter_mut().for_each(|x| *x *= a / r);
                *t = a;
            }
        }
    }

    /// Rescales `v` so that `‖Mv‖ = 1`.
    fn renormalize(&self, v: &mut [f64]) -> bool {
        let r = norm(&self.point(v));
        if !(r > 1e-300) || !r.is_finite() {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= r);
        true
    }

    pub(crate) fn accepts(&self, x: &[f64], radius: f64) -> bool {
        self.eqs.iter().all(|c| c.poly.eval(x).abs() <= c.slack(x, radius, self.tol))
            && self.ineqs.iter().all(|c| c.poly.eval(x) >= -c.slack(x, radius, self.tol))
    }

    /// Normalized residuals and their gradients in `v`-space.
    fn residuals(&self, v: &[f64], radius: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
        let x: Vec<f64> = self.point(v).iter().map(|t| t * radius).collect();
        let mut r = Vec::new();
        let mut rows = Vec::new();
        let mut push = |c: &Constraint, only_if_negative: bool| {
            let (val, grad) = c.poly.eval_grad(&x);
            if only_if_negative && val >= 0.0 {
                return;
            }
            let s = c.degree_scale(radius);
            r.push(val / s);
            let g: Vec<f64> = grad.iter().map(|gi| gi * radius / s).collect();
            rows.push(self.pull_back(&g));
        };
        for c in &self.eqs {
            push(c, false);
        }
        for c in &self.ineqs {
            push(c, true);
        }
        (r, rows)
    }

    fn merit(&self, v: &[f64], radius: f64) -> f64 {
        self.residuals(v, radius).0.iter().map(|x| x * x).sum()
    }

    /// One attempt; returns the accepted point at `radius`.
    pub(crate) fn sample(&self, radius: f64, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        let mut v = self.start(rng);
        self.project(&mut v);
        if !self.renormalize(&mut v) {
            return None;
        }
        let k = self.params();
        for _ in 0..self.max_iterations {
            let x: Vec<f64> = self.point(&v).iter().map(|t| t * radius).collect();
            if self.accepts(&x, radius) {
                return Some(x);
            }
            let (r, mut rows) = self.residuals(&v, radius);
            let current: f64 = r.iter().map(|t| t * t).sum();
            // Stay on the sphere to first order.
            let xv = self.point(&v);
            rows.push(self.pull_back(&xv));
            let m = rows.len();
            let jac = DMatrix::from_fn(m, k, |i, j| rows[i][j]);
            let rhs = DVector::from_iterator(m, r.iter().map(|t| -t).chain([0.0]));
            let step = jac.svd(true, true).solve(&rhs, 1e-14).ok()?;

            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..16 {
                let mut trial: Vec<f64> = v.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
                self.project(&mut trial);
                if self.renormalize(&mut trial) && self.merit(&trial, radius) < current {
                    v = trial;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let x: Vec<f64> = self.point(&v).iter().map(|t| t * radius).collect();
        self.accepts(&x, radius).then_some(x)
    }
}

fn rng_for(seed: u64, radius_index: usize, sample: usize) -> ChaCha8Rng {
    let stream = ((radius_index as u64) << 40) ^ sample as u64;
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ stream)
}

/// Accepted points at each radius, in a deterministic order.
pub fn sample_points(set: &SetDescriptor, options: &ProbeOptions) -> Vec<(f64, Vec<Vec<f64>>)> {
    let sampler = Sampler::new(set, options.tolerance, options.max_iterations);
    options
        .radii
        .iter()
        .enumerate()
        .map(|(ri, &radius)| {
            let points: Vec<Vec<f64>> = (0..options.samples)
                .into_par_iter()
                .filter_map(|i| sampler.sample(radius, &mut rng_for(options.seed, ri, i)))
                .collect();
            (radius, points)
        })
        .collect()
}

pub(crate) struct Cluster {
    pub representative: Vec<f64>,
    pub members: Vec<usize>,
}

/// Greedy angular clustering over directions sorted lexicographically.
pub(crate) fn cluster(directions: &[Vec<f64>], max_angle: f64) -> Vec<Cluster> {
    let mut order: Vec<usize> = (0..directions.len()).collect();
    order.sort_by(|&a, &b| {
        directions[a]
            .iter()
            .zip(&directions[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut seeds: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for i in order {
        let d = &directions[i];
        match seeds.iter_mut().find(|(s, _)| angle(s, d) <= max_angle) {
            Some((_, members)) => members.push(i),
            None => seeds.push((d.clone(), vec![i])),
        }
    }
    seeds
        .into_iter()
        .map(|(seed, members)| {
            let mut mean = vec![0.0; seed.len()];
            for &i in &members {
                for (m, v) in mean.iter_mut().zip(&directions[i]) {
                    *m += v;
                }
            }
            let representative = if norm(&mean) > 0.0 { normalized(&mean) } else { seed };
            Cluster { representative, members }
        })
        .collect()
}

/// Estimates the horizon cone of `set` from the top half of the radius schedule.
///
/// A cluster is reported only when every radius in the top half contributes to
/// it, so directions seen at one scale only are dropped. An empty result means
/// no supported direction was found, never a fabricated one.
pub fn horizon_probe(set: &SetDescriptor, options: &ProbeOptions) -> DirectionSet {
    let mut radii_sorted = options.radii.clone();
    radii_sorted.sort_by(f64::total_cmp);
    let sorted_options = ProbeOptions { radii: radii_sorted, ..options.clone() };
    let per_radius = sample_points(set, &sorted_options);
    let diagnostics: Vec<RadiusDiagnostic> = per_radius
        .iter()
        .map(|(radius, pts)| RadiusDiagnostic { radius: *radius, attempted: options.samples, accepted: pts.len() })
        .collect();

    let top_start = per_radius.len() / 2;
    let mut samples = Vec::new();
    let mut origin = Vec::new();
    for (ri, (_, pts)) in per_radius.iter().enumerate().skip(top_start) {
        for p in pts {
            samples.push(normalized(p));
            origin.push(ri);
        }
    }
    let mut out = DirectionSet { diagnostics, ..Default::default() };
    if samples.is_empty() {
        out.note = Some("no accepted samples at the top radii".into());
        return out;
    }
    let top_count = per_radius.len() - top_start;
    let clusters = cluster(&samples, options.cluster_angle());
    let kept: Vec<&Cluster> = clusters
        .iter()
        .filter(|c| {
            let mut seen = vec![false; per_radius.len()];
            c.members.iter().for_each(|&i| seen[origin[i]] = true);
            seen[top_start..].iter().filter(|s| **s).count() == top_count
        })
        .collect();
    let total: usize = kept.iter().map(|c| c.members.len()).sum();
    for c in &kept {
        out.directions.push(c.representative.clone());
        out.weights.push(c.members.len() as f64 / total as f64);
    }
    if kept.len() < clusters.len() {
        out.note = Some(format!("{} clusters not supported at every top radius", clusters.len() - kept.len()));
    }
    out.samples = samples;
    out
}
