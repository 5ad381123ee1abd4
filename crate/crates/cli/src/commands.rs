use num_traits::Zero;

use posicert::hierarchy::{
    certify_copositive, verify_certificate, CopositiveCertificate, HierarchyError, LevelRay, SearchOptions, SearchOutcome,
    DEFAULT_INDEX_CAP, DEFAULT_R_MAX,
};
use posicert::quadcert::{
    canonicalize_quadratic, certify_quadratic, QuadOutcome, QuadSearchOptions, QuadraticCertificate, QuadraticForm,
};
use posicert::rational::{format_rational, Rational};
use posicert::reductions::{
    build_counterexample, epsilon_schedule, lift_equality, lift_equality_scheduled, lift_inequality, nonconic_lift,
    CounterexampleOptions, EqualityCertificate, LiftOutcome, LiftedProblem, ReductionError,
};
use posicert::sets::{check_condition_eq, check_condition_ineq, horizon_probe, ConditionStatus, ConeKind, ProbeOptions};
use posicert::{Monomial, Polynomial};

use crate::problem::{ConditionChoice, Epsilon, ProblemError, ProblemFile};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("problem file {0}")]
    Problem(#[from] ProblemError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Problem(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Resource(_) => EXIT_RESOURCE,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// A finished command: its report, exit code and optional certificate text.
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    pub certificate: Option<String>,
}

fn vector(v: &[Rational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

fn floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ")
}

fn search_options(f: &ProblemFile) -> SearchOptions {
    SearchOptions {
        r_max: f.options.r_max.unwrap_or(DEFAULT_R_MAX),
        index_cap: f.options.index_cap.unwrap_or(DEFAULT_INDEX_CAP),
        parallel: true,
    }
}

fn probe_options(f: &ProblemFile) -> ProbeOptions {
    let mut o = ProbeOptions { seed: f.options.seed, ..Default::default() };
    if let Some(s) = f.options.samples {
        o.samples = s;
    }
    o
}

fn degree(p: &Polynomial) -> u32 {
    p.degree().unwrap_or(0)
}

/// A Farkas ray `y` written as the polynomial `Σ y_m m` over its rows.
fn ray_lines(rays: &[LevelRay], names: &[String]) -> Vec<String> {
    rays.iter()
        .map(|ray| {
            let n = ray.rows.first().map_or(0, Monomial::nvars);
            let poly = Polynomial::from_terms(n, ray.rows.iter().cloned().zip(ray.farkas_ray.iter().cloned()));
            let names = if names.len() == n { names.to_vec() } else { Polynomial::default_names(n) };
            format!("level {}: y = {}", ray.level, poly.to_text(&names))
        })
        .collect()
}

pub fn certify_copositive_cmd(f: &ProblemFile) -> Result<Outcome, CliError> {
    let p = f.require_p()?;
    let set = f.set();
    if !set.equalities.is_empty() {
        return Err(usage("the set has equalities; use certify-eq"));
    }
    let d = f.options.d.unwrap_or_else(|| degree(p));
    let out = certify_copositive(p, &set, d, &search_options(f)).map_err(usage)?;
    let (status, code) = match &out {
        SearchOutcome::Certified { .. } => ("certified", EXIT_OK),
        SearchOutcome::InfeasibleAtAllLevels { .. } => ("not-found", EXIT_REFUTED),
        SearchOutcome::Exhausted { .. } => ("exhausted", EXIT_UNKNOWN),
    };
    let mut r = Report::new("certify-copositive", status);
    r.set("degree", d);
    r.set("levels_tried", out.levels_tried());
    if let SearchOutcome::Exhausted { reason, .. } = &out {
        r.set("reason", reason.as_str());
    }
    let certificate = out.certificate().map(|c| {
        r.set("factor", c.factor.name());
        r.set("level", c.level);
        r.set("terms", c.terms.len());
        format!("kind: copositive\n{}", c.to_text())
    });
    r.lines("farkas", ray_lines(out.rays(), &f.vars));
    Ok(Outcome { report: r, code, certificate })
}

fn solve_lift(
    target: &Polynomial,
    lifted: Option<&LiftedProblem>,
    f: &ProblemFile,
    h: &Polynomial,
    d: u32,
    default: Epsilon,
) -> Result<(Rational, LiftOutcome), CliError> {
    let (set, h, target, d) = match lifted {
        Some(l) => (l.set.clone(), &l.equality, &l.target, l.degree),
        None => (f.set(), h, target, d),
    };
    let opts = search_options(f);
    match f.options.epsilon.clone().unwrap_or(default) {
        Epsilon::Fixed(e) => Ok((e.clone(), lift_equality(target, &set, h, d, &e, &opts).map_err(reduction)?)),
        Epsilon::Schedule => lift_equality_scheduled(target, &set, h, d, &epsilon_schedule(), &opts).map_err(reduction),
    }
}

fn reduction(e: ReductionError) -> CliError {
    match e {
        ReductionError::Hierarchy(h @ HierarchyError::IndexCap { .. }) => CliError::Resource(h.to_string()),
        other => usage(other),
    }
}

fn lift_report(command: &str, eps: &Rational, out: &LiftOutcome, names: &[String]) -> (Report, i32) {
    let (status, code) = match out {
        LiftOutcome::Found { .. } => ("certified", EXIT_OK),
        LiftOutcome::NotFound { exhausted: None, .. } => ("not-found", EXIT_REFUTED),
        LiftOutcome::NotFound { .. } => ("exhausted", EXIT_UNKNOWN),
    };
    let mut r = Report::new(command, status);
    r.set("epsilon", format_rational(eps));
    r.set("levels_tried", out.levels_tried());
    match out {
        LiftOutcome::Found { certificate, .. } => {
            r.set("level", certificate.copositive.level);
            r.set("terms", certificate.copositive.terms.len());
            let n = certificate.anchor.len();
            let mnames = if names.len() == n { names.to_vec() } else { Polynomial::default_names(n) };
            r.lines("multiplier", certificate.multipliers.iter().map(|q| q.to_text(&mnames)));
        }
        LiftOutcome::NotFound { rays, exhausted, .. } => {
            if let Some(reason) = exhausted {
                r.set("reason", reason.as_str());
            }
            r.lines("farkas", ray_lines(rays, names));
        }
    }
    (r, code)
}

fn round_trip_fields(r: &mut Report, lifted: &LiftedProblem, cert: &EqualityCertificate) -> Result<bool, CliError> {
    let rt = lifted.round_trip(cert).map_err(reduction)?;
    r.set("round_trip", if rt.holds() { "exact" } else { "fails" });
    Ok(rt.holds())
}

pub fn certify_eq_cmd(f: &ProblemFile) -> Result<Outcome, CliError> {
    let p = f.require_p()?;
    let h = f.require_h()?;
    let d = f.options.d.unwrap_or_else(|| degree(p).max(degree(h)));
    if f.cone == ConeKind::FullSpace {
        let lifted = nonconic_lift(p, &f.set(), h, d).map_err(reduction)?;
        let (eps, out) = solve_lift(p, Some(&lifted), f, h, d, Epsilon::Schedule)?;
        let (mut r, code) = lift_report("certify-eq", &eps, &out, &[]);
        r.set("lift", "non-conic");
        r.set("lifted_variables", lifted.set.nvars);
        let certificate = match out.certificate() {
            Some(c) => {
                round_trip_fields(&mut r, &lifted, c)?;
                Some(format!("kind: nonconic\nlift degree: {d}\n{}", c.to_text()))
            }
            None => None,
        };
        return Ok(Outcome { report: r, code, certificate });
    }
    let (eps, out) = solve_lift(p, None, f, h, d, Epsilon::Schedule)?;
    let (r, code) = lift_report("certify-eq", &eps, &out, &f.vars);
    let certificate = out.certificate().map(|c| format!("kind: equality\n{}", c.to_text()));
    Ok(Outcome { report: r, code, certificate })
}

pub fn certify_ineq_cmd(f: &ProblemFile) -> Result<Outcome, CliError> {
    let p = f.require_p()?;
    let h = f.require_h()?;
    let d = f.options.d.unwrap_or_else(|| degree(p).max(2 * degree(h)));
    let lifted = lift_inequality(p, &f.set(), h, d).map_err(reduction)?;
    let (eps, out) = solve_lift(p, Some(&lifted), f, h, d, Epsilon::Schedule)?;
    let (mut r, code) = lift_report("certify-ineq", &eps, &out, &[]);
    r.set("lifted_variables", lifted.set.nvars);
    r.set("lifted_degree", lifted.degree);
    let certificate = match out.certificate() {
        Some(c) => {
            round_trip_fields(&mut r, &lifted, c)?;
            Some(format!("kind: inequality\nlift degree: {d}\n{}", c.to_text()))
        }
        None => None,
    };
    Ok(Outcome { report: r, code, certificate })
}

fn quadratic_forms(f: &ProblemFile) -> Result<[QuadraticForm; 3], CliError> {
    let zero = Polynomial::zero(f.nvars());
    let h = f.h.as_ref().unwrap_or(&zero);
    let form = |p: &Polynomial| QuadraticForm::from_polynomial(p).map_err(usage);
    Ok([form(f.require_p()?)?, form(f.require_q()?)?, form(h)?])
}

pub fn certify_quadratic_cmd(f: &ProblemFile) -> Result<Outcome, CliError> {
    let [p, q, h] = quadratic_forms(f)?;
    let schedule = match f.options.epsilon.clone().unwrap_or(Epsilon::Fixed(Rational::zero())) {
        Epsilon::Fixed(e) => vec![e],
        Epsilon::Schedule => epsilon_schedule(),
    };
    let defaults = QuadSearchOptions::default();
    let mut last = None;
    for eps in schedule {
        let o = QuadSearchOptions {
            epsilon: eps.clone(),
            grid: f.options.grid.unwrap_or(defaults.grid),
            refinements: f.options.refinements.unwrap_or(defaults.refinements),
            sample_point: f.options.sample.clone(),
            ..defaults.clone()
        };
        let out = certify_quadratic(&p, &q, &h, &o).map_err(usage)?;
        let found = out.certificate().is_some();
        last = Some((eps, out));
        if found {
            break;
        }
    }
    let (eps, out) = last.expect("schedule is nonempty");
    let (status, code) = match &out {
        QuadOutcome::Found { .. } => ("certified", EXIT_OK),
        QuadOutcome::NotFound { .. } => ("not-found", EXIT_UNKNOWN),
    };
    let mut r = Report::new("certify-quadratic", status);
    r.set("epsilon", format_rational(&eps));
    match canonicalize_quadratic(&q) {
        Ok(c) => {
            r.set("canonical_m", c.m);
            r.set("canonical_m1", c.m1);
            r.set("canonical_constant", format_rational(&c.constant));
        }
        Err(e) => r.set("canonical", e.to_string()),
    }
    let certificate = match &out {
        QuadOutcome::Found { certificate, candidates_checked } => {
            r.set("lambda", format_rational(&certificate.lambda));
            r.set("mu", format_rational(&certificate.mu));
            r.set("candidates_checked", *candidates_checked);
            Some(format!("kind: quadratic\n{}", certificate.to_text()))
        }
        QuadOutcome::NotFound { best, candidates_checked } => {
            r.set("candidates_checked", *candidates_checked);
            if let Some(b) = best {
                r.set("best_lambda", format_rational(&b.lambda));
                r.set("best_mu", format_rational(&b.mu));
                r.set("best_min_eigenvalue", format!("{:e}", b.min_eigenvalue));
            }
            None
        }
    };
    Ok(Outcome { report: r, code, certificate })
}

pub fn check_condition_cmd(f: &ProblemFile) -> Result<Outcome, CliError> {
    let h = f.require_h()?;
    let set = f.set();
    let o = probe_options(f);
    let rep = match f.options.condition {
        ConditionChoice::Equality => check_condition_eq(&set, h, &o),
        ConditionChoice::Inequality => check_condition_ineq(&set, h, &o),
    }
    .map_err(usage)?;
    let code = match rep.status {
        ConditionStatus::Holds => EXIT_OK,
        ConditionStatus::Fails => EXIT_REFUTED,
        ConditionStatus::Unknown => EXIT_UNKNOWN,
    };
    let mut r = Report::new("check-condition", rep.status.name());
    r.set("condition", if f.options.condition == ConditionChoice::Equality { "eq" } else { "ineq" });
    r.set("method", rep.method.name());
    r.set("seed", f.options.seed);
    if let Some(w) = &rep.witness {
        r.set("witness", floats(w));
    }
    if let Some(res) = rep.witness_residual {
        r.set("witness_residual", format!("{res:e}"));
    }
    r.lines("lhs", rep.lhs_directions.iter().map(|d| floats(d)));
    let angles = rep.match_angles_deg.iter().map(Some).chain(std::iter::repeat(None));
    r.lines(
        "rhs",
        rep.rhs_directions.iter().zip(angles).map(|(d, a)| match a {
            Some(a) => format!("{} nearest {a:.3}", floats(d)),
            None => floats(d),
        }),
    );
    r.lines("note", rep.notes.iter().cloned());
    Ok(Outcome { report: r, code, certificate: None })
}

pub fn horizon_probe_cmd(f: &ProblemFile) -> Result<Outcome, CliError> {
    let set = f.set();
    set.validate().map_err(usage)?;
    let dirs = horizon_probe(&set, &probe_options(f));
    let (status, code) = if dirs.is_empty() { ("empty", EXIT_UNKNOWN) } else { ("found", EXIT_OK) };
    let mut r = Report::new("horizon-probe", status);
    r.set("seed", f.options.seed);
    r.set("clusters", dirs.len());
    r.lines(
        "direction",
        dirs.directions.iter().zip(&dirs.weights).map(|(d, w)| format!("{} weight {w:.4}", floats(d))),
    );
    r.lines(
        "radius",
        dirs.diagnostics.iter().map(|g| format!("{:e} accepted {}/{}", g.radius, g.accepted, g.attempted)),
    );
    if let Some(n) = &dirs.note {
        r.set("note", n.as_str());
    }
    Ok(Outcome { report: r, code, certificate: None })
}

pub fn counterexample_cmd(f: &ProblemFile) -> Result<Outcome, CliError> {
    let h = f.require_h()?;
    let s = f.options.direction.as_ref().ok_or_else(|| usage("counterexample needs `option direction = …`"))?;
    let d = f.options.d.unwrap_or_else(|| degree(h).max(2));
    let mut o = CounterexampleOptions::default();
    o.probe.seed = f.options.seed;
    if let Some(n) = f.options.samples {
        o.probe.samples = n;
    }
    match build_counterexample(&f.set(), h, s, d, &o) {
        Ok(c) => {
            let mut r = Report::new("counterexample", "built");
            r.set("degree", d);
            r.set("direction", vector(&c.s));
            r.set("anchor", vector(&c.anchor));
            r.set("epsilon", format_rational(&c.epsilon));
            r.set("distance", format!("{:.6}", c.distance));
            r.set("sampled_points", c.sampled_points);
            r.set("p", c.p.to_text(&f.vars));
            let point: Vec<Rational> = std::iter::once(Rational::zero()).chain(c.s.iter().cloned()).collect();
            let bar = c.p.homogenize(d).map_err(usage)?;
            r.set("homogenized_at_direction", format_rational(&bar.evaluate(&point).map_err(usage)?));
            Ok(Outcome { report: r, code: EXIT_OK, certificate: None })
        }
        Err(ReductionError::Refused(why)) => {
            let mut r = Report::new("counterexample", "refused");
            r.set("reason", why);
            Ok(Outcome { report: r, code: EXIT_UNKNOWN, certificate: None })
        }
        Err(e) => Err(reduction(e)),
    }
}

fn split_header<'a>(text: &'a str, key: &str) -> Result<(&'a str, &'a str), String> {
    let text = text.trim_start();
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let value = first
        .trim()
        .strip_prefix(key)
        .and_then(|v| v.strip_prefix(':'))
        .ok_or_else(|| format!("expected `{key}:` header"))?;
    Ok((value.trim(), rest))
}

fn lift_degree(body: &str) -> Result<(u32, &str), String> {
    let (d, rest) = split_header(body, "lift degree")?;
    Ok((d.parse().map_err(|_| "bad lift degree".to_string())?, rest))
}

/// Problems found with the certificate; empty when it is valid.
fn check_certificate(f: &ProblemFile, text: &str) -> Result<Vec<String>, CliError> {
    let (kind, body) = match split_header(text, "kind") {
        Ok(v) => v,
        Err(e) => return Ok(vec![e]),
    };
    let p = f.require_p()?;
    let parse_err = |e: &dyn std::fmt::Display| Ok(vec![format!("certificate does not parse: {e}")]);
    let eq_check = |cert: &EqualityCertificate, target: &Polynomial, set, h: &Polynomial| {
        let mut out = cert.verify(target).diff_lines();
        if !cert.matches_problem(set, h) {
            out.push("certificate is for a different set or equality".to_string());
        }
        out
    };
    match kind {
        "copositive" => match CopositiveCertificate::from_text(body) {
            Ok(cert) => {
                let mut out = verify_certificate(&cert, p).diff_lines();
                if cert.generators != f.inequalities {
                    out.push("certificate generators differ from the problem inequalities".to_string());
                }
                Ok(out)
            }
            Err(e) => parse_err(&e),
        },
        "equality" => match EqualityCertificate::from_text(body) {
            Ok(cert) => Ok(eq_check(&cert, p, &f.set(), f.require_h()?)),
            Err(e) => parse_err(&e),
        },
        "inequality" | "nonconic" => {
            let (d, body) = match lift_degree(body) {
                Ok(v) => v,
                Err(e) => return Ok(vec![e]),
            };
            let h = f.require_h()?;
            let lifted = if kind == "inequality" {
                lift_inequality(p, &f.set(), h, d)
            } else {
                nonconic_lift(p, &f.set(), h, d)
            }
            .map_err(reduction)?;
            match EqualityCertificate::from_text(body) {
                Ok(cert) => {
                    let mut out = eq_check(&cert, &lifted.target, &lifted.set, &lifted.equality);
                    if out.is_empty() && !lifted.round_trip(&cert).map_err(reduction)?.holds() {
                        out.push("back-substituted identity fails".to_string());
                    }
                    Ok(out)
                }
                Err(e) => parse_err(&e),
            }
        }
        "quadratic" => match QuadraticCertificate::from_text(body) {
            Ok(cert) => {
                let [p, q, h] = quadratic_forms(f)?;
                Ok(cert.verify(&p, &q, &h).problems())
            }
            Err(e) => parse_err(&e),
        },
        other => Ok(vec![format!("unknown certificate kind `{other}`")]),
    }
}

pub fn verify_cmd(f: &ProblemFile, certificate: &str) -> Result<Outcome, CliError> {
    let problems = check_certificate(f, certificate)?;
    let (status, code) = if problems.is_empty() { ("valid", EXIT_OK) } else { ("invalid", EXIT_REFUTED) };
    let mut r = Report::new("verify", status);
    r.lines("diff", problems);
    Ok(Outcome { report: r, code, certificate: None })
}
