//! Line-oriented problem files.
//!
//! ```text
//! # comment
//! vars: x1 x2
//! p: x2^4 - x1^4
//! cone: orthant            # orthant | free | polyhedral | lorentz
//! ray: 1 0                 # polyhedral generators, one per line
//! anchor: 1 1
//! eq: x1 - x2              # repeatable
//! ineq: 1 - x1^2 - x2^2    # repeatable
//! h: (x1*x2 + 1)*(x1 - x2)^2
//! q: x3 - 1/4 - x1^2 - x2^2
//! option d = 4
//! ```

use posicert::poly::{parse_polynomial, ParseError};
use posicert::rational::{parse_rational, Rational};
use posicert::sets::{ConeKind, SetDescriptor};
use posicert::Polynomial;

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ProblemError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ProblemError {
    ProblemError { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Epsilon {
    Fixed(Rational),
    /// `0` then `10⁻⁶, …, 10⁻¹`, stopping at the first success.
    Schedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionChoice {
    Equality,
    Inequality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub d: Option<u32>,
    pub r_max: Option<u32>,
    pub epsilon: Option<Epsilon>,
    pub seed: u64,
    pub index_cap: Option<usize>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub refinements: Option<usize>,
    pub direction: Option<Vec<Rational>>,
    pub sample: Option<Vec<Rational>>,
    pub condition: ConditionChoice,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            d: None,
            r_max: None,
            epsilon: None,
            seed: 0,
            index_cap: None,
            samples: None,
            grid: None,
            refinements: None,
            direction: None,
            sample: None,
            condition: ConditionChoice::Equality,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub vars: Vec<String>,
    pub p: Option<Polynomial>,
    pub cone: ConeKind,
    pub anchor: Option<Vec<Rational>>,
    pub equalities: Vec<Polynomial>,
    pub inequalities: Vec<Polynomial>,
    pub h: Option<Polynomial>,
    pub q: Option<Polynomial>,
    pub options: Options,
}

fn parse_range<T: std::str::FromStr + PartialOrd + std::fmt::Display>(
    line: usize,
    name: &str,
    value: &str,
    lo: T,
    hi: T,
) -> Result<T, ProblemError> {
    let v: T = value.parse().map_err(|_| err(line, format!("option {name}: cannot parse `{value}`")))?;
    if v < lo || v > hi {
        return Err(err(line, format!("option {name} = {v} is outside [{lo}, {hi}]")));
    }
    Ok(v)
}

fn parse_vector(line: usize, text: &str) -> Result<Vec<Rational>, ProblemError> {
    text.split_whitespace()
        .map(|t| parse_rational(t).map_err(|e| err(line, e.to_string())))
        .collect()
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: usize, key: &str) -> Result<(), ProblemError> {
    if slot.is_some() {
        return Err(err(line, format!("`{key}` given twice")));
    }
    *slot = Some(value);
    Ok(())
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        let mut vars: Option<Vec<String>> = None;
        let mut p = None;
        let mut cone_name: Option<(usize, String)> = None;
        let mut rays: Vec<(usize, Vec<Rational>)> = Vec::new();
        let mut anchor = None;
        let mut equalities = Vec::new();
        let mut inequalities = Vec::new();
        let mut h = None;
        let mut q = None;
        let mut options = Options::default();
        let mut seen_options: Vec<String> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix("option ") {
                let (name, value) = rest
                    .split_once('=')
                    .ok_or_else(|| err(line, "expected `option <name> = <value>`"))?;
                let (name, value) = (name.trim(), value.trim());
                if seen_options.iter().any(|n| n == name) {
                    return Err(err(line, format!("option {name} given twice")));
                }
                seen_options.push(name.to_string());
                apply_option(&mut options, line, name, value)?;
                continue;
            }
            let (key, value) = content
                .split_once(':')
                .ok_or_else(|| err(line, format!("expected `key: value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "vars" {
                let names: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                if names.is_empty() {
                    return Err(err(line, "`vars` needs at least one name"));
                }
                for (k, n) in names.iter().enumerate() {
                    let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                        && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                    if !valid {
                        return Err(err(line, format!("`{n}` is not a variable name")));
                    }
                    if names[..k].contains(n) {
                        return Err(err(line, format!("variable `{n}` declared twice")));
                    }
                }
                set_once(&mut vars, names, line, key)?;
                continue;
            }
            let names = vars.as_ref();
            // `value` is a subslice of `raw`; its offset turns expression columns into file columns.
            let shift = value.as_ptr() as usize - raw.as_ptr() as usize;
            let poly = |text: &str| -> Result<Polynomial, ProblemError> {
                let names = names.ok_or_else(|| err(line, "`vars` must come before any polynomial"))?;
                parse_polynomial(text, names).map_err(|e| locate(line, shift, e))
            };
            match key {
                "p" => set_once(&mut p, poly(value)?, line, key)?,
                "h" => set_once(&mut h, poly(value)?, line, key)?,
                "q" => set_once(&mut q, poly(value)?, line, key)?,
                "eq" => equalities.push(poly(value)?),
                "ineq" => inequalities.push(poly(value)?),
                "cone" => set_once(&mut cone_name, (line, value.to_string()), line, key)?,
                "ray" => rays.push((line, parse_vector(line, value)?)),
                "anchor" => set_once(&mut anchor, parse_vector(line, value)?, line, key)?,
                other => return Err(err(line, format!("unknown key `{other}`"))),
            }
        }

        let vars = vars.ok_or_else(|| err(0, "missing `vars`"))?;
        let n = vars.len();
        let cone = match cone_name.as_ref().map(|(l, s)| (*l, s.as_str())) {
            None | Some((_, "orthant")) => ConeKind::Orthant,
            Some((_, "free")) => ConeKind::FullSpace,
            Some((_, "lorentz")) => ConeKind::Lorentz,
            Some((l, "polyhedral")) => {
                if rays.is_empty() {
                    return Err(err(l, "a polyhedral cone needs `ray:` lines"));
                }
                ConeKind::Polyhedral { generators: rays.iter().map(|(_, r)| r.clone()).collect() }
            }
            Some((l, other)) => return Err(err(l, format!("unknown cone `{other}`"))),
        };
        if !matches!(cone, ConeKind::Polyhedral { .. }) {
            if let Some((l, _)) = rays.first() {
                return Err(err(*l, "`ray:` lines need `cone: polyhedral`"));
            }
        }
        for (l, r) in &rays {
            if r.len() != n {
                return Err(err(*l, format!("ray has {} entries, expected {n}", r.len())));
            }
        }
        if let Some(a) = &anchor {
            if a.len() != n {
                return Err(err(0, format!("anchor has {} entries, expected {n}", a.len())));
            }
        }
        for (name, v) in [("direction", &options.direction), ("sample", &options.sample)] {
            if let Some(v) = v {
                if v.len() != n {
                    return Err(err(0, format!("option {name} has {} entries, expected {n}", v.len())));
                }
            }
        }
        Ok(ProblemFile { vars, p, cone, anchor, equalities, inequalities, h, q, options })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn set(&self) -> SetDescriptor {
        let mut s = SetDescriptor::new(self.nvars(), self.cone.clone());
        s.equalities = self.equalities.clone();
        s.inequalities = self.inequalities.clone();
        s.anchor = self.anchor.clone();
        s
    }

    pub fn require_p(&self) -> Result<&Polynomial, ProblemError> {
        self.p.as_ref().ok_or_else(|| err(0, "missing `p:`"))
    }

    pub fn require_h(&self) -> Result<&Polynomial, ProblemError> {
        self.h.as_ref().ok_or_else(|| err(0, "missing `h:`"))
    }

    pub fn require_q(&self) -> Result<&Polynomial, ProblemError> {
        self.q.as_ref().ok_or_else(|| err(0, "missing `q:`"))
    }
}

fn locate(line: usize, shift: usize, e: ParseError) -> ProblemError {
    let message = match e {
        ParseError::Syntax { column, message, .. } => format!("column {}: syntax error: {message}", column + shift),
        ParseError::UnknownVariable { column, name, .. } => {
            format!("column {}: unknown variable `{name}`", column + shift)
        }
        ParseError::ExponentOverflow { column, text, .. } => {
            format!("column {}: exponent `{text}` is too large", column + shift)
        }
    };
    err(line, message)
}

fn apply_option(o: &mut Options, line: usize, name: &str, value: &str) -> Result<(), ProblemError> {
    match name {
        "d" => o.d = Some(parse_range(line, name, value, 1, 32)?),
        "r_max" => o.r_max = Some(parse_range(line, name, value, 0, 40)?),
        "seed" => o.seed = parse_range(line, name, value, 0, u64::MAX)?,
        "index_cap" => o.index_cap = Some(parse_range(line, name, value, 1, 100_000_000)?),
        "samples" => o.samples = Some(parse_range(line, name, value, 1, 1_000_000)?),
        "grid" => o.grid = Some(parse_range(line, name, value, 2, 257)?),
        "refinements" => o.refinements = Some(parse_range(line, name, value, 0, 10)?),
        "epsilon" => {
            o.epsilon = Some(if value == "schedule" {
                Epsilon::Schedule
            } else {
                let e = parse_rational(value).map_err(|e| err(line, e.to_string()))?;
                if e < Rational::from_integer(0.into()) {
                    return Err(err(line, "option epsilon must be non-negative"));
                }
                Epsilon::Fixed(e)
            })
        }
        "direction" => o.direction = Some(parse_vector(line, value)?),
        "sample" => o.sample = Some(parse_vector(line, value)?),
        "condition" => {
            o.condition = match value {
                "eq" => ConditionChoice::Equality,
                "ineq" => ConditionChoice::Inequality,
                _ => return Err(err(line, "option condition must be `eq` or `ineq`")),
            }
        }
        other => return Err(err(line, format!("unknown option `{other}`"))),
    }
    Ok(())
}
