//! Exact rational scalars and the few float bridges the crate needs.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision fraction, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators or denominators: fall back to a scaled quotient.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents and the admissible semiconvergent).
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    assert!(x.is_finite(), "cannot rationalize a non-finite value");
    assert!(max_den >= 1);
    let negative = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let max_den = max_den as u128;
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e30 {
            break;
        }
        let ai = a as u128;
        let q2 = ai * q1 + q0;
        if q2 > max_den {
            // Largest semiconvergent that still respects the cap.
            let k = (max_den - q0) / q1.max(1);
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            if q1 > 0 && qs > 0 {
                let cand = ps as f64 / qs as f64;
                let conv = p1 as f64 / q1 as f64;
                if (cand - x.abs()).abs() < (conv - x.abs()).abs() {
                    p1 = ps;
                    q1 = qs;
                }
            }
            break;
        }
        let p2 = ai * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac_part = v - a;
        if frac_part < 1e-15 {
            break;
        }
        v = 1.0 / frac_part;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if negative {
        -r
    } else {
        r
    }
}

/// Largest rational with denominator `den` not exceeding `x` (for `x > 0`).
pub fn floor_to_denominator(x: f64, den: u64) -> Rational {
    let scaled = (x * den as f64).floor();
    Rational::new(BigInt::from(scaled as i128), BigInt::from(den))
}

/// `num` or `num/den`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let t = text.trim();
    let err = || ParseRationalError(t.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            if let Ok(n) = BigInt::from_str(t) {
                return Ok(Rational::from_integer(n));
            }
            // Plain decimals such as `0.25` are accepted and read exactly.
            let (neg, body) = match t.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, t),
            };
            let (ip, fp) = body.split_once('.').ok_or_else(err)?;
            if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
                return Err(err());
            }
            let ip = if ip.is_empty() { "0" } else { ip };
            let whole = BigInt::from_str(&format!("{ip}{fp}")).map_err(|_| err())?;
            let den = num_traits::pow(BigInt::from(10), fp.len());
            let q = Rational::new(whole, den);
            Ok(if neg { -q } else { q })
        }
    }
}

pub fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}
