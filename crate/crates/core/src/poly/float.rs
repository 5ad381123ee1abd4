use super::Polynomial;
use crate::rational::to_f64;

/// Floating-point copy of a polynomial for sampling and numeric probes.
#[derive(Debug, Clone)]
pub struct FloatPolynomial {
    nvars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl FloatPolynomial {
    pub fn new(p: &Polynomial) -> Self {
        FloatPolynomial {
            nvars: p.nvars(),
            terms: p.terms().map(|(m, c)| (to_f64(c), m.exponents().to_vec())).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, e)| c * monomial(x, e)).sum()
    }

    /// Sum of absolute term values, the natural scale for cancellation tolerances.
    pub fn abs_scale(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, e)| (c * monomial(x, e)).abs()).sum()
    }

    /// Value and gradient.
    pub fn eval_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut value = 0.0;
        let mut grad = vec![0.0; self.nvars];
        for (c, e) in &self.terms {
            value += c * monomial(x, e);
            for i in 0..self.nvars {
                if e[i] == 0 {
                    continue;
                }
                let mut t = c * e[i] as f64;
                for (j, &ej) in e.iter().enumerate() {
                    let pow = if j == i { ej - 1 } else { ej };
                    if pow > 0 {
                        t *= x[j].powi(pow as i32);
                    }
                }
                grad[i] += t;
            }
        }
        (value, grad)
    }
}

fn monomial(x: &[f64], e: &[u32]) -> f64 {
    let mut acc = 1.0;
    for (v, &k) in x.iter().zip(e) {
        if k > 0 {
            acc *= v.powi(k as i32);
        }
    }
    acc
}
