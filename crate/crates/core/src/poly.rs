//! Polynomial coefficient tables for twisting functions.
//!
//! Twist functions are polynomials of degree at most 3 in the 2n ball
//! coordinates. Keeping them as coefficient tables makes partial derivatives
//! exact and lets germ files round-trip fractions without loss.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_DEGREE: usize = 3;

/// A single monomial: coefficient times the product of x_j^(exponents[j]).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Scalar,
    pub exponents: Vec<u8>,
}

impl Term {
    pub fn degree(&self) -> usize {
        self.exponents.iter().map(|&e| e as usize).sum()
    }
}

/// A polynomial in `vars` variables, kept in a canonical order (terms sorted
/// by exponent tuple, like terms merged, zero terms dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    vars: usize,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn new(vars: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != vars {
                return Err(Error::dimension(format!(
                    "term exponent tuple has length {}, expected {}",
                    t.exponents.len(),
                    vars
                )));
            }
            if t.degree() > MAX_DEGREE {
                return Err(Error::Unsupported(format!(
                    "polynomial degree {} exceeds the supported maximum {}",
                    t.degree(),
                    MAX_DEGREE
                )));
            }
        }
        let mut poly = Polynomial { vars, terms };
        poly.normalize();
        Ok(poly)
    }

    pub fn zero(vars: usize) -> Self {
        Polynomial {
            vars,
            terms: Vec::new(),
        }
    }

    /// The linear polynomial `coeff * x_j` (j is 0-based).
    pub fn linear_term(vars: usize, j: usize, coeff: Scalar) -> Result<Self> {
        let mut exponents = vec![0u8; vars];
        exponents[j] = 1;
        Polynomial::new(vars, vec![Term { coeff, exponents }])
    }

    fn normalize(&mut self) {
        self.terms.sort_by(|a, b| a.exponents.cmp(&b.exponents));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.exponents == t.exponents => {
                    last.coeff = last.coeff.add(&t.coeff);
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        self.terms = merged;
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        self.terms.extend(other.terms.iter().cloned());
        self.normalize();
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.vars);
        let mut total = 0.0;
        for t in &self.terms {
            let mut v = t.coeff.as_f64();
            for (xj, &e) in x.iter().zip(&t.exponents) {
                for _ in 0..e {
                    v *= xj;
                }
            }
            total += v;
        }
        total
    }

    /// Exact partial derivative with respect to x_j (0-based).
    pub fn partial(&self, j: usize) -> Polynomial {
        let mut terms = Vec::new();
        for t in &self.terms {
            let e = t.exponents[j];
            if e == 0 {
                continue;
            }
            let mut exponents = t.exponents.clone();
            exponents[j] = e - 1;
            terms.push(Term {
                coeff: t.coeff.mul_int(e as i64),
                exponents,
            });
        }
        let mut p = Polynomial {
            vars: self.vars,
            terms,
        };
        p.normalize();
        p
    }

    /// The constant term.
    pub fn constant_term(&self) -> Scalar {
        self.terms
            .iter()
            .find(|t| t.exponents.iter().all(|&e| e == 0))
            .map(|t| t.coeff)
            .unwrap_or_else(Scalar::zero)
    }

    /// The coefficient of the plain variable x_j (0-based).
    pub fn linear_coefficient(&self, j: usize) -> Scalar {
        self.terms
            .iter()
            .find(|t| {
                t.exponents[j] == 1 && t.degree() == 1
            })
            .map(|t| t.coeff)
            .unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Human-readable rendering like `-1/2 x2 + x1 x4`, 1-based variables.
    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            let _ = write!(out, "{}", t.coeff);
            for (j, &e) in t.exponents.iter().enumerate() {
                for _ in 0..e {
                    let _ = write!(out, " x{}", j + 1);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(coeff: Scalar, exps: &[u8]) -> Term {
        Term {
            coeff,
            exponents: exps.to_vec(),
        }
    }

    #[test]
    fn evaluation_and_partials_are_exact() {
        // f = 1/2 x1 - x2 + x1 x2^2
        let f = Polynomial::new(
            2,
            vec![
                term(Scalar::rational(1, 2).unwrap(), &[1, 0]),
                term(Scalar::integer(-1), &[0, 1]),
                term(Scalar::integer(1), &[1, 2]),
            ],
        )
        .unwrap();
        assert_eq!(f.eval(&[2.0, 3.0]), 1.0 - 3.0 + 18.0);
        let fx = f.partial(0);
        assert_eq!(fx.eval(&[2.0, 3.0]), 0.5 + 9.0);
        let fy = f.partial(1);
        assert_eq!(fy.eval(&[2.0, 3.0]), -1.0 + 12.0);
        assert_eq!(f.linear_coefficient(0), Scalar::rational(1, 2).unwrap());
        assert_eq!(f.linear_coefficient(1), Scalar::integer(-1));
        assert!(f.constant_term().is_zero());
    }

    #[test]
    fn like_terms_merge_and_zeros_drop() {
        let f = Polynomial::new(
            1,
            vec![
                term(Scalar::rational(1, 2).unwrap(), &[1]),
                term(Scalar::rational(-1, 2).unwrap(), &[1]),
            ],
        )
        .unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn degree_cap_is_enforced() {
        assert!(Polynomial::new(1, vec![term(Scalar::integer(1), &[4])]).is_err());
        assert!(Polynomial::new(2, vec![term(Scalar::integer(1), &[2, 2])]).is_err());
    }

    #[test]
    fn display_is_readable() {
        let f = Polynomial::new(
            4,
            vec![
                term(Scalar::integer(1), &[1, 0, 0, 0]),
                term(Scalar::rational(-1, 2).unwrap(), &[0, 0, 0, 1]),
            ],
        )
        .unwrap();
        // canonical order sorts by exponent tuple, so the x4 term leads
        assert_eq!(f.display(), "-1/2 x4 + 1 x1");
    }
}
