//! Scalars that remember whether they were given exactly.
//!
//! Input files accept both decimal literals and exact fractions `p/q`.
//! Fractions are kept as integer pairs so that writing a value back out
//! reproduces the input exactly; they are converted to the nearest binary
//! float only when a computation needs them.

use std::fmt;

use crate::error::{Error, Result};

/// A real scalar, either an exact fraction or a binary float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    /// Exact rational p/q with q > 0 and gcd(|p|, q) = 1.
    Rational { num: i64, den: i64 },
    /// A value that was given (or produced) as a float.
    Real(f64),
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Scalar {
    pub fn rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("fraction with zero denominator".into()));
        }
        let sign = if den < 0 { -1 } else { 1 };
        let (mut num, mut den) = (num * sign, den * sign);
        let g = gcd(num, den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        Ok(Scalar::Rational { num, den })
    }

    pub fn integer(n: i64) -> Self {
        Scalar::Rational { num: n, den: 1 }
    }

    pub fn zero() -> Self {
        Scalar::integer(0)
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Scalar::Rational { num, den } => num as f64 / den as f64,
            Scalar::Real(x) => x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Scalar::Rational { num, .. } => num == 0,
            Scalar::Real(x) => x == 0.0,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational { .. })
    }

    /// Exact sum when both sides are rational and nothing overflows,
    /// float addition otherwise.
    pub fn add(&self, other: &Scalar) -> Scalar {
        if let (Scalar::Rational { num: a, den: b }, Scalar::Rational { num: c, den: d }) =
            (self, other)
        {
            let num = (*a as i128) * (*d as i128) + (*c as i128) * (*b as i128);
            let den = (*b as i128) * (*d as i128);
            if let (Ok(num), Ok(den)) = (i64::try_from(num), i64::try_from(den)) {
                if let Ok(s) = Scalar::rational(num, den) {
                    return s;
                }
            }
        }
        Scalar::Real(self.as_f64() + other.as_f64())
    }

    /// Exact product by a small integer when possible.
    pub fn mul_int(&self, k: i64) -> Scalar {
        if let Scalar::Rational { num, den } = self {
            if let Some(num) = num.checked_mul(k) {
                if let Ok(s) = Scalar::rational(num, *den) {
                    return s;
                }
            }
        }
        Scalar::Real(self.as_f64() * k as f64)
    }

    pub fn neg(&self) -> Scalar {
        match *self {
            Scalar::Rational { num, den } => Scalar::Rational { num: -num, den },
            Scalar::Real(x) => Scalar::Real(-x),
        }
    }

    /// Exact equality of `self + other = 0`, available only when both sides
    /// are rational.
    pub fn cancels_exactly(&self, other: &Scalar) -> Option<bool> {
        match (self, other) {
            (Scalar::Rational { num: a, den: b }, Scalar::Rational { num: c, den: d }) => {
                Some((*a as i128) * (*d as i128) + (*c as i128) * (*b as i128) == 0)
            }
            _ => None,
        }
    }

    /// Parses a decimal literal or an exact fraction "p/q".
    pub fn parse(token: &str) -> Result<Scalar> {
        if let Some((p, q)) = token.split_once('/') {
            let num: i64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad fraction numerator {p:?}")))?;
            let den: i64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad fraction denominator {q:?}")))?;
            return Scalar::rational(num, den);
        }
        if let Ok(n) = token.parse::<i64>() {
            return Ok(Scalar::integer(n));
        }
        let x: f64 = token
            .parse()
            .map_err(|_| Error::Domain(format!("bad numeric literal {token:?}")))?;
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite literal {token:?}")));
        }
        Ok(Scalar::Real(x))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Scalar::Rational { num, den } => {
                if den == 1 {
                    write!(f, "{num}")
                } else {
                    write!(f, "{num}/{den}")
                }
            }
            Scalar::Real(x) => write!(f, "{x}"),
        }
    }
}
