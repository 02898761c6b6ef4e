//! Exact polynomials in `q` with rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Float, Integer, Rational};
use serde::{Serialize, Serializer};

use crate::num::CValue;
use crate::qcore::QParam;

/// `c[0] + c[1] q + c[2] q^2 + ...`, kept without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QPoly {
    c: Vec<Rational>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    pub fn constant(r: impl Into<Rational>) -> Self {
        Self::from_coeffs(vec![r.into()])
    }

    pub fn from_int(n: impl Into<Integer>) -> Self {
        Self::constant(Rational::from(n.into()))
    }

    pub fn from_coeffs(c: Vec<Rational>) -> Self {
        let mut p = QPoly { c };
        p.trim();
        p
    }

    /// `1 - q`
    pub fn one_minus_q() -> Self {
        Self::from_coeffs(vec![Rational::from(1), Rational::from(-1)])
    }

    /// `q - 1`
    pub fn q_minus_one() -> Self {
        Self::from_coeffs(vec![Rational::from(-1), Rational::from(1)])
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(|x| *x == 0) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(QPoly::one(), |acc, _| &acc * self)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::from_coeffs(self.c.iter().map(|x| Rational::from(x * k)).collect())
    }

    /// Value at `q = 1`, i.e. the sum of coefficients.
    pub fn at_one(&self) -> Rational {
        self.c.iter().fold(Rational::new(), |acc, x| acc + x)
    }

    pub fn eval_float(&self, q: &Float) -> Float {
        crate::qcore::eval_rational_poly(&self.c, q)
    }

    pub fn eval(&self, qp: &QParam) -> CValue {
        CValue::real(self.eval_float(qp.q()))
    }
}

impl Add<&QPoly> for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let n = self.c.len().max(rhs.c.len());
        let zero = Rational::new();
        QPoly::from_coeffs(
            (0..n)
                .map(|i| Rational::from(self.c.get(i).unwrap_or(&zero) + rhs.c.get(i).unwrap_or(&zero)))
                .collect(),
        )
    }
}

impl Sub<&QPoly> for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        self + &(-rhs)
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly::from_coeffs(self.c.iter().map(|x| Rational::from(-x)).collect())
    }
}

impl Mul<&QPoly> for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![Rational::new(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] += Rational::from(a * b);
            }
        }
        QPoly::from_coeffs(c)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            let neg = *a < 0;
            let mag = Rational::from(a.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "q".into(),
                _ => format!("q^{i}"),
            };
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for QPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let a = QPoly::one_minus_q();
        let sq = a.pow(2);
        assert_eq!(sq.to_string(), "1 - 2*q + q^2");
        assert!((&sq - &(&a * &a)).is_zero());
        assert_eq!((&a + &QPoly::q_minus_one()).to_string(), "0");
        assert_eq!(QPoly::q_minus_one().pow(3).at_one(), 0);
        assert_eq!(QPoly::constant(Rational::from((1, 2))).to_string(), "1/2");
    }
}
