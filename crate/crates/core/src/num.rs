//! Complex numbers over MPFR floats.
//!
//! `CValue` is deliberately small: the library only needs field operations,
//! `exp`, the principal `ln`, and real powers of positive reals.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Guard bits added on top of the requested decimal precision.
pub const GUARD_BITS: u32 = 24;

/// Working precision in bits for a request of `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}

/// Decimal digits that are meaningful at `bits` of precision.
pub fn bits_to_digits(bits: u32) -> usize {
    ((bits.saturating_sub(GUARD_BITS)) as f64 / std::f64::consts::LOG2_10).floor() as usize + 2
}

/// `10^-e` at the given precision.
pub fn ten_pow_neg(prec: u32, e: f64) -> Float {
    let ten = Float::with_val(prec, 10);
    ten.pow(Float::with_val(prec, -e))
}

/// Complex number with independent MPFR real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct CValue {
    pub re: Float,
    pub im: Float,
}

impl CValue {
    pub fn new(re: Float, im: Float) -> Self {
        CValue { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        CValue::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        CValue::from_i64(1, prec)
    }

    pub fn real(re: Float) -> Self {
        let p = re.prec();
        CValue::new(re, Float::new(p))
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        CValue::real(Float::with_val(prec, n))
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        CValue::real(Float::with_val(prec, x))
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        CValue::real(Float::with_val(prec, r))
    }

    pub fn from_integer(n: &Integer, prec: u32) -> Self {
        CValue::real(Float::with_val(prec, n))
    }

    /// Parses `"2"`, `"-0.5"`, `"1.5+2i"`, `"3-0.25i"`, `"2i"`; decimal strings are
    /// rounded once at `prec`, so `"0.7"` is exact to working precision.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Domain("empty number".into()));
        }
        let parse_real = |t: &str| -> Result<Float> {
            let v = Float::parse(t).map_err(|_| Error::Domain(format!("cannot parse number '{text}'")))?;
            Ok(Float::with_val(prec, v))
        };
        let Some(body) = s.strip_suffix('i') else {
            return Ok(CValue::real(parse_real(&s)?));
        };
        // split at the last sign that is not part of an exponent and not leading
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re_txt, im_txt) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im_txt = match im_txt {
            "" | "+" => "1",
            "-" => "-1",
            t => t,
        };
        Ok(CValue::new(parse_real(re_txt)?, parse_real(im_txt)?))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().min(self.im.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `Some(n)` when the value is exactly the integer `n` (zero imaginary part).
    pub fn as_exact_integer(&self) -> Option<i64> {
        if !self.im.is_zero() || !self.re.is_integer() {
            return None;
        }
        self.re.to_integer().and_then(|z| z.to_i64())
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn conj(&self) -> Self {
        CValue::new(self.re.clone(), Float::with_val(self.im.prec(), -&self.im))
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        CValue::new(Float::with_val(p, &self.re * k), Float::with_val(p, &self.im * k))
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        let p = self.prec();
        CValue::new(Float::with_val(p, &self.re * k), Float::with_val(p, &self.im * k))
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        if self.im.is_zero() {
            return CValue::real(m);
        }
        let (s, c) = Float::with_val(p, &self.im).sin_cos(Float::new(p));
        CValue::new(Float::with_val(p, &m * &c), Float::with_val(p, &m * &s))
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let arg = Float::with_val(p, self.im.atan2_ref(&self.re));
        CValue::new(Float::with_val(p, self.abs().ln_ref()), arg)
    }

    pub fn recip(&self) -> Self {
        CValue::one(self.prec()) / self
    }

    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self.clone();
        let mut acc = CValue::one(self.prec());
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Decimal rendering of the real and imaginary parts with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (fmt_float(&self.re, digits), fmt_float(&self.im, digits))
    }
}

/// `x^s` for positive real `x`; integer exponents avoid the exp/log round trip.
pub fn real_pow(x: &Float, s: &CValue) -> CValue {
    let p = s.prec().min(x.prec());
    if let Some(n) = s.as_exact_integer() {
        if n.unsigned_abs() < (1 << 20) {
            return CValue::real(Float::with_val(p, x.pow(n as i32)));
        }
    }
    if s.im.is_zero() {
        return CValue::real(Float::with_val(p, x.pow(&s.re)));
    }
    let lx = Float::with_val(p, x.ln_ref());
    s.scale(&lx).exp()
}

pub fn fmt_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits.max(2)))
}

impl fmt::Display for CValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let (re, im) = self.to_decimal(digits);
        if self.im.is_zero() {
            write!(f, "{re}")
        } else if self.im.is_sign_negative() {
            write!(f, "{re} - {}i", im.trim_start_matches('-'))
        } else {
            write!(f, "{re} + {im}i")
        }
    }
}

impl Serialize for CValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let digits = bits_to_digits(self.prec());
        let (re, im) = self.to_decimal(digits);
        let mut st = serializer.serialize_struct("CValue", 2)?;
        st.serialize_field("re", &re)?;
        st.serialize_field("im", &im)?;
        st.end()
    }
}

fn cadd(a: &CValue, b: &CValue) -> CValue {
    let p = a.prec().min(b.prec());
    CValue::new(Float::with_val(p, &a.re + &b.re), Float::with_val(p, &a.im + &b.im))
}

fn csub(a: &CValue, b: &CValue) -> CValue {
    let p = a.prec().min(b.prec());
    CValue::new(Float::with_val(p, &a.re - &b.re), Float::with_val(p, &a.im - &b.im))
}

fn cmul(a: &CValue, b: &CValue) -> CValue {
    let p = a.prec().min(b.prec());
    if a.im.is_zero() && b.im.is_zero() {
        return CValue::real(Float::with_val(p, &a.re * &b.re));
    }
    let re = Float::with_val(p, &a.re * &b.re) - Float::with_val(p, &a.im * &b.im);
    let im = Float::with_val(p, &a.re * &b.im) + Float::with_val(p, &a.im * &b.re);
    CValue::new(re, im)
}

fn cdiv(a: &CValue, b: &CValue) -> CValue {
    let p = a.prec().min(b.prec());
    if b.im.is_zero() {
        return CValue::new(Float::with_val(p, &a.re / &b.re), Float::with_val(p, &a.im / &b.re));
    }
    let den = Float::with_val(p, b.re.square_ref()) + Float::with_val(p, b.im.square_ref());
    let re = Float::with_val(p, &a.re * &b.re) + Float::with_val(p, &a.im * &b.im);
    let im = Float::with_val(p, &a.im * &b.re) - Float::with_val(p, &a.re * &b.im);
    CValue::new(re / &den, im / &den)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&CValue> for &CValue {
            type Output = CValue;
            fn $m(self, rhs: &CValue) -> CValue {
                $f(self, rhs)
            }
        }
        impl $tr<CValue> for CValue {
            type Output = CValue;
            fn $m(self, rhs: CValue) -> CValue {
                $f(&self, &rhs)
            }
        }
        impl $tr<&CValue> for CValue {
            type Output = CValue;
            fn $m(self, rhs: &CValue) -> CValue {
                $f(&self, rhs)
            }
        }
        impl $tr<CValue> for &CValue {
            type Output = CValue;
            fn $m(self, rhs: CValue) -> CValue {
                $f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, cadd);
binop!(Sub, sub, csub);
binop!(Mul, mul, cmul);
binop!(Div, div, cdiv);

impl AddAssign<&CValue> for CValue {
    fn add_assign(&mut self, rhs: &CValue) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign<CValue> for CValue {
    fn add_assign(&mut self, rhs: CValue) {
        *self += &rhs;
    }
}

impl SubAssign<&CValue> for CValue {
    fn sub_assign(&mut self, rhs: &CValue) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&CValue> for CValue {
    fn mul_assign(&mut self, rhs: &CValue) {
        *self = cmul(self, rhs);
    }
}

impl Neg for CValue {
    type Output = CValue;
    fn neg(self) -> CValue {
        CValue::new(-self.re, -self.im)
    }
}

impl Neg for &CValue {
    type Output = CValue;
    fn neg(self) -> CValue {
        CValue::new(Float::with_val(self.re.prec(), -&self.re), Float::with_val(self.im.prec(), -&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let p = 100;
        assert_eq!(CValue::parse("2", p).unwrap().to_f64_pair(), (2.0, 0.0));
        assert_eq!(CValue::parse("1.5+2i", p).unwrap().to_f64_pair(), (1.5, 2.0));
        assert_eq!(CValue::parse("3-0.25i", p).unwrap().to_f64_pair(), (3.0, -0.25));
        assert_eq!(CValue::parse("-2i", p).unwrap().to_f64_pair(), (0.0, -2.0));
        assert_eq!(CValue::parse("1e-3+1e+2i", p).unwrap().to_f64_pair(), (1e-3, 100.0));
        assert!(CValue::parse("abc", p).is_err());
    }

    #[test]
    fn field_ops() {
        let p = 128;
        let a = CValue::parse("1+2i", p).unwrap();
        let b = CValue::parse("3-1i", p).unwrap();
        let back = (&a * &b) / &b;
        assert!((back - &a).abs_f64() < 1e-35);
        assert_eq!((&a + &b).to_f64_pair(), (4.0, 1.0));
        assert_eq!(a.powi(2).to_f64_pair(), (-3.0, 4.0));
    }

    #[test]
    fn exp_ln_roundtrip() {
        let p = 160;
        let z = CValue::parse("-0.3+2.5i", p).unwrap();
        let w = z.ln().exp();
        assert!((w - &z).abs_f64() < 1e-40);
    }

    #[test]
    fn exact_integer_detection() {
        assert_eq!(CValue::from_i64(-4, 64).as_exact_integer(), Some(-4));
        assert_eq!(CValue::parse("2+1i", 64).unwrap().as_exact_integer(), None);
        assert_eq!(CValue::parse("2.5", 64).unwrap().as_exact_integer(), None);
    }
}
