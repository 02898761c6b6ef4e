//! Elementary building blocks: the deformation parameter, q-brackets, complex
//! powers of q, generalized binomials, Pochhammer symbols and Bernoulli data.

use std::sync::RwLock;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{digits_to_bits, CValue};

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 40;

/// The deformation parameter `0 < q < 1` together with `log q` and the working precision.
#[derive(Clone, Debug)]
pub struct QParam {
    q: Float,
    log_q: Float,
    digits: u32,
}

impl QParam {
    /// Builds from an arbitrary-precision value, rounding it to `digits` of working precision.
    pub fn new(q: &Float, digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::Domain("precision must be positive".into()));
        }
        let bits = digits_to_bits(digits);
        let q = Float::with_val(bits, q);
        if !(q > 0 && q < 1) {
            return Err(Error::Domain(format!("q must lie in (0,1), got {}", q.to_f64())));
        }
        let log_q = Float::with_val(bits, q.ln_ref());
        Ok(QParam { q, log_q, digits })
    }

    /// Parses a decimal string such as `"0.7"` (exact to working precision).
    pub fn parse(text: &str, digits: u32) -> Result<Self> {
        let v = Float::parse(text.trim()).map_err(|_| Error::Domain(format!("cannot parse q '{text}'")))?;
        Self::new(&Float::with_val(digits_to_bits(digits), v), digits)
    }

    pub fn from_f64(q: f64, digits: u32) -> Result<Self> {
        Self::new(&Float::with_val(64, q), digits)
    }

    /// Same `q`, different working precision.
    pub fn with_digits(&self, digits: u32) -> Result<Self> {
        Self::new(&self.q, digits)
    }

    pub fn q(&self) -> &Float {
        &self.q
    }

    pub fn log_q(&self) -> &Float {
        &self.log_q
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Working precision in bits.
    pub fn prec(&self) -> u32 {
        self.q.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.q.to_f64()
    }

    pub fn q_c(&self) -> CValue {
        CValue::real(self.q.clone())
    }

    pub fn one_minus_q(&self) -> Float {
        Float::with_val(self.prec(), 1 - &self.q)
    }

    /// `q^n` for integer `n`.
    pub fn powi(&self, n: i64) -> Float {
        Float::with_val(self.prec(), (&self.q).pow(n as i32))
    }

    pub fn f(&self, n: i64) -> Float {
        Float::with_val(self.prec(), n)
    }

    pub fn c(&self, n: i64) -> CValue {
        CValue::from_i64(n, self.prec())
    }

    /// Spacing `2π/|log q|` of the imaginary pole lattice.
    pub fn lattice_spacing(&self) -> Float {
        let p = self.prec();
        let two_pi = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
        two_pi / Float::with_val(p, self.log_q.abs_ref())
    }
}

/// A value together with how it was obtained.
#[derive(Clone, Debug, Serialize)]
pub struct EvalResult {
    pub value: CValue,
    /// Absolute error estimate (heuristic tail bound unless stated otherwise).
    pub error_bound: f64,
    pub terms_used: usize,
    /// Whether the per-level term cap was hit before the tolerance was met.
    pub truncated: bool,
}

impl EvalResult {
    pub fn exact(value: CValue) -> Self {
        EvalResult {
            value,
            error_bound: 0.0,
            terms_used: 0,
            truncated: false,
        }
    }
}

/// `[k]_q = (1 - q^k)/(1 - q)`.
pub fn qbracket(k: u64, qp: &QParam) -> Float {
    let p = qp.prec();
    let qk = Float::with_val(p, qp.q().pow(k));
    Float::with_val(p, 1 - qk) / qp.one_minus_q()
}

/// `q^s = exp(s log q)`.
pub fn qpow(qp: &QParam, s: &CValue) -> CValue {
    if let Some(n) = s.as_exact_integer() {
        if n.unsigned_abs() < (1 << 20) {
            return CValue::real(qp.powi(n));
        }
    }
    s.scale(qp.log_q()).exp()
}

/// `C(s+r-1, r) = s(s+1)...(s+r-1)/r!`.
pub fn gen_binomial(s: &CValue, r: u32) -> CValue {
    let p = s.prec();
    let mut acc = CValue::one(p);
    for i in 0..r {
        let f = s + CValue::from_i64(i as i64, p);
        acc = (&acc * &f).scale(&Float::with_val(p, Rational::from((1, i + 1))));
    }
    acc
}

/// Rising factorial with the conventions `(s)_0 = 1`, `(s)_{-1} = 1/(s-1)`.
pub fn pochhammer(s: &CValue, r: i32) -> Result<CValue> {
    let p = s.prec();
    match r {
        r if r < -1 => Err(Error::Domain(format!("pochhammer index {r} < -1"))),
        -1 => {
            let d = s - CValue::one(p);
            if d.is_zero() {
                return Err(Error::pole("(s)_{-1} = 1/(s-1) at s = 1"));
            }
            Ok(d.recip())
        }
        _ => {
            let mut acc = CValue::one(p);
            for i in 0..r {
                acc = &acc * (s + CValue::from_i64(i as i64, p));
            }
            Ok(acc)
        }
    }
}

/// Exact binomial coefficient `C(n, k)` (zero outside `0 <= k <= n`).
pub fn binom(n: i64, k: i64) -> Integer {
    if k < 0 || n < 0 || k > n {
        return Integer::new();
    }
    Integer::from(n as u32).binomial(k as u32)
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

static BERNOULLI: RwLock<Vec<Rational>> = RwLock::new(Vec::new());

/// Exact Bernoulli number with `B_1 = -1/2`.
pub fn bernoulli(k: usize) -> Rational {
    if let Some(b) = BERNOULLI.read().unwrap().get(k) {
        return b.clone();
    }
    let mut table = BERNOULLI.write().unwrap();
    while table.len() <= k {
        let m = table.len();
        if m == 0 {
            table.push(Rational::from(1));
            continue;
        }
        if m > 1 && m % 2 == 1 {
            table.push(Rational::new());
            continue;
        }
        // sum_{j<=m} C(m+1, j) B_j = 0
        let mut acc = Rational::new();
        for (j, b) in table.iter().enumerate() {
            acc += Rational::from(binom(m as i64 + 1, j as i64)) * b;
        }
        table.push(-acc / Integer::from(m + 1));
    }
    table[k].clone()
}

/// `B_k(1)`: identical to `bernoulli(k)` except `B_1(1) = +1/2`.
pub fn bernoulli_at_one(k: usize) -> Rational {
    if k == 1 {
        Rational::from((1, 2))
    } else {
        bernoulli(k)
    }
}

/// Coefficients of `B_M(t) = sum_j C(M,j) B_j t^{M-j}`, lowest degree first.
pub fn bernoulli_poly(m: usize) -> Vec<Rational> {
    let mut c = vec![Rational::new(); m + 1];
    for j in 0..=m {
        c[m - j] = Rational::from(binom(m as i64, j as i64)) * bernoulli(j);
    }
    c
}

/// Horner evaluation of a rational-coefficient polynomial at a real point.
pub fn eval_rational_poly(coeffs: &[Rational], x: &Float) -> Float {
    let p = x.prec();
    let mut acc = Float::new(p);
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += Float::with_val(p, c);
    }
    acc
}

/// `B~_M(x) = B_M({x})`, the periodic Bernoulli function.
pub fn periodic_bernoulli(m: usize, x: &Float) -> Result<Float> {
    if m < 2 {
        return Err(Error::Domain(format!("periodic Bernoulli order {m} < 2")));
    }
    let p = x.prec();
    let frac = Float::with_val(p, x - Float::with_val(p, x.floor_ref()));
    Ok(eval_rational_poly(&bernoulli_poly(m), &frac))
}

/// The uniform bound `4 M!/(2π)^M` on `|B~_M|`.
pub fn periodic_bernoulli_bound(m: usize, prec: u32) -> Float {
    let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
    Float::with_val(prec, factorial(m as u32)) * 4u32 / two_pi.pow(m as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: &str) -> QParam {
        QParam::parse(x, 40).unwrap()
    }

    #[test]
    fn qparam_rejects_endpoints() {
        assert!(QParam::parse("0", 30).is_err());
        assert!(QParam::parse("1", 30).is_err());
        assert!(QParam::parse("1.5", 30).is_err());
        let qp = q("0.7");
        let back = Float::with_val(qp.prec(), qp.log_q().exp_ref());
        assert!(Float::with_val(qp.prec(), back - qp.q()).abs() < 1e-39);
    }

    #[test]
    fn brackets() {
        assert_eq!(qbracket(1, &q("0.3")), 1);
        assert_eq!(qbracket(3, &q("0.5")), 1.75);
    }

    #[test]
    fn qpow_values() {
        let qp = q("0.6");
        assert_eq!(qpow(&qp, &qp.c(0)).to_f64_pair(), (1.0, 0.0));
        let one = qpow(&qp, &qp.c(1));
        assert!((one - qp.q_c()).abs_f64() < 1e-45);
        let qe = QParam::new(&Float::with_val(200, -1).exp(), 40).unwrap();
        let v = qpow(&qe, &CValue::parse("1i", qe.prec()).unwrap());
        assert!((v.re.to_f64() - 1f64.cos()).abs() < 1e-15);
        assert!((v.im.to_f64() + 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn binomials_and_pochhammer() {
        let p = 128;
        assert_eq!(gen_binomial(&CValue::from_i64(7, p), 0).to_f64_pair(), (1.0, 0.0));
        assert_eq!(gen_binomial(&CValue::from_i64(1, p), 5).to_f64_pair(), (1.0, 0.0));
        assert_eq!(gen_binomial(&CValue::from_i64(2, p), 3).to_f64_pair(), (4.0, 0.0));
        assert_eq!(pochhammer(&CValue::from_i64(3, p), 2).unwrap().to_f64_pair(), (12.0, 0.0));
        assert_eq!(pochhammer(&CValue::from_i64(2, p), -1).unwrap().to_f64_pair(), (1.0, 0.0));
        assert!(pochhammer(&CValue::from_i64(1, p), -1).is_err());
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(0), 1);
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(3), 0);
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli_at_one(1), Rational::from((1, 2)));
    }

    #[test]
    fn periodic_bernoulli_values() {
        let p = 128;
        let a = periodic_bernoulli(2, &Float::with_val(p, 2.5)).unwrap();
        let b = periodic_bernoulli(2, &Float::with_val(p, 1.5)).unwrap();
        assert_eq!(a, b);
        assert!((b.to_f64() + 1.0 / 12.0).abs() < 1e-30);
        let c = periodic_bernoulli(4, &Float::with_val(p, 3.37)).unwrap();
        assert!(c.abs() <= periodic_bernoulli_bound(4, p));
    }
}
