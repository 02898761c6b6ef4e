//! Closed forms for residues and indeterminate values of ζ_q at
//! non-positive integer lattice points, and their q↑1 targets.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::continuation::LimitOrder;
use crate::error::{Error, Result};
use crate::num::CValue;
use crate::qcore::{bernoulli, binom, factorial, QParam};

fn fl(qp: &QParam, x: impl Into<Rational>) -> Float {
    Float::with_val(qp.prec(), &x.into())
}

fn int(qp: &QParam, x: &Integer) -> Float {
    Float::with_val(qp.prec(), x)
}

/// `1/(q^e - 1)`
fn inv_qm1(qp: &QParam, e: i64) -> Float {
    Float::with_val(qp.prec(), 1) / (qp.powi(e) - 1u32)
}

fn sign(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `Σ_{r=0}^n (-1)^r C(n,r)/(q^{n+1-r}-1) - (-1)^n/((n+1) log q)`
fn zneg_bracket(n: u32, qp: &QParam) -> Float {
    let p = qp.prec();
    let n = n as i64;
    let mut acc = Float::new(p);
    for r in 0..=n {
        acc += int(qp, &binom(n, r)) * inv_qm1(qp, n + 1 - r) * sign(r);
    }
    acc -= Float::with_val(p, 1) / Float::with_val(p, qp.log_q() * (n + 1)) * sign(n);
    acc
}

/// ζ_q(-n) in closed form.
pub fn qzeta_neg_closed(n: u32, qp: &QParam) -> CValue {
    let pre = Float::with_val(qp.prec(), qp.one_minus_q().pow(-(n as i32)));
    CValue::real(pre * zneg_bracket(n, qp))
}

/// Residue of ζ_q at `(n+2-k, -n)` for `k ≤ n+1`.
pub fn res_closed(k: u32, n: u32, qp: &QParam) -> Result<CValue> {
    if k > n + 1 {
        return Err(Error::Domain(format!("res_closed needs k ≤ n+1 (got k={k}, n={n})")));
    }
    let p = qp.prec();
    let bracket = if k == n + 1 {
        zneg_bracket(n, qp)
    } else {
        let (k, n) = (k as i64, n as i64);
        let mut acc = Float::new(p);
        for r in 0..=k {
            let c = binom(n + 1 - r, k - r) * binom(n, r);
            acc += int(qp, &c) * inv_qm1(qp, n + 1 - r) * sign(r);
        }
        acc
    };
    let pre = Float::with_val(p, qp.one_minus_q().pow(2 - k as i32)) / qp.log_q();
    Ok(CValue::real(-(pre * bracket)))
}

/// `P_1(q, m) = 1 + q + ... + q^m`
fn p1(qp: &QParam, m: i64) -> Float {
    let mut acc = Float::new(qp.prec());
    for j in 0..=m {
        acc += qp.powi(j);
    }
    acc
}

/// The factored form of the residue at `(4, -4)`:
/// `-2q³(3q²+4q+3)(q-1) / (log q · P_1(q,2) P_1(q,3) P_1(q,4))`.
pub fn res_2_4_factored(qp: &QParam) -> CValue {
    let p = qp.prec();
    let q = qp.q();
    let poly = Float::with_val(p, qp.powi(2) * 3u32) + Float::with_val(p, q * 4u32) + 3u32;
    let num = Float::with_val(p, qp.powi(3) * -2i32) * poly * Float::with_val(p, q - 1u32);
    let den = Float::with_val(p, qp.log_q() * p1(qp, 2)) * p1(qp, 3) * p1(qp, 4);
    CValue::real(num / den)
}

/// q↑1 limit of [`res_closed`] for `k ≤ n`.
pub fn res_limit_target(k: u32, n: u32) -> Result<Rational> {
    if k > n {
        return Err(Error::Domain(format!("res_limit_target needs k ≤ n (got k={k}, n={n})")));
    }
    if k == 0 {
        return Ok(Rational::from((-1, n as i64 + 1)));
    }
    let s = sign(1 - k as i64);
    Ok(Rational::from(s) * bernoulli(k as usize) / Rational::from(k) * Rational::from(binom(n as i64, k as i64 - 1)))
}

/// ζ_q(-m,-n) (`S2First`) or ζ_q^R(-m,-n) (`S1First`) in closed form.
pub fn kgen2_value(m: u32, n: u32, order: LimitOrder, qp: &QParam) -> CValue {
    let p = qp.prec();
    let (mi, ni) = (m as i64, n as i64);
    let k = mi + ni + 2;
    let l = qp.log_q().clone();
    let mut acc = Float::new(p);
    // Σ_{r ≤ m} (-1)^{r+n+1}/((n+1) L) C(m,r)/(q^{m+1-r}-1): common to both orders
    for r in 0..=mi {
        let t = int(qp, &binom(mi, r)) * inv_qm1(qp, mi + 1 - r) / Float::with_val(p, &l * (ni + 1));
        acc += t * sign(r + ni + 1);
    }
    match order {
        LimitOrder::S2First => {
            let l2 = Float::with_val(p, l.square_ref());
            acc += Float::with_val(p, 1) / (l2 * ((mi + 1) * (ni + 1))) * sign(k);
            for r in 0..=ni {
                let f = Rational::from(factorial(m) * factorial((ni + 1 - r) as u32)) / Rational::from(factorial((k - r) as u32));
                let t = fl(qp, f) * int(qp, &binom(ni, r)) * inv_qm1(qp, ni + 1 - r) / &l;
                acc += t * sign(r + mi + 1);
            }
        }
        LimitOrder::S1First => {
            for r in 0..=mi {
                let f = Rational::from(factorial(n) * factorial((mi + 1 - r) as u32)) / Rational::from(factorial((k - r) as u32));
                let e = mi + 1 - r;
                let t = fl(qp, f) * int(qp, &binom(k - ni - 2, r)) * qp.powi(e) * inv_qm1(qp, e) / &l;
                acc += t * sign(r + ni);
            }
        }
    }
    for r1 in 0..=mi {
        for r2 in 0..=ni {
            let c = binom(mi, r1) * binom(ni, r2);
            let t = int(qp, &c) * inv_qm1(qp, ni + 1 - r2) * inv_qm1(qp, k - r1 - r2);
            acc += t * sign(r1 + r2);
        }
    }
    let pre = Float::with_val(p, qp.one_minus_q().pow(2 - k as i32));
    CValue::real(pre * acc)
}

/// The two corner values at (0,0): `1/((q²-1)(q-1)) - 3/(2(q-1)L) + 1/L²` and
/// `1/((q²-1)(q-1)) - 1/((q-1)L) + q/(2(q-1)L)`.
pub fn corner_display(order: LimitOrder, qp: &QParam) -> CValue {
    let p = qp.prec();
    let l = qp.log_q();
    let qm1 = Float::with_val(p, qp.q() - 1u32);
    let head = Float::with_val(p, 1) / (Float::with_val(p, qp.powi(2) - 1u32) * &qm1);
    let v = match order {
        LimitOrder::S2First => {
            head - Float::with_val(p, 3) / (Float::with_val(p, &qm1 * l) * 2u32) + Float::with_val(p, 1) / Float::with_val(p, l.square_ref())
        }
        LimitOrder::S1First => {
            head - Float::with_val(p, 1) / Float::with_val(p, &qm1 * l)
                + Float::with_val(p, qp.q()) / (Float::with_val(p, &qm1 * l) * 2u32)
        }
    };
    CValue::real(v)
}

/// Residue of ζ_q at `(-3, 2)` (in the last variable): `q(q-1)²/((q+1)(q²+1)(q²+q+1) log q)`,
/// i.e. `-res_closed(3, 3)`.
pub fn res_neg3_2(qp: &QParam) -> CValue {
    let p = qp.prec();
    let q = qp.q();
    let qm1 = Float::with_val(p, q - 1u32);
    let num = Float::with_val(p, qm1.square_ref()) * q;
    let q2 = qp.powi(2);
    let den = Float::with_val(p, q + 1u32)
        * Float::with_val(p, &q2 + 1u32)
        * (Float::with_val(p, &q2 + q) + 1u32)
        * qp.log_q();
    CValue::real(num / den)
}
