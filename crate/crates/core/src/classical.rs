//! Classical (q = 1) oracles: Riemann and Euler–Zagier multiple zeta values by
//! Euler–Maclaurin summation, exact double-zeta values at non-positive
//! integers and the pole/indeterminacy table of ζ(s_1, s_2).

use std::fmt;

use rug::{Float, Rational};
use serde::{Serialize, Serializer};

use crate::continuation::LimitOrder;
use crate::error::{Error, Result};
use crate::num::{bits_to_digits, real_pow, ten_pow_neg, CValue};
use crate::qcore::{
    bernoulli, bernoulli_at_one, bernoulli_poly, binom, factorial, periodic_bernoulli_bound, pochhammer, EvalResult,
};
use crate::quadrature::GaussLegendre;
use crate::qseries::SVec;

const EXTRA_BITS: u32 = 64;

/// Default Euler–Maclaurin order for a depth-d argument.
pub fn default_em_order(s: &SVec) -> u32 {
    let e = s.entries();
    let d = e.len();
    let mut need = e[d - 1].re.to_f64().abs();
    if d >= 2 {
        need += e[d - 2].re.to_f64().abs();
    }
    20u32.max(need.ceil() as u32 + 4)
}

/// Tail integrals `J(n) = ∫_n^{n+1} B~_{M+1}(x) x^{-s-M-1} dx`.
struct Tail {
    m: u32,
    expo: CValue,
    bpoly: Vec<Float>,
    rule: GaussLegendre,
    prec: u32,
}

impl Tail {
    fn new(s: &CValue, m: u32, prec: u32) -> Self {
        let expo = -(s + CValue::from_i64(m as i64 + 1, prec));
        let bpoly = bernoulli_poly(m as usize + 1)
            .iter()
            .map(|c| Float::with_val(prec, c))
            .collect();
        Tail {
            m,
            expo,
            bpoly,
            rule: GaussLegendre::new(m as usize + 4, prec),
            prec,
        }
    }

    fn bern(&self, t: &Float) -> Float {
        let mut acc = Float::new(self.prec);
        for c in self.bpoly.iter().rev() {
            acc *= t;
            acc += c;
        }
        acc
    }

    fn interval(&self, n: u64) -> CValue {
        let p = self.prec;
        let n_f = Float::with_val(p, n);
        let end = Float::with_val(p, n + 1);
        let mut acc = CValue::zero(p);
        let mut a = n_f.clone();
        // geometric pieces keep (b - a)/a ≤ 1/4, so x^{-s-M-1} is well resolved
        while a < end {
            let b = Float::with_val(p, &a * 1.25f64).min(&end);
            for (x, w) in self.rule.on_interval(&a, &b) {
                let t = Float::with_val(p, &x - &n_f);
                let f = real_pow(&x, &self.expo).scale(&Float::with_val(p, self.bern(&t) * w));
                acc += f;
            }
            a = b;
        }
        acc
    }

    /// `Σ_{n ≥ start} J(n) w(n)`, stopped once the remaining tail is below `tol`.
    fn sum(&self, start: u64, sigma: f64, tol: f64, mut weight: impl FnMut(u64) -> CValue) -> (CValue, f64, usize) {
        let mut acc = CValue::zero(self.prec);
        let decay = sigma + self.m as f64;
        let bound = periodic_bernoulli_bound(self.m as usize + 1, 53).to_f64();
        let mut n = start;
        let mut count = 0usize;
        loop {
            let w = weight(n);
            let term = &self.interval(n) * &w;
            acc += &term;
            count += 1;
            let next = (n + 1) as f64;
            // |J(n')| ≤ bound · n'^{-σ-M-1}; sum of the rest by the integral test
            let rest = bound * w.abs_f64().max(1.0) * next.powf(-decay) / decay.max(1e-3);
            if (decay > 0.5 && rest < tol) || count > 200_000 {
                return (acc, rest, count);
            }
            n += 1;
        }
    }
}

fn check_em_order(s_last: &CValue, s_prev: Option<&CValue>, m: u32) -> Result<()> {
    let mut need = 1.0 + s_last.re.to_f64().abs();
    if let Some(x) = s_prev {
        need += x.re.to_f64().abs();
    }
    if (m as f64) <= need {
        return Err(Error::Domain(format!("Euler–Maclaurin order M = {m} must exceed {need:.2}")));
    }
    Ok(())
}

fn raise(x: &CValue, prec: u32) -> CValue {
    CValue::new(Float::with_val(prec, &x.re), Float::with_val(prec, &x.im))
}

fn rational_factor(b: &Rational, r: u32, prec: u32) -> Float {
    Float::with_val(prec, b) / Float::with_val(prec, factorial(r))
}

/// ζ(s) by Euler–Maclaurin summation of order `m` with the cutoff `K = max(10, ⌈|Im s|⌉ + digits)`.
pub fn riemann_zeta(s: &CValue, m: u32) -> Result<EvalResult> {
    let out = s.prec();
    let p = out + EXTRA_BITS;
    let s = raise(s, p);
    if (&s - CValue::one(p)).is_zero() {
        return Err(Error::pole("ζ(s) has a pole at s = 1"));
    }
    check_em_order(&s, None, m)?;
    let digits = bits_to_digits(out);
    let tol = 10f64.powi(-(digits as i32));
    let k = 10u64.max(s.im.to_f64().abs().ceil() as u64 + digits as u64);
    let neg_s = -s.clone();
    let mut acc = CValue::zero(p);
    for j in 1..k {
        acc += real_pow(&Float::with_val(p, j), &neg_s);
    }
    let kf = Float::with_val(p, k);
    // Σ_{r=0}^{M+1} B_r/r! (s)_{r-1} K^{1-s-r}, B_1 = -1/2 (with the sign flip for the k ≥ K sum)
    for r in 0..=m + 1 {
        let b = bernoulli(r as usize);
        if b == 0 {
            continue;
        }
        let coef = if r == 1 { Float::with_val(p, 0.5) } else { rational_factor(&b, r, p) };
        let poch = pochhammer(&s, r as i32 - 1)?;
        let kp = real_pow(&kf, &(CValue::from_i64(1 - r as i64, p) - &s));
        acc += (&poch * &kp).scale(&coef);
    }
    let (tail, rest, count) = tail_term(&s, m, k, p, tol, |_| CValue::one(p))?;
    acc -= &tail;
    Ok(EvalResult {
        value: raise(&acc, out),
        error_bound: rest + tol * 1e-3,
        terms_used: k as usize + count,
        truncated: false,
    })
}

/// `(s)_{M+1}/(M+1)! Σ_{n ≥ start} J(n) w(n)`.
fn tail_term(
    s: &CValue,
    m: u32,
    start: u64,
    p: u32,
    tol: f64,
    weight: impl FnMut(u64) -> CValue,
) -> Result<(CValue, f64, usize)> {
    let tail = Tail::new(s, m, p);
    let pre = pochhammer(s, m as i32 + 1)?.scale(&rational_factor(&Rational::from(1), m + 1, p));
    let scale = pre.abs_f64().max(1e-300);
    let (sum, rest, count) = tail.sum(start, s.re.to_f64(), tol / scale, weight);
    Ok((&pre * &sum, rest * scale, count))
}

/// Membership in the classical singular set: `s_d = 1` or `s_j + ... + s_d ∈ ℤ_{≤ d-j+1}` for `j < d`.
pub fn in_classical_pole_set(s: &SVec) -> Option<String> {
    let e = s.entries();
    let d = e.len();
    let p = e[0].prec();
    let thr = ten_pow_neg(p, bits_to_digits(p) as f64 / 2.0);
    if Float::with_val(p, &e[d - 1].re - 1u32).abs() < thr && Float::with_val(p, e[d - 1].im.abs_ref()) < thr {
        return Some(format!("s_{d} = 1"));
    }
    for (j, t) in s.tail_sums().iter().enumerate().take(d - 1) {
        let r = t.re.to_f64().round();
        let bound = (d - j) as f64;
        if r <= bound
            && Float::with_val(p, &t.re - r).abs() < thr
            && Float::with_val(p, t.im.abs_ref()) < thr
        {
            return Some(format!("s_{} + ... + s_{d} = {r}", j + 1));
        }
    }
    None
}

/// Euler–Zagier ζ(s_1, ..., s_d) through the Euler–Maclaurin recursion on the last variable.
pub fn mzv(s: &SVec, m: u32) -> Result<EvalResult> {
    if let Some(why) = in_classical_pole_set(s) {
        return Err(Error::pole(format!("ζ(s) is singular here: {why}")));
    }
    let out = s.entries()[0].prec();
    let digits = bits_to_digits(out);
    let tol = 10f64.powi(-(digits as i32));
    let p = out + EXTRA_BITS;
    let e: Vec<CValue> = s.entries().iter().map(|x| raise(x, p)).collect();
    let r = mzv_raw(&e, m, tol)?;
    Ok(EvalResult {
        value: raise(&r.value, out),
        ..r
    })
}

fn mzv_raw(e: &[CValue], m: u32, tol: f64) -> Result<EvalResult> {
    let d = e.len();
    if d == 1 {
        return riemann_zeta(&e[0], m).map(|mut r| {
            r.value = raise(&r.value, e[0].prec());
            r
        });
    }
    let p = e[0].prec();
    let sd = &e[d - 1];
    check_em_order(sd, Some(&e[d - 2]), m)?;
    let mut acc = CValue::zero(p);
    let mut err = 0.0;
    let mut terms = 0;
    for r in 0..=m + 1 {
        let b = bernoulli(r as usize);
        if b == 0 {
            continue;
        }
        let coef = rational_factor(&b, r, p);
        let poch = pochhammer(sd, r as i32 - 1)?;
        let mut merged = e[..d - 1].to_vec();
        merged[d - 2] = &merged[d - 2] + sd + CValue::from_i64(r as i64 - 1, p);
        let need = 2 + merged[d - 2].re.to_f64().abs().ceil() as u32 + if d > 2 { merged[d - 3].re.to_f64().abs().ceil() as u32 } else { 0 };
        let inner = mzv_raw(&merged, m.max(need), tol * 1e-3)?;
        err += inner.error_bound * poch.abs_f64() * coef.to_f64().abs();
        terms += inner.terms_used;
        acc += (&poch * &inner.value).scale(&coef);
    }
    // nested prefix sums G_j(n) = Σ_{k_1<...<k_j ≤ n} Π k^{-s}
    let heads: Vec<CValue> = e[..d - 1].iter().map(|x| -x.clone()).collect();
    let mut g = vec![CValue::zero(p); d];
    g[0] = CValue::one(p);
    let mut upto = 0u64;
    let weight = |n: u64| {
        while upto < n {
            upto += 1;
            let nf = Float::with_val(p, upto);
            for j in (1..d).rev() {
                let t = &g[j - 1] * real_pow(&nf, &heads[j - 1]);
                g[j] += t;
            }
        }
        g[d - 1].clone()
    };
    let (tail, rest, count) = tail_term(sd, m, 1, p, tol, weight)?;
    acc -= &tail;
    Ok(EvalResult {
        value: acc,
        error_bound: err + rest,
        terms_used: terms + count,
        truncated: false,
    })
}

/// ζ(-n) = -B_{n+1}(1)/(n+1), so ζ(0) = -1/2.
pub fn zeta_nonpositive(n: u32) -> Rational {
    -bernoulli_at_one(n as usize + 1) / Rational::from(n + 1)
}

/// Exact ζ(-m,-n) (order `S2First`) or ζ^R(-m,-n) (`S1First`), with `B_r = B_r(1)`.
pub fn dbzeta_neg(m: u32, n: u32, order: LimitOrder) -> Rational {
    let k = (m + n + 2) as i64;
    let bk = bernoulli_at_one(k as usize);
    let mut v = Rational::from(&bk / Rational::from(k * (n as i64 + 1)));
    for r in 1..=(n as i64 + 1) {
        let a = bernoulli_at_one(r as usize) / Rational::from(r);
        let b = bernoulli_at_one((k - r) as usize) / Rational::from(k - r);
        v += a * Rational::from(binom(n as i64, r - 1)) * b;
    }
    if order == LimitOrder::S1First {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let num = Rational::from(factorial(n) * factorial((k - n as i64 - 2) as u32));
        v += Rational::from(sign) * bk / Rational::from(factorial(k as u32)) * num;
    }
    v
}

/// Exact number `Σ_i c_i π^{2i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiPoly(pub Vec<Rational>);

impl PiPoly {
    pub fn rational(r: Rational) -> Self {
        PiPoly(vec![r])
    }

    /// ζ(2j) = (-1)^{j+1} B_{2j} (2π)^{2j} / (2 (2j)!)
    pub fn zeta_even(j: u32) -> Self {
        let b = bernoulli(2 * j as usize);
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let two = Rational::from(rug::Integer::from(1) << (2 * j));
        let c = b * two * Rational::from(sign) / (Rational::from(factorial(2 * j)) * Rational::from(2));
        let mut v = vec![Rational::new(); j as usize + 1];
        v[j as usize] = c;
        PiPoly(v)
    }

    pub fn add_scaled(&mut self, other: &PiPoly, k: &Rational) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), Rational::new());
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += Rational::from(b * k);
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.0.iter().skip(1).all(|c| *c == 0) {
            self.0.first()
        } else {
            None
        }
    }

    pub fn to_float(&self, prec: u32) -> Float {
        let pi2 = Float::with_val(prec, rug::float::Constant::Pi).square();
        let mut acc = Float::new(prec);
        for c in self.0.iter().rev() {
            acc *= &pi2;
            acc += Float::with_val(prec, c);
        }
        acc
    }
}

impl fmt::Display for PiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if *c == 0 && !(i == 0 && self.0.iter().all(|x| *x == 0)) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*pi^2")?,
                _ => write!(f, "({c})*pi^{}", 2 * i)?,
            }
        }
        Ok(())
    }
}

impl Serialize for PiPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

fn ser_rational<S: Serializer>(r: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&r.to_string())
}

/// Behaviour of ζ(s_1, s_2) at `(n+2-k, -n)`.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TableEntry {
    /// Pole with the given residue.
    Pole {
        #[serde(serialize_with = "ser_rational")]
        residue: Rational,
    },
    /// Regular in the sense that both iterated limits agree.
    Indeterminacy { value: PiPoly },
    /// `k` even, `m ≥ 0`: the two iterated limits differ.
    Split {
        #[serde(serialize_with = "ser_rational")]
        zeta: Rational,
        #[serde(serialize_with = "ser_rational")]
        zeta_r: Rational,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub k: u32,
    pub n: u32,
    /// The point `(n+2-k, -n)`.
    pub point: (i64, i64),
    pub entry: TableEntry,
}

/// Row of the pole/indeterminacy table of the classical double zeta function.
pub fn dbzeta_table(k: u32, n: u32) -> Result<TableRow> {
    let point = (n as i64 + 2 - k as i64, -(n as i64));
    let entry = if k == 0 {
        TableEntry::Pole {
            residue: Rational::from((-1, n as i64 + 1)),
        }
    } else if k == 1 {
        TableEntry::Pole {
            residue: Rational::from((-1, 2)),
        }
    } else if k % 2 == 0 && k <= n + 1 {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        TableEntry::Pole {
            residue: Rational::from(sign) * bernoulli(k as usize) / Rational::from(k)
                * Rational::from(binom(n as i64, k as i64 - 1)),
        }
    } else if k % 2 == 0 {
        TableEntry::Split {
            zeta: dbzeta_neg(k - n - 2, n, LimitOrder::S2First),
            zeta_r: dbzeta_neg(k - n - 2, n, LimitOrder::S1First),
        }
    } else if k <= n + 1 {
        let b = bernoulli(k as usize - 1) / Rational::from(2 * (k - 1));
        let mut v = PiPoly::rational(b);
        for r in (k - 1)..=(n + 1) {
            let br = bernoulli(r as usize);
            if br == 0 {
                continue;
            }
            let c = br / Rational::from(r) * Rational::from(binom(n as i64, r as i64 - 1));
            let arg = r as i64 + 1 - k as i64;
            let z = if arg <= 0 {
                PiPoly::rational(zeta_nonpositive((-arg) as u32))
            } else {
                // arg is even here since r is even and k odd
                PiPoly::zeta_even((arg / 2) as u32)
            };
            v.add_scaled(&z, &c);
        }
        TableEntry::Indeterminacy { value: v }
    } else if k == n + 2 {
        TableEntry::Indeterminacy {
            value: PiPoly::rational(bernoulli(k as usize - 1) / Rational::from(k - 1)),
        }
    } else {
        TableEntry::Indeterminacy {
            value: PiPoly::rational(bernoulli(k as usize - 1) / Rational::from(2 * (k - 1))),
        }
    };
    Ok(TableRow { k, n, point, entry })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: i64) -> CValue {
        CValue::from_i64(x, 200)
    }

    #[test]
    fn zeta_two_and_negative_values() {
        let z2 = riemann_zeta(&c(2), 22).unwrap();
        let pi = Float::with_val(200, rug::float::Constant::Pi);
        let exact = Float::with_val(200, pi.square_ref()) / 6u32;
        assert!(Float::with_val(200, &z2.value.re - &exact).abs() < 1e-50);
        for n in 0..6u32 {
            let v = riemann_zeta(&c(-(n as i64)), 22).unwrap().value.re;
            let e = Float::with_val(200, &zeta_nonpositive(n));
            assert!(Float::with_val(200, v - e).abs() < 1e-50, "n = {n}");
        }
        assert!(riemann_zeta(&c(1), 22).is_err());
    }

    #[test]
    fn depth_two_reflection() {
        let p = 160;
        let z = |v: &[i64]| mzv(&SVec::from_ints(v, p), 22).unwrap().value;
        let lhs = &z(&[2]) * &z(&[3]);
        let rhs = z(&[2, 3]) + z(&[3, 2]) + z(&[5]);
        assert!((lhs - rhs).abs_f64() < 1e-35);
        assert!(mzv(&SVec::from_ints(&[1, 1], p), 22).is_err());
    }

    #[test]
    fn corner_values() {
        assert_eq!(dbzeta_neg(0, 0, LimitOrder::S2First), Rational::from((1, 3)));
        assert_eq!(dbzeta_neg(0, 0, LimitOrder::S1First), Rational::from((5, 12)));
    }

    #[test]
    fn table_rows() {
        let r = dbzeta_table(0, 4).unwrap();
        assert!(matches!(r.entry, TableEntry::Pole { ref residue } if *residue == Rational::from((-1, 5))));
        let r = dbzeta_table(2, 4).unwrap();
        assert!(matches!(r.entry, TableEntry::Pole { ref residue } if *residue == Rational::from((-1, 3))));
        let r = dbzeta_table(4, 8).unwrap();
        assert!(matches!(r.entry, TableEntry::Pole { ref residue } if *residue == Rational::from((7, 15))));
        // odd rows with m ≥ 0 agree with both iterated limits
        for (k, n) in [(3u32, 1u32), (5, 1), (5, 3), (7, 2)] {
            let TableEntry::Indeterminacy { value } = dbzeta_table(k, n).unwrap().entry else { panic!() };
            let m = k - n - 2;
            assert_eq!(value.as_rational().unwrap(), &dbzeta_neg(m, n, LimitOrder::S2First));
            assert_eq!(value.as_rational().unwrap(), &dbzeta_neg(m, n, LimitOrder::S1First));
        }
        assert_eq!(PiPoly::zeta_even(1).0[1], Rational::from((1, 6)));
    }
}
