//! Direct summation of the convergent q-series: f_q, ζ_q, q-polylogarithms,
//! ξ_q and the T^j series.
//!
//! Nested sums `Σ_{0<k_1<...<k_d} Π a_j(k_j)` are accumulated with running
//! prefix sums: after step `k`, `P_j` holds the depth-`j` sum restricted to
//! `k_j <= k`, so each step costs O(d).

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{real_pow, CValue};
use crate::qcore::{EvalResult, QParam};

/// Argument vector `(s_1, ..., s_d)` of ζ_q / f_q, `d >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SVec(Vec<CValue>);

impl SVec {
    pub fn new(entries: Vec<CValue>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("argument vector must have depth >= 1".into()));
        }
        Ok(SVec(entries))
    }

    pub fn from_ints(ns: &[i64], prec: u32) -> Self {
        SVec(ns.iter().map(|&n| CValue::from_i64(n, prec)).collect())
    }

    /// Comma separated list, each entry real or `re+imi`.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let entries = text
            .split(',')
            .map(|t| CValue::parse(t, prec))
            .collect::<Result<Vec<_>>>()?;
        SVec::new(entries)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[CValue] {
        &self.0
    }

    pub fn weight(&self) -> CValue {
        let p = self.0[0].prec();
        self.0.iter().fold(CValue::zero(p), |acc, x| acc + x)
    }

    /// `(s_1 - c, ..., s_d - c)`
    pub fn minus_const(&self, c: i64) -> SVec {
        let p = self.0[0].prec();
        SVec(self.0.iter().map(|x| x - CValue::from_i64(c, p)).collect())
    }

    /// Tail sums `s_j + ... + s_d`, indexed by `j - 1`.
    pub fn tail_sums(&self) -> Vec<CValue> {
        let p = self.0[0].prec();
        let mut out = vec![CValue::zero(p); self.0.len()];
        let mut acc = CValue::zero(p);
        for j in (0..self.0.len()).rev() {
            acc = &acc + &self.0[j];
            out[j] = acc.clone();
        }
        out
    }
}

/// Truncation control for series evaluations.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesConfig {
    /// Target absolute error.
    pub tol: f64,
    /// Cap on terms per summation level.
    pub max_terms: usize,
}

impl SeriesConfig {
    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol > 0.0) || max_terms < 8 {
            return Err(Error::Domain("series config needs tol > 0 and max_terms >= 8".into()));
        }
        Ok(SeriesConfig { tol, max_terms })
    }

    /// Tolerance matched to a decimal precision.
    pub fn for_digits(digits: u32) -> Self {
        SeriesConfig {
            tol: 10f64.powi(-(digits as i32)),
            max_terms: 400_000,
        }
    }

    pub fn with_tol(&self, tol: f64) -> Self {
        SeriesConfig { tol, ..self.clone() }
    }
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self::for_digits(crate::qcore::DEFAULT_DIGITS)
    }
}

/// Powers `b^k` computed incrementally with periodic exact refresh.
struct PowerWalk {
    base: CValue,
    cur: CValue,
}

impl PowerWalk {
    fn new(base: CValue) -> Self {
        let p = base.prec();
        PowerWalk {
            base,
            cur: CValue::one(p),
        }
    }

    fn advance(&mut self, k: u64) -> &CValue {
        if k % 128 == 0 {
            self.cur = self.base.powi(k as i64);
        } else {
            self.cur = &self.cur * &self.base;
        }
        &self.cur
    }
}

/// Shared stopping rule: terms must be past their peak and the geometric tail
/// `|a_k| ρ/(1-ρ)` (with a safety factor) must fall below `tol`.
struct Stopper {
    rho: f64,
    prev: f64,
    min_k: u64,
}

impl Stopper {
    fn new(rho: f64, min_k: u64) -> Self {
        Stopper {
            rho,
            prev: f64::INFINITY,
            min_k,
        }
    }

    /// Returns the tail estimate if summation may stop after term `k` of size `mag`.
    fn check(&mut self, k: u64, mag: f64, tol: f64) -> Option<f64> {
        let prev = std::mem::replace(&mut self.prev, mag);
        if k < self.min_k || mag > prev {
            return None;
        }
        let observed = if prev > 0.0 && prev.is_finite() { mag / prev } else { 0.0 };
        let rho = self.rho.max(observed);
        if rho >= 1.0 {
            return None;
        }
        let tail = 2.0 * mag * rho / (1.0 - rho);
        (tail < tol).then_some(tail)
    }
}

fn mag(x: &CValue) -> f64 {
    // magnitude in f64 is enough for stopping decisions; clamp underflow to 0
    let r = x.re.to_f64().abs().max(x.im.to_f64().abs());
    if r.is_finite() {
        r
    } else {
        f64::MAX
    }
}

/// `Σ_{0<k_1<...<k_d} Π_j b_j^{k_j} / [k_j]^{e_j}` for bases with `|b_j ... b_d| < 1`.
pub fn nested_sum(bases: &[CValue], exps: &[CValue], qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    let d = bases.len();
    if d == 0 || exps.len() != d {
        return Err(Error::Domain("bases and exponents must have equal nonzero length".into()));
    }
    let p = qp.prec();
    // asymptotic ratio of the outermost terms
    let mut rho: f64 = 0.0;
    let mut tail = CValue::one(p);
    for b in bases.iter().rev() {
        tail = &tail * b;
        rho = rho.max(tail.abs_f64());
    }
    if rho >= 1.0 {
        return Err(Error::Convergence(format!(
            "nested series needs |b_j...b_d| < 1 for all j (max is {rho:.6})"
        )));
    }
    let zero_exps: Vec<bool> = exps.iter().map(|e| e.is_zero()).collect();
    let mut walks: Vec<PowerWalk> = bases.iter().cloned().map(PowerWalk::new).collect();
    let mut prefix = vec![CValue::zero(p); d + 1];
    prefix[0] = CValue::one(p);
    let mut qk = Float::with_val(p, 1);
    let omq = qp.one_minus_q();
    let mut stop = Stopper::new(rho, d as u64 + 8);
    let mut fresh = vec![CValue::zero(p); d];
    for k in 1..=cfg.max_terms as u64 {
        qk *= qp.q();
        let bracket = Float::with_val(p, 1 - &qk) / &omq;
        for j in 0..d {
            let bk = walks[j].advance(k).clone();
            let a = if zero_exps[j] {
                bk
            } else {
                &bk * real_pow(&bracket, &-&exps[j])
            };
            fresh[j] = &a * &prefix[j];
        }
        for j in 0..d {
            prefix[j + 1] += &fresh[j];
        }
        if let Some(bound) = stop.check(k, mag(&fresh[d - 1]), cfg.tol) {
            return Ok(EvalResult {
                value: prefix[d].clone(),
                error_bound: bound,
                terms_used: k as usize,
                truncated: false,
            });
        }
    }
    Ok(EvalResult {
        value: prefix[d].clone(),
        error_bound: mag(&fresh[d - 1]) * rho / (1.0 - rho),
        terms_used: cfg.max_terms,
        truncated: true,
    })
}

/// Single sum `Σ_{k>=start} term(k)` whose terms eventually decay at least like `rho^k`.
pub fn single_sum(
    mut term: impl FnMut(u64) -> CValue,
    start: u64,
    rho: f64,
    prec: u32,
    cfg: &SeriesConfig,
) -> EvalResult {
    let mut acc = CValue::zero(prec);
    let mut stop = Stopper::new(rho, start + 8);
    let mut last = 0.0;
    for (n, k) in (start..).take(cfg.max_terms).enumerate() {
        let t = term(k);
        last = mag(&t);
        acc += &t;
        if let Some(bound) = stop.check(k, last, cfg.tol) {
            return EvalResult {
                value: acc,
                error_bound: bound,
                terms_used: n + 1,
                truncated: false,
            };
        }
    }
    EvalResult {
        value: acc,
        error_bound: last * rho / (1.0 - rho).max(1e-300),
        terms_used: cfg.max_terms,
        truncated: true,
    }
}

/// `f_q(s; t) = Σ_{0<k_1<...<k_d} q^{Σ k_j t_j} / Π [k_j]^{s_j}`, requires `Re(t_j+...+t_d) > 0`.
pub fn fq_direct(s: &SVec, t: &SVec, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    if s.depth() != t.depth() {
        return Err(Error::Domain("s and t must have the same depth".into()));
    }
    for (j, tj) in t.tail_sums().iter().enumerate() {
        if !(tj.re > 0) {
            return Err(Error::Convergence(format!(
                "Re(t_{}+...+t_d) = {} is not positive",
                j + 1,
                tj.re.to_f64()
            )));
        }
    }
    let bases: Vec<CValue> = t.entries().iter().map(|tj| crate::qcore::qpow(qp, tj)).collect();
    nested_sum(&bases, s.entries(), qp, cfg)
}

/// ζ_q(s) by its defining series; requires `Re(s_j+...+s_d) > d-j+1`.
pub fn qzeta_direct(s: &SVec, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    fq_direct(s, &s.minus_const(1), qp, cfg)
}

/// `Li_{q;n}(z) = Σ_{0<k_1<...<k_d} Π z_j^{k_j} / [k_j]^{n_j}` on the open polydisc.
pub fn qpolylog_direct(n: &[u32], z: &SVec, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    if n.len() != z.depth() {
        return Err(Error::Domain("n and z must have the same depth".into()));
    }
    for (j, zj) in z.entries().iter().enumerate() {
        if zj.abs() >= 1 {
            return Err(Error::Domain(format!("|z_{}| >= 1 is outside the polydisc", j + 1)));
        }
    }
    let exps: Vec<CValue> = n.iter().map(|&nj| CValue::from_i64(nj as i64, qp.prec())).collect();
    nested_sum(z.entries(), &exps, qp, cfg)
}

/// `ξ_q(j) = Σ_{l>=1} q^{(j+1)l} / [l]^2`.
pub fn xi_q(j: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    let base = CValue::real(qp.powi(j as i64 + 1));
    nested_sum(&[base], &[qp.c(2)], qp, cfg)
}

/// `T^j ζ_q(γ)`: for `j >= 1` the series `Σ_l (q^j - q^{jl})/(1 - q^j) · q^{(γ-1)l}/[l]^γ`,
/// for `j = 0` its limit `Σ_l (l-1) q^{(γ-1)l}/[l]^γ`.
pub fn t_series(j: u32, gamma: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    if gamma < 2 {
        return Err(Error::Domain(format!("T-series needs γ >= 2, got {gamma}")));
    }
    let p = qp.prec();
    let q = qp.q().clone();
    let omq = qp.one_minus_q();
    let qj = qp.powi(j as i64);
    let one_minus_qj = Float::with_val(p, 1 - &qj);
    let rho = q.to_f64().powi(gamma as i32 - 1);
    let term = move |l: u64| {
        let ql = Float::with_val(p, (&q).pow(l as u32));
        let bracket = Float::with_val(p, 1 - &ql) / &omq;
        let weight = if j == 0 {
            Float::with_val(p, l - 1)
        } else {
            let qjl = Float::with_val(p, (&qj).pow(l as u32));
            Float::with_val(p, &qj - qjl) / &one_minus_qj
        };
        let num = Float::with_val(p, (&ql).pow(gamma - 1)) * weight;
        CValue::real(num / Float::with_val(p, (&bracket).pow(gamma)))
    };
    Ok(single_sum(term, 1, rho, p, cfg))
}

/// Right-hand side of the telescoping identity
/// `Σ_{0<k_1<...<k_d} Π x_j^{k_j} = Π_j (x_j...x_d)/(1 - x_j...x_d)`.
pub fn telescoped_product(x: &[CValue]) -> CValue {
    let p = x[0].prec();
    let mut tail = CValue::one(p);
    let mut acc = CValue::one(p);
    for xj in x.iter().rev() {
        tail = &tail * xj;
        acc = &acc * (&tail / (CValue::one(p) - &tail));
    }
    acc
}

/// Left-hand side of the same identity by explicit summation.
pub fn geometric_nested(x: &[CValue], qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    let zeros = vec![CValue::zero(qp.prec()); x.len()];
    nested_sum(x, &zeros, qp, cfg)
}
