//! Meromorphic continuation of f_q, ζ_q and the q-polylogarithms through the
//! binomial expansion
//!
//! ```text
//! f_q(s;t) = (1-q)^{wt(s)} Σ_{r_1..r_d ≥ 0} Π_j C(s_j+r_j-1, r_j) q^{j(r_j+t_j)}
//!                                            / (1 - q^{r_j+t_j+...+r_d+t_d}),
//! ```
//!
//! plus pole classification, residues, iterated limits and q↑1 limits.
//!
//! The r-sum is evaluated level by level: with `S = r_{j+1}+...+r_d`,
//! `V_j(S) = Σ_r F_j(r,S) V_{j-1}(S+r)` and `V_0 = 1`; inner values are memoised.

use std::collections::HashMap;

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::jet::{Jet, Window};
use crate::num::{ten_pow_neg, CValue};
use crate::qcore::{qpow, EvalResult, QParam};
use crate::qseries::{qzeta_direct, SVec, SeriesConfig};
use crate::shuffle::{Word, ZCombo};

/// Which of the three pole families a point falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoleCondition {
    /// `s_d ∈ 1 + (2πi/log q)ℤ`
    LastCoordinateAtOne,
    /// `s_d ∈ ℤ_{≤0} + (2πi/log q)ℤ_{≠0}`
    LastCoordinateNonpositiveShifted,
    /// `s_j + ... + s_d ∈ ℤ_{≤ d-j+1} + (2πi/log q)ℤ` for some `j < d`
    PartialSumInteger,
}

/// Classification of a point against the pole hyperplanes of ζ_q.
#[derive(Clone, Debug, Serialize)]
pub struct PoleReport {
    pub in_pole_set: bool,
    pub condition: Option<PoleCondition>,
    /// 1-based coordinate index of the partial sum that matched.
    pub j: Option<usize>,
    /// Real integer witness `m` and imaginary lattice witness `n`.
    pub m: Option<i64>,
    pub n: Option<i64>,
    /// Smallest distance to any candidate hyperplane, in units of the linear functional.
    pub distance: f64,
}

impl std::fmt::Display for PoleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.condition {
            Some(c) if self.in_pole_set => write!(
                f,
                "{c:?} at j={} (m={}, n={}), distance {:.3e}",
                self.j.unwrap_or(0),
                self.m.unwrap_or(0),
                self.n.unwrap_or(0),
                self.distance
            ),
            _ => write!(f, "regular (distance {:.3e})", self.distance),
        }
    }
}

/// Result of a limit extrapolation.
#[derive(Clone, Debug, Serialize)]
pub struct LimitEstimate {
    pub value: CValue,
    pub levels_used: usize,
    /// Size of the last extrapolation correction.
    pub residual: f64,
}

/// Order of the two one-variable limits at an indeterminate point `(-m, -n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitOrder {
    /// `lim_{s1→-m} lim_{s2→-n}`: gives ζ_q(-m,-n).
    S2First,
    /// `lim_{s2→-n} lim_{s1→-m}`: gives ζ_q^R(-m,-n).
    S1First,
}

/// Evaluation strategy for [`qzeta_eval_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Direct,
    Continued,
}

/// Ladder and order used by residue, iterated-limit and q↑1 extrapolations.
#[derive(Clone, Debug, Serialize)]
pub struct ExtrapolationConfig {
    /// Number of ladder points (`h_j = h_0 2^{-j}`, `j < levels`).
    pub levels: usize,
    /// Starting step for residue / iterated-limit ladders.
    pub h0: f64,
    /// Highest Richardson order.
    pub max_order: usize,
    /// Largest acceptable residual; above it a non-convergence error is raised.
    pub accept: f64,
}

impl Default for ExtrapolationConfig {
    fn default() -> Self {
        ExtrapolationConfig {
            levels: 9,
            h0: 1e-2,
            max_order: 6,
            accept: 1e-6,
        }
    }
}

/// Directional Laurent data at a point: `value` is the ε^0 coefficient,
/// `polar[k]` the coefficient of ε^{-(k+1)}.
#[derive(Clone, Debug)]
pub struct Laurent {
    pub value: EvalResult,
    pub polar: Vec<CValue>,
}

enum Failure {
    /// A denominator is exactly `1 - q^0` and no direction was supplied.
    ExactZero,
    Err(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Err(e)
    }
}

struct Level {
    s: CValue,
    ds: i64,
    num_base: Jet,
    q_step: Float,
    den_base: Jet,
    /// `t_j + ... + t_d` when it is an exact integer
    den_int: Option<i64>,
    /// derivative of the denominator exponent times log q
    den_delta: Float,
    binoms: Vec<Jet>,
    /// peak index and bound on the term ratio beyond it
    min_r: u64,
    abs_s: f64,
}

struct Engine<'a> {
    qp: &'a QParam,
    window: Window,
    levels: Vec<Level>,
    qpows: Vec<Float>,
    memo: Vec<HashMap<u64, Jet>>,
    tol_inner: f64,
    tol_outer: f64,
    max_terms: usize,
    threshold: Float,
    terms: usize,
    truncated: bool,
    outer_tail: f64,
}

impl<'a> Engine<'a> {
    fn qpow_int(&mut self, n: u64) -> Float {
        let p = self.qp.prec();
        while self.qpows.len() as u64 <= n {
            let next = match self.qpows.last() {
                None => Float::with_val(p, 1),
                Some(x) => Float::with_val(p, x * self.qp.q()),
            };
            self.qpows.push(next);
        }
        self.qpows[n as usize].clone()
    }

    fn binom(&mut self, j: usize, r: u64) -> Jet {
        let w = self.window;
        let lv = &mut self.levels[j];
        while lv.binoms.len() as u64 <= r {
            let k = lv.binoms.len() as i64;
            let next = if k == 0 {
                w.constant(CValue::one(w.prec))
            } else {
                // C(s+k-1, k) = C(s+k-2, k-1) (s+k-1)/k
                let lin = w.linear(&lv.s + CValue::from_i64(k - 1, w.prec), lv.ds);
                let inv_k = Float::with_val(w.prec, 1) / k;
                lv.binoms[k as usize - 1].mul(&lin).scale_real(&inv_k)
            };
            lv.binoms.push(next);
        }
        lv.binoms[r as usize].clone()
    }

    /// `1 / (1 - den_base · q^n)` for level `j`.
    fn recip_den(&mut self, j: usize, n: u64) -> std::result::Result<Jet, Failure> {
        let w = self.window;
        if let Some(t) = self.levels[j].den_int {
            if t + n as i64 == 0 {
                if w.is_plain() {
                    return Err(Failure::ExactZero);
                }
                let delta = self.levels[j].den_delta.clone();
                if delta.is_zero() {
                    return Err(Failure::Err(Error::pole(format!(
                        "denominator at level j={} vanishes identically along the chosen direction (r-sum {n})",
                        j + 1
                    ))));
                }
                return Ok(w.recip_one_minus_exp(&delta));
            }
        }
        let qn = self.qpow_int(n);
        let mut den = w.constant(CValue::one(w.prec));
        let sub = self.levels[j].den_base.scale_real(&qn);
        den.add_assign(&sub.scale(&CValue::from_i64(-1, w.prec)));
        let c0 = den.coeff(0);
        if c0.abs() < self.threshold {
            return Err(Failure::Err(Error::pole(format!(
                "|1 - q^w| = {:.3e} below pole threshold at level j={} with r_j+...+r_d = {n}",
                c0.abs_f64(),
                j + 1
            ))));
        }
        Ok(den.recip_unit())
    }

    fn value(&mut self, j: usize, s_outer: u64) -> std::result::Result<Jet, Failure> {
        if j == 0 {
            return Ok(self.window.constant(CValue::one(self.window.prec)));
        }
        let lv = j - 1;
        if let Some(v) = self.memo[lv].get(&s_outer) {
            return Ok(v.clone());
        }
        let outermost = j == self.levels.len();
        let tol = if outermost { self.tol_outer } else { self.tol_inner };
        let (min_r, abs_s, qj) = {
            let l = &self.levels[lv];
            (l.min_r, l.abs_s, l.q_step.to_f64())
        };
        let mut acc = self.window.zero();
        let mut step = self.levels[lv].num_base.clone();
        let q_step = self.levels[lv].q_step.clone();
        let mut prev = f64::INFINITY;
        let mut done = false;
        for r in 0..self.max_terms as u64 {
            if r > 0 {
                step = step.scale_real(&q_step);
            }
            let b = self.binom(lv, r);
            let inner = self.value(j - 1, s_outer + r)?;
            let den = self.recip_den(lv, s_outer + r)?;
            let term = b.mul(&step).mul(&den).mul(&inner);
            let mag = term.magnitude();
            acc.add_assign(&term);
            if outermost {
                self.terms = r as usize + 1;
            }
            if r >= min_r && mag <= prev {
                let ratio_bound = qj * (abs_s + r as f64 + 1.0) / (r as f64 + 2.0);
                let observed = if prev.is_finite() && prev > 0.0 { mag / prev } else { 0.0 };
                let rho = ratio_bound.max(observed);
                if rho < 1.0 {
                    let tail = 2.0 * mag * rho / (1.0 - rho);
                    if tail < tol {
                        if outermost {
                            self.outer_tail = tail;
                        }
                        done = true;
                        break;
                    }
                }
            }
            prev = mag;
        }
        if !done {
            self.truncated = true;
        }
        self.memo[lv].insert(s_outer, acc.clone());
        Ok(acc)
    }
}

/// Per-level description fed to the engine.
struct LevelSpec {
    s: CValue,
    ds: i64,
    num_base: Jet,
    den_base: Jet,
    den_int: Option<i64>,
    den_delta: Float,
}

fn run_engine(
    specs: Vec<LevelSpec>,
    prefactor: Jet,
    window: Window,
    qp: &QParam,
    cfg: &SeriesConfig,
) -> std::result::Result<Laurent, Failure> {
    let d = specs.len();
    let p = qp.prec();
    let pre_mag = prefactor.magnitude().max(1e-300);
    let tol_outer = cfg.tol / pre_mag;
    let levels: Vec<Level> = specs
        .into_iter()
        .enumerate()
        .map(|(idx, sp)| {
            let j = idx as i64 + 1;
            let qj = qp.powi(j);
            let qjf = qj.to_f64();
            let abs_s = sp.s.abs_f64() + sp.ds.unsigned_abs() as f64;
            let peak = if qjf < 1.0 {
                ((abs_s + 1.0) * qjf / (1.0 - qjf)).ceil() as u64
            } else {
                0
            };
            Level {
                s: sp.s,
                ds: sp.ds,
                num_base: sp.num_base,
                q_step: qj,
                den_base: sp.den_base,
                den_int: sp.den_int,
                den_delta: sp.den_delta,
                binoms: Vec::new(),
                min_r: peak + 4,
                abs_s,
            }
        })
        .collect();
    let mut eng = Engine {
        qp,
        window,
        levels,
        qpows: Vec::new(),
        memo: vec![HashMap::new(); d],
        tol_inner: tol_outer * 1e-4,
        tol_outer,
        max_terms: cfg.max_terms,
        threshold: ten_pow_neg(p, qp.digits() as f64 / 2.0),
        terms: 0,
        truncated: false,
        outer_tail: 0.0,
    };
    let v = eng.value(d, 0)?;
    let total = prefactor.mul(&v);
    let polar = (window.lo..0).rev().map(|k| total.coeff(k)).collect();
    Ok(Laurent {
        value: EvalResult {
            value: total.coeff(0),
            error_bound: (eng.outer_tail + tol_outer * 1e-4) * pre_mag,
            terms_used: eng.terms,
            truncated: eng.truncated,
        },
        polar,
    })
}

fn window_for(d: usize, directional: bool, prec: u32) -> Window {
    if directional {
        let k = d as i32 + 1;
        Window { lo: -k, hi: k, prec }
    } else {
        Window::plain(prec)
    }
}

fn fq_specs(s: &SVec, t: &SVec, dir: &[i64], window: Window, qp: &QParam) -> Vec<LevelSpec> {
    let d = s.depth();
    let p = qp.prec();
    let tails = t.tail_sums();
    let mut dtail = vec![0i64; d + 1];
    for j in (0..d).rev() {
        dtail[j] = dtail[j + 1] + dir[j];
    }
    (0..d)
        .map(|idx| {
            let j = idx as i64 + 1;
            let tj = &t.entries()[idx];
            let num0 = qpow(qp, &tj.scale_i64(j));
            let num_delta = Float::with_val(p, qp.log_q() * (j * dir[idx]));
            let den0 = qpow(qp, &tails[idx]);
            let den_delta = Float::with_val(p, qp.log_q() * dtail[idx]);
            LevelSpec {
                s: s.entries()[idx].clone(),
                ds: dir[idx],
                num_base: window.exp_scaled(num0, &num_delta),
                den_base: window.exp_scaled(den0, &den_delta),
                den_int: tails[idx].as_exact_integer(),
                den_delta,
            }
        })
        .collect()
}

fn weight_prefactor(s: &SVec, dir: &[i64], window: Window, qp: &QParam) -> Jet {
    let p = qp.prec();
    let ln1mq = Float::with_val(p, qp.one_minus_q().ln_ref());
    let a = s.weight().scale(&ln1mq).exp();
    let dw: i64 = dir.iter().sum();
    window.exp_scaled(a, &Float::with_val(p, &ln1mq * dw))
}

fn fq_laurent(s: &SVec, t: &SVec, dir: Option<&[i64]>, qp: &QParam, cfg: &SeriesConfig) -> std::result::Result<Laurent, Failure> {
    let d = s.depth();
    let zeros = vec![0i64; d];
    let dirv = dir.unwrap_or(&zeros);
    let window = window_for(d, dir.is_some(), qp.prec());
    let specs = fq_specs(s, t, dirv, window, qp);
    let pre = weight_prefactor(s, dirv, window, qp);
    run_engine(specs, pre, window, qp, cfg)
}

/// Directional Laurent expansion of f_q along `s + v ε`, `t + v ε`.
pub fn fq_along(s: &SVec, t: &SVec, dir: &[i64], qp: &QParam, cfg: &SeriesConfig) -> Result<Laurent> {
    if s.depth() != t.depth() || dir.len() != s.depth() {
        return Err(Error::Domain("s, t and direction must share the depth".into()));
    }
    fq_laurent(s, t, Some(dir), qp, cfg).map_err(|f| match f {
        Failure::Err(e) => e,
        Failure::ExactZero => unreachable!("directional evaluation never reports ExactZero"),
    })
}

/// f_q(s; t) through the binomial double-sum continuation.
///
/// Exact `0/0` terms at integer points are resolved along the direction
/// `(1,...,1)`; a non-vanishing polar part is reported as a pole.
pub fn fq_continued(s: &SVec, t: &SVec, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    if s.depth() != t.depth() {
        return Err(Error::Domain("s and t must have the same depth".into()));
    }
    match fq_laurent(s, t, None, qp, cfg) {
        Ok(l) => Ok(l.value),
        Err(Failure::Err(e)) => Err(e),
        Err(Failure::ExactZero) => {
            let ones = vec![1i64; s.depth()];
            let l = fq_along(s, t, &ones, qp, cfg)?;
            let polar = l.polar.iter().map(|c| c.abs_f64()).fold(0.0, f64::max);
            let scale = l.value.value.abs_f64().max(1.0);
            if polar > cfg.tol.sqrt() * scale {
                return Err(Error::pole(format!(
                    "non-removable singularity (polar coefficient {polar:.3e})"
                )));
            }
            Ok(l.value)
        }
    }
}

/// ζ_q(s) through the continuation, without the pole-set pre-check.
pub fn qzeta_continued(s: &SVec, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    fq_continued(s, &s.minus_const(1), qp, cfg)
}

/// Directional expansion of ζ_q along `s + v ε`.
pub fn qzeta_along(s: &SVec, dir: &[i64], qp: &QParam, cfg: &SeriesConfig) -> Result<Laurent> {
    fq_along(s, &s.minus_const(1), dir, qp, cfg)
}

/// ζ_q(s) anywhere off the pole set.
pub fn qzeta_eval(s: &SVec, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    qzeta_eval_with(s, qp, cfg, Method::Auto)
}

pub fn qzeta_eval_with(s: &SVec, qp: &QParam, cfg: &SeriesConfig, method: Method) -> Result<EvalResult> {
    let report = pole_report(s, qp);
    if report.in_pole_set {
        return Err(Error::Pole {
            message: format!("ζ_q has a pole at this point: {report}"),
            report: Some(Box::new(report)),
        });
    }
    match method {
        Method::Direct => qzeta_direct(s, qp, cfg),
        Method::Continued => qzeta_continued(s, qp, cfg),
        Method::Auto => {
            let d = s.depth() as f64;
            // direct series converge geometrically with ratio q^{min_j Re(...) - (d-j+1)}
            let margin = s
                .tail_sums()
                .iter()
                .enumerate()
                .map(|(j, x)| x.re.to_f64() - (d - j as f64))
                .fold(f64::INFINITY, f64::min);
            if margin >= 0.5 {
                qzeta_direct(s, qp, cfg)
            } else {
                qzeta_continued(s, qp, cfg)
            }
        }
    }
}

/// Continued q-multiple polylogarithm; the argument must avoid the singular set
/// `Π_{i≥j} z_i = q^{-m}`.
pub fn qpolylog_continued(n: &[u32], z: &SVec, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    let d = z.depth();
    if n.len() != d {
        return Err(Error::Domain("n and z must have the same depth".into()));
    }
    let p = qp.prec();
    let window = Window::plain(p);
    let mut specs = Vec::with_capacity(d);
    let mut prods = vec![CValue::one(p); d + 1];
    for j in (0..d).rev() {
        prods[j] = &prods[j + 1] * &z.entries()[j];
    }
    let thr = ten_pow_neg(p, qp.digits() as f64 / 2.0);
    for (j, prod) in prods.iter().take(d).enumerate() {
        // singular when prod = q^{-m}, m ≥ 0
        if Float::with_val(p, prod.im.abs_ref()) < thr && prod.re >= 1 {
            let m = -(Float::with_val(p, prod.re.ln_ref()) / qp.log_q());
            let mr = m.to_f64().round();
            let qm = qp.powi(-(mr as i64));
            if Float::with_val(p, &prod.re - &qm).abs() < Float::with_val(p, &thr * &qm) {
                return Err(Error::Singular(format!(
                    "z_{}...z_d = q^-{} lies in the singular set",
                    j + 1,
                    mr as i64
                )));
            }
        }
        specs.push(LevelSpec {
            s: CValue::from_i64(n[j] as i64, p),
            ds: 0,
            num_base: window.constant(z.entries()[j].powi(j as i64 + 1)),
            den_base: window.constant(prod.clone()),
            den_int: None,
            den_delta: Float::new(p),
        });
    }
    let total: u32 = n.iter().sum();
    let pre = window.constant(CValue::real(Float::with_val(p, qp.one_minus_q().pow_ref_u(total))));
    match run_engine(specs, pre, window, qp, cfg) {
        Ok(l) => Ok(l.value),
        Err(Failure::Err(Error::Pole { message, .. })) => Err(Error::Singular(message)),
        Err(Failure::Err(e)) => Err(e),
        Err(Failure::ExactZero) => Err(Error::Singular("exact singular point".into())),
    }
}

trait PowU {
    fn pow_ref_u(&self, n: u32) -> Float;
}

impl PowU for Float {
    fn pow_ref_u(&self, n: u32) -> Float {
        use rug::ops::Pow;
        Float::with_val(self.prec(), self.pow(n))
    }
}

fn nearest_lattice(im: &Float, spacing: &Float) -> (i64, f64) {
    let k = Float::with_val(im.prec(), im / spacing).to_f64().round();
    let off = Float::with_val(im.prec(), im - Float::with_val(im.prec(), spacing * k));
    (k as i64, off.to_f64().abs())
}

/// Membership of `s` in the pole set of ζ_q.
pub fn pole_report(s: &SVec, qp: &QParam) -> PoleReport {
    let d = s.depth();
    let spacing = qp.lattice_spacing();
    let sp = spacing.to_f64();
    let lq = qp.log_q().to_f64().abs();
    let thr = 10f64.powf(-(qp.digits() as f64) / 2.0) / lq;
    let mut best = PoleReport {
        in_pole_set: false,
        condition: None,
        j: None,
        m: None,
        n: None,
        distance: f64::INFINITY,
    };
    let mut consider = |cond: PoleCondition, j: usize, m: i64, n: i64, dist: f64| {
        if dist < best.distance {
            best = PoleReport {
                in_pole_set: dist < thr,
                condition: Some(cond),
                j: Some(j),
                m: Some(m),
                n: Some(n),
                distance: dist,
            };
        }
    };
    let tails = s.tail_sums();
    let p = qp.prec();
    let sd = &s.entries()[d - 1];
    // s_d = 1 + lattice
    {
        let re = Float::with_val(p, &sd.re - 1).to_f64().abs();
        let (n, off) = nearest_lattice(&sd.im, &spacing);
        consider(PoleCondition::LastCoordinateAtOne, d, 1, n, re.hypot(off));
    }
    // s_d = m ≤ 0 + nonzero lattice
    {
        let m = sd.re.to_f64().round().min(0.0);
        let re = Float::with_val(p, &sd.re - m).to_f64().abs();
        let (mut n, mut off) = nearest_lattice(&sd.im, &spacing);
        if n == 0 {
            n = if sd.im.is_sign_negative() { -1 } else { 1 };
            off = (sd.im.to_f64() - n as f64 * sp).abs();
        }
        consider(PoleCondition::LastCoordinateNonpositiveShifted, d, m as i64, n, re.hypot(off));
    }
    for (idx, tj) in tails.iter().enumerate().take(d - 1) {
        let bound = (d - idx) as f64; // d - j + 1 with j = idx + 1
        let m = tj.re.to_f64().round().min(bound);
        let re = Float::with_val(p, &tj.re - m).to_f64().abs();
        let (n, off) = nearest_lattice(&tj.im, &spacing);
        consider(PoleCondition::PartialSumInteger, idx + 1, m as i64, n, re.hypot(off));
    }
    best
}

fn unit_vec(d: usize, at: usize) -> Vec<i64> {
    let mut v = vec![0; d];
    v[at] = 1;
    v
}

fn ladder(h0: f64, levels: usize, prec: u32) -> Vec<Float> {
    (0..levels)
        .map(|j| Float::with_val(prec, h0) / Float::with_val(prec, 2u32).pow_u(j as u32))
        .collect()
}

trait PowU2 {
    fn pow_u(self, n: u32) -> Float;
}

impl PowU2 for Float {
    fn pow_u(self, n: u32) -> Float {
        self.pow_ref_u(n)
    }
}

/// `lim_{h→0} h ζ_q(p + h e_d)` by symmetric sampling and Richardson extrapolation in `h²`.
pub fn numeric_residue(point: &SVec, qp: &QParam, cfg: &SeriesConfig, ext: &ExtrapolationConfig) -> Result<LimitEstimate> {
    let d = point.depth();
    let p = qp.prec();
    let hs = ladder(ext.h0, ext.levels, p);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for h in &hs {
        let mut vals = Vec::new();
        for sign in [1i64, -1] {
            let hh = Float::with_val(p, h * sign);
            let mut e = point.entries().to_vec();
            e[d - 1] = &e[d - 1] + CValue::real(hh.clone());
            let v = qzeta_continued(&SVec::new(e)?, qp, cfg)?.value;
            vals.push(v.scale(&hh));
        }
        let avg = (&vals[0] + &vals[1]).scale(&Float::with_val(p, 0.5));
        xs.push(Float::with_val(p, h.square_ref()));
        ys.push(avg);
    }
    let e = richardson(&xs, &ys, ext.max_order);
    if !(e.residual <= ext.accept) {
        return Err(Error::NonConvergence(format!(
            "residue extrapolation residual {:.3e} exceeds {:.1e}",
            e.residual, ext.accept
        )));
    }
    Ok(LimitEstimate {
        value: e.value,
        levels_used: hs.len(),
        residual: e.residual,
    })
}

/// Iterated limit of ζ_q at the indeterminate point `(-m, -n)` in the given order.
pub fn iterated_limit(
    m: u32,
    n: u32,
    order: LimitOrder,
    qp: &QParam,
    cfg: &SeriesConfig,
    ext: &ExtrapolationConfig,
) -> Result<LimitEstimate> {
    let p = qp.prec();
    let base = [-(m as i64), -(n as i64)];
    // inner limit is taken exactly (jets along the inner coordinate), the
    // outer one by extrapolation in the remaining offset
    let (inner, outer) = match order {
        LimitOrder::S2First => (1usize, 0usize),
        LimitOrder::S1First => (0usize, 1usize),
    };
    let hs = ladder(ext.h0, ext.levels, p);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for h in &hs {
        let mut vals = Vec::new();
        for sign in [1i64, -1] {
            let mut e: Vec<CValue> = base.iter().map(|&b| CValue::from_i64(b, p)).collect();
            e[outer] = &e[outer] + CValue::real(Float::with_val(p, h * sign));
            let l = qzeta_along(&SVec::new(e)?, &unit_vec(2, inner), qp, cfg)?;
            vals.push(l.value.value);
        }
        xs.push(Float::with_val(p, h.square_ref()));
        ys.push((&vals[0] + &vals[1]).scale(&Float::with_val(p, 0.5)));
    }
    let e = richardson(&xs, &ys, ext.max_order);
    if !(e.residual <= ext.accept) {
        return Err(Error::NonConvergence(format!(
            "iterated-limit extrapolation residual {:.3e} exceeds {:.1e}",
            e.residual, ext.accept
        )));
    }
    Ok(LimitEstimate {
        value: e.value,
        levels_used: hs.len(),
        residual: e.residual,
    })
}

/// `lim_{q↑1}` of `f(q)` sampled at `q_j = 1 - 2^{-j}`, `j = 3..=last`, extrapolated in `1 - q`.
pub fn q_to_1_limit(
    mut f: impl FnMut(&QParam) -> Result<CValue>,
    last: u32,
    digits: u32,
    ext: &ExtrapolationConfig,
) -> Result<LimitEstimate> {
    if last < 4 {
        return Err(Error::Domain("q→1 ladder needs at least two levels (last >= 4)".into()));
    }
    let p = crate::num::digits_to_bits(digits);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in 3..=last {
        let h = Float::with_val(p, 1) / Float::with_val(p, 2u32).pow_u(j);
        let q = Float::with_val(p, 1 - &h);
        let qp = QParam::new(&q, digits)?;
        ys.push(f(&qp)?);
        xs.push(h);
    }
    let e = richardson(&xs, &ys, xs.len() - 1);
    if !e.residual.is_finite() || e.residual > ext.accept.max(1e-3) {
        return Err(Error::NonConvergence(format!(
            "q→1 extrapolation residual {:.3e} too large",
            e.residual
        )));
    }
    Ok(LimitEstimate {
        value: e.value,
        levels_used: xs.len(),
        residual: e.residual,
    })
}

/// `𝒮_1^{n_1} ∘ ... ∘ 𝒮_d^{n_d}` applied to `ζ_q(w)`:
/// `Σ_{r ≤ n} Π_j C(n_j, r_j) (1-q)^{r_j} ζ_q(w - r)` with exact coefficients.
pub fn shift_expand(w: &Word, n: &[u32]) -> Result<ZCombo> {
    if w.len() != n.len() {
        return Err(Error::Domain("shift exponents must match the word depth".into()));
    }
    let mut c = ZCombo::single(w.clone());
    for (j, &nj) in n.iter().enumerate() {
        for _ in 0..nj {
            c = c.shift(j)?;
        }
    }
    Ok(c)
}
