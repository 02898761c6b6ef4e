//! The product ζ_q(m)ζ_q(n) through the q-shuffle of iterated Jackson
//! integrals: collapse counts `E(r,s;c)`, the pieces `A_q`, `B_q`, `X_γ`,
//! `T^jζ_q(γ)`, and checks of each lemma against direct series.

use std::collections::HashMap;

use rug::{Float, Integer};
use serde::Serialize;

use crate::continuation::{qzeta_eval, shift_expand};
use crate::error::{Error, Result};
use crate::num::CValue;
use crate::poly::QPoly;
use crate::qcalculus::{q_iterated, OneForm};
use crate::qcore::{binom, EvalResult, QParam};
use crate::qseries::{fq_direct, qpolylog_direct, t_series, xi_q, SVec, SeriesConfig};
use crate::shuffle::{eval_combo, Env, Word};
use crate::verify::{check_tol, Verification};

/// Number of words obtained by shuffling `ω^r` with `ω^s` using exactly `c`
/// collapses, enumerated over the collapse positions `i_1<…<i_c`, `j_1<…<j_c`
/// with the block-shuffle counts `C(Δi+Δj-2, Δi-1)`.
pub fn e_count(r: u32, s: u32, c: u32) -> Integer {
    fn go(i0: i64, j0: i64, left: u32, r: i64, s: i64) -> Integer {
        if left == 0 {
            let (di, dj) = (r + 1 - i0, s + 1 - j0);
            return binom(di + dj - 2, di - 1);
        }
        let mut acc = Integer::new();
        for i in i0 + 1..=r {
            for j in j0 + 1..=s {
                let (di, dj) = (i - i0, j - j0);
                let head = binom(di + dj - 2, di - 1);
                if head != 0 {
                    acc += head * go(i, j, left - 1, r, s);
                }
            }
        }
        acc
    }
    go(0, 0, c, r as i64, s as i64)
}

/// `E(r,s;c) = (q-1)^c · e_count(r,s,c)`; zero outside `0 ≤ c ≤ min(r,s)`.
pub fn e_coeff(r: i64, s: i64, c: i64) -> QPoly {
    if r < 0 || s < 0 || c < 0 || c > r.min(s) {
        return QPoly::zero();
    }
    QPoly::q_minus_one().pow(c as u32).scale(&e_count(r as u32, s as u32, c as u32).into())
}

/// How the `A_q` coefficient is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ACoefficient {
    /// `E(a,n-1;c) + (q-1)E(a-1,n-1;c-1)`: the letter `v` is either kept or collapsed with an `ω`.
    Corrected,
    /// `E(a,n;c)` as printed.
    Printed,
}

impl ACoefficient {
    fn get(self, a: i64, n: i64, c: i64) -> QPoly {
        match self {
            ACoefficient::Corrected => {
                &e_coeff(a, n - 1, c) + &(&QPoly::q_minus_one() * &e_coeff(a - 1, n - 1, c - 1))
            }
            ACoefficient::Printed => e_coeff(a, n, c),
        }
    }
}

/// Evaluation context: memoises the ζ_q values the formulas revisit.
struct Ctx<'a> {
    qp: &'a QParam,
    cfg: &'a SeriesConfig,
    memo: HashMap<Vec<i64>, CValue>,
    err: f64,
    terms: usize,
}

impl<'a> Ctx<'a> {
    fn new(qp: &'a QParam, cfg: &'a SeriesConfig) -> Self {
        Ctx { qp, cfg, memo: HashMap::new(), err: 0.0, terms: 0 }
    }

    fn take(&mut self, r: EvalResult) -> CValue {
        self.err += r.error_bound;
        self.terms += r.terms_used;
        r.value
    }

    fn zeta(&mut self, s: &[i64]) -> Result<CValue> {
        if let Some(v) = self.memo.get(s) {
            return Ok(v.clone());
        }
        let r = qzeta_eval(&SVec::from_ints(s, self.qp.prec()), self.qp, self.cfg)?;
        let v = self.take(r);
        self.memo.insert(s.to_vec(), v.clone());
        Ok(v)
    }

    fn xi(&mut self, j: u32) -> Result<CValue> {
        let key = vec![i64::MIN, j as i64];
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let r = xi_q(j, self.qp, self.cfg)?;
        let v = self.take(r);
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn qm1_pow(&self, k: u32) -> Float {
        Float::with_val(self.qp.prec(), self.qp.q() - 1u32).pow_u(k)
    }

    fn omq_pow(&self, k: u32) -> Float {
        self.qp.one_minus_q().pow_u(k)
    }

    fn int(&self, n: Integer) -> Float {
        Float::with_val(self.qp.prec(), n)
    }

    fn finish(self, value: CValue) -> EvalResult {
        EvalResult { value, error_bound: self.err, terms_used: self.terms, truncated: false }
    }

    /// `T^jζ_q(γ)`, `j ≥ 1`, in closed form.
    fn t_closed(&mut self, j: u32, g: u32) -> Result<CValue> {
        let p = self.qp.prec();
        let inv = Float::with_val(p, 1) / (self.qp.powi(j as i64) - 1u32);
        let mut acc = -self.zeta(&[g as i64])?;
        for i in 1..=g.saturating_sub(2) {
            let c = self.int(binom((i + j - 1) as i64, (j - 1) as i64));
            let w = Float::with_val(p, self.qm1_pow(i) * &inv) * c;
            acc += self.zeta(&[(g - i) as i64])?.scale(&w);
        }
        let mut tail = CValue::zero(p);
        for e in 0..j {
            let c = self.int(binom((j - 1 - e + g - 2) as i64, (g - 2) as i64));
            let diff = self.xi(e + 1)? - self.xi(e)?;
            tail += diff.scale(&c);
        }
        acc += tail.scale(&(self.qm1_pow(g - 2) * inv));
        Ok(acc)
    }

    /// `T^jζ_q(γ)` with the printed remainder `(q-1)^{γ-2}/(q^j-1)·(ξ_q(j) - ξ_q(0))`.
    fn t_printed(&mut self, j: u32, g: u32) -> Result<CValue> {
        let p = self.qp.prec();
        let inv = Float::with_val(p, 1) / (self.qp.powi(j as i64) - 1u32);
        let mut acc = -self.zeta(&[g as i64])?;
        for i in 1..=g.saturating_sub(2) {
            let c = self.int(binom((i + j - 1) as i64, (j - 1) as i64));
            let w = Float::with_val(p, self.qm1_pow(i) * &inv) * c;
            acc += self.zeta(&[(g - i) as i64])?.scale(&w);
        }
        let diff = self.xi(j)? - self.xi(0)?;
        acc += diff.scale(&(self.qm1_pow(g - 2) * inv));
        Ok(acc)
    }

    fn t_any(&mut self, j: u32, g: u32) -> Result<CValue> {
        if j == 0 {
            let r = t_series(0, g, self.qp, self.cfg)?;
            Ok(self.take(r))
        } else {
            self.t_closed(j, g)
        }
    }

    /// `X_γ(r, r+e) = Li_{q;r,γ}(q^{r+e}, q^{γ-1})`.
    fn x_gamma(&mut self, g: u32, r: u32, s: u32) -> Result<CValue> {
        let p = self.qp.prec();
        let e = s - r;
        let mut acc = CValue::zero(p);
        for i in 0..r {
            let w = self.qm1_pow(i) * self.int(binom((i + e) as i64, e as i64));
            acc += self.zeta(&[(r - i) as i64, g as i64])?.scale(&w);
        }
        let mut tail = CValue::zero(p);
        for j in 0..=e {
            let c = self.int(binom((r - 1 + e - j) as i64, (r - 1) as i64));
            tail += self.t_any(j, g)?.scale(&c);
        }
        acc += tail.scale(&self.qm1_pow(r));
        Ok(acc)
    }

    /// `𝒮^k ζ_q(N)` through the shift operator on words.
    fn shifted_zeta(&mut self, k: u32, big_n: u32) -> Result<CValue> {
        let combo = shift_expand(&Word::from_ints(&[big_n as i64]), &[k])?;
        let r = eval_combo(&combo, &Env::new(), self.qp, self.cfg)?;
        Ok(self.take(r))
    }

    fn bq(&mut self, m: u32, n: u32) -> Result<CValue> {
        let p = self.qp.prec();
        let (mi, ni) = (m as i64, n as i64);
        let inv_mn = Float::with_val(p, 1) / (self.qp.powi(mi - ni) - 1u32);
        let inv_nm = Float::with_val(p, 1) / (self.qp.powi(ni - mi) - 1u32);
        let mut acc = CValue::zero(p);
        for c in 0..m.min(n) {
            let e = e_coeff(mi - 1, ni - 1, c as i64).eval(self.qp);
            let big_n = m + n - 1 - c;
            let t = self.shifted_zeta(n - 1 - c, big_n)?.scale(&inv_mn)
                + self.shifted_zeta(m - 1 - c, big_n)?.scale(&inv_nm);
            acc += e * t;
        }
        Ok(acc.scale(&Float::with_val(p, self.qp.q() - 1u32)))
    }

    fn aq(&mut self, m: u32, n: u32, coef: ACoefficient) -> Result<CValue> {
        let p = self.qp.prec();
        let (mi, ni) = (m as i64, n as i64);
        let mut acc = CValue::zero(p);
        for a in 0..mi {
            for c in 0..=a.min(ni) {
                let k = coef.get(a, ni, c);
                if k.is_zero() {
                    continue;
                }
                let k = k.eval(self.qp);
                let mut inner = CValue::zero(p);
                for i in 0..=(a - c) {
                    let ci = self.int(binom(a - c, i));
                    let g = ni + a - c - i;
                    if a < ni {
                        for j in 0..=(ni - a - 1) {
                            let w = Float::with_val(p, ci.clone() * self.int(binom(ni - a - 1, j))) * self.omq_pow((i + j) as u32);
                            inner += self.zeta(&[mi - a - j, g])?.scale(&w);
                        }
                    } else {
                        let w = ci * self.omq_pow(i as u32);
                        inner += self.x_gamma(g as u32, (mi - a) as u32, (mi - ni) as u32)?.scale(&w);
                    }
                }
                acc += k * inner;
            }
        }
        Ok(acc)
    }
}

trait PowU {
    fn pow_u(self, n: u32) -> Float;
}

impl PowU for Float {
    fn pow_u(self, n: u32) -> Float {
        use rug::ops::Pow;
        self.pow(n)
    }
}

fn check_mn(m: u32, n: u32) -> Result<()> {
    if m < 2 || n < 2 || m == n {
        return Err(Error::Domain(format!("need integers m, n ≥ 2 with m ≠ n (got {m}, {n})")));
    }
    Ok(())
}

/// `A_q(m,n)`: the words whose innermost letter is the pole form of ζ_q(m).
pub fn aq(m: u32, n: u32, coef: ACoefficient, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    check_mn(m, n)?;
    let mut ctx = Ctx::new(qp, cfg);
    let v = ctx.aq(m, n, coef)?;
    Ok(ctx.finish(v))
}

/// `B_q(m,n)`: the words whose innermost letter is the collapse of both pole forms.
pub fn bq(m: u32, n: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    check_mn(m, n)?;
    let mut ctx = Ctx::new(qp, cfg);
    let v = ctx.bq(m, n)?;
    Ok(ctx.finish(v))
}

/// `X_γ(r,s) = Li_{q;r,γ}(q^s, q^{γ-1})` for `s ≥ r ≥ 1`, `γ ≥ 2`, in terms of
/// double ζ_q values and `T^jζ_q(γ)`.
pub fn x_gamma(g: u32, r: u32, s: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    if g < 2 || r < 1 || s < r {
        return Err(Error::Domain(format!("X_γ(r,s) needs γ ≥ 2 and s ≥ r ≥ 1 (got γ={g}, r={r}, s={s})")));
    }
    let mut ctx = Ctx::new(qp, cfg);
    let v = ctx.x_gamma(g, r, s)?;
    Ok(ctx.finish(v))
}

/// `T^jζ_q(γ)` for `j ≥ 1` in closed form.
pub fn t_closed(j: u32, g: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    if j == 0 || g < 2 {
        return Err(Error::Domain(format!("closed T^j needs j ≥ 1 and γ ≥ 2 (got j={j}, γ={g})")));
    }
    let mut ctx = Ctx::new(qp, cfg);
    let v = ctx.t_closed(j, g)?;
    Ok(ctx.finish(v))
}

/// Closed `T^j` against its defining series; the printed remainder is reported as a part.
pub fn verify_t(j: u32, g: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<Verification> {
    let series = t_series(j, g, qp, cfg)?.value;
    let mut ctx = Ctx::new(qp, cfg);
    let closed = ctx.t_closed(j, g)?;
    let printed = ctx.t_printed(j, g)?;
    let printed_res = CValue::from_f64((&printed - &series).abs_f64(), qp.prec());
    Ok(Verification::new(format!("T^{j} zeta_q({g})"), series, closed, check_tol(cfg))
        .part("printed_form", printed)
        .part("printed_residual", printed_res))
}

/// `Li_{q;γ}(q^{e+γ})` against its reduction to ζ_q values and `Li_{q;1}(q^{e'+1})`;
/// the printed reduction (remainder `(q-1)^{γ-2}(ξ_q(e+1) - ξ_q(0))`) is reported as a part.
pub fn lemma_li_shift(e: u32, g: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<Verification> {
    if g < 2 {
        return Err(Error::Domain(format!("the Li shift needs γ ≥ 2 (got {g})")));
    }
    let p = qp.prec();
    let z = SVec::new(vec![CValue::real(qp.powi((e + g) as i64))])?;
    let lhs = qpolylog_direct(&[g], &z, qp, cfg)?.value;
    let mut ctx = Ctx::new(qp, cfg);
    let mut head = CValue::zero(p);
    for i in 0..=g - 2 {
        let w = ctx.qm1_pow(i) * ctx.int(binom((i + e) as i64, e as i64));
        head += ctx.zeta(&[(g - i) as i64])?.scale(&w);
    }
    let mut tail = CValue::zero(p);
    for ep in 0..=e {
        let li1 = qpolylog_direct(&[1], &SVec::new(vec![CValue::real(qp.powi((ep + 1) as i64))])?, qp, cfg)?.value;
        tail += li1.scale(&ctx.int(binom((e - ep + g - 2) as i64, (g - 2) as i64)));
    }
    let rhs = &head + &tail.scale(&ctx.qm1_pow(g - 1));
    let printed = &head + &(ctx.xi(e + 1)? - ctx.xi(0)?).scale(&ctx.qm1_pow(g - 2));
    let printed_res = CValue::from_f64((&printed - &lhs).abs_f64(), p);
    Ok(Verification::new(format!("Li_q;{g}(q^{})", e + g), lhs, rhs, check_tol(cfg))
        .part("printed_form", printed)
        .part("printed_residual", printed_res))
}

/// The two binomial-coefficient expansions chained: `Li_{q;m-α,β}(q^{m-n}, q^{n-1})`
/// as a combination of double ζ_q values (requires `α < n`, `β ≥ n`).
pub fn ligb_chain(m: u32, n: u32, alpha: u32, beta: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    if alpha >= n || alpha >= m || beta < n {
        return Err(Error::Domain("the chained expansion needs α < min(m,n) and β ≥ n".into()));
    }
    let p = qp.prec();
    let (mi, ni, a, b) = (m as i64, n as i64, alpha as i64, beta as i64);
    let mut ctx = Ctx::new(qp, cfg);
    let mut acc = CValue::zero(p);
    for i in 0..=(b - ni) {
        for j in 0..=(ni - a - 1) {
            let w = ctx.int(binom(b - ni, i) * binom(ni - a - 1, j)) * ctx.omq_pow((i + j) as u32);
            acc += ctx.zeta(&[mi - a - j, b - i])?.scale(&w);
        }
    }
    Ok(ctx.finish(acc))
}

/// `Li_{q;m-α,β}(q^{m-n}, q^{n-1})` by its series (as `f_q` with exponents `(m-n, n-1)`).
pub fn ligb_direct(m: u32, n: u32, alpha: u32, beta: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    let p = qp.prec();
    let s = SVec::from_ints(&[m as i64 - alpha as i64, beta as i64], p);
    let t = SVec::from_ints(&[m as i64 - n as i64, n as i64 - 1], p);
    fq_direct(&s, &t, qp, cfg)
}

/// `ζ_q(m)ζ_q(n) = A_q(m,n) + A_q(n,m) + B_q(m,n)`.
pub fn verify_product(m: u32, n: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<Verification> {
    check_mn(m, n)?;
    let mut ctx = Ctx::new(qp, cfg);
    let zm = ctx.zeta(&[m as i64])?;
    let zn = ctx.zeta(&[n as i64])?;
    let a_mn = ctx.aq(m, n, ACoefficient::Corrected)?;
    let a_nm = ctx.aq(n, m, ACoefficient::Corrected)?;
    let b = ctx.bq(m, n)?;
    let printed = ctx.aq(m, n, ACoefficient::Printed)? + ctx.aq(n, m, ACoefficient::Printed)? + b.clone();
    let lhs = &zm * &zn;
    let rhs = &(&a_mn + &a_nm) + &b;
    let printed_res = CValue::from_f64((&printed - &lhs).abs_f64(), qp.prec());
    Ok(Verification::new(format!("zeta_q({m}) zeta_q({n})"), lhs, rhs, check_tol(cfg))
        .part(format!("zeta_q({m})"), zm)
        .part(format!("zeta_q({n})"), zn)
        .part(format!("A_q({m},{n})"), a_mn)
        .part(format!("A_q({n},{m})"), a_nm)
        .part(format!("B_q({m},{n})"), b)
        .part("rhs_printed_coefficients", printed)
        .part("printed_residual", printed_res))
}

/// `X_γ(r,s)` from its reduction against the q-polylog series.
pub fn verify_x_gamma(g: u32, r: u32, s: u32, qp: &QParam, cfg: &SeriesConfig) -> Result<Verification> {
    let reduced = x_gamma(g, r, s, qp, cfg)?.value;
    let z = SVec::new(vec![CValue::real(qp.powi(s as i64)), CValue::real(qp.powi(g as i64 - 1))])?;
    let direct = qpolylog_direct(&[r, g], &z, qp, cfg)?.value;
    Ok(Verification::new(format!("X_{g}({r},{s})"), direct, reduced, check_tol(cfg)))
}

/// `Σ_{i=0}^{σ} C(i+e-1, e-1) = C(σ+e, e)` for `e ≥ 1`.
pub fn combid_holds(sigma: u32, e: u32) -> bool {
    if e == 0 {
        return false;
    }
    let (s, e) = (sigma as i64, e as i64);
    let lhs: Integer = (0..=s).map(|i| binom(i + e - 1, e - 1)).sum();
    lhs == binom(s + e, e)
}

/// Quasi-shuffle of two words of forms with collapses; each collapse carries `(q-1)`.
fn quasi_shuffle(u: &[OneForm], v: &[OneForm], prec: u32) -> Vec<(u32, Vec<OneForm>)> {
    if u.is_empty() {
        return vec![(0, v.to_vec())];
    }
    if v.is_empty() {
        return vec![(0, u.to_vec())];
    }
    let mut out = Vec::new();
    let prepend = |f: &OneForm, rest: Vec<(u32, Vec<OneForm>)>, bump: u32, out: &mut Vec<(u32, Vec<OneForm>)>| {
        for (c, mut w) in rest {
            w.insert(0, f.clone());
            out.push((c + bump, w));
        }
    };
    prepend(&u[0], quasi_shuffle(&u[1..], v, prec), 0, &mut out);
    prepend(&v[0], quasi_shuffle(u, &v[1..], prec), 0, &mut out);
    let merged = OneForm::Collapse(pole_of(&u[0], prec), pole_of(&v[0], prec));
    prepend(&merged, quasi_shuffle(&u[1..], &v[1..], prec), 1, &mut out);
    out
}

fn pole_of(f: &OneForm, p: u32) -> CValue {
    match f {
        OneForm::Pole(a) => a.clone(),
        _ => CValue::zero(p),
    }
}

/// Rewrites collapses into single poles: for `a ≠ b`
/// `t/((t-a)(t-b)) = (b/(t-b) - a/(t-a))/(b-a)`, for `a = b` `1/(t-b) + b/(t-b)²`.
fn expand_word(w: &[OneForm], prec: u32) -> Vec<(CValue, Vec<OneForm>)> {
    let mut acc: Vec<(CValue, Vec<OneForm>)> = vec![(CValue::one(prec), Vec::new())];
    for f in w {
        let options: Vec<(CValue, OneForm)> = match f {
            OneForm::Collapse(a, b) => {
                if (a - b).abs_f64() == 0.0 {
                    vec![(CValue::one(prec), OneForm::Pole(b.clone())), (CValue::one(prec), OneForm::DoublePole(b.clone()))]
                } else {
                    let d = b - a;
                    vec![(b / &d, OneForm::Pole(b.clone())), (-(a / &d), OneForm::Pole(a.clone()))]
                }
            }
            other => vec![(CValue::one(prec), other.clone())],
        };
        let mut next = Vec::new();
        for (k, word) in &acc {
            for (k2, f2) in &options {
                if k2.is_zero() {
                    continue;
                }
                let mut nw = word.clone();
                nw.push(f2.clone());
                next.push((k * k2, nw));
            }
        }
        acc = next;
    }
    acc
}

fn pole_forms(poles: &[CValue]) -> Vec<OneForm> {
    poles.iter().map(|a| if a.is_zero() { OneForm::Dt } else { OneForm::Pole(a.clone()) }).collect()
}

/// `∫_0^b u_1∘…∘u_r · ∫_0^b v_1∘…∘v_s` against the quasi-shuffle of the two words,
/// `u_i = d_qt/(t-a_i)`, `v_j = d_qt/(t-b_j)` (a zero pole stands for `d_qt/t`).
pub fn verify_qshuffle_lemma(
    poles_u: &[CValue],
    poles_v: &[CValue],
    upper: &CValue,
    qp: &QParam,
    cfg: &SeriesConfig,
) -> Result<Verification> {
    if poles_u.is_empty() || poles_v.is_empty() {
        return Err(Error::Domain("both words need at least one form".into()));
    }
    let p = qp.prec();
    let u = pole_forms(poles_u);
    let v = pole_forms(poles_v);
    let lhs = q_iterated(&u, upper, qp, cfg)?.value * q_iterated(&v, upper, qp, cfg)?.value;
    let qm1 = Float::with_val(p, qp.q() - 1u32);
    let mut rhs = CValue::zero(p);
    let mut words = 0usize;
    for (c, w) in quasi_shuffle(&u, &v, p) {
        let weight = Float::with_val(p, qm1.clone().pow_u(c));
        for (k, ew) in expand_word(&w, p) {
            rhs += (k * q_iterated(&ew, upper, qp, cfg)?.value).scale(&weight);
        }
        words += 1;
    }
    Ok(Verification::new(
        format!("q-shuffle of words of length {} and {}", poles_u.len(), poles_v.len()),
        lhs,
        rhs,
        check_tol(cfg),
    )
    .part("words", CValue::from_i64(words as i64, p)))
}
