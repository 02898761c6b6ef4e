//! Jackson q-derivative and q-integral, iterated Jackson integrals of
//! rational one-forms, and the q-polylog integral representation.

use rug::Float;

use crate::error::{Error, Result};
use crate::num::CValue;
use crate::qcore::{EvalResult, QParam};
use crate::qseries::{qpolylog_direct, SVec, SeriesConfig};
use crate::verify::{check_tol, Verification};

/// `D_q f(z) = (f(z) - f(qz)) / ((1-q) z)`.
pub fn jackson_derivative(f: impl Fn(&CValue) -> Result<CValue>, z: &CValue, qp: &QParam) -> Result<CValue> {
    if z.is_zero() {
        return Err(Error::Domain("the q-derivative is taken at z ≠ 0".into()));
    }
    let qz = z.scale(qp.q());
    let den = z.scale(&qp.one_minus_q());
    Ok((f(z)? - f(&qz)?) / den)
}

/// `∫_a^b f d_qx = Σ_{i≥0} f(a + q^i (b-a)) (q^i - q^{i+1}) (b-a)`.
///
/// For `a ≠ 0` this is not the difference of the two integrals from 0,
/// so the integral is not additive in its endpoints.
pub fn jackson_integral(
    f: impl Fn(&CValue) -> Result<CValue>,
    a: &CValue,
    b: &CValue,
    qp: &QParam,
    cfg: &SeriesConfig,
) -> Result<EvalResult> {
    let p = qp.prec();
    let width = b - a;
    let q = qp.q().to_f64();
    let mut qi = Float::with_val(p, 1);
    let mut acc = CValue::zero(p);
    let mut last = f64::INFINITY;
    for i in 0..cfg.max_terms {
        let step = Float::with_val(p, &qi * qp.one_minus_q());
        let x = a + &width.scale(&qi);
        let t = f(&x)? * width.scale(&step);
        let m = t.abs_f64();
        acc += &t;
        // f is assumed bounded near a, so the tail is dominated by a geometric series
        if i >= 8 && m <= last && 2.0 * m * q / (1.0 - q) < cfg.tol {
            return Ok(EvalResult {
                value: acc,
                error_bound: 2.0 * m * q / (1.0 - q),
                terms_used: i + 1,
                truncated: false,
            });
        }
        last = m;
        qi *= qp.q();
    }
    Ok(EvalResult {
        value: acc,
        error_bound: last * q / (1.0 - q),
        terms_used: cfg.max_terms,
        truncated: true,
    })
}

/// Integrands of iterated Jackson integrals, each meant as `(...) d_qt`.
#[derive(Clone, Debug)]
pub enum OneForm {
    /// `d_qt / (t - a)`
    Pole(CValue),
    /// `d_qt / t`
    Dt,
    /// `t d_qt / ((t - a)(t - b))`
    Collapse(CValue, CValue),
    /// `b d_qt / (t - b)²`
    DoublePole(CValue),
}

impl OneForm {
    fn poles(&self) -> Vec<&CValue> {
        match self {
            OneForm::Pole(a) | OneForm::DoublePole(a) => vec![a],
            OneForm::Collapse(a, b) => vec![a, b],
            OneForm::Dt => vec![],
        }
    }

    /// Whether the form behaves like `c/t` at the origin (so it cannot be innermost).
    fn singular_at_zero(&self) -> bool {
        match self {
            OneForm::Dt => true,
            OneForm::Pole(a) => a.is_zero(),
            OneForm::Collapse(a, b) => a.is_zero() && b.is_zero(),
            OneForm::DoublePole(_) => false,
        }
    }

    /// `t · coefficient(t)`, the quantity the Jackson sum actually weights.
    fn times_t(&self, t: &CValue) -> CValue {
        match self {
            OneForm::Pole(a) => t / &(t - a),
            OneForm::Dt => CValue::one(t.prec()),
            OneForm::Collapse(a, b) => &(t * t) / &((t - a) * (t - b)),
            OneForm::DoublePole(b) => {
                let d = t - b;
                &(t * b) / &(&d * &d)
            }
        }
    }
}

/// `∫_0^b ω_1 ∘ ω_2 ∘ ... ∘ ω_r`, `ω_1` innermost, all integrals Jackson integrals
/// on the lattice `b q^l`.
///
/// With `F_0 = 1` and `F_k(x) = ∫_0^x F_{k-1} ω_k`, each `F_k` on the lattice is a
/// suffix sum of the previous level, so the cost is linear in the lattice size.
pub fn q_iterated(forms: &[OneForm], upper: &CValue, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    let p = qp.prec();
    if forms.is_empty() {
        return Ok(EvalResult::exact(CValue::one(p)));
    }
    if forms[0].singular_at_zero() {
        return Err(Error::Convergence("innermost form d_qt/t makes the iterated integral diverge".into()));
    }
    if upper.is_zero() {
        return Ok(EvalResult::exact(CValue::zero(p)));
    }
    let q = qp.q().to_f64();
    let depth = forms.len() as f64;
    let n = ((cfg.tol * (1.0 - q) * 1e-3).ln() / q.ln()).ceil() as usize + 8 * forms.len() + 8;
    let n = n.min(cfg.max_terms);

    let ub = upper.abs().to_f64().max(1e-300);
    let near = 10f64.powf(-(qp.digits() as f64) / 2.0) * ub;
    let mut lattice = Vec::with_capacity(n);
    let mut ql = Float::with_val(p, 1);
    for _ in 0..n {
        lattice.push(upper.scale(&ql));
        ql *= qp.q();
    }
    for f in forms {
        for a in f.poles() {
            if a.is_zero() {
                continue;
            }
            // the pole can only meet the lattice along the ray through `upper`
            let ratio = a / upper;
            let r = ratio.re.to_f64();
            if ratio.im.to_f64().abs() * ub < near && r > 0.0 && r <= 1.0 {
                let l = (r.ln() / q.ln()).round();
                let hit = upper.scale(&Float::with_val(p, qp.powi(l as i64)));
                if (&hit - a).abs_f64() < near {
                    return Err(Error::Singular(format!(
                        "pole {a} lies on the Jackson lattice (b q^{l})"
                    )));
                }
            }
        }
    }

    let omq = qp.one_minus_q();
    let mut prev: Vec<CValue> = vec![CValue::one(p); n];
    let mut tail_bound = 0.0;
    for f in forms {
        let mut next = vec![CValue::zero(p); n];
        let mut acc = CValue::zero(p);
        for l in (0..n).rev() {
            let g = f.times_t(&lattice[l]) * &prev[l];
            if l == n - 1 {
                tail_bound = g.abs_f64() * q / (1.0 - q);
            }
            acc += &g;
            next[l] = acc.scale(&omq);
        }
        prev = next;
    }
    let value = prev.swap_remove(0);
    Ok(EvalResult {
        value,
        error_bound: tail_bound * depth,
        terms_used: n,
        truncated: n == cfg.max_terms,
    })
}

/// The forms in `Li_{q;n}(z) = (-1)^d ∫_0^1 d_qt/(t-a_1) ∘ (d_qt/t)^{n_1-1} ∘ ... `,
/// `a_j = 1/(z_j ... z_d)`.
pub fn polylog_forms(n: &[u32], z: &SVec) -> Result<Vec<OneForm>> {
    if n.len() != z.depth() || n.is_empty() {
        return Err(Error::Domain("n and z must have the same positive depth".into()));
    }
    if n.iter().any(|&k| k == 0) {
        return Err(Error::Domain("polylog indices must be positive".into()));
    }
    let p = z.entries()[0].prec();
    let mut tails = vec![CValue::one(p); n.len()];
    let mut acc = CValue::one(p);
    for j in (0..n.len()).rev() {
        acc = &acc * &z.entries()[j];
        tails[j] = acc.clone();
    }
    let mut forms = Vec::new();
    for (j, &nj) in n.iter().enumerate() {
        if tails[j].is_zero() {
            return Err(Error::Domain("z_j ... z_d = 0 puts a pole at infinity".into()));
        }
        forms.push(OneForm::Pole(tails[j].recip()));
        forms.extend(std::iter::repeat(OneForm::Dt).take(nj as usize - 1));
    }
    Ok(forms)
}

/// `Li_{q;n}(z)` through its iterated Jackson-integral representation.
pub fn polylog_iterated(n: &[u32], z: &SVec, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    let forms = polylog_forms(n, z)?;
    let mut r = q_iterated(&forms, &CValue::one(qp.prec()), qp, cfg)?;
    if n.len() % 2 == 1 {
        r.value = -r.value;
    }
    Ok(r)
}

/// Residual of `D_q(fg) = D_q f·g + f·D_q g + x(q-1) D_q f·D_q g` at `x`.
pub fn q_leibniz_check(
    f: impl Fn(&CValue) -> Result<CValue>,
    g: impl Fn(&CValue) -> Result<CValue>,
    x: &CValue,
    qp: &QParam,
    tol: f64,
) -> Result<Verification> {
    let lhs = jackson_derivative(|t| Ok(f(t)? * g(t)?), x, qp)?;
    let df = jackson_derivative(&f, x, qp)?;
    let dg = jackson_derivative(&g, x, qp)?;
    let qm1 = Float::with_val(qp.prec(), qp.q() - 1u32);
    let rhs = &df * &g(x)? + &f(x)? * &dg + (x * &(&df * &dg)).scale(&qm1);
    Ok(Verification::new(format!("q-Leibniz at x = {x}"), lhs, rhs, tol))
}

/// Residual of `∫_0^x D_q f d_qt = f(x) - f(0)`.
pub fn ftc_check(
    f: impl Fn(&CValue) -> Result<CValue>,
    x: &CValue,
    qp: &QParam,
    cfg: &SeriesConfig,
) -> Result<Verification> {
    let p = qp.prec();
    let integral = jackson_integral(|t| jackson_derivative(&f, t, qp), &CValue::zero(p), x, qp, cfg)?;
    let rhs = f(x)? - f(&CValue::zero(p))?;
    Ok(Verification::new(format!("q-FTC on [0, {x}]"), integral.value, rhs, check_tol(cfg))
        .part("error_bound", CValue::from_f64(integral.error_bound, p)))
}

/// Checks the q-derivative of `Li_{q;n}(z)` in `z_j` (1-based) against the
/// depth-lowering formula.
pub fn verify_qdiff(n: &[u32], z: &SVec, j: usize, qp: &QParam, cfg: &SeriesConfig) -> Result<Verification> {
    let d = n.len();
    if j == 0 || j > d || z.depth() != d {
        return Err(Error::Domain(format!("need 1 ≤ j ≤ d = {d} and depth(z) = d")));
    }
    let p = qp.prec();
    let zs = z.entries();
    let zj = &zs[j - 1];
    let li = |nn: &[u32], zz: Vec<CValue>| -> Result<CValue> {
        if nn.is_empty() {
            return Ok(CValue::one(p));
        }
        Ok(qpolylog_direct(nn, &SVec::new(zz)?, qp, cfg)?.value)
    };
    let f0 = li(n, zs.to_vec())?;
    let mut moved = zs.to_vec();
    moved[j - 1] = zj.scale(qp.q());
    let f1 = li(n, moved)?;
    let lhs = (f0 - f1) / zj.scale(&qp.one_minus_q());

    let one = CValue::one(p);
    let rhs = if n[j - 1] >= 2 {
        let mut m = n.to_vec();
        m[j - 1] -= 1;
        li(&m, zs.to_vec())? / zj.clone()
    } else {
        let mut m = n.to_vec();
        m.remove(j - 1);
        // 1/(1-z_j) Li(..., z_{j-1} z_j, ...): z_j merges into its left neighbour
        let mut left = zs.to_vec();
        left.remove(j - 1);
        if j >= 2 {
            left[j - 2] = &left[j - 2] * zj;
        }
        let mut acc = li(&m, left)? / (&one - zj);
        if j < d {
            let mut right = zs.to_vec();
            right.remove(j - 1);
            right[j - 1] = &right[j - 1] * zj;
            acc -= &(li(&m, right)? / (zj * &(&one - zj)));
        }
        acc
    };
    Ok(Verification::new(
        format!("D_q in z_{j} of Li_q{n:?}"),
        lhs,
        rhs,
        check_tol(cfg) / qp.one_minus_q().to_f64(),
    ))
}
