//! Series (quasi-)shuffle products of ζ_q-words with exact coefficients in ℚ[q].
//!
//! Letters are kept structurally — a sum of named symbols plus an integer
//! offset — so merged letters like `a+b-1` compare exactly; numbers only
//! enter when a combination is evaluated.

use std::collections::BTreeMap;
use std::fmt;

use rug::Float;
use serde::{Serialize, Serializer};

use crate::continuation::qzeta_eval;
use crate::error::{Error, Result};
use crate::num::CValue;
use crate::poly::QPoly;
use crate::qcore::{EvalResult, QParam};
use crate::qseries::{SVec, SeriesConfig};
use crate::verify::{check_tol, Verification};

/// `Σ c_i · sym_i + offset`
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    syms: BTreeMap<String, i64>,
    offset: i64,
}

/// Values bound to the symbols appearing in letters.
pub type Env = BTreeMap<String, CValue>;

impl Letter {
    pub fn int(n: i64) -> Self {
        Letter {
            syms: BTreeMap::new(),
            offset: n,
        }
    }

    pub fn sym(name: &str) -> Self {
        Letter {
            syms: BTreeMap::from([(name.to_string(), 1)]),
            offset: 0,
        }
    }

    pub fn plus(&self, other: &Letter) -> Letter {
        let mut syms = self.syms.clone();
        for (k, v) in &other.syms {
            let e = syms.entry(k.clone()).or_insert(0);
            *e += v;
            if *e == 0 {
                syms.remove(k);
            }
        }
        Letter {
            syms,
            offset: self.offset + other.offset,
        }
    }

    pub fn shifted(&self, k: i64) -> Letter {
        Letter {
            syms: self.syms.clone(),
            offset: self.offset + k,
        }
    }

    pub fn eval(&self, env: &Env, prec: u32) -> Result<CValue> {
        let mut acc = CValue::from_i64(self.offset, prec);
        for (name, c) in &self.syms {
            let v = env
                .get(name)
                .ok_or_else(|| Error::Domain(format!("no value bound to letter symbol '{name}'")))?;
            acc += v.scale_i64(*c);
        }
        Ok(acc)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, c) in &self.syms {
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}{name}")?;
            } else {
                write!(f, "{sign}{mag}*{name}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.offset)
        } else if self.offset > 0 {
            write!(f, "+{}", self.offset)
        } else if self.offset < 0 {
            write!(f, "{}", self.offset)
        } else {
            Ok(())
        }
    }
}

/// Argument list of a ζ_q value; the empty word stands for the constant 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn from_ints(ns: &[i64]) -> Self {
        Word(ns.iter().map(|&n| Letter::int(n)).collect())
    }

    pub fn symbols(names: &[&str]) -> Self {
        Word(names.iter().map(|n| Letter::sym(n)).collect())
    }

    /// Parses a comma-separated word. Integer entries become exact letters; every
    /// other entry becomes a symbol `<prefix><position>` bound to its value in `env`.
    pub fn parse(text: &str, prefix: &str, env: &mut Env, prec: u32) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Word::default());
        }
        let mut letters = Vec::new();
        for (i, part) in text.split(',').enumerate() {
            let part = part.trim();
            if let Ok(n) = part.parse::<i64>() {
                letters.push(Letter::int(n));
                continue;
            }
            let v = CValue::parse(part, prec)?;
            let name = format!("{prefix}{}", i + 1);
            env.insert(name.clone(), v);
            letters.push(Letter::sym(&name));
        }
        Ok(Word(letters))
    }

    /// Word for a numeric signature: exact integers stay numeric, others become `s1, s2, ...`.
    pub fn from_svec(s: &SVec) -> (Self, Env) {
        let mut env = Env::new();
        let letters = s
            .entries()
            .iter()
            .enumerate()
            .map(|(i, x)| match x.as_exact_integer() {
                Some(n) => Letter::int(n),
                None => {
                    let name = format!("s{}", i + 1);
                    env.insert(name.clone(), x.clone());
                    Letter::sym(&name)
                }
            })
            .collect();
        (Word(letters), env)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_svec(&self, env: &Env, prec: u32) -> Result<Option<SVec>> {
        if self.0.is_empty() {
            return Ok(None);
        }
        let e = self.0.iter().map(|l| l.eval(env, prec)).collect::<Result<Vec<_>>>()?;
        Ok(Some(SVec::new(e)?))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Finite combination `Σ coeff(q) · ζ_q(word)` in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZCombo {
    terms: BTreeMap<Word, QPoly>,
}

impl ZCombo {
    pub fn zero() -> Self {
        ZCombo::default()
    }

    pub fn single(w: Word) -> Self {
        let mut c = ZCombo::zero();
        c.add_term(w, &QPoly::one());
        c
    }

    pub fn add_term(&mut self, w: Word, coeff: &QPoly) {
        let slot = self.terms.entry(w.clone()).or_default();
        *slot = &*slot + coeff;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&mut self, other: &ZCombo, k: &QPoly) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), &(c * k));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &QPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> QPoly {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    fn prepend(&self, l: &Letter) -> ZCombo {
        ZCombo {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| {
                    let mut v = Vec::with_capacity(w.len() + 1);
                    v.push(l.clone());
                    v.extend(w.0.iter().cloned());
                    (Word(v), c.clone())
                })
                .collect(),
        }
    }

    /// Coefficients specialised at `q = 1`.
    pub fn at_q_one(&self) -> ZCombo {
        let mut out = ZCombo::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &QPoly::constant(c.at_one()));
        }
        out
    }

    /// Applies the shifting operator `𝒮_j` (0-based `j`): `ζ(w) ↦ ζ(w) + (1-q) ζ(w - e_j)`.
    pub fn shift(&self, j: usize) -> Result<ZCombo> {
        let mut out = ZCombo::zero();
        let omq = QPoly::one_minus_q();
        for (w, c) in &self.terms {
            if j >= w.len() {
                return Err(Error::Domain(format!("shift index {} exceeds depth {}", j + 1, w.len())));
            }
            out.add_term(w.clone(), c);
            let mut lowered = w.clone();
            lowered.0[j] = lowered.0[j].shifted(-1);
            out.add_term(lowered, &(c * &omq));
        }
        Ok(out)
    }

    /// One term per line, `coeff * Z(letters)`, in canonical order.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        for (w, c) in &self.terms {
            s.push_str(&format!("({c}) * Z{w}\n"));
        }
        s
    }
}

impl fmt::Display for ZCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*Z{w}")?;
        }
        Ok(())
    }
}

impl Serialize for ZCombo {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

fn product(w1: &[Letter], w2: &[Letter], deformed: bool) -> ZCombo {
    if w1.is_empty() {
        return ZCombo::single(Word(w2.to_vec()));
    }
    if w2.is_empty() {
        return ZCombo::single(Word(w1.to_vec()));
    }
    let (a, b) = (&w1[0], &w2[0]);
    let one = QPoly::one();
    let mut out = product(&w1[1..], w2, deformed).prepend(a);
    out.add(&product(w1, &w2[1..], deformed).prepend(b), &one);
    let inner = product(&w1[1..], &w2[1..], deformed);
    let ab = a.plus(b);
    out.add(&inner.prepend(&ab), &one);
    if deformed {
        out.add(&inner.prepend(&ab.shifted(-1)), &QPoly::one_minus_q());
    }
    out
}

/// `w1 ∗_q w2`: the merged letter `𝒮(a+b)` contributes `(a+b) + (1-q)(a+b-1)`.
pub fn qshuffle(w1: &Word, w2: &Word) -> ZCombo {
    product(&w1.0, &w2.0, true)
}

/// Classical quasi-shuffle `w1 ∗ w2`.
pub fn classical_shuffle(w1: &Word, w2: &Word) -> ZCombo {
    product(&w1.0, &w2.0, false)
}

/// `Σ coeff(q) ζ_q(word)`, with the empty word evaluating to 1.
pub fn eval_combo(c: &ZCombo, env: &Env, qp: &QParam, cfg: &SeriesConfig) -> Result<EvalResult> {
    let p = qp.prec();
    let mut acc = CValue::zero(p);
    let mut err = 0.0;
    let mut terms = 0;
    let mut truncated = false;
    for (w, coeff) in c.terms() {
        let k = coeff.eval(qp);
        let v = match w.to_svec(env, p)? {
            None => EvalResult::exact(CValue::one(p)),
            Some(s) => qzeta_eval(&s, qp, cfg).map_err(|e| match e {
                Error::Pole { message, report } => Error::Pole {
                    message: format!("{message} (term Z{w})"),
                    report,
                },
                other => other,
            })?,
        };
        err += v.error_bound * k.abs_f64();
        terms += v.terms_used;
        truncated |= v.truncated;
        acc += &k * &v.value;
    }
    Ok(EvalResult {
        value: acc,
        error_bound: err,
        terms_used: terms,
        truncated,
    })
}

/// `ζ_q(w1)ζ_q(w2)` against `ζ_q(w1 ∗_q w2)`. The variant with `(1-q)` read as
/// `(q-1)` (coefficients evaluated at `2-q`) is reported as a part.
pub fn verify_series_shuffle(w1: &Word, w2: &Word, env: &Env, qp: &QParam, cfg: &SeriesConfig) -> Result<Verification> {
    let p = qp.prec();
    let a = eval_combo(&ZCombo::single(w1.clone()), env, qp, cfg)?.value;
    let b = eval_combo(&ZCombo::single(w2.clone()), env, qp, cfg)?.value;
    let combo = qshuffle(w1, w2);
    let rhs = eval_combo(&combo, env, qp, cfg)?.value;
    let flipped = Float::with_val(p, 2 - qp.q());
    let mut printed = CValue::zero(p);
    for (w, coeff) in combo.terms() {
        let v = eval_combo(&ZCombo::single(w.clone()), env, qp, cfg)?.value;
        printed += v.scale(&coeff.eval_float(&flipped));
    }
    let lhs = &a * &b;
    let printed_res = CValue::from_f64((&printed - &lhs).abs_f64(), p);
    Ok(Verification::new(format!("Z{w1} * Z{w2}"), lhs, rhs, check_tol(cfg))
        .part(format!("zeta_q{w1}"), a)
        .part(format!("zeta_q{w2}"), b)
        .part("expansion", CValue::from_i64(combo.len() as i64, p))
        .part("printed_sign_rhs", printed)
        .part("printed_residual", printed_res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_product() {
        let c = qshuffle(&Word::symbols(&["a"]), &Word::symbols(&["b"]));
        assert_eq!(c.len(), 4);
        let ab = Letter::sym("a").plus(&Letter::sym("b"));
        assert_eq!(c.coeff(&Word(vec![ab.clone()])), QPoly::one());
        assert_eq!(c.coeff(&Word(vec![ab.shifted(-1)])), QPoly::one_minus_q());
        assert_eq!(c.coeff(&Word::symbols(&["a", "b"])), QPoly::one());
        assert_eq!(ab.shifted(-1).to_string(), "a+b-1");
    }

    #[test]
    fn unit_and_commutativity() {
        let w = Word::symbols(&["x", "y"]);
        assert_eq!(qshuffle(&w, &Word::default()), ZCombo::single(w.clone()));
        assert_eq!(classical_shuffle(&Word::default(), &Word::default()), ZCombo::single(Word::default()));
        let u = Word::symbols(&["a", "b", "c"]);
        assert_eq!(qshuffle(&w, &u), qshuffle(&u, &w));
    }

    #[test]
    fn classical_specialisation() {
        let w1 = Word::symbols(&["a", "b"]);
        let w2 = Word::symbols(&["c"]);
        assert_eq!(qshuffle(&w1, &w2).at_q_one(), classical_shuffle(&w1, &w2));
    }

    #[test]
    fn numeric_product() {
        let qp = QParam::parse("0.8", 40).unwrap();
        let cfg = SeriesConfig::for_digits(40);
        let env = Env::new();
        let c = qshuffle(&Word::from_ints(&[3]), &Word::from_ints(&[2]));
        let lhs = eval_combo(&c, &env, &qp, &cfg).unwrap().value;
        let z = |v: &[i64]| qzeta_eval(&SVec::from_ints(v, qp.prec()), &qp, &cfg).unwrap().value;
        assert!((lhs - &z(&[3]) * &z(&[2])).abs_f64() < 1e-35);
        let v = verify_series_shuffle(&Word::from_ints(&[3]), &Word::from_ints(&[2]), &env, &qp, &cfg).unwrap();
        assert!(v.pass);
        assert!(v.parts[4].value.abs_f64() > 1e-3);
    }

    #[test]
    fn shifts_commute() {
        let base = ZCombo::single(Word::symbols(&["a", "b"]));
        let x = base.shift(0).unwrap().shift(1).unwrap();
        let y = base.shift(1).unwrap().shift(0).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.len(), 4);
    }
}
