//! One function per subcommand; each returns the report or a classified failure.

use std::time::Instant;

use qzeta::classical::{dbzeta_neg, dbzeta_table, default_em_order, mzv, riemann_zeta, zeta_nonpositive, TableEntry};
use qzeta::continuation::{
    numeric_residue, pole_report, q_to_1_limit, qpolylog_continued, qzeta_eval_with,
    ExtrapolationConfig, LimitOrder, Method,
};
use qzeta::integral_shuffle::{lemma_li_shift, verify_product, verify_qshuffle_lemma};
use qzeta::num::{digits_to_bits, CValue};
use qzeta::qcalculus::{ftc_check, verify_qdiff};
use qzeta::qseries::qpolylog_direct;
use qzeta::shuffle::{verify_series_shuffle, Env, Word};
use qzeta::special_values::{kgen2_value, res_closed, res_limit_target, res_neg3_2};
use qzeta::verify::Verification;
use qzeta::{Error, QParam, SVec, SeriesConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::report::{Config, Report, Residual};
use crate::{Command, Global, Mode, Suite};

/// A failure with its exit code: 1 usage, 2 pole/singular, 3 non-convergence, 4 verification.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub report: Option<Report>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Domain(_) | Error::Convergence(_) => 1,
            Error::Pole { .. } | Error::Singular(_) => 2,
            Error::NonConvergence(_) => 3,
        };
        let message = match &e {
            Error::Pole { report: Some(r), .. } => format!("{e}\npole report: {}", serde_json::to_string(r).unwrap_or_default()),
            _ => e.to_string(),
        };
        Failure { code, message, report: None }
    }
}

pub fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into(), report: None }
}

type Out = std::result::Result<Report, Failure>;

struct Ctx {
    g: Global,
    start: Instant,
}

impl Ctx {
    fn cfg(&self) -> SeriesConfig {
        let base = SeriesConfig::for_digits(self.g.prec);
        match self.g.tol {
            Some(t) => base.with_tol(t),
            None => base,
        }
    }

    fn qp(&self, q: &str) -> Result<QParam, Failure> {
        Ok(QParam::parse(q, self.g.prec)?)
    }

    fn config(&self, q: Option<&str>) -> Config {
        let cfg = self.cfg();
        Config {
            q: q.map(str::to_string),
            digits: self.g.prec,
            bits: digits_to_bits(self.g.prec),
            tol: cfg.tol,
            max_terms: cfg.max_terms,
            seed: self.g.seed,
            extrapolation: None,
            q_ladder: None,
        }
    }

    fn report(&self, command: &str, inputs: Value, results: Vec<Value>, residuals: Vec<Residual>, config: Config) -> Report {
        Report {
            command: command.to_string(),
            inputs,
            results,
            residuals,
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
            config,
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn parse_ints(text: &str) -> Result<Vec<i64>, Failure> {
    text.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| usage(format!("'{t}' is not an integer"))))
        .collect()
}

fn parse_u32s(text: &str) -> Result<Vec<u32>, Failure> {
    text.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| usage(format!("'{t}' is not a non-negative integer"))))
        .collect()
}

fn rational_value(r: &Rational) -> Value {
    json!({"exact": r.to_string(), "decimal": Float::with_val(128, r).to_f64()})
}

pub fn run(g: Global, cmd: Command) -> Out {
    let ctx = Ctx { g, start: Instant::now() };
    match cmd {
        Command::Eval { s, q, method, polylog, n, z } => eval(&ctx, s, &q, method.into(), polylog, n, z),
        Command::Residue { point, q, mode } => residue(&ctx, &point, &q, mode),
        Command::Limit { target, levels } => limit(&ctx, &target, levels),
        Command::Verify { suite } => verify(&ctx, suite),
        Command::Table { kmax, nmax, q } => table(&ctx, kmax, nmax, q),
    }
}

fn eval(ctx: &Ctx, s: Option<String>, q: &str, method: Method, polylog: bool, n: Option<String>, z: Option<String>) -> Out {
    let qp = ctx.qp(q)?;
    let cfg = ctx.cfg();
    let p = qp.prec();
    if polylog {
        let n = parse_u32s(&n.ok_or_else(|| usage("--polylog needs --n"))?)?;
        let z = SVec::parse(&z.ok_or_else(|| usage("--polylog needs --z"))?, p)?;
        let in_disc = z.entries().iter().all(|x| x.abs() < 1);
        let r = match method {
            Method::Direct => qpolylog_direct(&n, &z, &qp, &cfg)?,
            Method::Continued => qpolylog_continued(&n, &z, &qp, &cfg)?,
            Method::Auto if in_disc => qpolylog_direct(&n, &z, &qp, &cfg)?,
            Method::Auto => qpolylog_continued(&n, &z, &qp, &cfg)?,
        };
        let inputs = json!({"polylog": true, "n": n, "z": to_value(&z.entries()), "q": q, "method": method});
        return Ok(ctx.report("eval", inputs, vec![to_value(&r)], vec![], ctx.config(Some(q))));
    }
    let s = SVec::parse(&s.ok_or_else(|| usage("eval needs --s (or --polylog with --n/--z)"))?, p)?;
    let r = qzeta_eval_with(&s, &qp, &cfg, method)?;
    let mut v = to_value(&r);
    v["pole_distance"] = json!(pole_report(&s, &qp).distance);
    let inputs = json!({"s": to_value(&s.entries()), "q": q, "method": method});
    Ok(ctx.report("eval", inputs, vec![v], vec![], ctx.config(Some(q))))
}

/// Closed-form residue (in the last variable) where one is known.
fn closed_residue(point: &[i64], qp: &QParam) -> Result<Option<(String, CValue)>, Failure> {
    match *point {
        [1] => {
            let p = qp.prec();
            let v = Float::with_val(p, qp.q() - 1u32) / qp.log_q();
            Ok(Some(("(q-1)/log q".into(), CValue::real(v))))
        }
        [a, b] if b <= 0 && a >= 1 && a <= 2 - b => {
            let n = (-b) as u32;
            let k = (2 - b - a) as u32;
            Ok(Some((format!("res_closed(k={k}, n={n})"), res_closed(k, n, qp)?)))
        }
        [-3, 2] => Ok(Some(("-res_closed(3,3)".into(), res_neg3_2(qp)))),
        _ => Ok(None),
    }
}

fn residue(ctx: &Ctx, point: &str, q: &str, mode: Mode) -> Out {
    let qp = ctx.qp(q)?;
    let cfg = ctx.cfg();
    let pt = parse_ints(point)?;
    if pt.is_empty() || pt.len() > 2 {
        return Err(usage("--point takes one or two integers"));
    }
    let s = SVec::from_ints(&pt, qp.prec());
    let rep = pole_report(&s, &qp);
    if !rep.in_pole_set {
        return Err(usage(format!("({point}) is a regular point of zeta_q, no residue")));
    }
    let ext = ExtrapolationConfig::default();
    let mut result = json!({"point": pt, "pole": to_value(&rep)});
    let mut residuals = vec![];
    let closed = if mode != Mode::Numeric { closed_residue(&pt, &qp)? } else { None };
    if mode == Mode::Closed && closed.is_none() {
        return Err(usage(format!("no closed form is known at ({point}); use --mode numeric")));
    }
    if let Some((name, v)) = &closed {
        result["closed"] = json!({"formula": name, "value": to_value(v)});
    }
    if mode != Mode::Closed {
        let est = numeric_residue(&s, &qp, &cfg, &ext)?;
        result["numeric"] = to_value(&est);
        if let Some((_, c)) = &closed {
            let d = (&est.value - c).abs_f64();
            result["difference"] = json!(d);
            residuals.push(Residual { case: format!("closed vs numeric at ({point})"), residual: d, tol: 1e-8, pass: d <= 1e-8 });
        }
    }
    let mut config = ctx.config(Some(q));
    config.extrapolation = Some(ext);
    Ok(ctx.report("residue", json!({"point": pt, "q": q, "mode": mode}), vec![result], residuals, config))
}

fn limit(ctx: &Ctx, target: &str, levels: u32) -> Out {
    let digits = ctx.g.prec;
    let ext = ExtrapolationConfig::default();
    let last = levels + 2;
    let (kind, rest) = target.split_once(':').ok_or_else(|| usage("--target is zeta:<s>, residue:<point> or value:<point>[:R]"))?;
    let mut result = json!({"target": target});
    let classical: Option<Value>;
    let cmp: Option<CValue>;
    let exact = |t: &Rational| CValue::real(rug::Float::with_val(digits_to_bits(digits), t));
    let est = match kind {
        "zeta" => {
            let s = SVec::parse(rest, digits_to_bits(digits))?;
            let cfg = ctx.cfg();
            let est = q_to_1_limit(|qp| Ok(qzeta_eval_with(&SVec::parse(rest, qp.prec())?, qp, &cfg, Method::Auto)?.value), last, digits, &ext)?;
            let c = if s.depth() == 1 {
                riemann_zeta(&s.entries()[0], default_em_order(&s))
            } else {
                mzv(&s, default_em_order(&s))
            };
            match c {
                Ok(c) => {
                    cmp = Some(c.value.clone());
                    classical = Some(to_value(&c.value));
                }
                Err(e) => {
                    cmp = None;
                    classical = Some(json!({"unavailable": e.to_string()}));
                }
            }
            est
        }
        "residue" => {
            let pt = parse_ints(rest)?;
            let probe = QParam::parse("0.5", digits)?;
            if closed_residue(&pt, &probe)?.is_none() {
                return Err(usage(format!("no closed-form residue family contains ({rest})")));
            }
            let est = q_to_1_limit(|qp| Ok(closed_residue(&pt, qp).map_err(|f| Error::Domain(f.message))?.expect("checked").1), last, digits, &ext)?;
            let t: Rational = match *pt.as_slice() {
                [1] => Rational::from(1),
                [-3, 2] => Rational::new(),
                [a, b] => {
                    let n = (-b) as u32;
                    let k = (2 - b - a) as u32;
                    if k <= n { res_limit_target(k, n)? } else { zeta_nonpositive(n) }
                }
                _ => unreachable!(),
            };
            cmp = Some(exact(&t));
            classical = Some(rational_value(&t));
            est
        }
        "value" => {
            let (pt, ord) = match rest.rsplit_once(':') {
                Some((pt, o)) => (pt, o),
                None => (rest, ""),
            };
            let order = match ord {
                "" | "Z" | "s2-first" => LimitOrder::S2First,
                "R" | "s1-first" => LimitOrder::S1First,
                o => return Err(usage(format!("unknown limit order '{o}' (use R for zeta^R)"))),
            };
            let pt = parse_ints(pt)?;
            let [a, b] = pt[..] else { return Err(usage("value targets take a depth-2 point")) };
            if a > 0 || b > 0 {
                return Err(usage("value targets are non-positive integer points (-m,-n)"));
            }
            let (m, n) = ((-a) as u32, (-b) as u32);
            let est = q_to_1_limit(|qp| Ok(kgen2_value(m, n, order, qp)), last, digits, &ext)?;
            let t = dbzeta_neg(m, n, order);
            result["order"] = json!(order);
            cmp = Some(exact(&t));
            classical = Some(rational_value(&t));
            est
        }
        k => return Err(usage(format!("unknown target kind '{k}'"))),
    };
    result["estimate"] = to_value(&est);
    result["classical"] = classical.unwrap_or(Value::Null);
    if let Some(c) = cmp {
        let d = (&est.value - &c).abs_f64();
        result["difference"] = json!(d);
    }
    let mut config = ctx.config(None);
    config.extrapolation = Some(ext);
    config.q_ladder = Some(format!("q_j = 1 - 2^-j, j = 3..={last}"));
    Ok(ctx.report("limit", json!({"target": target, "levels": levels}), vec![result], vec![], config))
}

fn random_real(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    // rounded so the case label reproduces the input exactly
    (rng.gen_range(lo..hi) * 1e4).round() / 1e4
}

fn verify(ctx: &Ctx, suite: Suite) -> Out {
    let cfg = ctx.cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.g.seed);
    let (name, q, inputs, checks): (&str, String, Value, Vec<Verification>) = match suite {
        Suite::SeriesShuffle { w1, w2, q, cases } => {
            let qp = ctx.qp(&q)?;
            let pairs = match (w1, w2) {
                (Some(a), Some(b)) => vec![(a, b)],
                (None, None) => (0..cases)
                    .map(|_| {
                        let word = |rng: &mut ChaCha8Rng| {
                            let len = rng.gen_range(1..=2);
                            (0..len).map(|_| rng.gen_range(2..=5).to_string()).collect::<Vec<_>>().join(",")
                        };
                        let a = word(&mut rng);
                        (a, word(&mut rng))
                    })
                    .collect(),
                _ => return Err(usage("give both --w1 and --w2, or neither for random cases")),
            };
            let mut out = Vec::new();
            for (a, b) in &pairs {
                let mut env = Env::new();
                let w1 = Word::parse(a, "a", &mut env, qp.prec())?;
                let w2 = Word::parse(b, "b", &mut env, qp.prec())?;
                out.push(verify_series_shuffle(&w1, &w2, &env, &qp, &cfg)?);
            }
            ("series-shuffle", q, json!({"pairs": pairs}), out)
        }
        Suite::IntegralShuffle { m, n, q, cases } => {
            let qp = ctx.qp(&q)?;
            let pairs = match (m, n) {
                (Some(m), Some(n)) => vec![(m, n)],
                (None, None) => (0..cases)
                    .map(|_| {
                        let m = rng.gen_range(2..=5u32);
                        let mut n = rng.gen_range(2..=4u32);
                        if n >= m {
                            n += 1;
                        }
                        (m, n)
                    })
                    .collect(),
                _ => return Err(usage("give both --m and --n, or neither for random cases")),
            };
            let mut out = Vec::new();
            for &(m, n) in &pairs {
                out.push(verify_product(m, n, &qp, &cfg)?);
            }
            ("integral-shuffle", q, json!({"pairs": pairs}), out)
        }
        Suite::Qdiff { n, z, j, q, cases } => {
            let qp = ctx.qp(&q)?;
            let p = qp.prec();
            let mut runs: Vec<(Vec<u32>, Vec<f64>, Vec<usize>)> = Vec::new();
            match (n, z) {
                (Some(n), Some(z)) => {
                    let n = parse_u32s(&n)?;
                    let zs: Vec<f64> = z
                        .split(',')
                        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("'{t}' is not a real number"))))
                        .collect::<Result<_, _>>()?;
                    let js = match j {
                        Some(j) => vec![j],
                        None => (1..=n.len()).collect(),
                    };
                    runs.push((n, zs, js));
                }
                (None, None) => {
                    for _ in 0..cases {
                        let d = rng.gen_range(1..=3);
                        let n: Vec<u32> = (0..d).map(|_| rng.gen_range(1..=3)).collect();
                        let zs: Vec<f64> = (0..d).map(|_| random_real(&mut rng, -0.7, 0.7)).collect();
                        runs.push((n, zs, (1..=d).collect()));
                    }
                }
                _ => return Err(usage("give both --n and --z, or neither for random cases")),
            }
            let mut out = Vec::new();
            for (n, zs, js) in &runs {
                let z = SVec::new(zs.iter().map(|&x| CValue::parse(&x.to_string(), p)).collect::<qzeta::Result<_>>()?)?;
                for &j in js {
                    let mut v = verify_qdiff(n, &z, j, &qp, &cfg)?;
                    v.case = format!("{} at z = {zs:?}", v.case);
                    out.push(v);
                }
            }
            ("qdiff", q, json!({"cases": runs.iter().map(|(n, z, j)| json!({"n": n, "z": z, "j": j})).collect::<Vec<_>>()}), out)
        }
        Suite::Qftc { x, q, cases } => {
            let mut out = Vec::new();
            let mut used = Vec::new();
            let cubic = |qs: &str, x: f64, out: &mut Vec<Verification>| -> Result<(), Failure> {
                let qp = ctx.qp(qs)?;
                let xv = CValue::parse(&x.to_string(), qp.prec())?;
                let mut v = ftc_check(|t| Ok(t.powi(3)), &xv, &qp, &cfg)?;
                v.case = format!("{} for z^3 at q = {qs}", v.case);
                out.push(v);
                Ok(())
            };
            match x {
                Some(x) => {
                    cubic(&q, x, &mut out)?;
                    used.push(json!({"f": "z^3", "x": x, "q": q}));
                }
                None => {
                    for i in 0..cases {
                        let x = random_real(&mut rng, 0.1, 0.95);
                        let qs = format!("{}", random_real(&mut rng, 0.3, 0.9));
                        if i % 2 == 0 {
                            cubic(&qs, x, &mut out)?;
                            used.push(json!({"f": "z^3", "x": x, "q": qs}));
                        } else {
                            let qp = ctx.qp(&qs)?;
                            let p = qp.prec();
                            let xv = CValue::parse(&x.to_string(), p)?;
                            let li2 = |t: &CValue| -> qzeta::Result<CValue> {
                                Ok(qpolylog_direct(&[2], &SVec::new(vec![t.clone()])?, &qp, &cfg)?.value)
                            };
                            let mut v = ftc_check(li2, &xv, &qp, &cfg)?;
                            v.case = format!("{} for Li_q;2 at q = {qs}", v.case);
                            out.push(v);
                            used.push(json!({"f": "Li_q;2", "x": x, "q": qs}));
                        }
                    }
                }
            }
            ("qftc", q, json!({"cases": used}), out)
        }
        Suite::QshuffleLemma { u, v, upper, q, cases } => {
            let qp = ctx.qp(&q)?;
            let p = qp.prec();
            let upper_v = CValue::parse(&upper, p)?;
            let mut words: Vec<(String, String)> = Vec::new();
            match (u, v) {
                (Some(u), Some(v)) => words.push((u, v)),
                (None, None) => {
                    let ub = upper_v.abs_f64();
                    for _ in 0..cases {
                        let mut word = || {
                            let len = rng.gen_range(1..=3);
                            (0..len)
                                .map(|i| {
                                    if i > 0 && rng.gen_bool(0.4) {
                                        "0".to_string()
                                    } else {
                                        let mag = random_real(&mut rng, ub * 1.3, ub * 3.0);
                                        (if rng.gen_bool(0.5) { mag } else { -mag }).to_string()
                                    }
                                })
                                .collect::<Vec<_>>()
                                .join(",")
                        };
                        let a = word();
                        let b = word();
                        words.push((a, b));
                    }
                }
                _ => return Err(usage("give both --u and --v, or neither for random cases")),
            }
            let mut out = Vec::new();
            for (a, b) in &words {
                let pu = SVec::parse(a, p)?;
                let pv = SVec::parse(b, p)?;
                if pu.depth() > 3 || pv.depth() > 3 {
                    return Err(usage("words of at most three forms"));
                }
                let mut r = verify_qshuffle_lemma(pu.entries(), pv.entries(), &upper_v, &qp, &cfg)?;
                r.case = format!("poles ({a}) x ({b})");
                out.push(r);
            }
            ("qshuffle-lemma", q, json!({"words": words, "upper": upper}), out)
        }
        Suite::LemmaLiShift { e, gamma, q, cases } => {
            let qp = ctx.qp(&q)?;
            let pairs = match (e, gamma) {
                (Some(e), Some(g)) => vec![(e, g)],
                (None, None) => (0..cases).map(|_| (rng.gen_range(0..=3u32), rng.gen_range(2..=5u32))).collect(),
                _ => return Err(usage("give both --e and --gamma, or neither for random cases")),
            };
            let mut out = Vec::new();
            for &(e, g) in &pairs {
                out.push(lemma_li_shift(e, g, &qp, &cfg)?);
            }
            ("lemma-li-shift", q, json!({"pairs": pairs}), out)
        }
    };
    let residuals: Vec<Residual> = checks.iter().map(Residual::from).collect();
    let results = checks.iter().map(to_value).collect();
    let mut inputs = inputs;
    inputs["suite"] = json!(name);
    let report = ctx.report(&format!("verify {name}"), inputs, results, residuals, ctx.config(Some(&q)));
    let failed = report.failed();
    if failed.is_empty() {
        return Ok(report);
    }
    let mut msg = String::from("verification failed:");
    for f in &failed {
        msg.push_str(&format!("\n  {} residual {:.3e} > tol {:.1e}", f.case, f.residual, f.tol));
    }
    for c in checks.iter().filter(|c| !c.pass) {
        for part in &c.parts {
            msg.push_str(&format!("\n    [{}] {} = {}", c.case, part.name, part.value));
        }
    }
    Err(Failure { code: 4, message: msg, report: Some(report) })
}

fn table(ctx: &Ctx, kmax: u32, nmax: u32, q: Option<String>) -> Out {
    let qp = match &q {
        Some(q) => Some(ctx.qp(q)?),
        None => None,
    };
    let mut rows = Vec::new();
    for k in 0..=kmax {
        for n in 0..=nmax {
            let row = dbzeta_table(k, n)?;
            let mut v = to_value(&row);
            if let TableEntry::Indeterminacy { value } = &row.entry {
                v["entry"]["decimal"] = json!(value.to_float(128).to_f64());
            }
            if let Some(qp) = &qp {
                v["q_side"] = if k <= n + 1 {
                    json!({"residue": to_value(&res_closed(k, n, qp)?)})
                } else {
                    let m = k - n - 2;
                    json!({
                        "zeta": to_value(&kgen2_value(m, n, LimitOrder::S2First, qp)),
                        "zeta_r": to_value(&kgen2_value(m, n, LimitOrder::S1First, qp)),
                    })
                };
            }
            rows.push(v);
        }
    }
    Ok(ctx.report("table", json!({"kmax": kmax, "nmax": nmax, "q": q}), rows, vec![], ctx.config(q.as_deref())))
}
