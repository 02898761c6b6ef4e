//! One pass/fail line per acceptance criterion, each at its stated tolerance.
//! Runs as a plain binary so the lines always reach stdout.

use std::time::Instant;

use qzeta::classical::{dbzeta_neg, mzv, zeta_nonpositive};
use qzeta::continuation::{numeric_residue, q_to_1_limit, qzeta_eval, ExtrapolationConfig, LimitOrder};
use qzeta::integral_shuffle::{e_coeff, verify_product, verify_t};
use qzeta::qcalculus::{ftc_check, jackson_integral, polylog_iterated, verify_qdiff};
use qzeta::qcore::{binom, periodic_bernoulli, periodic_bernoulli_bound, qbracket};
use qzeta::qseries::{geometric_nested, qpolylog_direct, telescoped_product};
use qzeta::shuffle::{verify_series_shuffle, Env, Word, ZCombo};
use qzeta::special_values::{corner_display, kgen2_value, res_2_4_factored, res_closed, res_limit_target, res_neg3_2};
use qzeta::{CValue, QParam, Result, SVec, SeriesConfig};
use rug::{Float, Rational};

struct Outcome {
    /// Largest residual/tolerance ratio seen.
    worst: f64,
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { worst: 0.0, ok: true, notes: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, residual: f64, tol: f64) {
        let what: String = what.into();
        self.worst = self.worst.max(residual / tol);
        // per-check detail on request
        if std::env::var_os("QZETA_ACCEPTANCE_VERBOSE").is_some() {
            eprintln!("  {what}: {residual:.3e} (tol {tol:.0e})");
        }
        if !(residual <= tol) {
            self.ok = false;
            self.notes.push(format!("{what} residual {residual:.3e} > {tol:.0e}"));
        }
    }

    fn require(&mut self, what: impl Into<String>, cond: bool) {
        if !cond {
            self.ok = false;
            self.notes.push(what.into());
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

fn qp(q: &str, digits: u32) -> QParam {
    QParam::parse(q, digits).unwrap()
}

fn dist(v: &CValue, r: &Rational) -> f64 {
    let e = Float::with_val(v.prec(), r);
    (v - &CValue::real(e)).abs_f64()
}

fn zeta(s: &[i64], qp: &QParam) -> Result<CValue> {
    let cfg = SeriesConfig::for_digits(qp.digits());
    Ok(qzeta_eval(&SVec::from_ints(s, qp.prec()), qp, &cfg)?.value)
}

fn ac1(o: &mut Outcome) -> Result<()> {
    for q in ["0.3", "0.6", "0.9"] {
        let qp = qp(q, 40);
        let cfg = SeriesConfig::for_digits(40);
        let v = verify_series_shuffle(&Word::from_ints(&[3]), &Word::from_ints(&[2]), &Env::new(), &qp, &cfg)?;
        o.check(format!("q={q}"), v.residual, 1e-25);
        let printed = v.parts.iter().find(|p| p.name == "printed_residual").unwrap();
        o.note(format!("q={q}: with (q-1)ζ_q(4) as printed the residual is {:.3e}", printed.value.abs_f64()));
    }
    Ok(())
}

fn ac2(o: &mut Outcome) -> Result<()> {
    for q in ["0.5", "0.8"] {
        let qp = qp(q, 40);
        let cfg = SeriesConfig::for_digits(40);
        for (m, n) in [(2, 3), (3, 2), (2, 5), (4, 3)] {
            let v = verify_product(m, n, &qp, &cfg)?;
            o.check(format!("product ({m},{n}) q={q}"), v.residual, 1e-20);
        }
        for j in 1..=3 {
            for g in 3..=5 {
                let v = verify_t(j, g, &qp, &cfg)?;
                o.check(format!("T^{j} zeta_q({g}) q={q}"), v.residual, 1e-25);
            }
        }
    }
    Ok(())
}

fn ac3(o: &mut Outcome) -> Result<()> {
    let qp = qp("0.7", 40);
    let cfg = SeriesConfig::for_digits(40);
    let closed = res_closed(2, 4, &qp)?;
    o.check("closed vs factored", (&closed - &res_2_4_factored(&qp)).abs_f64(), 1e-25);
    let num = numeric_residue(&SVec::from_ints(&[4, -4], qp.prec()), &qp, &cfg, &ExtrapolationConfig::default())?;
    o.check("closed vs numeric", (&closed - &num.value).abs_f64(), 1e-8);
    Ok(())
}

fn ac4(o: &mut Outcome) -> Result<()> {
    let ext = ExtrapolationConfig::default();
    for (point, k, n) in [("(4,-4)", 2u32, 4u32), ("(6,-8)", 4, 8), ("(5,-9)", 6, 9)] {
        let est = q_to_1_limit(|qp| res_closed(k, n, qp), 12, 25, &ext)?;
        o.check(point, dist(&est.value, &res_limit_target(k, n)?), 1e-3);
    }
    let est = q_to_1_limit(|qp| Ok(res_neg3_2(qp)), 12, 25, &ext)?;
    o.check("(-3,2)", dist(&est.value, &Rational::new()), 1e-3);
    Ok(())
}

fn ac5(o: &mut Outcome) -> Result<()> {
    let ext = ExtrapolationConfig::default();
    for q in ["0.3", "0.7"] {
        let qp = qp(q, 40);
        for ord in [LimitOrder::S2First, LimitOrder::S1First] {
            o.check(format!("{ord:?} closed form q={q}"), (kgen2_value(0, 0, ord, &qp) - corner_display(ord, &qp)).abs_f64(), 1e-25);
        }
    }
    for (ord, want) in [(LimitOrder::S2First, (1, 3)), (LimitOrder::S1First, (5, 12))] {
        let est = q_to_1_limit(|qp| Ok(kgen2_value(0, 0, ord, qp)), 12, 40, &ext)?;
        let want = Rational::from(want);
        o.check(format!("{ord:?} q→1"), dist(&est.value, &want), 1e-3);
        o.require(format!("dbzeta_neg(0,0,{ord:?}) = {want}"), dbzeta_neg(0, 0, ord) == want);
    }
    Ok(())
}

fn ac6(o: &mut Outcome) -> Result<()> {
    let ext = ExtrapolationConfig::default();
    for n in 0..=6i64 {
        let est = q_to_1_limit(|qp| zeta(&[-n], qp), 10, 25, &ext)?;
        o.check(format!("ζ_q(-{n})"), dist(&est.value, &zeta_nonpositive(n as u32)), 1e-4);
    }
    let qp = qp("0.6", 40);
    let cfg = SeriesConfig::for_digits(40);
    let ratio = Float::with_val(qp.prec(), qp.q() - 1u32) / qp.log_q();
    for n in 0..=3i64 {
        let res = numeric_residue(&SVec::from_ints(&[1, -n], qp.prec()), &qp, &cfg, &ExtrapolationConfig::default())?;
        let want = zeta(&[-n], &qp)?.scale(&ratio);
        o.check(format!("Res at (1,-{n})"), (&res.value - &want).abs_f64(), 1e-25);
    }
    Ok(())
}

fn ac7(o: &mut Outcome) -> Result<()> {
    let ext = ExtrapolationConfig::default();
    let est = q_to_1_limit(|qp| zeta(&[2, 3], qp), 10, 25, &ext)?;
    let target = mzv(&SVec::from_ints(&[2, 3], 120), 22)?.value;
    o.check("lim ζ_q(2,3)", (&est.value - &target).abs_f64(), 1e-3);
    let p = 200;
    let z = |s: &[i64]| mzv(&SVec::from_ints(s, p), 22).map(|r| r.value);
    let lhs = z(&[2])? * z(&[3])?;
    let rhs = z(&[2, 3])? + z(&[3, 2])? + z(&[5])?;
    o.check("ζ(2)ζ(3) stuffle", (lhs - rhs).abs_f64(), 1e-12);
    Ok(())
}

/// Deterministic points in (-0.8, 0.8) from the golden-ratio sequence.
fn spread(k: usize) -> f64 {
    let g = 0.618_033_988_749_895_f64;
    1.6 * ((k as f64 * g).fract() - 0.5)
}

fn ac8(o: &mut Outcome) -> Result<()> {
    let qp6 = qp("0.6", 40);
    let cfg = SeriesConfig::for_digits(40);
    let x = CValue::parse("0.9", qp6.prec())?;
    let v = ftc_check(|t| Ok(t.powi(3)), &x, &qp6, &cfg)?;
    o.check("q-FTC for z^3", v.residual, 1e-38);

    let ext = ExtrapolationConfig::default();
    let est = q_to_1_limit(
        |qp| {
            let cfg = SeriesConfig::for_digits(qp.digits());
            let p = qp.prec();
            Ok(jackson_integral(|t| Ok(t * t), &CValue::zero(p), &CValue::one(p), qp, &cfg)?.value)
        },
        12,
        30,
        &ext,
    )?;
    o.check("∫_0^1 x² d_qx → 1/3", dist(&est.value, &Rational::from((1, 3))), 1e-4);

    let qp7 = qp("0.7", 40);
    let c = |x: f64| CValue::from_f64(x, qp7.prec());
    let cases: Vec<(Vec<u32>, Vec<f64>)> = vec![
        (vec![2], vec![0.4]),
        (vec![1], vec![0.4]),
        (vec![1, 2], vec![0.3, 0.4]),
        (vec![2, 1], vec![-0.5, 0.6]),
        (vec![1, 1, 3], vec![0.2, -0.7, 0.5]),
    ];
    for (n, z) in &cases {
        let zs = SVec::new(z.iter().map(|&x| c(x)).collect())?;
        for j in 1..=n.len() {
            let v = verify_qdiff(n, &zs, j, &qp7, &cfg)?;
            o.check(format!("qdiff n={n:?} j={j}"), v.residual, 1e-25);
        }
    }

    for k in 0..10 {
        let d = 1 + k % 2;
        let q = format!("{:.3}", 0.45 + 0.4 * (spread(3 * k + 1) + 0.8) / 1.6);
        let qp = qp(&q, 40);
        let z = SVec::new((0..d).map(|i| CValue::from_f64(spread(7 * k + i + 2), qp.prec())).collect())?;
        let n: Vec<u32> = (0..d).map(|i| 1 + ((k + i) % 3) as u32).collect();
        let a = polylog_iterated(&n, &z, &qp, &cfg)?.value;
        let b = qpolylog_direct(&n, &z, &qp, &cfg)?.value;
        o.check(format!("iterated vs series n={n:?} q={q}"), (a - b).abs_f64(), 1e-20);
    }
    Ok(())
}

fn ac9(o: &mut Outcome) -> Result<()> {
    let qp = qp("0.5", 40);
    let cfg = SeriesConfig::for_digits(45);
    for d in 1..=4usize {
        let x: Vec<CValue> = (0..d).map(|i| CValue::from_f64(0.7 * spread(5 * d + i) / 0.8, qp.prec())).collect();
        let lhs = geometric_nested(&x, &qp, &cfg)?.value;
        o.check(format!("telescoped product d={d}"), (lhs - telescoped_product(&x)).abs_f64(), 1e-30);
    }

    let prec = 128;
    for m in 2..=8usize {
        let bound = periodic_bernoulli_bound(m, prec);
        for i in 0..1000 {
            let x = Float::with_val(prec, i) / 97u32 - 3u32;
            let b = periodic_bernoulli(m, &x)?;
            o.require(format!("|B~_{m}({x})| ≤ bound"), Float::with_val(prec, b.abs_ref()) <= bound);
        }
    }

    for q in ["0.51", "0.7", "0.9", "0.99"] {
        let qp = QParam::parse(q, 20).unwrap();
        for k in [1u64, 2, 3, 10, 57, 300, 1000, 4321, 10_000] {
            let b = qbracket(k, &qp);
            o.require(format!("1 ≤ [{k}]_{q} < 2k"), b >= 1 && b < 2 * k);
        }
    }

    for r in 0..=8i64 {
        for s in 0..=8i64 {
            o.require(format!("E({r},{s};0)"), e_coeff(r, s, 0).coeffs() == [Rational::from(binom(r + s, r))]);
        }
    }

    for word in [Word::symbols(&["a", "b"]), Word::symbols(&["a", "b", "c"])] {
        for (i, j) in [(0usize, 1usize), (0, word.len() - 1), (1, word.len() - 1)] {
            let base = ZCombo::single(word.clone());
            let x = base.shift(i)?.shift(j)?;
            let y = base.shift(j)?.shift(i)?;
            o.require(format!("S_{i} S_{j} = S_{j} S_{i} on {word}"), x == y);
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, &str, fn(&mut Outcome) -> Result<()>); 9] = [
        ("AC1", "series q-shuffle ζ_q(3)ζ_q(2), ≤1e-25", ac1),
        ("AC2", "integral q-shuffle product ≤1e-20, closed T^j ≤1e-25", ac2),
        ("AC3", "residue (4,-4): closed = factored ≤1e-25, numeric ≤1e-8", ac3),
        ("AC4", "q→1 residue limits within 1e-3", ac4),
        ("AC5", "corner (0,0): closed forms ≤1e-25, limits 1/3 and 5/12", ac5),
        ("AC6", "lim ζ_q(-n) within 1e-4, Res(1,-n) ≤1e-25", ac6),
        ("AC7", "lim ζ_q(2,3) = ζ(2,3) within 1e-3, stuffle ≤1e-12", ac7),
        ("AC8", "Jackson calculus: FTC, ∫x², q-derivatives, iterated integrals", ac8),
        ("AC9", "structural: telescoping, Bernoulli bound, [k]_q bounds, E, shifts", ac9),
    ];
    let mut failed = 0;
    for (id, what, run) in criteria {
        let t = Instant::now();
        let mut o = Outcome::new();
        if let Err(e) = run(&mut o) {
            o.ok = false;
            o.note(format!("error: {e}"));
        }
        println!(
            "{id} {} — {what} (worst residual/tol {:.1e}, {:.1}s)",
            if o.ok { "PASS" } else { "FAIL" },
            o.worst,
            t.elapsed().as_secs_f64()
        );
        for n in &o.notes {
            println!("    {n}");
        }
        if !o.ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
