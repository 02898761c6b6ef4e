use qzeta::classical::{dbzeta_neg, mzv, zeta_nonpositive};
use qzeta::continuation::{q_to_1_limit, qzeta_eval, ExtrapolationConfig, LimitOrder};
use qzeta::special_values::{kgen2_value, res_closed, res_limit_target, res_neg3_2};
use qzeta::{SVec, SeriesConfig};
use rug::{Float, Rational};

fn close(v: &qzeta::CValue, r: &Rational, tol: f64) -> f64 {
    let e = Float::with_val(v.prec(), r);
    let d = Float::with_val(v.prec(), &v.re - e).to_f64().abs();
    assert!(d < tol, "got {v}, expected {r} (diff {d:.3e})");
    d
}

#[test]
fn residue_limits() {
    let ext = ExtrapolationConfig::default();
    for (k, n) in [(2u32, 4u32), (4, 8), (6, 9), (0, 2)] {
        let est = q_to_1_limit(|qp| res_closed(k, n, qp), 12, 40, &ext).unwrap();
        let d = close(&est.value, &res_limit_target(k, n).unwrap(), 1e-3);
        eprintln!("res ({k},{n}) diff {d:.3e} residual {:.3e}", est.residual);
    }
    let est = q_to_1_limit(|qp| Ok(res_neg3_2(qp)), 12, 40, &ext).unwrap();
    close(&est.value, &Rational::new(), 1e-3);
}

#[test]
fn corner_limits() {
    let ext = ExtrapolationConfig::default();
    for o in [LimitOrder::S2First, LimitOrder::S1First] {
        let est = q_to_1_limit(|qp| Ok(kgen2_value(0, 0, o, qp)), 12, 40, &ext).unwrap();
        let d = close(&est.value, &dbzeta_neg(0, 0, o), 1e-3);
        eprintln!("corner {o:?} diff {d:.3e}");
    }
}

#[test]
fn negative_zeta_limits() {
    let ext = ExtrapolationConfig::default();
    for n in 0..=6i64 {
        let est = q_to_1_limit(
            |qp| {
                let cfg = SeriesConfig::for_digits(qp.digits());
                Ok(qzeta_eval(&SVec::from_ints(&[-n], qp.prec()), qp, &cfg)?.value)
            },
            12,
            40,
            &ext,
        )
        .unwrap();
        let d = close(&est.value, &zeta_nonpositive(n as u32), 1e-4);
        eprintln!("zeta(-{n}) diff {d:.3e}");
    }
}

#[test]
fn regular_point_limit() {
    let ext = ExtrapolationConfig::default();
    let t = std::time::Instant::now();
    let est = q_to_1_limit(
        |qp| {
            let cfg = SeriesConfig::for_digits(qp.digits());
            Ok(qzeta_eval(&SVec::from_ints(&[2, 3], qp.prec()), qp, &cfg)?.value)
        },
        10,
        25,
        &ext,
    )
    .unwrap();
    let z = mzv(&SVec::from_ints(&[2, 3], 120), 22).unwrap().value;
    let d = (&est.value - &z).abs_f64();
    eprintln!("zeta(2,3) limit diff {d:.3e} in {:?}", t.elapsed());
    assert!(d < 1e-3);
}
