use proptest::prelude::*;
use qzeta::qcalculus::{
    ftc_check, jackson_derivative, jackson_integral, polylog_iterated, q_iterated, q_leibniz_check, verify_qdiff, OneForm,
};
use qzeta::qseries::{qpolylog_direct, qzeta_direct};
use qzeta::shuffle::{qshuffle, Word};
use qzeta::{CValue, QParam, SVec, SeriesConfig};

fn setup(q: &str) -> (QParam, SeriesConfig) {
    (QParam::parse(q, 40).unwrap(), SeriesConfig::for_digits(40))
}

fn li(n: u32, z: &CValue, qp: &QParam, cfg: &SeriesConfig) -> qzeta::Result<CValue> {
    Ok(qpolylog_direct(&[n], &SVec::new(vec![z.clone()])?, qp, cfg)?.value)
}

#[test]
fn derivative_examples() {
    let (qp, cfg) = setup("0.7");
    let z = CValue::from_f64(0.4, qp.prec());
    let d = jackson_derivative(|t| Ok(t * t), &z, &qp).unwrap();
    let want = z.scale(&rug::Float::with_val(qp.prec(), qp.q() + 1u32));
    assert!((d - want).abs_f64() < 1e-38);

    let d = jackson_derivative(|t| li(1, t, &qp, &cfg), &z, &qp).unwrap();
    assert!((d - (CValue::one(qp.prec()) - z.clone()).recip()).abs_f64() < 1e-35);

    let z3 = CValue::from_f64(0.3, qp.prec());
    let d = jackson_derivative(|t| li(2, t, &qp, &cfg), &z3, &qp).unwrap();
    assert!((d - li(1, &z3, &qp, &cfg).unwrap() / z3.clone()).abs_f64() < 1e-35);

    assert!(jackson_derivative(|t| Ok(t.clone()), &CValue::zero(qp.prec()), &qp).is_err());
}

#[test]
fn integral_of_constant_is_exact() {
    let (qp, cfg) = setup("0.3");
    let p = qp.prec();
    let c = CValue::from_f64(2.5, p);
    let v = jackson_integral(|_| Ok(c.clone()), &CValue::zero(p), &CValue::one(p), &qp, &cfg).unwrap();
    assert!((v.value - c).abs_f64() < 1e-38);
}

#[test]
fn leibniz_examples() {
    let (qp, cfg) = setup("0.7");
    let p = qp.prec();
    let x = CValue::from_f64(0.5, p);
    let r = q_leibniz_check(|t| Ok(t.clone()), |t| Ok(t.clone()), &x, &qp, 1e-38).unwrap();
    assert!(r.residual < 1e-38);
    let r = q_leibniz_check(|t| Ok(t.powi(2)), |t| Ok(t.powi(3)), &x, &qp, 1e-36).unwrap();
    assert!(r.pass);
    let x = CValue::from_f64(0.3, p);
    let r = q_leibniz_check(|t| li(1, t, &qp, &cfg), |t| li(2, t, &qp, &cfg), &x, &qp, 1e-33).unwrap();
    assert!(r.pass, "{:.3e}", r.residual);
}

#[test]
fn iterated_integral_examples() {
    let (qp, cfg) = setup("0.7");
    let p = qp.prec();
    let one = CValue::one(p);
    let a = CValue::from_f64(2.0, p);
    let v = q_iterated(&[OneForm::Pole(a.clone())], &one, &qp, &cfg).unwrap().value;
    let w = li(1, &a.recip(), &qp, &cfg).unwrap();
    assert!((v + w).abs_f64() < 1e-35);

    let qinv = CValue::real(qp.powi(-1));
    let v = q_iterated(&[OneForm::Pole(qinv), OneForm::Dt], &one, &qp, &cfg).unwrap().value;
    let z2 = qzeta_direct(&SVec::from_ints(&[2], p), &qp, &cfg).unwrap().value;
    assert!((v + z2).abs_f64() < 1e-35);

    let s = SVec::new(vec![CValue::real(qp.powi(1)), CValue::real(qp.powi(2))]).unwrap();
    let a = polylog_iterated(&[2, 3], &s, &qp, &cfg).unwrap().value;
    let b = qzeta_direct(&SVec::from_ints(&[2, 3], p), &qp, &cfg).unwrap().value;
    assert!((a - b).abs_f64() < 1e-33);
}

#[test]
fn qdiff_examples() {
    let (qp, cfg) = setup("0.7");
    let p = qp.prec();
    let z = |xs: &[f64]| SVec::new(xs.iter().map(|&x| CValue::from_f64(x, p)).collect()).unwrap();
    for (n, zs, j) in [(vec![2], vec![0.4], 1), (vec![1, 2], vec![0.3, 0.4], 1), (vec![1], vec![0.4], 1)] {
        let v = verify_qdiff(&n, &z(&zs), j, &qp, &cfg).unwrap();
        assert!(v.residual < 1e-25, "{n:?}: {:.3e}", v.residual);
    }
    assert!(verify_qdiff(&[2], &z(&[0.4]), 2, &qp, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn ftc_random(x in 0.05f64..0.95, q in 0.3f64..0.9, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let qp = QParam::from_f64(q, 30).unwrap();
        let cfg = SeriesConfig::for_digits(30);
        let p = qp.prec();
        let (ka, kb) = (CValue::from_f64(a, p), CValue::from_f64(b, p));
        let x = CValue::from_f64(x, p);
        let v = ftc_check(|t| Ok(&ka * &t.powi(3) + &kb * t), &x, &qp, &cfg).unwrap();
        prop_assert!(v.pass, "residual {:.3e}", v.residual);
        let v = ftc_check(|t| li(2, t, &qp, &cfg), &x, &qp, &cfg).unwrap();
        prop_assert!(v.pass, "Li residual {:.3e}", v.residual);
    }

    #[test]
    fn iterated_matches_series(z1 in -0.8f64..0.8, z2 in -0.8f64..0.8, n1 in 1u32..4, n2 in 1u32..4, q in 0.3f64..0.85) {
        let qp = QParam::from_f64(q, 30).unwrap();
        let cfg = SeriesConfig::for_digits(30);
        let p = qp.prec();
        let z = SVec::new(vec![CValue::from_f64(z1, p), CValue::from_f64(z2, p)]).unwrap();
        let a = polylog_iterated(&[n1, n2], &z, &qp, &cfg).unwrap().value;
        let b = qpolylog_direct(&[n1, n2], &z, &qp, &cfg).unwrap().value;
        prop_assert!((a - b).abs_f64() < 1e-20);
    }

    #[test]
    fn qshuffle_commutes(a in prop::collection::vec(-3i64..6, 0..3), b in prop::collection::vec(-3i64..6, 0..3)) {
        let (u, v) = (Word::from_ints(&a), Word::from_ints(&b));
        prop_assert_eq!(qshuffle(&u, &v).canonical_text(), qshuffle(&v, &u).canonical_text());
    }
}
