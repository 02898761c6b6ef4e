use qzeta::continuation::{iterated_limit, numeric_residue, qzeta_eval, ExtrapolationConfig, LimitOrder};
use qzeta::special_values::{kgen2_value, qzeta_neg_closed, res_closed, res_neg3_2};
use qzeta::{QParam, SVec, SeriesConfig};
use rug::Float;

fn setup(q: &str) -> (QParam, SeriesConfig) {
    (QParam::parse(q, 40).unwrap(), SeriesConfig::for_digits(40))
}

#[test]
fn negative_integers_match_closed_form() {
    for q in ["0.5", "0.6", "0.9"] {
        let (qp, cfg) = setup(q);
        for n in 0..=6 {
            let v = qzeta_eval(&SVec::from_ints(&[-n], qp.prec()), &qp, &cfg).unwrap().value;
            let c = qzeta_neg_closed(n as u32, &qp);
            let scale = c.abs_f64().max(1.0);
            assert!((v - c).abs_f64() < 1e-30 * scale, "q={q} n={n}");
        }
    }
}

#[test]
fn residues_match_closed_forms() {
    let (qp, cfg) = setup("0.7");
    let ext = ExtrapolationConfig::default();
    for (k, n) in [(2u32, 4u32), (0, 2), (3, 3), (1, 1)] {
        let point = SVec::from_ints(&[n as i64 + 2 - k as i64, -(n as i64)], qp.prec());
        let est = numeric_residue(&point, &qp, &cfg, &ext).unwrap();
        let c = res_closed(k, n, &qp).unwrap();
        let diff = (&est.value - &c).abs_f64();
        eprintln!("k={k} n={n} diff={diff:.3e} residual={:.3e}", est.residual);
        assert!(diff < 1e-8, "k={k} n={n} diff={diff:.3e}");
    }
    let est = numeric_residue(&SVec::from_ints(&[-3, 2], qp.prec()), &qp, &cfg, &ext).unwrap();
    assert!((est.value - res_neg3_2(&qp)).abs_f64() < 1e-8);
}

#[test]
fn residue_at_one_minus_n() {
    let (qp, cfg) = setup("0.6");
    let ext = ExtrapolationConfig::default();
    let f = Float::with_val(qp.prec(), qp.q() - 1u32) / qp.log_q();
    for n in 0..=4i64 {
        let est = numeric_residue(&SVec::from_ints(&[1, -n], qp.prec()), &qp, &cfg, &ext).unwrap();
        let c = qzeta_neg_closed(n as u32, &qp).scale(&f);
        let diff = (&est.value - &c).abs_f64();
        eprintln!("n={n} diff={diff:.3e} residual={:.3e}", est.residual);
        assert!(diff < 1e-8);
    }
}

#[test]
fn corner_limits_match_closed_forms() {
    let ext = ExtrapolationConfig::default();
    for (q, m, n) in [("0.5", 0u32, 0u32), ("0.5", 1, 1), ("0.5", 0, 3), ("0.7", 0, 0), ("0.7", 2, 0)] {
        let (qp, cfg) = setup(q);
        {
            for o in [LimitOrder::S2First, LimitOrder::S1First] {
                let est = iterated_limit(m, n, o, &qp, &cfg, &ext).unwrap();
                let c = kgen2_value(m, n, o, &qp);
                let diff = (&est.value - &c).abs_f64();
                eprintln!("q={q} ({m},{n}) {o:?} diff={diff:.3e} residual={:.3e}", est.residual);
                assert!(diff < 1e-8 * c.abs_f64().max(1.0));
            }
        }
    }
}
