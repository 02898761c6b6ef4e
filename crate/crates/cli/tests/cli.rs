use std::process::{Command, Output};

use qzeta::special_values::res_closed;
use qzeta::QParam;
use serde_json::Value;

fn qzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qzeta"))
        .args(args)
        .env_remove("QZETA_PREC")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn num(v: &Value) -> f64 {
    v.as_str().expect("decimal string").parse().unwrap()
}

#[test]
fn eval_matches_brute_force() {
    let r = json(&qzeta(&["eval", "--s", "2", "--q", "0.5"]));
    let q: f64 = 0.5;
    let want: f64 = (1..200).map(|k| {
        let b = (1.0 - q.powi(k)) / (1.0 - q);
        q.powi(k) / (b * b)
    }).sum();
    assert!((num(&r["results"][0]["value"]["re"]) - want).abs() < 1e-14);
    for key in ["command", "inputs", "results", "residuals", "elapsed_ms", "config"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["config"]["digits"], 40);
}

#[test]
fn pole_exits_2() {
    let out = qzeta(&["eval", "--s", "1", "--q", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pole"), "{err}");
    assert!(err.contains("last-coordinate-at-one"), "{err}");
}

#[test]
fn polylog_eval() {
    let r = json(&qzeta(&["eval", "--polylog", "--n", "2", "--z", "0.5", "--q", "0.7"]));
    let q: f64 = 0.7;
    let want: f64 = (1..300).map(|k| {
        let b = (1.0 - q.powi(k)) / (1.0 - q);
        0.5f64.powi(k) / (b * b)
    }).sum();
    assert!((num(&r["results"][0]["value"]["re"]) - want).abs() < 1e-14);
}

#[test]
fn residue_modes() {
    let r = json(&qzeta(&["residue", "--point", "4,-4", "--q", "0.7", "--mode", "both"]));
    assert!(r["results"][0]["difference"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["residuals"][0]["pass"], true);

    let r = json(&qzeta(&["residue", "--point", "-3,2", "--q", "0.5"]));
    let v = num(&r["results"][0]["closed"]["value"]["re"]);
    // q(q-1)^2 / ((q+1)(q^2+1)(q^2+q+1) log q) at q = 1/2
    let want = 0.5 * 0.25 / (1.5 * 1.25 * 1.75 * 0.5f64.ln());
    assert!((v - want).abs() < 1e-14);

    assert_eq!(qzeta(&["residue", "--point", "2,3"]).status.code(), Some(1));
}

#[test]
fn limits() {
    let r = json(&qzeta(&["limit", "--target", "residue:4,-4"]));
    assert!((num(&r["results"][0]["estimate"]["value"]["re"]) + 1.0 / 3.0).abs() < 1e-3);

    let r = json(&qzeta(&["limit", "--target", "value:0,0:R"]));
    assert!((num(&r["results"][0]["estimate"]["value"]["re"]) - 5.0 / 12.0).abs() < 1e-3);
    assert_eq!(r["results"][0]["classical"]["exact"], "5/12");

    let r = json(&qzeta(&["--prec", "25", "limit", "--target", "zeta:2"]));
    let pi = std::f64::consts::PI;
    assert!((num(&r["results"][0]["estimate"]["value"]["re"]) - pi * pi / 6.0).abs() < 1e-3);
}

#[test]
fn verify_suites() {
    let r = json(&qzeta(&["verify", "series-shuffle", "--w1", "3", "--w2", "2", "--q", "0.9"]));
    assert_eq!(r["residuals"][0]["pass"], true);
    let r = json(&qzeta(&["verify", "integral-shuffle", "--m", "2", "--n", "3", "--q", "0.85"]));
    assert_eq!(r["residuals"][0]["pass"], true);
    assert_eq!(qzeta(&["verify", "integral-shuffle", "--m", "3", "--n", "3"]).status.code(), Some(1));
    for suite in ["qdiff", "qftc", "qshuffle-lemma", "lemma-li-shift"] {
        let r = json(&qzeta(&["verify", suite]));
        let res = r["residuals"].as_array().unwrap();
        assert!(!res.is_empty());
        assert!(res.iter().all(|x| x["pass"] == true), "{suite}");
    }
}

#[test]
fn failed_verification_exits_4() {
    let out = qzeta(&["--tol", "1e-70", "verify", "integral-shuffle", "--m", "2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("A_q(2,3)"), "sub-terms are listed: {err}");
}

#[test]
fn seeds_are_reproducible() {
    let a = json(&qzeta(&["--seed", "7", "verify", "lemma-li-shift"]));
    let b = json(&qzeta(&["--seed", "7", "verify", "lemma-li-shift"]));
    let c = json(&qzeta(&["--seed", "8", "verify", "lemma-li-shift"]));
    assert_eq!(a["inputs"], b["inputs"]);
    assert_eq!(a["results"], b["results"]);
    assert_ne!(a["inputs"], c["inputs"]);
}

#[test]
fn table_rows() {
    let r = json(&qzeta(&["table", "--kmax", "0", "--nmax", "5"]));
    let rows = r["results"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for (n, row) in rows.iter().enumerate() {
        assert_eq!(row["k"], 0);
        assert_eq!(row["entry"]["residue"], format!("-1/{}", n + 1).replace("-1/1", "-1"));
    }

    let r = json(&qzeta(&["table", "--q", "0.7", "--kmax", "2", "--nmax", "4"]));
    let row = r["results"].as_array().unwrap().iter().find(|x| x["k"] == 2 && x["n"] == 4).unwrap();
    let qp = QParam::parse("0.7", 40).unwrap();
    let want = res_closed(2, 4, &qp).unwrap().re.to_f64();
    assert!((num(&row["q_side"]["residue"]["re"]) - want).abs() < 1e-15);
    assert_eq!(row["entry"]["residue"], "-1/3");
}

#[test]
fn formats_env_and_out() {
    let out = qzeta(&["eval", "--s", "3", "--format", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[result 0]") && text.contains("value"));

    let out = Command::new(env!("CARGO_BIN_EXE_qzeta"))
        .args(["eval", "--s", "3"])
        .env("QZETA_PREC", "60")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["digits"], 60);

    let path = std::env::temp_dir().join(format!("qzeta-report-{}.json", std::process::id()));
    let out = qzeta(&["eval", "--s", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "eval");
    std::fs::remove_file(path).ok();
}
