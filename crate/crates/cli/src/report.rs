//! The report document every command prints, and its two renderings.

use std::fmt::Write as _;

use qzeta::continuation::ExtrapolationConfig;
use qzeta::verify::Verification;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub case: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl From<&Verification> for Residual {
    fn from(v: &Verification) -> Self {
        Residual {
            case: v.case.clone(),
            residual: v.residual,
            tol: v.tol,
            pass: v.pass,
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub q: Option<String>,
    pub digits: u32,
    pub bits: u32,
    pub tol: f64,
    pub max_terms: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolation: Option<ExtrapolationConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_ladder: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Vec<Value>,
    pub residuals: Vec<Residual>,
    pub elapsed_ms: f64,
    pub config: Config,
}

impl Report {
    pub fn failed(&self) -> Vec<&Residual> {
        self.residuals.iter().filter(|r| !r.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One `path  value` line per leaf, grouped by section.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command   {}", self.command);
        let _ = writeln!(out, "elapsed   {:.1} ms", self.elapsed_ms);
        section(&mut out, "inputs", &self.inputs);
        for (i, r) in self.results.iter().enumerate() {
            section(&mut out, &format!("result {i}"), r);
        }
        if !self.residuals.is_empty() {
            let _ = writeln!(out, "\n[residuals]");
            for r in &self.residuals {
                let _ = writeln!(
                    out,
                    "  {:<4} {:>12.3e}  (tol {:.1e})  {}",
                    if r.pass { "ok" } else { "FAIL" },
                    r.residual,
                    r.tol,
                    r.case
                );
            }
        }
        section(
            &mut out,
            "config",
            &serde_json::to_value(&self.config).expect("config serializes"),
        );
        out
    }
}

fn section(out: &mut String, title: &str, v: &Value) {
    let _ = writeln!(out, "\n[{title}]");
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, val) in rows {
        let _ = writeln!(out, "  {k:<width$}  {val}");
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        // complex numbers print as a single cell
        Value::Object(m) if m.len() == 2 && m.contains_key("re") && m.contains_key("im") => {
            let re = m["re"].as_str().unwrap_or_default();
            let im = m["im"].as_str().unwrap_or_default();
            let cell = if im.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
                re.to_string()
            } else {
                format!("{re} {} {}i", if im.starts_with('-') { "-" } else { "+" }, im.trim_start_matches('-'))
            };
            rows.push((prefix.to_string(), cell));
        }
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, rows);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let cells: Vec<String> = a.iter().map(scalar).collect();
            rows.push((prefix.to_string(), format!("[{}]", cells.join(", "))));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}
