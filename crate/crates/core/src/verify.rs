//! Residual records shared by the identity checkers.

use serde::Serialize;

use crate::num::CValue;
use crate::qseries::SeriesConfig;

/// A named intermediate quantity reported alongside a check.
#[derive(Clone, Debug, Serialize)]
pub struct Part {
    pub name: String,
    pub value: CValue,
}

/// Outcome of checking `lhs = rhs` numerically.
#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub case: String,
    pub lhs: CValue,
    pub rhs: CValue,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub parts: Vec<Part>,
}

impl Verification {
    pub fn new(case: impl Into<String>, lhs: CValue, rhs: CValue, tol: f64) -> Self {
        let residual = (&lhs - &rhs).abs_f64();
        Verification {
            case: case.into(),
            lhs,
            rhs,
            residual,
            tol,
            pass: residual <= tol,
            parts: Vec::new(),
        }
    }

    pub fn part(mut self, name: impl Into<String>, value: CValue) -> Self {
        self.parts.push(Part { name: name.into(), value });
        self
    }
}

/// Acceptance threshold for an identity whose sides are sums of many series:
/// a few orders above the per-series tolerance.
pub fn check_tol(cfg: &SeriesConfig) -> f64 {
    cfg.tol * 1e3
}
