//! Gauss–Legendre rules at arbitrary precision.

use std::collections::HashMap;
use std::sync::Mutex;

use rug::float::Constant;
use rug::Float;

/// Nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

static CACHE: Mutex<Option<HashMap<(usize, u32), GaussLegendre>>> = Mutex::new(None);

/// Legendre `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let p = x.prec();
    let mut p0 = Float::with_val(p, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let a = Float::with_val(p, x * &p1) * (2 * k - 1) as u32;
        let b = Float::with_val(p, &p0 * (k - 1) as u32);
        let p2 = (a - b) / k as u32;
        p0 = std::mem::replace(&mut p1, p2);
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = (Float::with_val(p, x * &p1) - &p0) * n as u32;
    let den = Float::with_val(p, x.square_ref()) - 1u32;
    (p1, num / den)
}

impl GaussLegendre {
    /// `n`-point rule with nodes refined by Newton's method at `prec` bits.
    pub fn new(n: usize, prec: u32) -> Self {
        let key = (n, prec);
        if let Some(rule) = CACHE.lock().unwrap().as_ref().and_then(|m| m.get(&key)) {
            return rule.clone();
        }
        let pi = Float::with_val(prec, Constant::Pi);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let eps = Float::with_val(prec, Float::i_exp(1, 8 - prec as i32));
        for i in 1..=n {
            let guess = Float::with_val(prec, &pi * (i as f64 - 0.25)) / (n as f64 + 0.5);
            let mut x = guess.cos();
            for _ in 0..100 {
                let (pn, dpn) = legendre(n, &x);
                let dx = pn / &dpn;
                x -= &dx;
                if dx.abs() < eps {
                    break;
                }
            }
            let (_, dpn) = legendre(n, &x);
            let one_m_x2 = Float::with_val(prec, 1) - Float::with_val(prec, x.square_ref());
            let w = Float::with_val(prec, 2) / (one_m_x2 * dpn.square());
            nodes.push(x);
            weights.push(w);
        }
        let rule = GaussLegendre { nodes, weights };
        CACHE
            .lock()
            .unwrap()
            .get_or_insert_with(HashMap::new)
            .insert(key, rule.clone());
        rule
    }

    /// Nodes mapped to `[a, b]`, with weights scaled accordingly.
    pub fn on_interval(&self, a: &Float, b: &Float) -> impl Iterator<Item = (Float, Float)> + '_ {
        let p = a.prec();
        let half = Float::with_val(p, b - a) / 2u32;
        let mid = Float::with_val(p, a + b) / 2u32;
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| {
            (
                Float::with_val(p, &mid + Float::with_val(p, &half * x)),
                Float::with_val(p, &half * w),
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let p = 200;
        let g = GaussLegendre::new(6, p);
        let a = Float::with_val(p, 0);
        let b = Float::with_val(p, 2);
        // ∫_0^2 x^11 dx = 2^12 / 12
        let s: Float = g
            .on_interval(&a, &b)
            .map(|(x, w)| Float::with_val(p, x.pow_ref_checked(11)) * w)
            .fold(Float::new(p), |acc, t| acc + t);
        let exact = Float::with_val(p, 4096) / 12u32;
        assert!(Float::with_val(p, s - exact).abs() < 1e-50);
    }

    trait PowI {
        fn pow_ref_checked(&self, n: i32) -> Float;
    }

    impl PowI for Float {
        fn pow_ref_checked(&self, n: i32) -> Float {
            use rug::ops::Pow;
            Float::with_val(self.prec(), self.pow(n))
        }
    }
}
