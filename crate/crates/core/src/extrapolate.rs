//! Polynomial (Richardson/Neville) extrapolation to zero.

use rug::Float;

use crate::num::CValue;

/// Estimate of `lim_{x→0} y(x)` from samples, with the size of the last correction.
#[derive(Clone, Debug)]
pub struct Extrapolated {
    pub value: CValue,
    pub residual: f64,
    pub order: usize,
}

/// Neville's scheme evaluated at `x = 0` using (at most) the last `max_order + 1` samples.
///
/// The residual is the difference between the two highest-order estimates
/// built from the last and the second-to-last window of samples.
pub fn richardson(xs: &[Float], ys: &[CValue], max_order: usize) -> Extrapolated {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let n = xs.len();
    let order = max_order.min(n - 1);
    let at = |end: usize, ord: usize| -> CValue {
        let start = end + 1 - (ord + 1);
        let x = &xs[start..=end];
        let mut t: Vec<CValue> = ys[start..=end].to_vec();
        for k in 1..=ord {
            for i in (k..=ord).rev() {
                // t[i] <- t[i] + (t[i] - t[i-1]) * x_i / (x_{i-k} - x_i)
                let p = x[i].prec();
                let w = Float::with_val(p, &x[i]) / Float::with_val(p, &x[i - k] - &x[i]);
                let diff = &t[i] - &t[i - 1];
                t[i] = &t[i] + diff.scale(&w);
            }
        }
        t[ord].clone()
    };
    let best = at(n - 1, order);
    let residual = if n >= 2 {
        let other = if order + 1 < n {
            at(n - 2, order)
        } else {
            at(n - 1, order.saturating_sub(1))
        };
        (&best - &other).abs_f64()
    } else {
        f64::INFINITY
    };
    Extrapolated {
        value: best,
        residual,
        order,
    }
}
