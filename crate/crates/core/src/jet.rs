//! Truncated Laurent series in a direction parameter ε.
//!
//! Used to evaluate removable 0/0 terms at exact-integer points: every input
//! coordinate moves as `s_j + v_j ε`, each factor becomes a series in ε and
//! the ε^0 coefficient of the total is the directional limit.

use rug::Float;

use crate::num::CValue;

/// Powers `lo..=hi` of ε; `lo = hi = 0` degenerates to ordinary numbers.
#[derive(Clone, Debug)]
pub struct Jet {
    lo: i32,
    c: Vec<CValue>,
}

/// Shared truncation window.
#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
    pub prec: u32,
}

impl Window {
    pub fn plain(prec: u32) -> Self {
        Window { lo: 0, hi: 0, prec }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_plain(&self) -> bool {
        self.lo == 0 && self.hi == 0
    }

    pub fn zero(&self) -> Jet {
        Jet {
            lo: self.lo,
            c: vec![CValue::zero(self.prec); self.len()],
        }
    }

    pub fn constant(&self, x: CValue) -> Jet {
        let mut j = self.zero();
        j.c[(-self.lo) as usize] = x;
        j
    }

    /// `a + b ε`
    pub fn linear(&self, a: CValue, b: i64) -> Jet {
        let mut j = self.constant(a);
        if self.hi >= 1 && b != 0 {
            j.c[(1 - self.lo) as usize] = CValue::from_i64(b, self.prec);
        }
        j
    }

    /// `a · exp(b ε)` with real `b`.
    pub fn exp_scaled(&self, a: CValue, b: &Float) -> Jet {
        let mut j = self.zero();
        let mut term = a;
        for k in 0..=self.hi {
            j.c[(k - self.lo) as usize] = term.clone();
            let f = Float::with_val(self.prec, b / (k + 1));
            term = term.scale(&f);
        }
        j
    }

    /// `1 / (1 - exp(δ ε)) = -Σ_k B_k δ^{k-1} ε^{k-1} / k!` for real `δ ≠ 0`.
    pub fn recip_one_minus_exp(&self, delta: &Float) -> Jet {
        let mut j = self.zero();
        let mut dpow = Float::with_val(self.prec, 1) / delta;
        for k in 0..=(self.hi + 1).max(0) {
            let pow = k - 1;
            if pow >= self.lo && pow <= self.hi {
                let b = crate::qcore::bernoulli(k as usize) / crate::qcore::factorial(k as u32);
                let v = Float::with_val(self.prec, &dpow * &b);
                j.c[(pow - self.lo) as usize] = CValue::real(-v);
            }
            dpow *= delta;
        }
        j
    }
}

impl Jet {
    pub fn window(&self) -> Window {
        Window {
            lo: self.lo,
            hi: self.lo + self.c.len() as i32 - 1,
            prec: self.c[0].prec(),
        }
    }

    fn hi(&self) -> i32 {
        self.lo + self.c.len() as i32 - 1
    }

    /// Coefficient of ε^k (zero outside the window).
    pub fn coeff(&self, k: i32) -> CValue {
        if k < self.lo || k > self.hi() {
            return CValue::zero(self.c[0].prec());
        }
        self.c[(k - self.lo) as usize].clone()
    }

    /// Largest coefficient modulus (as f64) over the window.
    pub fn magnitude(&self) -> f64 {
        self.c.iter().map(|x| x.abs_f64()).fold(0.0, f64::max)
    }

    pub fn add_assign(&mut self, rhs: &Jet) {
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a += b;
        }
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        let n = self.c.len();
        if n == 1 {
            return Jet {
                lo: self.lo,
                c: vec![&self.c[0] * &rhs.c[0]],
            };
        }
        let w = self.window();
        let mut out = w.zero();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in rhs.c.iter().enumerate() {
                let pow = self.lo + i as i32 + rhs.lo + k as i32;
                if pow < w.lo || pow > w.hi || b.is_zero() {
                    continue;
                }
                let idx = (pow - w.lo) as usize;
                out.c[idx] += a * b;
            }
        }
        out
    }

    pub fn scale(&self, k: &CValue) -> Jet {
        Jet {
            lo: self.lo,
            c: self.c.iter().map(|x| x * k).collect(),
        }
    }

    pub fn scale_real(&self, k: &Float) -> Jet {
        Jet {
            lo: self.lo,
            c: self.c.iter().map(|x| x.scale(k)).collect(),
        }
    }

    /// Reciprocal of a series whose ε^0 coefficient is non-zero and has no negative powers.
    pub fn recip_unit(&self) -> Jet {
        let w = self.window();
        let a0 = self.coeff(0);
        let inv0 = a0.recip();
        let mut out = w.zero();
        let top = w.hi;
        // b_0 = 1/a_0, b_k = -(Σ_{i=1..k} a_i b_{k-i}) / a_0
        let mut b: Vec<CValue> = Vec::with_capacity(top.max(0) as usize + 1);
        for k in 0..=top.max(0) {
            if k == 0 {
                b.push(inv0.clone());
                continue;
            }
            let mut acc = CValue::zero(w.prec);
            for i in 1..=k {
                acc += self.coeff(i) * &b[(k - i) as usize];
            }
            b.push(-(acc * &inv0));
        }
        for (k, v) in b.into_iter().enumerate() {
            let pow = k as i32;
            if pow >= w.lo && pow <= w.hi {
                out.c[(pow - w.lo) as usize] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_series() {
        let w = Window { lo: -2, hi: 2, prec: 160 };
        let delta = Float::with_val(160, 0.5);
        let r = w.recip_one_minus_exp(&delta);
        // 1/(1 - e^{x}) with x = ε/2: -1/x + 1/2 - x/12 + ...
        assert!((r.coeff(-1).re.to_f64() + 2.0).abs() < 1e-30);
        assert!((r.coeff(0).re.to_f64() - 0.5).abs() < 1e-30);
        assert!((r.coeff(1).re.to_f64() + 0.5 / 12.0).abs() < 1e-30);
    }

    #[test]
    fn product_cancels_pole() {
        let w = Window { lo: -2, hi: 2, prec: 128 };
        let eps = w.linear(CValue::zero(128), 1);
        let delta = Float::with_val(128, -1);
        let r = w.recip_one_minus_exp(&delta).mul(&eps);
        // ε/(1 - e^{-ε}) = 1 + ε/2 + ...
        assert!((r.coeff(0).re.to_f64() - 1.0).abs() < 1e-30);
        assert!((r.coeff(1).re.to_f64() - 0.5).abs() < 1e-30);
        assert!(r.coeff(-1).is_zero());
    }
}
