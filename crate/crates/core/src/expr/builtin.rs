//! Named entire functions with certified truncation.
//!
//! * `lacunary(q)`: `sum_{n>=0} q^(-n^2) z^n`, an entire function of order 0
//!   for `q > 1`. Summation runs past the dominant term until the terms drop
//!   below `1e-18` of it with a term ratio of at most `1/2`, so the dropped
//!   tail is below `2e-18` of the largest term.
//! * `canprod(p)`: `prod_{k>=1} (1 + z/k^p)`, an entire function of order
//!   `1/p` for `p > 1`. The first `K` factors are multiplied out, with `K`
//!   chosen so that `|z|/K^p <= 0.05`; the remaining factors enter through
//!   `sum_{j<=10} (-1)^(j+1) z^j zeta_K(p j) / j`, where `zeta_K(s) = sum_{k>K}
//!   k^-s` is evaluated by Euler-Maclaurin. The neglected log-series terms are
//!   bounded by `0.05^11 K` in absolute value, below `1e-10` on the whole
//!   certified disk `|z| <= 0.05 * 65536^p`. Outside that disk the product is
//!   reported as overflowed (its modulus exceeds `1e300` there whenever
//!   `p >= 3`).

use super::ext::Ext;
use num_complex::Complex64;
use std::cell::RefCell;
use std::collections::HashMap;

const TAIL_RATIO: f64 = 0.05;
const TAIL_TERMS: usize = 10;
const MIN_FACTORS: usize = 8;
const MAX_FACTORS: usize = 65536;
const LACUNARY_CUTOFF: f64 = -41.4465; // ln(1e-18)

#[derive(Clone, Debug, PartialEq)]
pub struct LacunarySeries {
    base: f64,
    ln_base: f64,
}

impl LacunarySeries {
    pub fn new(base: f64) -> Result<Self, String> {
        if !(base.is_finite() && base > 1.0) {
            return Err(format!("lacunary base must exceed 1, got {base}"));
        }
        Ok(LacunarySeries {
            base,
            ln_base: base.ln(),
        })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub(crate) fn eval(&self, z: Complex64) -> Option<Ext> {
        let r = z.norm();
        if r == 0.0 {
            return Some(Ext::ONE);
        }
        let lr = r.ln();
        let theta = z.arg();
        let log_term = |n: f64| n * lr - n * n * self.ln_base;
        // dominant index of n ln r - n^2 ln q
        let peak = (lr / (2.0 * self.ln_base)).max(0.0);
        let shift = log_term(peak.floor()).max(log_term(peak.ceil())).max(0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut n = 0usize;
        loop {
            let nf = n as f64;
            let lt = log_term(nf) - shift;
            if lt > -745.0 {
                sum += Complex64::from_polar(lt.exp(), nf * theta);
            }
            let ratio_ln = lr - (2.0 * nf + 1.0) * self.ln_base;
            if nf > peak && lt < LACUNARY_CUTOFF && ratio_ln <= -std::f64::consts::LN_2 {
                break;
            }
            n += 1;
            if n > 1_000_000 {
                return None;
            }
        }
        Ext::from_complex(sum)?.mul(&Ext::exp_of(Complex64::new(shift, 0.0))?)
    }
}

/// Per-thread memo of `k^p` and of the zeta tails; values are computed exactly
/// as without the memo, so results do not depend on cache state.
struct ProductCache {
    exponent_bits: u64,
    powers: Vec<f64>,
    tails: HashMap<usize, [f64; TAIL_TERMS]>,
}

thread_local! {
    static PRODUCT_CACHE: RefCell<Option<ProductCache>> = const { RefCell::new(None) };
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalProduct {
    exponent: f64,
}

impl CanonicalProduct {
    pub fn new(exponent: f64) -> Result<Self, String> {
        if !(exponent.is_finite() && exponent > 1.0) {
            return Err(format!(
                "canonical product exponent must exceed 1, got {exponent}"
            ));
        }
        Ok(CanonicalProduct { exponent })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Radius of the disk on which the truncation bound is certified.
    pub fn certified_radius(&self) -> f64 {
        TAIL_RATIO * (MAX_FACTORS as f64).powf(self.exponent)
    }

    /// `sum_{k>K} k^-s`: sixteen explicit terms, then Euler-Maclaurin from
    /// `K+17` through the fifth derivative.
    fn zeta_tail(&self, k: usize, s: f64) -> f64 {
        let mut acc = 0.0;
        for j in 1..=16 {
            acc += ((k + j) as f64).powf(-s);
        }
        let b = (k + 17) as f64;
        let bs = b.powf(-s);
        let b2 = b * b;
        acc + b * bs / (s - 1.0) + bs / 2.0 + s * bs / (12.0 * b)
            - s * (s + 1.0) * (s + 2.0) * bs / (720.0 * b * b2)
            + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * bs / (30240.0 * b * b2 * b2)
    }

    fn with_cache<R>(&self, k_max: usize, body: impl FnOnce(&[f64], &[f64; TAIL_TERMS]) -> R) -> R {
        let p = self.exponent;
        PRODUCT_CACHE.with(|cell| {
            let mut slot = cell.borrow_mut();
            if slot.as_ref().map(|c| c.exponent_bits) != Some(p.to_bits()) {
                *slot = Some(ProductCache {
                    exponent_bits: p.to_bits(),
                    powers: vec![1.0],
                    tails: HashMap::new(),
                });
            }
            let cache = slot.as_mut().expect("initialized above");
            while cache.powers.len() <= k_max {
                let k = cache.powers.len();
                cache.powers.push((k as f64).powf(p));
            }
            let tails = cache.tails.entry(k_max).or_insert_with(|| {
                let mut t = [0.0; TAIL_TERMS];
                for (j, slot) in t.iter_mut().enumerate() {
                    *slot = self.zeta_tail(k_max, p * (j + 1) as f64);
                }
                t
            });
            body(&cache.powers[..=k_max], tails)
        })
    }

    pub(crate) fn eval(&self, z: Complex64) -> Option<Ext> {
        let p = self.exponent;
        let r = z.norm();
        let needed = (r / TAIL_RATIO).powf(1.0 / p).ceil();
        if !(needed <= MAX_FACTORS as f64) {
            return None;
        }
        let k_max = (needed as usize).max(MIN_FACTORS);
        self.with_cache(k_max, |powers, tails| {
            let one = Complex64::new(1.0, 0.0);
            let mut total = Ext::ONE;
            let mut acc = one;
            for &kp in &powers[1..] {
                let factor = one + z / kp;
                if factor.re == 0.0 && factor.im == 0.0 {
                    return Some(Ext::ZERO);
                }
                acc *= factor;
                let a = acc.re.abs().max(acc.im.abs());
                if !(1e-100..=1e100).contains(&a) {
                    total = total.mul(&Ext::from_complex(acc)?)?;
                    acc = one;
                }
            }
            total = total.mul(&Ext::from_complex(acc)?)?;
            let mut log_tail = Complex64::new(0.0, 0.0);
            let mut zj = one;
            for (j, tail) in tails.iter().enumerate() {
                zj *= z;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                log_tail += zj * (sign * tail / (j + 1) as f64);
            }
            total.mul(&Ext::exp_of(log_tail)?)
        })
    }
}
