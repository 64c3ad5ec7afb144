//! Extended-range complex numbers.
//!
//! An [`Ext`] stores `mant * 2^exp` with a 64-bit exponent, so moduli such as
//! `exp(1e6)` or `exp(-1e6)` stay representable. Growth functionals work with
//! `log|f|` directly and would otherwise saturate at the `f64` limits long
//! before the radii of interest.

use num_complex::Complex64;
use std::f64::consts::LN_2;

/// Largest binary exponent accepted before an [`Ext`] is considered overflowed.
const MAX_EXP: i64 = 1 << 60;

/// `mant * 2^exp`, with `max(|re|, |im|)` of the mantissa in `[0.5, 1)` or an
/// exactly zero mantissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ext {
    mant: Complex64,
    exp: i64,
}

fn scale(c: Complex64, e: i64) -> Complex64 {
    // scalbn only accepts i32; clamp keeps under/overflow semantics.
    let e = e.clamp(-4000, 4000) as i32;
    Complex64::new(libm::scalbn(c.re, e), libm::scalbn(c.im, e))
}

impl Ext {
    pub const ZERO: Ext = Ext {
        mant: Complex64 { re: 0.0, im: 0.0 },
        exp: 0,
    };

    pub const ONE: Ext = Ext {
        mant: Complex64 { re: 0.5, im: 0.0 },
        exp: 1,
    };

    /// Normalizes `mant * 2^exp`. Returns `None` for non-finite input or an
    /// exponent outside the supported range.
    fn normalized(mant: Complex64, exp: i64) -> Option<Ext> {
        if !mant.re.is_finite() || !mant.im.is_finite() {
            return None;
        }
        let a = mant.re.abs().max(mant.im.abs());
        if a == 0.0 {
            return Some(Ext::ZERO);
        }
        let (_, e) = libm::frexp(a);
        let exp = exp.checked_add(e as i64)?;
        if exp.abs() > MAX_EXP {
            if exp < 0 {
                return Some(Ext::ZERO);
            }
            return None;
        }
        Some(Ext {
            mant: scale(mant, -(e as i64)),
            exp,
        })
    }

    pub fn from_complex(c: Complex64) -> Option<Ext> {
        Ext::normalized(c, 0)
    }

    pub fn from_real(x: f64) -> Option<Ext> {
        Ext::from_complex(Complex64::new(x, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    /// `ln |self|`, `-inf` for zero.
    pub fn log_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mant.norm().ln() + self.exp as f64 * LN_2
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> f64 {
        self.mant.arg()
    }

    /// Converts to an ordinary complex number, `None` when the modulus does
    /// not fit in an `f64`.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.exp > 1025 {
            return None;
        }
        let c = scale(self.mant, self.exp);
        if c.re.is_finite() && c.im.is_finite() {
            Some(c)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Ext {
        Ext {
            mant: -self.mant,
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Ext) -> Option<Ext> {
        if self.is_zero() {
            return Some(*other);
        }
        if other.is_zero() {
            return Some(*self);
        }
        let top = self.exp.max(other.exp);
        if top - self.exp > 64 {
            return Some(*other);
        }
        if top - other.exp > 64 {
            return Some(*self);
        }
        let m = scale(self.mant, self.exp - top) + scale(other.mant, other.exp - top);
        Ext::normalized(m, top)
    }

    pub fn sub(&self, other: &Ext) -> Option<Ext> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Ext) -> Option<Ext> {
        Ext::normalized(self.mant * other.mant, self.exp.checked_add(other.exp)?)
    }

    /// Division; `None` when the divisor is zero or the result leaves the range.
    pub fn div(&self, other: &Ext) -> Option<Ext> {
        if other.is_zero() {
            return None;
        }
        Ext::normalized(self.mant / other.mant, self.exp.checked_sub(other.exp)?)
    }

    pub fn powi(&self, n: i32) -> Option<Ext> {
        if n == 0 {
            return Some(Ext::ONE);
        }
        let mut base = *self;
        let mut e = n.unsigned_abs();
        let mut acc = Ext::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        if n < 0 {
            Ext::ONE.div(&acc)
        } else {
            Some(acc)
        }
    }

    /// `e^w` for an ordinary complex exponent.
    pub fn exp_of(w: Complex64) -> Option<Ext> {
        if !w.re.is_finite() || !w.im.is_finite() {
            return None;
        }
        let k = (w.re / LN_2).floor();
        if k.abs() > MAX_EXP as f64 {
            return if w.re < 0.0 { Some(Ext::ZERO) } else { None };
        }
        let frac = w.re - k * LN_2;
        let m = Complex64::from_polar(frac.exp(), w.im);
        Ext::normalized(m, k as i64)
    }
}
