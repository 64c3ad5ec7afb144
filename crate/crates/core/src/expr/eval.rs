use super::ext::Ext;
use super::{Builtin, Func, MeroExpr, Node, PolyRoots};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Distance to a cataloged pole under which evaluation reports a pole.
pub const POLE_TOL: f64 = 1e-12;
/// Moduli above this become [`Value::Overflow`].
pub const OVERFLOW_MODULUS: f64 = 1e300;
/// `ln(1e300)`: the value `log|f|` takes at overflow or pole samples in
/// quadrature.
pub const OVERFLOW_LOG: f64 = 690.7755278982137;

const TINY_DIVISOR_LOG: f64 = -OVERFLOW_LOG;

/// Result of an ordinary evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Finite(Complex64),
    Pole,
    Overflow,
}

impl Value {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Value::Finite(c) => Some(c),
            _ => None,
        }
    }
}

/// Result of an extended-range evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtValue {
    Finite(Ext),
    Pole,
    Overflow,
}

impl ExtValue {
    fn of(e: Option<Ext>) -> ExtValue {
        e.map_or(ExtValue::Overflow, ExtValue::Finite)
    }

    /// `ln|f|`; `+inf` at poles and overflow.
    pub fn log_abs(self) -> f64 {
        match self {
            ExtValue::Finite(e) => e.log_abs(),
            _ => f64::INFINITY,
        }
    }
}

#[derive(Clone, Copy)]
struct Ctx {
    /// Divisors whose `ln|.|` falls below this count as poles.
    tiny_log: f64,
}

fn near_root(roots: &PolyRoots, z: Complex64) -> bool {
    roots.roots.iter().any(|(r, _)| (z - r).norm() <= POLE_TOL)
}

fn tan(w: Complex64) -> ExtValue {
    let k = ((w.re - FRAC_PI_2) / PI).round();
    let pole = Complex64::new(FRAC_PI_2 + k * PI, 0.0);
    if (w - pole).norm() <= POLE_TOL {
        return ExtValue::Pole;
    }
    let (x, y) = (w.re, w.im);
    let (s, c) = x.sin_cos();
    let v = if y.abs() > 20.0 {
        // |tan - sign(y) i| < 4 e^{-40}
        let t = 4.0 * (-2.0 * y.abs()).exp();
        Complex64::new(s * c * t, y.signum())
    } else {
        let (sh, ch) = (y.sinh(), y.cosh());
        let den = c * c + sh * sh;
        if den == 0.0 {
            return ExtValue::Pole;
        }
        Complex64::new(s * c / den, sh * ch / den)
    };
    ExtValue::of(Ext::from_complex(v))
}

fn sin_cos_ext(w: Complex64, func: Func) -> ExtValue {
    if w.im.abs() <= 25.0 {
        let v = if func == Func::Sin { w.sin() } else { w.cos() };
        return ExtValue::of(Ext::from_complex(v));
    }
    let iw = Complex64::new(-w.im, w.re);
    let (Some(a), Some(b)) = (Ext::exp_of(iw), Ext::exp_of(-iw)) else {
        return ExtValue::Overflow;
    };
    // sin w = (e^{iw} - e^{-iw}) / 2i,  cos w = (e^{iw} + e^{-iw}) / 2
    let v = if func == Func::Sin {
        a.sub(&b)
            .and_then(|d| d.mul(&Ext::from_complex(Complex64::new(0.0, -0.5))?))
    } else {
        a.add(&b).and_then(|d| d.mul(&Ext::from_real(0.5)?))
    };
    ExtValue::of(v)
}

fn call(func: Func, arg: ExtValue) -> ExtValue {
    let e = match arg {
        ExtValue::Finite(e) => e,
        other => return other,
    };
    let Some(w) = e.to_complex() else {
        return ExtValue::Overflow;
    };
    match func {
        Func::Exp => ExtValue::of(Ext::exp_of(w)),
        Func::Sin | Func::Cos => sin_cos_ext(w, func),
        Func::Tan => tan(w),
        Func::Fatou => {
            let one = Ext::ONE;
            ExtValue::of(
                e.add(&one)
                    .and_then(|s| s.add(&Ext::exp_of(-w)?)),
            )
        }
    }
}

fn eval_node(node: &Node, z: Complex64, zx: Ext, ctx: Ctx) -> ExtValue {
    use ExtValue::{Finite, Overflow, Pole};
    match node {
        Node::Const(c) => ExtValue::of(Ext::from_complex(*c)),
        Node::Var => Finite(zx),
        Node::Add(a, b) | Node::Sub(a, b) => {
            let (va, vb) = (eval_node(a, z, zx, ctx), eval_node(b, z, zx, ctx));
            match (va, vb) {
                (Pole, _) | (_, Pole) => Pole,
                (Finite(x), Finite(y)) => ExtValue::of(if matches!(node, Node::Add(..)) {
                    x.add(&y)
                } else {
                    x.sub(&y)
                }),
                _ => Overflow,
            }
        }
        Node::Mul(a, b) => match (eval_node(a, z, zx, ctx), eval_node(b, z, zx, ctx)) {
            (Pole, _) | (_, Pole) => Pole,
            (Finite(x), Finite(y)) => ExtValue::of(x.mul(&y)),
            _ => Overflow,
        },
        Node::Div(a, b, roots) => {
            if roots.as_ref().is_some_and(|r| near_root(r, z)) {
                return Pole;
            }
            let num = eval_node(a, z, zx, ctx);
            let den = eval_node(b, z, zx, ctx);
            match (num, den) {
                (Pole, _) => Pole,
                (Overflow, _) => Overflow,
                (Finite(_), Pole | Overflow) => Finite(Ext::ZERO),
                (Finite(x), Finite(y)) => {
                    if y.is_zero() || y.log_abs() < ctx.tiny_log {
                        Pole
                    } else {
                        ExtValue::of(x.div(&y))
                    }
                }
            }
        }
        Node::Pow(a, n, roots) => {
            if *n < 0 && roots.as_ref().is_some_and(|r| near_root(r, z)) {
                return Pole;
            }
            match eval_node(a, z, zx, ctx) {
                _ if *n == 0 => Finite(Ext::ONE),
                Finite(x) => {
                    if *n < 0 && (x.is_zero() || x.log_abs() < ctx.tiny_log) {
                        Pole
                    } else {
                        ExtValue::of(x.powi(*n))
                    }
                }
                _ if *n < 0 => Finite(Ext::ZERO),
                other => other,
            }
        }
        Node::Neg(a) => match eval_node(a, z, zx, ctx) {
            Finite(x) => Finite(x.neg()),
            other => other,
        },
        Node::Call(func, a) => call(*func, eval_node(a, z, zx, ctx)),
        Node::Builtin(Builtin::Lacunary(s)) => ExtValue::of(s.eval(z)),
        Node::Builtin(Builtin::CanonicalProduct(p)) => ExtValue::of(p.eval(z)),
    }
}

/// Extended-range evaluation of a subtree.
pub(crate) fn eval_node_ext(node: &Node, z: Complex64) -> ExtValue {
    let Some(zx) = Ext::from_complex(z) else {
        return ExtValue::Overflow;
    };
    let ctx = Ctx {
        tiny_log: f64::NEG_INFINITY,
    };
    eval_node(node, z, zx, ctx)
}

impl MeroExpr {
    /// Evaluates `f(z)` in ordinary double range.
    ///
    /// Returns [`Value::Pole`] within [`POLE_TOL`] of a cataloged pole or when
    /// a divisor has modulus below `1e-300`, and [`Value::Overflow`] when the
    /// modulus would exceed `1e300`.
    pub fn eval(&self, z: Complex64) -> Value {
        let Some(zx) = Ext::from_complex(z) else {
            return Value::Overflow;
        };
        let ctx = Ctx {
            tiny_log: TINY_DIVISOR_LOG,
        };
        match eval_node(self.root(), z, zx, ctx) {
            ExtValue::Finite(e) => {
                if e.log_abs() > OVERFLOW_LOG {
                    Value::Overflow
                } else {
                    e.to_complex().map_or(Value::Overflow, Value::Finite)
                }
            }
            ExtValue::Pole => Value::Pole,
            ExtValue::Overflow => Value::Overflow,
        }
    }

    /// Evaluates `f(z)` with a 64-bit binary exponent, so `log|f|` stays
    /// meaningful far beyond the double range. Only exact division by zero
    /// and cataloged poles produce [`ExtValue::Pole`].
    pub fn eval_ext(&self, z: Complex64) -> ExtValue {
        eval_node_ext(self.root(), z)
    }

    /// `ln|f(z)|` in extended range; `+inf` at poles and overflow.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        self.eval_ext(z).log_abs()
    }
}
