//! Meromorphic function expressions.
//!
//! Functions are closed expression trees over `z` built from arithmetic,
//! integer powers, `exp`, `sin`, `cos`, `tan` and a few named builtins whose
//! infinite series/products are evaluated with a certified truncation. Every
//! divide node (and every negative power) carries the roots of its
//! denominator when that denominator is a polynomial in `z`, which is what
//! makes exact pole catalogs possible.

mod builtin;
mod eval;
mod ext;
mod parse;
mod poles;
mod poly;
mod winding;

use num_complex::Complex64;
use std::fmt;

pub use builtin::{CanonicalProduct, LacunarySeries};
pub use eval::{ExtValue, Value, OVERFLOW_LOG, OVERFLOW_MODULUS, POLE_TOL};
pub use ext::Ext;
pub use parse::{parse, ParseError};
pub use poles::{
    poles_in_disk, poles_in_disk_numeric, Exactness, PoleError, Singularity, SingularityList,
};
pub use poly::{poly_roots, PolyRoots};
pub use winding::{winding_count, Rect, WindingError};

/// Elementary functions callable from the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Tan,
    /// `fatou(w) = w + 1 + exp(-w)`.
    Fatou,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Fatou => "fatou",
        }
    }
}

/// Named entire functions of `z` defined by an infinite series or product.
/// The grammar argument is the parameter, e.g. `lacunary(2)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    Lacunary(LacunarySeries),
    CanonicalProduct(CanonicalProduct),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    /// Numerator, denominator, and the denominator's roots when it is a
    /// polynomial in `z` (`None` otherwise).
    Div(Box<Node>, Box<Node>, Option<PolyRoots>),
    /// Base, exponent, and the base's roots when the exponent is negative
    /// and the base is a polynomial in `z`.
    Pow(Box<Node>, i32, Option<PolyRoots>),
    Neg(Box<Node>),
    Call(Func, Box<Node>),
    Builtin(Builtin),
}

#[allow(clippy::should_implement_trait)]
impl Node {
    pub fn constant(c: Complex64) -> Node {
        Node::Const(c)
    }

    pub fn add(a: Node, b: Node) -> Node {
        Node::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Node, b: Node) -> Node {
        Node::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Node, b: Node) -> Node {
        Node::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Node, b: Node) -> Node {
        let roots = poly::as_polynomial(&b).map(|c| poly_roots(&c));
        Node::Div(Box::new(a), Box::new(b), roots)
    }

    pub fn pow(base: Node, n: i32) -> Node {
        let roots = if n < 0 {
            poly::as_polynomial(&base).map(|c| poly_roots(&c))
        } else {
            None
        };
        Node::Pow(Box::new(base), n, roots)
    }

    pub fn neg(a: Node) -> Node {
        Node::Neg(Box::new(a))
    }

    pub fn call(f: Func, arg: Node) -> Node {
        Node::Call(f, Box::new(arg))
    }

    /// True when the subtree does not depend on `z`.
    pub fn is_constant(&self) -> bool {
        match self {
            Node::Const(_) => true,
            Node::Var | Node::Builtin(_) => false,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b, _) => {
                a.is_constant() && b.is_constant()
            }
            Node::Pow(a, _, _) | Node::Neg(a) | Node::Call(_, a) => a.is_constant(),
        }
    }

    /// Whether the divide node's denominator is a polynomial in `z`.
    pub fn denominator_is_polynomial(&self) -> Option<bool> {
        match self {
            Node::Div(_, _, roots) => Some(roots.is_some()),
            _ => None,
        }
    }
}

/// A meromorphic function given as an expression tree in `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeroExpr {
    root: Node,
}

impl MeroExpr {
    pub fn new(root: Node) -> Self {
        MeroExpr { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// True when the tree contains no pole sources at all (no non-constant
    /// denominators, negative powers, or `tan` of a non-constant argument).
    pub fn is_entire(&self) -> bool {
        !poles::may_have_poles(&self.root)
    }
}

impl std::str::FromStr for MeroExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x.is_sign_negative() && x != 0.0 {
        write!(f, "(-{:?})", -x)
    } else {
        write!(f, "{:?}", x.abs())
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) => {
                if c.im == 0.0 {
                    write_real(f, c.re)
                } else if c.re == 0.0 && c.im == 1.0 {
                    write!(f, "i")
                } else {
                    write!(f, "(")?;
                    write_real(f, c.re)?;
                    write!(f, " + ")?;
                    write_real(f, c.im)?;
                    write!(f, " * i)")
                }
            }
            Node::Var => write!(f, "z"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b, _) => write!(f, "({a} / {b})"),
            Node::Pow(a, n, _) => write!(f, "({a})^{n}"),
            Node::Neg(a) => write!(f, "(-({a}))"),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
            Node::Builtin(Builtin::Lacunary(s)) => write!(f, "lacunary({:?})", s.base()),
            Node::Builtin(Builtin::CanonicalProduct(p)) => {
                write!(f, "canprod({:?})", p.exponent())
            }
        }
    }
}

impl fmt::Display for MeroExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}
