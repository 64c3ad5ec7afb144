//! Argument-principle counting on axis-aligned rectangles.

use super::eval::{eval_node_ext, ExtValue};
use super::{MeroExpr, Node};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

const INITIAL_SIDE_SAMPLES: usize = 16;
const MAX_SIDE_SAMPLES: usize = 4096;
const AGREEMENT: f64 = 0.25;
/// Segments shorter than this fraction of the half-perimeter are not split.
const MIN_SEGMENT: f64 = 1e-9;
const MAX_EVALUATIONS: usize = 4_000_000;

/// Closed axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Rect {
        Rect { x0, x1, y0, y1 }
    }

    /// Square of half-width `h` centered at `c`.
    pub fn square(c: Complex64, h: f64) -> Rect {
        Rect::new(c.re - h, c.re + h, c.im - h, c.im + h)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.x0..=self.x1).contains(&z.re) && (self.y0..=self.y1).contains(&z.im)
    }

    /// Splits across the longer side at fraction `t` of its length.
    pub fn split(&self, t: f64) -> (Rect, Rect) {
        if self.width() >= self.height() {
            let xm = self.x0 + t * self.width();
            (
                Rect::new(self.x0, xm, self.y0, self.y1),
                Rect::new(xm, self.x1, self.y0, self.y1),
            )
        } else {
            let ym = self.y0 + t * self.height();
            (
                Rect::new(self.x0, self.x1, self.y0, ym),
                Rect::new(self.x0, self.x1, ym, self.y1),
            )
        }
    }

    /// Counter-clockwise corners starting at the lower left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x0, self.y0),
            Complex64::new(self.x1, self.y0),
            Complex64::new(self.x1, self.y1),
            Complex64::new(self.x0, self.y1),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum WindingError {
    #[error("zero or pole on or within resolution of the boundary near {0}")]
    BoundarySingularity(Complex64),
    #[error("overflow while evaluating on the boundary near {0}")]
    Overflow(Complex64),
    #[error("winding estimate did not converge within the refinement cap")]
    NoConvergence,
    #[error("degenerate rectangle")]
    Degenerate,
}

fn arg_at<F: Fn(Complex64) -> ExtValue>(
    f: &F,
    z: Complex64,
    evals: &mut usize,
) -> Result<f64, WindingError> {
    *evals += 1;
    if *evals > MAX_EVALUATIONS {
        return Err(WindingError::NoConvergence);
    }
    match f(z) {
        ExtValue::Finite(e) if !e.is_zero() => Ok(e.arg()),
        ExtValue::Finite(_) | ExtValue::Pole => Err(WindingError::BoundarySingularity(z)),
        ExtValue::Overflow => Err(WindingError::Overflow(z)),
    }
}

fn principal(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Total argument change along the segment `a -> b`, splitting until every
/// piece turns by at most `pi/4`.
fn segment_change<F: Fn(Complex64) -> ExtValue>(
    f: &F,
    a: Complex64,
    b: Complex64,
    arg_a: f64,
    arg_b: f64,
    min_len: f64,
    evals: &mut usize,
) -> Result<f64, WindingError> {
    let mut total = 0.0;
    let mut stack = vec![(a, b, arg_a, arg_b)];
    while let Some((p, q, ap, aq)) = stack.pop() {
        let d = principal(aq - ap);
        if d.abs() <= FRAC_PI_4 {
            total += d;
            continue;
        }
        if (q - p).norm() < min_len {
            return Err(WindingError::BoundarySingularity(0.5 * (p + q)));
        }
        let m = 0.5 * (p + q);
        let am = arg_at(f, m, evals)?;
        // second half first so the first half is processed next
        stack.push((m, q, am, aq));
        stack.push((p, m, ap, am));
    }
    Ok(total)
}

fn boundary_turns<F: Fn(Complex64) -> ExtValue>(
    f: &F,
    rect: &Rect,
    per_side: usize,
    evals: &mut usize,
) -> Result<f64, WindingError> {
    let corners = rect.corners();
    let min_len = MIN_SEGMENT * (rect.width() + rect.height());
    let mut total = 0.0;
    for s in 0..4 {
        let (a, b) = (corners[s], corners[(s + 1) % 4]);
        let mut prev = a;
        let mut prev_arg = arg_at(f, a, evals)?;
        for j in 1..=per_side {
            let z = if j == per_side {
                b
            } else {
                a + (b - a) * (j as f64 / per_side as f64)
            };
            let za = arg_at(f, z, evals)?;
            total += segment_change(f, prev, z, prev_arg, za, min_len, evals)?;
            prev = z;
            prev_arg = za;
        }
    }
    Ok(total / (2.0 * PI))
}

/// Winding number of an arbitrary evaluator around `rect`.
pub(crate) fn winding_of<F: Fn(Complex64) -> ExtValue>(
    f: &F,
    rect: &Rect,
) -> Result<i64, WindingError> {
    winding_from(f, rect, INITIAL_SIDE_SAMPLES)
}

/// [`winding_of`] starting from `initial` samples per side.
pub(crate) fn winding_from<F: Fn(Complex64) -> ExtValue>(
    f: &F,
    rect: &Rect,
    initial: usize,
) -> Result<i64, WindingError> {
    if !(rect.width() > 0.0 && rect.height() > 0.0) {
        return Err(WindingError::Degenerate);
    }
    let mut evals = 0usize;
    let mut n = initial;
    let mut prev = boundary_turns(f, rect, n, &mut evals)?;
    while n < MAX_SIDE_SAMPLES {
        n *= 2;
        let cur = boundary_turns(f, rect, n, &mut evals)?;
        if (cur - prev).abs() < AGREEMENT && (cur - cur.round()).abs() < AGREEMENT {
            return Ok(cur.round() as i64);
        }
        prev = cur;
    }
    Err(WindingError::NoConvergence)
}

pub(crate) fn winding_of_node(node: &Node, rect: &Rect) -> Result<i64, WindingError> {
    winding_of(&|z| eval_node_ext(node, z), rect)
}

/// Number of zeros minus number of poles of `f` inside `rect`, with
/// multiplicity.
pub fn winding_count(f: &MeroExpr, rect: &Rect) -> Result<i64, WindingError> {
    winding_of_node(f.root(), rect)
}
